// SPDX-License-Identifier: Apache-2.0
//
// Gauss-Markov fading under imperfect CSI. The true fast-fading coefficient
// is h = eps * h_est + sqrt(1 - eps^2) * h_err, with h_est (what the receiver
// knows) and h_err (estimation error, never observed) independent CN(0, 1).
// All functions are pure; randomness comes only from the Rng passed in.
#pragma once

#include "vrvfl/rng.hpp"

#include <complex>

namespace vrvfl::channel {

using Complex = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;

struct ChannelState {
  Complex h_est{1.0, 0.0};
  Complex h_err{0.0, 0.0};
  double epsilon = 1.0;          // temporal correlation, in [-1, 1]
  double large_scale_gain = 1.0; // linear pathloss * shadowing, > 0

  double h_est_power() const { return std::norm(h_est); }
  double h_err_power() const { return std::norm(h_err); }
  /// True fading coefficient seen by the transmission.
  Complex composed() const;
};

struct OutageCoefficients {
  double a = 0.0; // estimation-error power relative to the useful signal
  double b = 0.0; // noise power relative to the useful signal
};

struct FadingPair {
  Complex h_est;
  Complex h_err;
};

/// Zeroth-order Bessel function of the first kind. Power series for
/// |x| <= 12, Hankel asymptotic expansion beyond. Absolute error < 1e-10
/// on |x| <= 20.
double bessel_j0(double x);

/// J0(2 pi f_D T) with Doppler f_D = v f_c / c.
double temporal_correlation(double velocity_mps, double carrier_freq_hz,
                            double feedback_delay_s,
                            double speed_of_light = kSpeedOfLight);

struct PathlossModel {
  double slope_db = 22.7;     // per decade of distance
  double intercept_db = 41.0;
  double freq_slope_db = 20.0; // per decade of f_GHz / 5
  double min_distance_m = 1.0;

  double pathloss_db(double distance_m, double carrier_freq_hz) const;
};

/// Linear large-scale gain 10^(-(PL_dB + shadowing_db) / 10). Distances below
/// model.min_distance_m are clamped.
double large_scale_gain(double distance_m, double carrier_freq_hz, double shadowing_db,
                        const PathlossModel& model = {});

/// Two independent circular Gaussians with unit second moment.
FadingPair sample_fading_pair(Rng& rng);
Complex sample_cn01(Rng& rng);

/// (P L eps^2 |h_est|^2) / (W N0 + P L (1 - eps^2) |h_err|^2).
double sinr(double tx_power_w, const ChannelState& state, double noise_density_w_hz,
            double bandwidth_hz);

/// W log2(1 + sinr).
double capacity(double bandwidth_hz, double sinr_value);

/// Shannon bound with the estimation error switched off (|h_err|^2 = 0); this
/// is the largest rate the scheduler may pick.
double perfect_csi_capacity(double tx_power_w, const ChannelState& state,
                            double noise_density_w_hz, double bandwidth_hz);

OutageCoefficients outage_coefficients(double rate_bps, double bandwidth_hz, double epsilon,
                                       double tx_power_w, double large_scale_gain,
                                       double noise_density_w_hz);

/// P(success | h_est): the exponential CDF of |h_err|^2 evaluated at
/// (|h_est|^2 - b) / a, zero when |h_est|^2 <= b. For a == 0 the result is the
/// step 1{|h_est|^2 > b}.
double success_probability(const OutageCoefficients& coeffs, double h_est_power);

/// Realized outage event: |h_err|^2 <= (|h_est|^2 - b) / a.
bool transmission_succeeds(const OutageCoefficients& coeffs, double h_est_power,
                           double h_err_power);

} // namespace vrvfl::channel
