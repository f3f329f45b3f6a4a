// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/channel.hpp"
#include "vrvfl/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace vrvfl::channel {

Complex ChannelState::composed() const {
  return epsilon * h_est + std::sqrt(std::max(0.0, 1.0 - epsilon * epsilon)) * h_err;
}

double temporal_correlation(double velocity_mps, double carrier_freq_hz,
                            double feedback_delay_s, double speed_of_light) {
  if (!(velocity_mps >= 0.0)) throw DomainError("temporal_correlation: negative velocity");
  if (!(carrier_freq_hz > 0.0)) throw DomainError("temporal_correlation: carrier frequency must be positive");
  if (!(feedback_delay_s >= 0.0)) throw DomainError("temporal_correlation: negative feedback delay");
  const double doppler_hz = velocity_mps * carrier_freq_hz / speed_of_light;
  return bessel_j0(2.0 * std::numbers::pi * doppler_hz * feedback_delay_s);
}

double PathlossModel::pathloss_db(double distance_m, double carrier_freq_hz) const {
  const double d = std::max(distance_m, min_distance_m);
  return slope_db * std::log10(d) + intercept_db +
         freq_slope_db * std::log10(carrier_freq_hz / 1e9 / 5.0);
}

double large_scale_gain(double distance_m, double carrier_freq_hz, double shadowing_db,
                        const PathlossModel& model) {
  if (!(carrier_freq_hz > 0.0)) throw DomainError("large_scale_gain: carrier frequency must be positive");
  if (!std::isfinite(distance_m)) throw DomainError("large_scale_gain: non-finite distance");
  const double loss_db = model.pathloss_db(distance_m, carrier_freq_hz) + shadowing_db;
  return std::pow(10.0, -loss_db / 10.0);
}

Complex sample_cn01(Rng& rng) {
  std::normal_distribution<double> half(0.0, std::numbers::sqrt2 / 2.0);
  const double re = half(rng);
  const double im = half(rng);
  return {re, im};
}

FadingPair sample_fading_pair(Rng& rng) {
  const Complex est = sample_cn01(rng);
  const Complex err = sample_cn01(rng);
  return {est, err};
}

double sinr(double tx_power_w, const ChannelState& state, double noise_density_w_hz,
            double bandwidth_hz) {
  if (!(tx_power_w >= 0.0) || !(noise_density_w_hz >= 0.0) || !(bandwidth_hz >= 0.0)) {
    throw DomainError("sinr: physical quantities must be non-negative");
  }
  const double eps2 = state.epsilon * state.epsilon;
  const double pl = tx_power_w * state.large_scale_gain;
  const double signal = pl * eps2 * state.h_est_power();
  const double denom = bandwidth_hz * noise_density_w_hz + pl * (1.0 - eps2) * state.h_err_power();
  if (denom <= 0.0) throw DomainError("sinr: zero noise-plus-interference power");
  return signal / denom;
}

double capacity(double bandwidth_hz, double sinr_value) {
  if (!(sinr_value >= 0.0)) throw DomainError("capacity: negative sinr");
  if (!(bandwidth_hz > 0.0)) throw DomainError("capacity: bandwidth must be positive");
  return bandwidth_hz * std::log2(1.0 + sinr_value);
}

double perfect_csi_capacity(double tx_power_w, const ChannelState& state,
                            double noise_density_w_hz, double bandwidth_hz) {
  ChannelState no_err = state;
  no_err.h_err = {0.0, 0.0};
  return capacity(bandwidth_hz, sinr(tx_power_w, no_err, noise_density_w_hz, bandwidth_hz));
}

OutageCoefficients outage_coefficients(double rate_bps, double bandwidth_hz, double epsilon,
                                       double tx_power_w, double large_scale_gain,
                                       double noise_density_w_hz) {
  const double eps2 = epsilon * epsilon;
  if (eps2 == 0.0) throw DegenerateChannelError("outage_coefficients: epsilon == 0");
  if (!(eps2 <= 1.0)) throw DomainError("outage_coefficients: |epsilon| > 1");
  if (!(rate_bps >= 0.0)) throw DomainError("outage_coefficients: negative rate");
  if (!(bandwidth_hz > 0.0) || !(tx_power_w > 0.0) || !(large_scale_gain > 0.0)) {
    throw DomainError("outage_coefficients: bandwidth, power and gain must be positive");
  }
  // 2^(R/W) - 1 without cancellation for small R/W
  const double excess = std::expm1(rate_bps / bandwidth_hz * std::numbers::ln2);
  return {excess * (1.0 - eps2) / eps2,
          excess * bandwidth_hz * noise_density_w_hz / (tx_power_w * large_scale_gain * eps2)};
}

double success_probability(const OutageCoefficients& coeffs, double h_est_power) {
  if (!(h_est_power >= 0.0)) throw DomainError("success_probability: negative |h_est|^2");
  const double margin = h_est_power - coeffs.b;
  if (!(margin > 0.0)) return 0.0;
  if (coeffs.a == 0.0) return 1.0;
  return -std::expm1(-margin / coeffs.a);
}

bool transmission_succeeds(const OutageCoefficients& coeffs, double h_est_power,
                           double h_err_power) {
  const double margin = h_est_power - coeffs.b;
  if (!(margin > 0.0)) return false;
  if (coeffs.a == 0.0) return true;
  return h_err_power <= margin / coeffs.a;
}

} // namespace vrvfl::channel
