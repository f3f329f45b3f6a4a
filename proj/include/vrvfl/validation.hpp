// SPDX-License-Identifier: Apache-2.0
//
// Independent oracles and the acceptance / property suites built on them.
// The oracles recompute every quantity from first principles and never call
// the library routine they are used to check.
#pragma once

#include "vrvfl/config.hpp"
#include "vrvfl/fl_core.hpp"
#include "vrvfl/scheduler.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace vrvfl::validation {

// ---- oracles -------------------------------------------------------------------

/// J0 by its power series in long double with compensated summation.
long double bessel_j0_reference(long double x);

/// Fraction of n draws |h_err|^2 ~ Exp(1) with |h_est|^2 - b >= a |h_err|^2.
double monte_carlo_success(double a, double b, double h_est_power, std::size_t n, Rng& rng);

/// Success probability, objective and rate bound recomputed from the raw
/// channel parameters.
double reference_success_probability(double rate, const scheduler::Candidate& v);
double reference_objective(std::span<const double> u, std::span<const double> rates,
                           const scheduler::RoundContext& ctx);

/// Theta_v and Lambda from their defining expressions in f = 2^(R/W).
double reference_theta(double rate, const scheduler::Candidate& v, double alpha, double total_data, double u);
double reference_lambda(double f, const scheduler::Candidate& v);

/// Exact minimum of the objective over a uniform grid of `points` values per
/// variable (u in [u_min, 1], R in [R_min, R_max]) for a two-vehicle context,
/// honouring u1 + u2 <= N.
double grid_minimum_two_vehicle(const scheduler::RoundContext& ctx, int points);
/// Plain nested-loop version of the same minimum, for cross-checking on small grids.
double grid_minimum_two_vehicle_naive(const scheduler::RoundContext& ctx, int points);

/// Cross-entropy plus (mu/2)||w - ref||^2 written out directly.
double reference_loss(const fl::ModelWeights& w, const fl::Partition& data, int num_classes,
                      const fl::ModelWeights* prox_ref, double mu);
std::vector<double> finite_difference_gradient(const fl::ModelWeights& w, const fl::Partition& data,
                                               int num_classes, const fl::ModelWeights* prox_ref,
                                               double mu, double h = 1e-6);

// ---- random instances ------------------------------------------------------------

/// A feasible candidate drawn over the ranges seen on the highway.
scheduler::Candidate random_candidate(Rng& rng, scheduler::VehicleId id, const scheduler::SchedulerParams& params);
scheduler::RoundContext random_context(Rng& rng, std::size_t vehicles, double alpha, double u_min,
                                       int resource_blocks);

// ---- suites --------------------------------------------------------------------------

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AppendixReport {
  int instances = 0;
  int theta_nonconvex = 0;     // instances with a second difference below -1e-6 scale
  int lambda_nonpositive = 0;  // instances with Lambda <= 0 somewhere
  int lambda_increasing = 0;   // instances where Lambda increases somewhere
  double worst_lambda_rise = 0.0; // largest relative increase between grid neighbours
};

AppendixReport appendix_check(std::uint64_t seed, int instances, int grid_points);

/// The desk-scale setup of the end-to-end trend check.
SimConfig desk_config();

CriterionResult criterion_outage(std::uint64_t seed);
CriterionResult criterion_channel_statistics(std::uint64_t seed);
CriterionResult criterion_appendix(std::uint64_t seed);
CriterionResult criterion_bcd_optimality(std::uint64_t seed);
CriterionResult criterion_block_limits(std::uint64_t seed);
CriterionResult criterion_unbiasedness(std::uint64_t seed);
CriterionResult criterion_end_to_end(const SimConfig& cfg);
CriterionResult criterion_determinism(const SimConfig& cfg, const std::filesystem::path& scratch);
CriterionResult criterion_gradient(std::uint64_t seed);

inline constexpr int kCriterionCount = 9;

/// Runs acceptance criterion `id` (1..9) with its fixed seed and setup.
CriterionResult run_criterion(int id, const std::filesystem::path& scratch);

/// Property suites of `vrvfl validate`: the mathematically true statements
/// (criterion 3 reduced to Theta convexity and Lambda positivity, no
/// end-to-end trend run, a short determinism run).
std::vector<CriterionResult> run_property_suites(const std::filesystem::path& scratch);

std::string format_result(const CriterionResult& r);

} // namespace vrvfl::validation
