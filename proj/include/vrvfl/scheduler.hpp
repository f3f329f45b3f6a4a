// SPDX-License-Identifier: Apache-2.0
//
// Per-round joint client-inclusion / rate selection.
//
//   minimize  sum_v alpha D_v / (D u_v P_v(R_v))  +  (1 - alpha) max_v u_v exp(-(2^(R_v/W_v) - 1))
//   s.t.      sum_v u_v <= N,  u_min <= u_v <= 1,  R_min,v <= R_v <= R_max,v
//
// over the feasible vehicles (R_min,v < R_max,v). The problem is convex in u
// for fixed R and in R for fixed u; bcd_solve alternates exact block solves.
// Both blocks use the epigraph form of the max term with level s = exp(sigma):
// for a fixed sigma each block separates per vehicle (rates: lower bound of
// the admissible interval; inclusion: water-filling under the budget N), and
// the outer problem in sigma is unimodal, so it is solved by golden-section
// search.
#pragma once

#include "vrvfl/channel.hpp"
#include "vrvfl/mobility.hpp"
#include "vrvfl/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace vrvfl::scheduler {

using mobility::VehicleId;

struct SchedulerParams {
  double total_bandwidth_hz = 10e6;
  int resource_blocks = 20;         // N
  double tx_power_w = 0.19952623149688797; // 23 dBm
  double noise_density_w_hz = 3.981071705534972e-21; // -174 dBm/Hz
  double model_bits = 4.38e6;       // Z
  double round_time_cap_s = 60.0;
  double u_min = 0.05;
  double alpha = 0.4;
  double block_tol = 1e-10;         // golden-section bracket width on sigma
  int block_max_iter = 200;
  double bcd_tol = 1e-6;            // relative objective decrease
  int bcd_max_iter = 50;

  double bandwidth_per_vehicle() const { return total_bandwidth_hz / resource_blocks; }
};

struct RateBounds {
  double r_min = 0.0;
  double r_max = 0.0;
  bool feasible() const { return r_min < r_max; }
};

/// One vehicle as seen by the scheduler in a given round.
struct Candidate {
  VehicleId id = 0;
  double data_size = 0.0;   // D_v
  double h_est_power = 0.0; // |h_est|^2
  double epsilon = 1.0;
  double large_scale_gain = 1.0;
  double sojourn_s = 0.0;   // remaining time in coverage
  double bandwidth_hz = 0.0;
  double tx_power_w = 0.0;
  double noise_density_w_hz = 0.0;
  RateBounds bounds;

  channel::OutageCoefficients coefficients(double rate) const;
  double success_probability(double rate) const;
};

/// R_max: perfect-CSI capacity W log2(1 + P L eps^2 |h_est|^2 / (W N0)).
/// R_min: Z / min(T_cap, sojourn). A non-positive sojourn yields r_min = +inf.
RateBounds rate_bounds(double h_est_power, double epsilon, double large_scale_gain,
                       double sojourn_s, const SchedulerParams& params);
RateBounds rate_bounds(const mobility::VehicleState& vehicle, const mobility::RoadGeometry& geometry,
                       const SchedulerParams& params);

Candidate make_candidate(const mobility::VehicleState& vehicle, const mobility::RoadGeometry& geometry,
                         const SchedulerParams& params, double data_size);

/// Ids with r_min < r_max, ascending.
std::vector<VehicleId> compute_feasible_set(std::span<const Candidate> candidates);

struct RoundContext {
  std::vector<Candidate> vehicles; // feasible only, id ascending
  double total_data = 0.0;         // D
  double alpha = 0.4;
  double u_min = 0.05;
  double resource_blocks = 20.0;   // N
  std::vector<VehicleId> dropped;  // removed so that |V| u_min <= N

  std::size_t size() const { return vehicles.size(); }
};

/// Filters to the feasible set, sorts by id and, if |V| u_min > N, drops the
/// vehicles with the lowest R_max until the inclusion box is feasible. D is
/// the feasible total unless total_data_override is given.
RoundContext build_context(std::span<const Candidate> candidates, const SchedulerParams& params,
                           double alpha, std::optional<double> total_data_override = std::nullopt);

// ---- objective -----------------------------------------------------------

/// u exp(-(2^(R/W) - 1)), the per-vehicle round-time pressure.
double rate_pressure(double u, double rate, double bandwidth_hz);

struct ObjectiveTerms {
  double convergence = 0.0;   // sum alpha D_v / (D u_v P_v), +inf if some P_v == 0
  double round_pressure = 0.0; // (1 - alpha) max_v u_v exp(...)
  double total() const { return convergence + round_pressure; }
};

ObjectiveTerms objective_terms(std::span<const double> u, std::span<const double> rates,
                               const RoundContext& ctx);
double objective(std::span<const double> u, std::span<const double> rates, const RoundContext& ctx);

// ---- block solvers -------------------------------------------------------

struct BlockResult {
  std::vector<double> values;
  double objective = 0.0;
  int iterations = 0;
  bool converged = true;
};

BlockResult solve_rate_block(std::span<const double> u, const RoundContext& ctx,
                             double tol = 1e-10, int max_iter = 200);
BlockResult solve_inclusion_block(std::span<const double> rates, const RoundContext& ctx,
                                  double tol = 1e-10, int max_iter = 200);

/// argmin sum_v c_v / u_v  s.t. lo <= u_v <= hi_v, sum u_v <= budget.
/// c_v == 0 pins u_v to lo, c_v == inf pins it to hi_v. Requires sum lo <= budget.
std::vector<double> water_fill(std::span<const double> c, double lo, std::span<const double> hi,
                               double budget);

// ---- BCD and plans ---------------------------------------------------------

struct RoundPlan {
  std::vector<VehicleId> ids;            // feasible set, ascending
  std::vector<double> inclusion_probs;   // u
  std::vector<double> rates;             // R, bit/s
  std::vector<double> success_probs;     // P(A_v | h_est) at the chosen rate
  std::vector<double> data_sizes;
  std::vector<VehicleId> selected;       // realized participants
  std::vector<VehicleId> dropped;
  double total_data = 0.0;
  double round_time = 0.0;
  double objective_value = 0.0;
  bool skipped = false;                  // empty feasible set

  std::optional<std::size_t> index_of(VehicleId id) const;
};

struct SolverReport {
  int iterations = 0;
  std::vector<double> objective_trace;   // starts with the initial point
  bool converged = false;
  // relative objective gain of one more exact solve of each block (rate,
  // inclusion) from the returned point; ~0 at a partially optimal point
  std::vector<double> block_residuals;
};

struct BcdResult {
  RoundPlan plan;
  SolverReport report;
};

struct BcdOptions {
  double tol = 1e-6;
  int max_outer_iter = 50;
  double block_tol = 1e-10;
  int block_max_iter = 200;
};

BcdResult bcd_solve(const RoundContext& ctx, const BcdOptions& options = {});
BcdResult bcd_solve(const RoundContext& ctx, double alpha, const BcdOptions& options = {});

/// Uniform inclusion min(1, N/|V|) and one rate-block solve with the
/// convergence-only objective (alpha = 1).
RoundPlan scheme1_baseline(const RoundContext& ctx, const BcdOptions& options = {});
/// bcd_solve with alpha = 1.
RoundPlan scheme2_baseline(const RoundContext& ctx, const BcdOptions& options = {});

struct Selection {
  std::vector<VehicleId> selected; // ascending
  bool trimmed = false;
  std::size_t drawn = 0;           // Bernoulli successes before trimming
};

/// Independent Bernoulli(u_v) per feasible vehicle in id order; if more than
/// N are drawn, keeps the N largest u_v P_v (lower id on ties).
Selection realize_selection(const RoundPlan& plan, Rng& rng, int resource_blocks);

/// Z / min rate over the successful set; T_cap if it is empty.
double round_time(std::span<const double> successful_rates, double model_bits, double round_time_cap_s);

// ---- convexity certificate for the rate block ---------------------------------

/// Quantities of the rate-block convexity argument for one vehicle, in terms
/// of f = 2^(R/W):  Theta(f) = alpha D_v / (u (1 - exp(xi1) exp(-xi3/(f-1)))),
/// lambda(f) = f/(f^2-1) (1+E)/(1-E) - 1/xi3 with E = exp(xi1 - xi3/(f-1)).
/// Theta is convex in R wherever lambda(f) > 0, for 1 < f < 1 + xi3/xi1.
struct ConvexityTerms {
  double xi1 = 0.0; // N0 W / (P L (1 - eps^2))
  double xi3 = 0.0; // |h_est|^2 eps^2 / (1 - eps^2)
  double f_upper() const { return 1.0 + xi3 / xi1; }
};

ConvexityTerms convexity_terms(const Candidate& v);
double lambda(double f, const ConvexityTerms& terms);
double theta(double f, const ConvexityTerms& terms, double alpha, double data_size, double u);

// ---- instance dump -----------------------------------------------------------

void write_instance(std::ostream& os, const RoundContext& ctx);
RoundContext read_instance(std::istream& is);

} // namespace vrvfl::scheduler
