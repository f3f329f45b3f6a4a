// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/error.hpp"
#include "vrvfl/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vrvfl::scheduler {

std::optional<std::size_t> RoundPlan::index_of(VehicleId id) const {
  const auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids.begin());
}

namespace {

RoundPlan make_plan(const RoundContext& ctx, std::vector<double> u, std::vector<double> rates) {
  RoundPlan plan;
  plan.dropped = ctx.dropped;
  plan.total_data = ctx.total_data;
  if (ctx.size() == 0) {
    plan.skipped = true;
    plan.objective_value = std::numeric_limits<double>::quiet_NaN();
    return plan;
  }
  plan.objective_value = objective(u, rates, ctx);
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    const Candidate& v = ctx.vehicles[i];
    plan.ids.push_back(v.id);
    plan.data_sizes.push_back(v.data_size);
    plan.success_probs.push_back(v.success_probability(rates[i]));
  }
  plan.inclusion_probs = std::move(u);
  plan.rates = std::move(rates);
  return plan;
}

double relative_gain(double before, double after) {
  if (!std::isfinite(before)) return std::isfinite(after) ? 1.0 : 0.0;
  return std::max(0.0, (before - after) / std::max(std::abs(before), 1e-300));
}

} // namespace

BcdResult bcd_solve(const RoundContext& ctx, const BcdOptions& options) {
  BcdResult result;
  const std::size_t n = ctx.size();
  if (n == 0) {
    result.plan = make_plan(ctx, {}, {});
    result.report.converged = true;
    return result;
  }

  const double uniform = std::clamp(ctx.resource_blocks / static_cast<double>(n), ctx.u_min, 1.0);
  std::vector<double> u(n, uniform);
  std::vector<double> rates(n);
  for (std::size_t i = 0; i < n; ++i) rates[i] = ctx.vehicles[i].bounds.r_min;
  double current = objective(u, rates, ctx);
  result.report.objective_trace.push_back(current);

  for (int it = 0; it < options.max_outer_iter; ++it) {
    const double before = current;

    BlockResult r_step = solve_rate_block(u, ctx, options.block_tol, options.block_max_iter);
    if (r_step.objective <= current) {
      rates = std::move(r_step.values);
      current = r_step.objective;
    }
    BlockResult u_step = solve_inclusion_block(rates, ctx, options.block_tol, options.block_max_iter);
    if (u_step.objective <= current) {
      u = std::move(u_step.values);
      current = u_step.objective;
    }

    result.report.objective_trace.push_back(current);
    result.report.iterations = it + 1;
    if (relative_gain(before, current) < options.tol) {
      result.report.converged = true;
      break;
    }
  }

  const BlockResult r_probe = solve_rate_block(u, ctx, options.block_tol, options.block_max_iter);
  const BlockResult u_probe = solve_inclusion_block(rates, ctx, options.block_tol, options.block_max_iter);
  result.report.block_residuals = {relative_gain(current, r_probe.objective),
                                   relative_gain(current, u_probe.objective)};

  result.plan = make_plan(ctx, std::move(u), std::move(rates));
  return result;
}

BcdResult bcd_solve(const RoundContext& ctx, double alpha, const BcdOptions& options) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("optimization.alpha must lie in [0, 1]");
  RoundContext copy = ctx;
  copy.alpha = alpha;
  return bcd_solve(copy, options);
}

RoundPlan scheme1_baseline(const RoundContext& ctx, const BcdOptions& options) {
  const std::size_t n = ctx.size();
  if (n == 0) return make_plan(ctx, {}, {});
  const double uniform = std::min(1.0, ctx.resource_blocks / static_cast<double>(n));
  std::vector<double> u(n, std::max(uniform, ctx.u_min));
  RoundContext rate_ctx = ctx;
  rate_ctx.alpha = 1.0;
  BlockResult rates = solve_rate_block(u, rate_ctx, options.block_tol, options.block_max_iter);
  return make_plan(ctx, std::move(u), std::move(rates.values));
}

RoundPlan scheme2_baseline(const RoundContext& ctx, const BcdOptions& options) {
  return bcd_solve(ctx, 1.0, options).plan;
}

} // namespace vrvfl::scheduler
