// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/error.hpp"
#include "vrvfl/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace vrvfl::scheduler {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ScalarMin {
  double x = 0.0;
  double fx = kInf;
  int iterations = 0;
  bool converged = false;
};

// Golden-section search for a unimodal function on [lo, hi]; +inf values are
// allowed (they only ever occur at the infeasible end of the bracket).
template <class F>
ScalarMin golden_section(F&& fn, double lo, double hi, double tol, int max_iter) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  ScalarMin out;
  while (out.iterations < max_iter) {
    if (b - a <= tol * std::max(1.0, std::abs(a) + std::abs(b))) {
      out.converged = true;
      break;
    }
    ++out.iterations;
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  out.x = fc <= fd ? c : d;
  out.fx = std::min(fc, fd);
  for (double edge : {lo, hi}) {
    const double fe = fn(edge);
    if (fe < out.fx) {
      out.x = edge;
      out.fx = fe;
    }
  }
  return out;
}

double excess_of(double rate, double bandwidth) {
  return std::expm1(rate / bandwidth * std::numbers::ln2);
}

double rate_of(double excess, double bandwidth) {
  return bandwidth * std::log1p(excess) / std::numbers::ln2;
}

void check_sizes(std::size_t got, const RoundContext& ctx, const char* what) {
  if (got != ctx.size()) throw DomainError(std::string(what) + ": vector length does not match the feasible set");
}

} // namespace

std::vector<double> water_fill(std::span<const double> c, double lo, std::span<const double> hi,
                               double budget) {
  const std::size_t n = c.size();
  if (hi.size() != n) throw DomainError("water_fill: length mismatch");
  std::vector<double> u(n);
  double at_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = c[i] > 0.0 ? std::max(lo, hi[i]) : lo;
    at_max += u[i];
  }
  if (at_max <= budget) return u;

  struct Event {
    double tau;
    std::size_t idx;
    bool enter;
  };
  std::vector<Event> events;
  double base = 0.0;
  double slope = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = std::max(lo, hi[i]);
    if (c[i] > 0.0 && std::isfinite(c[i])) {
      const double root = std::sqrt(c[i]);
      events.push_back({lo / root, i, true});
      events.push_back({h / root, i, false});
      base += lo;
    } else {
      base += c[i] > 0.0 ? h : lo;
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return a.tau != b.tau ? a.tau < b.tau : (a.enter && !b.enter);
  });
  double tau = kInf;
  for (const Event& e : events) {
    const double s = base + slope * e.tau;
    if (s >= budget) {
      tau = slope > 0.0 ? (budget - base) / slope : e.tau;
      break;
    }
    const double root = std::sqrt(c[e.idx]);
    if (e.enter) {
      base -= lo;
      slope += root;
    } else {
      base += std::max(lo, hi[e.idx]);
      slope -= root;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double h = std::max(lo, hi[i]);
    if (c[i] > 0.0 && std::isfinite(c[i])) {
      u[i] = std::clamp(tau * std::sqrt(c[i]), lo, h);
    }
  }
  return u;
}

BlockResult solve_rate_block(std::span<const double> u, const RoundContext& ctx, double tol,
                             int max_iter) {
  check_sizes(u.size(), ctx, "solve_rate_block");
  const std::size_t n = ctx.size();
  BlockResult out;
  out.values.resize(n);
  if (n == 0) return out;

  if (ctx.alpha >= 1.0) {
    // convergence term alone is increasing in every rate
    for (std::size_t i = 0; i < n; ++i) out.values[i] = ctx.vehicles[i].bounds.r_min;
    out.objective = objective(u, out.values, ctx);
    return out;
  }
  if (ctx.alpha <= 0.0) {
    for (std::size_t i = 0; i < n; ++i) out.values[i] = ctx.vehicles[i].bounds.r_max;
    out.objective = objective(u, out.values, ctx);
    return out;
  }

  std::vector<double> x_min(n), x_max(n), log_u(n), weight(n);
  double sigma_lo = -kInf;
  double sigma_hi = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const Candidate& v = ctx.vehicles[i];
    x_min[i] = excess_of(v.bounds.r_min, v.bandwidth_hz);
    x_max[i] = excess_of(v.bounds.r_max, v.bandwidth_hz);
    log_u[i] = std::log(u[i]);
    weight[i] = ctx.alpha * v.data_size / (ctx.total_data * u[i]);
    sigma_lo = std::max(sigma_lo, log_u[i] - x_max[i]);
    sigma_hi = std::max(sigma_hi, log_u[i] - x_min[i]);
  }

  auto rates_at = [&](double sigma, std::vector<double>& rates) {
    for (std::size_t i = 0; i < n; ++i) {
      const double x = std::min(x_max[i], std::max(x_min[i], log_u[i] - sigma));
      rates[i] = std::clamp(rate_of(x, ctx.vehicles[i].bandwidth_hz),
                            ctx.vehicles[i].bounds.r_min, ctx.vehicles[i].bounds.r_max);
    }
  };
  std::vector<double> scratch(n);
  auto level_objective = [&](double sigma) {
    rates_at(sigma, scratch);
    double total = (1.0 - ctx.alpha) * std::exp(sigma);
    for (std::size_t i = 0; i < n; ++i) {
      const double p = ctx.vehicles[i].success_probability(scratch[i]);
      if (!(p > 0.0)) return kInf;
      total += weight[i] / p;
    }
    return total;
  };

  const ScalarMin best = golden_section(level_objective, sigma_lo, sigma_hi, tol, max_iter);
  rates_at(best.x, out.values);
  out.objective = objective(u, out.values, ctx);
  out.iterations = best.iterations;
  out.converged = best.converged;
  return out;
}

BlockResult solve_inclusion_block(std::span<const double> rates, const RoundContext& ctx, double tol,
                                  int max_iter) {
  check_sizes(rates.size(), ctx, "solve_inclusion_block");
  const std::size_t n = ctx.size();
  BlockResult out;
  out.values.assign(n, ctx.u_min);
  if (n == 0) return out;
  if (static_cast<double>(n) * ctx.u_min > ctx.resource_blocks + 1e-12) {
    throw DomainError("solve_inclusion_block: |V| u_min exceeds the resource-block budget");
  }

  if (ctx.alpha <= 0.0) {
    // only the max term remains and it is increasing in every u_v
    out.objective = objective(out.values, rates, ctx);
    return out;
  }

  std::vector<double> x(n), c(n);
  double sigma_lo = -kInf;
  double sigma_hi = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const Candidate& v = ctx.vehicles[i];
    x[i] = excess_of(rates[i], v.bandwidth_hz);
    const double p = v.success_probability(rates[i]);
    c[i] = p > 0.0 ? ctx.alpha * v.data_size / (ctx.total_data * p) : kInf;
    sigma_lo = std::max(sigma_lo, std::log(ctx.u_min) - x[i]);
    sigma_hi = std::max(sigma_hi, -x[i]);
  }

  std::vector<double> hi(n, 1.0);
  if (ctx.alpha >= 1.0) {
    out.values = water_fill(c, ctx.u_min, hi, ctx.resource_blocks);
    out.objective = objective(out.values, rates, ctx);
    return out;
  }

  auto allocation_at = [&](double sigma) {
    for (std::size_t i = 0; i < n; ++i) hi[i] = std::min(1.0, std::exp(sigma + x[i]));
    return water_fill(c, ctx.u_min, hi, ctx.resource_blocks);
  };
  auto level_objective = [&](double sigma) {
    const std::vector<double> u = allocation_at(sigma);
    double total = (1.0 - ctx.alpha) * std::exp(sigma);
    for (std::size_t i = 0; i < n; ++i) total += c[i] / u[i];
    return total;
  };

  const ScalarMin best = golden_section(level_objective, sigma_lo, sigma_hi, tol, max_iter);
  out.values = allocation_at(best.x);
  out.objective = objective(out.values, rates, ctx);
  out.iterations = best.iterations;
  out.converged = best.converged;
  return out;
}

} // namespace vrvfl::scheduler
