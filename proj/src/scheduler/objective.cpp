// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/error.hpp"
#include "vrvfl/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace vrvfl::scheduler {

double rate_pressure(double u, double rate, double bandwidth_hz) {
  return u * std::exp(-std::expm1(rate / bandwidth_hz * std::numbers::ln2));
}

ObjectiveTerms objective_terms(std::span<const double> u, std::span<const double> rates,
                               const RoundContext& ctx) {
  if (u.size() != ctx.size() || rates.size() != ctx.size()) {
    throw DomainError("objective: vector length does not match the feasible set");
  }
  ObjectiveTerms terms;
  if (ctx.size() == 0) return terms;
  const double inf = std::numeric_limits<double>::infinity();
  if (ctx.alpha > 0.0) {
    for (std::size_t i = 0; i < ctx.size(); ++i) {
      const Candidate& v = ctx.vehicles[i];
      const double p = v.success_probability(rates[i]);
      if (!(p > 0.0) || !(u[i] > 0.0)) {
        terms.convergence = inf;
        break;
      }
      terms.convergence += ctx.alpha * v.data_size / (ctx.total_data * u[i] * p);
    }
  }
  if (ctx.alpha < 1.0) {
    double worst = 0.0;
    for (std::size_t i = 0; i < ctx.size(); ++i) {
      worst = std::max(worst, rate_pressure(u[i], rates[i], ctx.vehicles[i].bandwidth_hz));
    }
    terms.round_pressure = (1.0 - ctx.alpha) * worst;
  }
  return terms;
}

double objective(std::span<const double> u, std::span<const double> rates, const RoundContext& ctx) {
  return objective_terms(u, rates, ctx).total();
}

ConvexityTerms convexity_terms(const Candidate& v) {
  const double eps2 = v.epsilon * v.epsilon;
  if (!(eps2 < 1.0)) throw DomainError("convexity_terms: perfect CSI has no estimation-error term");
  ConvexityTerms t;
  t.xi1 = v.noise_density_w_hz * v.bandwidth_hz / (v.tx_power_w * v.large_scale_gain * (1.0 - eps2));
  t.xi3 = v.h_est_power * eps2 / (1.0 - eps2);
  return t;
}

double lambda(double f, const ConvexityTerms& terms) {
  const double e = std::exp(terms.xi1 - terms.xi3 / (f - 1.0));
  return f / (f * f - 1.0) * (1.0 + e) / (1.0 - e) - 1.0 / terms.xi3;
}

double theta(double f, const ConvexityTerms& terms, double alpha, double data_size, double u) {
  const double e = std::exp(terms.xi1 - terms.xi3 / (f - 1.0));
  return alpha * data_size / (u * (1.0 - e));
}

} // namespace vrvfl::scheduler
