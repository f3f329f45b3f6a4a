// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/validation.hpp"
#include "vrvfl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace vrvfl::validation {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double excess(double rate, double bandwidth) { return std::exp2(rate / bandwidth) - 1.0; }
} // namespace

long double bessel_j0_reference(long double x) {
  const long double q = x * x / 4.0L;
  long double term = 1.0L;
  long double sum = 1.0L;
  long double carry = 0.0L;
  for (int k = 1; k < 400; ++k) {
    term *= -q / (static_cast<long double>(k) * static_cast<long double>(k));
    const long double y = term - carry;
    const long double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
    if (std::fabs(term) < 1e-30L) break;
  }
  return sum;
}

double monte_carlo_success(double a, double b, double h_est_power, std::size_t n, Rng& rng) {
  std::exponential_distribution<double> err(1.0);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (h_est_power - b >= a * err(rng) && h_est_power > b) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

double reference_success_probability(double rate, const scheduler::Candidate& v) {
  const double x = excess(rate, v.bandwidth_hz);
  const double e2 = v.epsilon * v.epsilon;
  const double a = x * (1.0 - e2) / e2;
  const double b = x * v.bandwidth_hz * v.noise_density_w_hz / (v.tx_power_w * v.large_scale_gain * e2);
  if (v.h_est_power <= b) return 0.0;
  if (a == 0.0) return 1.0;
  return 1.0 - std::exp(-(v.h_est_power - b) / a);
}

double reference_objective(std::span<const double> u, std::span<const double> rates,
                           const scheduler::RoundContext& ctx) {
  double conv = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    const auto& v = ctx.vehicles[i];
    if (ctx.alpha > 0.0) {
      const double p = reference_success_probability(rates[i], v);
      conv += p > 0.0 ? ctx.alpha * v.data_size / (ctx.total_data * u[i] * p) : kInf;
    }
    peak = std::max(peak, u[i] * std::exp(-excess(rates[i], v.bandwidth_hz)));
  }
  return conv + (1.0 - ctx.alpha) * peak;
}

double reference_theta(double rate, const scheduler::Candidate& v, double alpha, double total_data, double u) {
  const double p = reference_success_probability(rate, v);
  return alpha * v.data_size / (total_data * u * p);
}

double reference_lambda(double f, const scheduler::Candidate& v) {
  const double e2 = v.epsilon * v.epsilon;
  const double xi1 = v.noise_density_w_hz * v.bandwidth_hz / (v.tx_power_w * v.large_scale_gain * (1.0 - e2));
  const double xi3 = v.h_est_power * e2 / (1.0 - e2);
  const double e = std::exp(xi1 - xi3 / (f - 1.0));
  return f / (f * f - 1.0) * (1.0 + e) / (1.0 - e) - 1.0 / xi3;
}

namespace {

struct Tables {
  int n;
  std::vector<double> u;
  std::vector<double> a; // [k * n + j] convergence part
  std::vector<double> b; // [k * n + j] u e^{-x}
};

Tables tabulate(const scheduler::RoundContext& ctx, std::size_t i, int n) {
  const auto& v = ctx.vehicles[i];
  Tables t{n, {}, std::vector<double>(static_cast<std::size_t>(n) * n), std::vector<double>(static_cast<std::size_t>(n) * n)};
  for (int k = 0; k < n; ++k) t.u.push_back(ctx.u_min + (1.0 - ctx.u_min) * k / (n - 1));
  for (int j = 0; j < n; ++j) {
    const double rate = v.bounds.r_min + (v.bounds.r_max - v.bounds.r_min) * j / (n - 1);
    const double p = reference_success_probability(rate, v);
    const double decay = std::exp(-excess(rate, v.bandwidth_hz));
    for (int k = 0; k < n; ++k) {
      const std::size_t idx = static_cast<std::size_t>(k) * n + j;
      t.a[idx] = ctx.alpha == 0.0 ? 0.0
                 : p > 0.0        ? ctx.alpha * v.data_size / (ctx.total_data * t.u[k] * p)
                                  : kInf;
      t.b[idx] = t.u[k] * decay;
    }
  }
  return t;
}

void require_two(const scheduler::RoundContext& ctx, int points) {
  if (ctx.size() != 2) throw DomainError("grid oracle needs exactly two vehicles");
  if (points < 2) throw DomainError("grid oracle needs at least two points");
}

} // namespace

double grid_minimum_two_vehicle(const scheduler::RoundContext& ctx, int points) {
  require_two(ctx, points);
  const int n = points;
  const double c = 1.0 - ctx.alpha;
  const Tables t1 = tabulate(ctx, 0, n);
  const Tables t2 = tabulate(ctx, 1, n);

  // per u2 row: entries sorted by b, prefix min of a, suffix min of a + c b
  struct Row {
    std::vector<double> b;
    std::vector<double> prefix;
    std::vector<double> suffix;
  };
  std::vector<Row> rows(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const std::size_t base = static_cast<std::size_t>(k) * n;
    std::sort(order.begin(), order.end(), [&](int x, int y) { return t2.b[base + x] < t2.b[base + y]; });
    Row& r = rows[static_cast<std::size_t>(k)];
    r.b.resize(n);
    r.prefix.resize(n);
    r.suffix.resize(n + 1, kInf);
    for (int m = 0; m < n; ++m) {
      const std::size_t idx = base + order[m];
      r.b[m] = t2.b[idx];
      r.prefix[m] = std::min(m ? r.prefix[m - 1] : kInf, t2.a[idx]);
    }
    for (int m = n - 1; m >= 0; --m) {
      const std::size_t idx = base + order[m];
      r.suffix[m] = std::min(r.suffix[m + 1], t2.a[idx] + c * t2.b[idx]);
    }
  }

  double best = kInf;
  for (int k1 = 0; k1 < n; ++k1) {
    for (int j1 = 0; j1 < n; ++j1) {
      const std::size_t i1 = static_cast<std::size_t>(k1) * n + j1;
      const double a1 = t1.a[i1];
      const double b1 = t1.b[i1];
      if (!(a1 < best)) continue;
      for (int k2 = 0; k2 < n; ++k2) {
        if (t1.u[k1] + t2.u[k2] > ctx.resource_blocks + 1e-12) break;
        const Row& r = rows[static_cast<std::size_t>(k2)];
        const auto m = static_cast<int>(std::upper_bound(r.b.begin(), r.b.end(), b1) - r.b.begin());
        if (m > 0) best = std::min(best, a1 + r.prefix[m - 1] + c * b1);
        if (m < n) best = std::min(best, a1 + r.suffix[m]);
      }
    }
  }
  return best;
}

double grid_minimum_two_vehicle_naive(const scheduler::RoundContext& ctx, int points) {
  require_two(ctx, points);
  const int n = points;
  const double c = 1.0 - ctx.alpha;
  const Tables t1 = tabulate(ctx, 0, n);
  const Tables t2 = tabulate(ctx, 1, n);
  double best = kInf;
  for (int k1 = 0; k1 < n; ++k1)
    for (int k2 = 0; k2 < n; ++k2) {
      if (t1.u[k1] + t2.u[k2] > ctx.resource_blocks + 1e-12) continue;
      for (int j1 = 0; j1 < n; ++j1)
        for (int j2 = 0; j2 < n; ++j2) {
          const std::size_t i1 = static_cast<std::size_t>(k1) * n + j1;
          const std::size_t i2 = static_cast<std::size_t>(k2) * n + j2;
          best = std::min(best, t1.a[i1] + t2.a[i2] + c * std::max(t1.b[i1], t2.b[i2]));
        }
    }
  return best;
}

double reference_loss(const fl::ModelWeights& w, const fl::Partition& data, int num_classes,
                      const fl::ModelWeights* prox_ref, double mu) {
  const std::size_t d = data.dims;
  const auto classes = static_cast<std::size_t>(num_classes);
  double total = 0.0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    std::vector<double> z(classes);
    for (std::size_t k = 0; k < classes; ++k) {
      double s = w.values[classes * d + k];
      for (std::size_t c = 0; c < d; ++c) s += w.values[k * d + c] * data.features[r * d + c];
      z[k] = s;
    }
    const double peak = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - peak);
    total += peak + std::log(sum) - z[static_cast<std::size_t>(data.labels[r])];
  }
  double loss = data.size() ? total / static_cast<double>(data.size()) : 0.0;
  if (prox_ref != nullptr) {
    double sq = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) sq += (w.values[i] - prox_ref->values[i]) * (w.values[i] - prox_ref->values[i]);
    loss += 0.5 * mu * sq;
  }
  return loss;
}

std::vector<double> finite_difference_gradient(const fl::ModelWeights& w, const fl::Partition& data,
                                               int num_classes, const fl::ModelWeights* prox_ref,
                                               double mu, double h) {
  std::vector<double> g(w.size());
  fl::ModelWeights probe = w;
  for (std::size_t i = 0; i < w.size(); ++i) {
    probe.values[i] = w.values[i] + h;
    const double up = reference_loss(probe, data, num_classes, prox_ref, mu);
    probe.values[i] = w.values[i] - h;
    const double down = reference_loss(probe, data, num_classes, prox_ref, mu);
    probe.values[i] = w.values[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

scheduler::Candidate random_candidate(Rng& rng, scheduler::VehicleId id, const scheduler::SchedulerParams& params) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> power(1.0);
  std::normal_distribution<double> shadow(0.0, 3.0);
  for (;;) {
    scheduler::Candidate c;
    c.id = id;
    c.data_size = std::floor(100.0 + 200.0 * unit(rng));
    c.h_est_power = power(rng);
    c.epsilon = 0.3 + 0.65 * unit(rng);
    const double distance = 5.0 * std::pow(40.0, unit(rng)); // 5..200 m
    const double pl_db = 22.7 * std::log10(distance) + 41.0 + 20.0 * std::log10(5.9 / 5.0) + shadow(rng);
    c.large_scale_gain = std::pow(10.0, -pl_db / 10.0);
    c.sojourn_s = 5.0 + 115.0 * unit(rng);
    c.bandwidth_hz = params.total_bandwidth_hz / params.resource_blocks;
    c.tx_power_w = params.tx_power_w;
    c.noise_density_w_hz = params.noise_density_w_hz;
    c.bounds.r_min = params.model_bits / std::min(params.round_time_cap_s, c.sojourn_s);
    const double snr = c.tx_power_w * c.large_scale_gain * c.epsilon * c.epsilon * c.h_est_power /
                       (c.bandwidth_hz * c.noise_density_w_hz);
    c.bounds.r_max = c.bandwidth_hz * std::log2(1.0 + snr);
    if (c.bounds.r_min < c.bounds.r_max) return c;
  }
}

scheduler::RoundContext random_context(Rng& rng, std::size_t vehicles, double alpha, double u_min,
                                       int resource_blocks) {
  // candidates always see the default 20-block bandwidth split
  const scheduler::SchedulerParams base;
  std::vector<scheduler::Candidate> cands;
  for (std::size_t i = 0; i < vehicles; ++i) cands.push_back(random_candidate(rng, i, base));
  scheduler::SchedulerParams params;
  params.u_min = u_min;
  params.resource_blocks = resource_blocks;
  return scheduler::build_context(cands, params, alpha);
}

} // namespace vrvfl::validation
