// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/error.hpp"
#include "vrvfl/scheduler.hpp"
#include "vrvfl/validation.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace vrvfl;
using namespace vrvfl::scheduler;

namespace {

Candidate make(VehicleId id, double h = 1.5, double eps = 0.9, double sojourn = 60.0, double data = 200.0) {
  const SchedulerParams p;
  Candidate c;
  c.id = id;
  c.data_size = data;
  c.h_est_power = h;
  c.epsilon = eps;
  c.large_scale_gain = 1e-8;
  c.sojourn_s = sojourn;
  c.bandwidth_hz = p.bandwidth_per_vehicle();
  c.tx_power_w = p.tx_power_w;
  c.noise_density_w_hz = p.noise_density_w_hz;
  c.bounds = rate_bounds(h, eps, c.large_scale_gain, sojourn, p);
  return c;
}

RoundContext context(std::vector<Candidate> cands, double alpha, int n = 20) {
  SchedulerParams p;
  p.resource_blocks = n;
  return build_context(cands, p, alpha);
}

} // namespace

TEST_CASE("rate bounds") {
  SchedulerParams p;
  p.total_bandwidth_hz = 1.0;
  p.resource_blocks = 1;
  p.tx_power_w = 1.0;
  p.noise_density_w_hz = 1.0;
  CHECK(rate_bounds(1.0, 1.0, 1.0, 60.0, p).r_max == doctest::Approx(1.0));

  const SchedulerParams d;
  CHECK(rate_bounds(1.0, 0.9, 1e-8, 40.0, d).r_min == doctest::Approx(109500.0));
  CHECK(rate_bounds(1.0, 0.9, 1e-8, 400.0, d).r_min == doctest::Approx(4.38e6 / 60.0));
  const auto zero = rate_bounds(0.0, 0.9, 1e-8, 40.0, d);
  CHECK(zero.r_max == 0.0);
  CHECK_FALSE(zero.feasible());
  CHECK(std::isinf(rate_bounds(1.0, 0.9, 1e-8, 0.0, d).r_min));
}

TEST_CASE("feasible set uses strict ordering") {
  auto a = make(1), b = make(2), c = make(3);
  b.bounds.r_min = b.bounds.r_max;
  std::vector<Candidate> v{c, a, b};
  const auto ids = compute_feasible_set(v);
  REQUIRE(ids.size() == 2);
  CHECK(ids[0] == 1);
  CHECK(ids[1] == 3);
  CHECK(compute_feasible_set(std::span<const Candidate>{}).empty());
}

TEST_CASE("build_context drops the lowest R_max when the box is infeasible") {
  SchedulerParams p;
  p.resource_blocks = 1;
  p.u_min = 0.4;
  std::vector<Candidate> v{make(1, 1.0), make(2, 3.0), make(3, 0.5)};
  const auto ctx = build_context(v, p, 0.4);
  REQUIRE(ctx.size() == 2);
  REQUIRE(ctx.dropped.size() == 1);
  CHECK(ctx.dropped[0] == 3);
  CHECK(ctx.total_data == doctest::Approx(400.0));
}

TEST_CASE("objective limits") {
  auto ctx = context({make(1)}, 1.0);
  const double r = ctx.vehicles[0].bounds.r_min;
  const double pv = ctx.vehicles[0].success_probability(r);
  std::vector<double> u{1.0}, rates{r};
  CHECK(objective(u, rates, ctx) == doctest::Approx(1.0 / pv));

  auto two = context({make(1), make(2, 2.5)}, 0.0);
  std::vector<double> u2{0.3, 0.8};
  std::vector<double> r2{two.vehicles[0].bounds.r_min * 2, two.vehicles[1].bounds.r_min * 3};
  const double expect = std::max(rate_pressure(0.3, r2[0], two.vehicles[0].bandwidth_hz),
                                 rate_pressure(0.8, r2[1], two.vehicles[1].bandwidth_hz));
  CHECK(objective(u2, r2, two) == doctest::Approx(expect));

  Rng rng(1);
  for (int k = 0; k < 20; ++k) {
    const auto c = validation::random_context(rng, 4, 0.4, 0.05, 2);
    std::vector<double> uu(c.size()), rr(c.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      uu[i] = 0.05 + 0.4 * unit(rng);
      rr[i] = c.vehicles[i].bounds.r_min + unit(rng) * (c.vehicles[i].bounds.r_max - c.vehicles[i].bounds.r_min);
    }
    const double lib = objective(uu, rr, c);
    const double ref = validation::reference_objective(uu, rr, c);
    if (std::isinf(ref)) {
      CHECK(std::isinf(lib));
    } else {
      // the oracle's plain 1 - exp loses ~1e-16/P relative when P is tiny
      CHECK(lib == doctest::Approx(ref).epsilon(1e-7));
    }
  }
}

TEST_CASE("rate block limits") {
  Rng rng(2);
  for (int k = 0; k < 10; ++k) {
    auto ctx = validation::random_context(rng, 3, 1.0, 0.05, 20);
    const std::vector<double> u(ctx.size(), 0.5);
    const auto r1 = solve_rate_block(u, ctx);
    for (std::size_t i = 0; i < ctx.size(); ++i)
      CHECK(r1.values[i] == doctest::Approx(ctx.vehicles[i].bounds.r_min).epsilon(1e-9));

    ctx.alpha = 0.0;
    const auto r0 = solve_rate_block(u, ctx);
    for (std::size_t i = 0; i < ctx.size(); ++i)
      CHECK(r0.values[i] == doctest::Approx(ctx.vehicles[i].bounds.r_max).epsilon(1e-6));
  }
}

TEST_CASE("rate block matches a 2000x2000 grid at alpha 0.4") {
  Rng rng(3);
  for (int k = 0; k < 3; ++k) {
    const auto ctx = validation::random_context(rng, 2, 0.4, 0.05, 20);
    REQUIRE(ctx.size() == 2);
    const std::vector<double> u{0.6, 0.9};
    const auto block = solve_rate_block(u, ctx);
    const int n = 2000;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> rr(2);
    for (int i = 0; i < n; ++i) {
      const auto& b0 = ctx.vehicles[0].bounds;
      rr[0] = b0.r_min + (b0.r_max - b0.r_min) * i / (n - 1);
      for (int j = 0; j < n; ++j) {
        const auto& b1 = ctx.vehicles[1].bounds;
        rr[1] = b1.r_min + (b1.r_max - b1.r_min) * j / (n - 1);
        best = std::min(best, validation::reference_objective(u, rr, ctx));
      }
    }
    CHECK(block.objective <= best * (1.0 + 1e-3));
  }
}

TEST_CASE("inclusion block limits") {
  auto sym = context({make(1), make(2)}, 1.0, 20);
  std::vector<double> r{sym.vehicles[0].bounds.r_min, sym.vehicles[1].bounds.r_min};
  auto u = solve_inclusion_block(r, sym).values;
  CHECK(u[0] == doctest::Approx(1.0));
  CHECK(u[1] == doctest::Approx(1.0));

  auto tight = context({make(1), make(2)}, 1.0, 1);
  u = solve_inclusion_block(r, tight).values;
  CHECK(u[0] == doctest::Approx(0.5));
  CHECK(u[1] == doctest::Approx(0.5));

  sym.alpha = 0.0;
  u = solve_inclusion_block(r, sym).values;
  CHECK(u[0] == doctest::Approx(0.05));
  CHECK(u[1] == doctest::Approx(0.05));
}

TEST_CASE("water filling") {
  const std::vector<double> hi{1.0, 1.0};
  auto u = water_fill(std::vector<double>{1.0, 4.0}, 0.05, hi, 1.0);
  CHECK(u[0] == doctest::Approx(1.0 / 3.0));
  CHECK(u[1] == doctest::Approx(2.0 / 3.0));
  u = water_fill(std::vector<double>{0.0, 1.0}, 0.05, hi, 1.0);
  CHECK(u[0] == doctest::Approx(0.05));
  CHECK(u[1] == doctest::Approx(0.95));
  u = water_fill(std::vector<double>{1.0, 1.0}, 0.05, hi, 5.0);
  CHECK(u[0] == doctest::Approx(1.0));
}

TEST_CASE("bcd properties") {
  Rng rng(4);
  for (int k = 0; k < 10; ++k) {
    const auto ctx = validation::random_context(rng, 5, 0.4, 0.05, 2);
    const auto res = bcd_solve(ctx);
    const auto& tr = res.report.objective_trace;
    for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr[i] <= tr[i - 1]);
    double sum = 0.0;
    for (std::size_t i = 0; i < ctx.size(); ++i) {
      sum += res.plan.inclusion_probs[i];
      CHECK(res.plan.inclusion_probs[i] >= ctx.u_min - 1e-12);
      CHECK(res.plan.inclusion_probs[i] <= 1.0 + 1e-12);
      CHECK(res.plan.rates[i] >= ctx.vehicles[i].bounds.r_min);
      CHECK(res.plan.rates[i] <= ctx.vehicles[i].bounds.r_max);
      CHECK(res.plan.success_probs[i] > 0.0);
    }
    CHECK(sum <= ctx.resource_blocks + 1e-9);
    for (double r : res.report.block_residuals) CHECK(r <= 1e-6);

    auto one = ctx;
    one.alpha = 1.0;
    const auto a1 = bcd_solve(one).plan;
    const auto s2 = scheme2_baseline(ctx);
    CHECK(a1.inclusion_probs == s2.inclusion_probs);
    CHECK(a1.rates == s2.rates);
  }
  CHECK(bcd_solve(RoundContext{}).plan.skipped);
}

TEST_CASE("grid oracle: fast and naive agree") {
  Rng rng(5);
  for (int k = 0; k < 5; ++k) {
    const auto ctx = validation::random_context(rng, 2, 0.4, 0.05, 1);
    CHECK(validation::grid_minimum_two_vehicle(ctx, 25) ==
          doctest::Approx(validation::grid_minimum_two_vehicle_naive(ctx, 25)).epsilon(1e-12));
  }
}

TEST_CASE("scheme 1") {
  Rng rng(6);
  const auto few = validation::random_context(rng, 3, 0.4, 0.05, 20);
  for (double u : scheme1_baseline(few).inclusion_probs) CHECK(u == 1.0);
  const auto many = validation::random_context(rng, 4, 0.4, 0.05, 2);
  const auto plan = scheme1_baseline(many);
  for (double u : plan.inclusion_probs) CHECK(u == doctest::Approx(0.5));
  auto one = many;
  one.alpha = 1.0;
  const auto rates = solve_rate_block(plan.inclusion_probs, one).values;
  CHECK(plan.rates == rates);
}

TEST_CASE("convexity terms against their defining expressions") {
  Rng rng(7);
  for (int k = 0; k < 20; ++k) {
    const auto ctx = validation::random_context(rng, 1, 0.4, 0.05, 20);
    const auto& v = ctx.vehicles[0];
    const auto t = convexity_terms(v);
    for (double s : {0.1, 0.4, 0.8}) {
      const double r = v.bounds.r_min + s * (v.bounds.r_max - v.bounds.r_min);
      const double f = std::exp2(r / v.bandwidth_hz);
      if (f >= t.f_upper()) continue;
      CHECK(theta(f, t, 0.4, v.data_size, 0.7) ==
            doctest::Approx(validation::reference_theta(r, v, 0.4, 1.0, 0.7)).epsilon(1e-9));
      CHECK(lambda(f, t) == doctest::Approx(validation::reference_lambda(f, v)).epsilon(1e-9));
    }
  }
}

TEST_CASE("selection") {
  RoundPlan plan;
  plan.ids = {1, 2, 3, 4, 5};
  plan.inclusion_probs = {1.0, 0.1, 0.3, 0.6, 0.9};
  plan.success_probs = {1.0, 1.0, 1.0, 1.0, 1.0};
  Rng rng(8);
  const int draws = 100000;
  std::vector<int> hits(5, 0);
  for (int k = 0; k < draws; ++k) {
    const auto s = realize_selection(plan, rng, 20);
    CHECK_FALSE(s.trimmed);
    for (auto id : s.selected) ++hits[id - 1];
  }
  CHECK(hits[0] == draws);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(std::abs(hits[i] / double(draws) - plan.inclusion_probs[i]) < 0.01);

  RoundPlan full;
  full.ids = {1, 2, 3, 4};
  full.inclusion_probs = {1.0, 1.0, 1.0, 1.0};
  full.success_probs = {0.2, 0.9, 0.5, 0.9};
  const auto s = realize_selection(full, rng, 2);
  CHECK(s.trimmed);
  CHECK(s.drawn == 4);
  CHECK(s.selected == std::vector<VehicleId>{2, 4});
}

TEST_CASE("round time") {
  CHECK(round_time(std::vector<double>{1e6, 2e6}, 4.38e6, 60.0) == doctest::Approx(4.38));
  CHECK(round_time(std::vector<double>{4.38e5}, 4.38e6, 60.0) == doctest::Approx(10.0));
  CHECK(round_time(std::vector<double>{}, 4.38e6, 60.0) == 60.0);
}

TEST_CASE("instance dump round trip") {
  Rng rng(9);
  const auto ctx = validation::random_context(rng, 4, 0.4, 0.05, 2);
  std::stringstream ss;
  write_instance(ss, ctx);
  const auto back = read_instance(ss);
  REQUIRE(back.size() == ctx.size());
  CHECK(back.alpha == ctx.alpha);
  CHECK(back.total_data == ctx.total_data);
  CHECK(back.resource_blocks == ctx.resource_blocks);
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    CHECK(back.vehicles[i].id == ctx.vehicles[i].id);
    CHECK(back.vehicles[i].h_est_power == ctx.vehicles[i].h_est_power);
    CHECK(back.vehicles[i].bounds.r_max == ctx.vehicles[i].bounds.r_max);
  }
  const auto res = bcd_solve(ctx);
  CHECK(bcd_solve(back).plan.objective_value == res.plan.objective_value);
}
