// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/validation.hpp"
#include "vrvfl/channel.hpp"
#include "vrvfl/error.hpp"
#include "vrvfl/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace vrvfl::validation {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

template <class Fn>
CriterionResult timed(int id, std::string name, Fn&& body) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

} // namespace

AppendixReport appendix_check(std::uint64_t seed, int instances, int grid_points) {
  Rng rng = make_stream(seed, "appendix");
  const scheduler::SchedulerParams params;
  AppendixReport rep;
  rep.instances = instances;
  for (int n = 0; n < instances; ++n) {
    const scheduler::Candidate v = random_candidate(rng, static_cast<scheduler::VehicleId>(n), params);
    const double alpha = uniform(rng, 0.05, 1.0);
    const double u = uniform(rng, 0.05, 1.0);
    const double total = v.data_size * uniform(rng, 1.0, 50.0);

    std::vector<double> th(static_cast<std::size_t>(grid_points));
    for (int k = 0; k < grid_points; ++k) {
      const double rate = v.bounds.r_min + (v.bounds.r_max - v.bounds.r_min) * (k + 1) / (grid_points + 1.0);
      th[static_cast<std::size_t>(k)] = reference_theta(rate, v, alpha, total, u);
    }
    bool convex = true;
    for (std::size_t k = 1; k + 1 < th.size(); ++k) {
      const double scale = std::max({std::abs(th[k - 1]), std::abs(th[k]), std::abs(th[k + 1])});
      if (!(th[k - 1] - 2.0 * th[k] + th[k + 1] >= -1e-6 * scale)) convex = false;
    }
    rep.theta_nonconvex += convex ? 0 : 1;

    const double e2 = v.epsilon * v.epsilon;
    const double xi1 = v.noise_density_w_hz * v.bandwidth_hz / (v.tx_power_w * v.large_scale_gain * (1.0 - e2));
    const double xi3 = v.h_est_power * e2 / (1.0 - e2);
    bool positive = true;
    bool non_increasing = true;
    double prev = 0.0;
    for (int k = 0; k < grid_points; ++k) {
      const double f = 1.0 + (xi3 / xi1) * (k + 1) / (grid_points + 1.0);
      const double lam = reference_lambda(f, v);
      if (!(lam > 0.0)) positive = false;
      if (k > 0 && lam > prev + 1e-9 * std::abs(prev)) {
        non_increasing = false;
        rep.worst_lambda_rise = std::max(rep.worst_lambda_rise, (lam - prev) / std::abs(prev));
      }
      prev = lam;
    }
    rep.lambda_nonpositive += positive ? 0 : 1;
    rep.lambda_increasing += non_increasing ? 0 : 1;
  }
  return rep;
}

SimConfig desk_config() {
  SimConfig cfg;
  cfg.learning.iid = false;
  cfg.run.rounds = 200;
  cfg.run.seeds = {1, 2, 3};
  cfg.run.compare_alphas = {0.4};
  cfg.optimization.alpha = 0.4;
  return cfg;
}

CriterionResult criterion_outage(std::uint64_t seed) {
  return timed(1, "outage closed form vs Monte Carlo", [&](CriterionResult& r) {
    Rng params = make_stream(seed, "outage-params");
    double worst = 0.0;
    int zero_cases = 0;
    for (int n = 0; n < 50; ++n) {
      const double a = uniform(params, 0.05, 5.0);
      const double b = uniform(params, 0.0, 2.0);
      const double h2 = uniform(params, 0.0, 4.0);
      zero_cases += h2 <= b;
      Rng mc = make_stream(seed, "outage-mc", static_cast<std::uint64_t>(n));
      const double empirical = monte_carlo_success(a, b, h2, 100000, mc);
      const double closed = channel::success_probability({a, b}, h2);
      worst = std::max(worst, std::abs(empirical - closed));
    }
    r.passed = worst <= 0.01;
    r.detail = "max |closed - MC| " + fmt("%.4f", worst) + " over 50 triples (" + std::to_string(zero_cases) +
               " with |h_est|^2 <= b), tolerance 0.01";
  });
}

CriterionResult criterion_channel_statistics(std::uint64_t seed) {
  return timed(2, "channel correlation and power", [&](CriterionResult& r) {
    double worst_corr = 0.0;
    double worst_power = 0.0;
    std::uint64_t stream = 0;
    for (double eps : {0.2, 0.5, 0.9}) {
      Rng rng = make_stream(seed, "channel-stats", stream++);
      channel::Complex corr{0.0, 0.0};
      double power = 0.0;
      const int n = 100000;
      for (int i = 0; i < n; ++i) {
        const channel::FadingPair p = channel::sample_fading_pair(rng);
        const channel::ChannelState s{p.h_est, p.h_err, eps, 1.0};
        const channel::Complex h = s.composed();
        corr += h * std::conj(p.h_est);
        power += std::norm(h);
      }
      corr /= static_cast<double>(n);
      power /= n;
      worst_corr = std::max(worst_corr, std::abs(corr - channel::Complex{eps, 0.0}));
      worst_power = std::max(worst_power, std::abs(power - 1.0));
    }
    r.passed = worst_corr <= 0.02 && worst_power <= 0.02;
    r.detail = "max |E[h conj(h_est)] - eps| " + fmt("%.4f", worst_corr) + ", max |E|h|^2 - 1| " +
               fmt("%.4f", worst_power) + " (eps in {0.2, 0.5, 0.9}, 1e5 draws), tolerance 0.02";
  });
}

CriterionResult criterion_appendix(std::uint64_t seed) {
  return timed(3, "rate-block convexity certificate", [&](CriterionResult& r) {
    const AppendixReport rep = appendix_check(seed, 100, 1000);
    r.passed = rep.theta_nonconvex == 0 && rep.lambda_nonpositive == 0 && rep.lambda_increasing == 0;
    r.detail = "of 100 instances: Theta non-convex " + std::to_string(rep.theta_nonconvex) + ", Lambda <= 0 " +
               std::to_string(rep.lambda_nonpositive) + ", Lambda increasing somewhere " +
               std::to_string(rep.lambda_increasing) + " (largest relative rise " +
               fmt("%.3g", rep.worst_lambda_rise) + ")";
  });
}

CriterionResult criterion_bcd_optimality(std::uint64_t seed) {
  return timed(4, "BCD vs 200^4 grid on two vehicles", [&](CriterionResult& r) {
    Rng rng = make_stream(seed, "bcd-grid");
    int above = 0;
    int non_monotone = 0;
    double worst_gap = -1.0;
    for (int n = 0; n < 50; ++n) {
      const double alpha = uniform(rng, 0.1, 0.9);
      const scheduler::RoundContext ctx = random_context(rng, 2, alpha, 0.05, 1);
      const scheduler::BcdResult res = scheduler::bcd_solve(ctx);
      const double got = reference_objective(res.plan.inclusion_probs, res.plan.rates, ctx);
      const double grid = grid_minimum_two_vehicle(ctx, 200);
      const double gap = (got - grid) / std::abs(grid);
      worst_gap = std::max(worst_gap, gap);
      if (!(got <= grid * (1.0 + 1e-3))) ++above;
      const auto& tr = res.report.objective_trace;
      for (std::size_t i = 1; i < tr.size(); ++i) {
        if (tr[i] > tr[i - 1]) {
          ++non_monotone;
          break;
        }
      }
    }
    r.passed = above == 0 && non_monotone == 0;
    r.detail = std::to_string(above) + "/50 above grid minimum + 1e-3 rel (worst relative gap " +
               fmt("%+.3g", worst_gap) + "), " + std::to_string(non_monotone) + "/50 non-monotone traces";
  });
}

CriterionResult criterion_block_limits(std::uint64_t seed) {
  return timed(5, "analytic block limits at alpha 0 and 1", [&](CriterionResult& r) {
    Rng rng = make_stream(seed, "block-limits");
    double worst_r1 = 0.0;
    double worst_r0 = 0.0;
    double worst_u0 = 0.0;
    for (int n = 0; n < 20; ++n) {
      const auto vehicles = static_cast<std::size_t>(std::uniform_int_distribution<int>(3, 12)(rng));
      const int blocks = std::uniform_int_distribution<int>(1, static_cast<int>(vehicles))(rng);
      const scheduler::RoundContext ctx = random_context(rng, vehicles, 0.5, 0.05, blocks);
      const auto one = scheduler::bcd_solve(ctx, 1.0).plan;
      const auto zero = scheduler::bcd_solve(ctx, 0.0).plan;
      for (std::size_t i = 0; i < ctx.size(); ++i) {
        const auto& b = ctx.vehicles[i].bounds;
        worst_r1 = std::max(worst_r1, std::abs(one.rates[i] - b.r_min) / b.r_min);
        worst_r0 = std::max(worst_r0, std::abs(zero.rates[i] - b.r_max) / b.r_max);
        worst_u0 = std::max(worst_u0, std::abs(zero.inclusion_probs[i] - ctx.u_min));
      }
    }
    r.passed = worst_r1 <= 1e-6 && worst_r0 <= 1e-6 && worst_u0 <= 1e-6;
    r.detail = "alpha=1 max |R-Rmin|/Rmin " + fmt("%.2g", worst_r1) + "; alpha=0 max |R-Rmax|/Rmax " +
               fmt("%.2g", worst_r0) + ", max |u-umin| " + fmt("%.2g", worst_u0) + " over 20 instances";
  });
}

CriterionResult criterion_unbiasedness(std::uint64_t seed) {
  return timed(6, "anchored aggregation unbiasedness", [&](CriterionResult& r) {
    Rng setup = make_stream(seed, "unbiased-setup");
    const std::size_t vehicles = 10;
    const std::size_t dim = 4;
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<fl::ModelWeights> locals(vehicles, fl::ModelWeights{std::vector<double>(dim)});
    std::vector<double> data(vehicles), u(vehicles), p(vehicles);
    fl::ModelWeights prev{std::vector<double>(dim)};
    for (double& x : prev.values) x = gauss(setup);
    double total = 0.0;
    for (std::size_t v = 0; v < vehicles; ++v) {
      for (double& x : locals[v].values) x = gauss(setup);
      data[v] = std::floor(uniform(setup, 50.0, 300.0));
      u[v] = uniform(setup, 0.2, 1.0);
      p[v] = uniform(setup, 0.3, 1.0);
      total += data[v];
    }
    std::vector<double> target = prev.values;
    for (std::size_t v = 0; v < vehicles; ++v)
      for (std::size_t c = 0; c < dim; ++c) target[c] += data[v] / total * (locals[v].values[c] - prev.values[c]);

    Rng draws = make_stream(seed, "unbiased-draws");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int trials = 10000;
    std::vector<double> sum(dim, 0.0), sq(dim, 0.0);
    for (int t = 0; t < trials; ++t) {
      std::vector<fl::AggregationInput> inputs;
      for (std::size_t v = 0; v < vehicles; ++v) {
        const bool selected = unit(draws) < u[v];
        const bool success = unit(draws) < p[v];
        if (selected && success) inputs.push_back({&locals[v], data[v], u[v], p[v]});
      }
      const fl::ModelWeights w = fl::aggregate(inputs, total, prev, fl::AggregationMode::anchored);
      for (std::size_t c = 0; c < dim; ++c) {
        sum[c] += w.values[c];
        sq[c] += w.values[c] * w.values[c];
      }
    }
    double worst = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double mean = sum[c] / trials;
      const double var = (sq[c] / trials - mean * mean) * trials / (trials - 1.0);
      const double se = std::sqrt(var / trials);
      worst = std::max(worst, std::abs(mean - target[c]) / se);
    }
    r.passed = worst <= 2.0;
    r.detail = "max |mean - full-participation average| = " + fmt("%.2f", worst) +
               " standard errors over " + std::to_string(dim) + " coordinates, 1e4 realizations";
  });
}

CriterionResult criterion_end_to_end(const SimConfig& cfg) {
  return timed(7, "end-to-end time to 90% of final accuracy", [&](CriterionResult& r) {
    std::vector<sim::ExperimentResult> results;
    for (const auto& spec : sim::compare_jobs(cfg)) results.push_back(sim::run_experiment(cfg, spec));
    const auto summary = sim::summarize(results, 0.9);

    std::map<std::uint64_t, std::map<std::string, std::optional<double>>> by_seed;
    std::string vr_label;
    for (const auto& s : summary) {
      by_seed[s.seed][s.label] = s.time_to_threshold;
      if (s.label.rfind("vrvfl", 0) == 0) vr_label = s.label;
    }
    bool all_faster = true;
    std::vector<double> reductions;
    std::ostringstream os;
    for (const auto& [seed, row] : by_seed) {
      const auto vr = row.at(vr_label);
      const auto s1 = row.at("scheme1");
      const auto s2 = row.at("scheme2");
      auto show = [](const std::optional<double>& t) { return t ? fmt("%.0f", *t) : std::string("never"); };
      os << "seed " << seed << ": " << show(vr) << "/" << show(s1) << "/" << show(s2) << " s; ";
      if (!vr || (s1 && !(*vr < *s1)) || (s2 && !(*vr < *s2))) all_faster = false;
      if (vr && s1 && s2) {
        reductions.push_back(1.0 - *vr / std::min(*s1, *s2));
      } else {
        reductions.push_back(vr ? 1.0 : 0.0);
      }
    }
    std::sort(reductions.begin(), reductions.end());
    const double median = reductions.empty() ? 0.0 : reductions[reductions.size() / 2];
    r.passed = all_faster && median >= 0.20;
    r.detail = os.str() + "(vrvfl/scheme1/scheme2) median reduction vs faster baseline " + fmt("%.1f%%", 100.0 * median);
  });
}

CriterionResult criterion_determinism(const SimConfig& cfg, const std::filesystem::path& scratch) {
  return timed(8, "compare is byte-reproducible", [&](CriterionResult& r) {
    const auto a = scratch / "determinism_a";
    const auto b = scratch / "determinism_b";
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
    sim::run_compare(cfg, a);
    sim::run_compare(cfg, b);
    auto slurp = [](const std::filesystem::path& p) {
      std::ifstream f(p, std::ios::binary);
      return std::string(std::istreambuf_iterator<char>(f), {});
    };
    int files = 0;
    int differing = 0;
    for (const auto& entry : std::filesystem::directory_iterator(a)) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      const auto other = b / entry.path().filename();
      if (!std::filesystem::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
    }
    const std::size_t expected = sim::compare_jobs(cfg).size() + 2;
    r.passed = differing == 0 && files == static_cast<int>(expected);
    r.detail = std::to_string(files) + " CSV files (expected " + std::to_string(expected) + "), " +
               std::to_string(differing) + " differ between two runs";
  });
}

CriterionResult criterion_gradient(std::uint64_t seed) {
  return timed(9, "loss gradient vs central differences", [&](CriterionResult& r) {
    Rng rng = make_stream(seed, "gradient");
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    double worst_loss = 0.0;
    for (int n = 0; n < 20; ++n) {
      const int classes = std::uniform_int_distribution<int>(2, 4)(rng);
      const int dims = std::uniform_int_distribution<int>(2, 5)(rng);
      const int rows = std::uniform_int_distribution<int>(5, 15)(rng);
      fl::Partition data;
      data.dims = static_cast<std::size_t>(dims);
      std::vector<double> x(data.dims);
      for (int i = 0; i < rows; ++i) {
        for (double& v : x) v = gauss(rng);
        data.append(x, std::uniform_int_distribution<int>(0, classes - 1)(rng));
      }
      fl::ModelWeights w{std::vector<double>(fl::parameter_count(classes, dims))};
      fl::ModelWeights ref = w;
      for (double& v : w.values) v = 0.5 * gauss(rng);
      for (double& v : ref.values) v = 0.5 * gauss(rng);
      const double mu = uniform(rng, 0.0, 0.1);

      std::vector<std::size_t> all(data.size());
      std::iota(all.begin(), all.end(), std::size_t{0});
      const fl::LossGradient lg = fl::loss_and_gradient(w, data, all, classes, &ref, mu);
      const std::vector<double> fd = finite_difference_gradient(w, data, classes, &ref, mu, 1e-6);
      double diff = 0.0;
      double norm = 0.0;
      for (std::size_t i = 0; i < fd.size(); ++i) {
        diff = std::max(diff, std::abs(lg.gradient[i] - fd[i]));
        norm = std::max(norm, std::abs(fd[i]));
      }
      worst = std::max(worst, diff / std::max(norm, 1e-12));
      const double ref_loss = reference_loss(w, data, classes, &ref, mu);
      worst_loss = std::max(worst_loss, std::abs(lg.loss - ref_loss) / std::abs(ref_loss));
    }
    r.passed = worst <= 1e-5 && worst_loss <= 1e-12;
    r.detail = "max relative gradient error " + fmt("%.2g", worst) + ", max relative loss mismatch " +
               fmt("%.2g", worst_loss) + " over 20 instances";
  });
}

CriterionResult run_criterion(int id, const std::filesystem::path& scratch) {
  const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(id);
  switch (id) {
  case 1: return criterion_outage(seed);
  case 2: return criterion_channel_statistics(seed);
  case 3: return criterion_appendix(seed);
  case 4: return criterion_bcd_optimality(seed);
  case 5: return criterion_block_limits(seed);
  case 6: return criterion_unbiasedness(seed);
  case 7: return criterion_end_to_end(desk_config());
  case 8: {
    SimConfig cfg = desk_config();
    cfg.run.rounds = 20;
    cfg.run.seeds = {1, 2};
    cfg.run.threads = 2;
    return criterion_determinism(cfg, scratch);
  }
  case 9: return criterion_gradient(seed);
  default: throw ConfigError("unknown acceptance criterion " + std::to_string(id));
  }
}

std::vector<CriterionResult> run_property_suites(const std::filesystem::path& scratch) {
  std::vector<CriterionResult> out;
  out.push_back(criterion_outage(1001));
  out.push_back(criterion_channel_statistics(1002));
  out.push_back(timed(3, "Theta convexity and Lambda positivity", [](CriterionResult& r) {
    const AppendixReport rep = appendix_check(1003, 100, 1000);
    r.passed = rep.theta_nonconvex == 0 && rep.lambda_nonpositive == 0;
    r.detail = "of 100 instances: Theta non-convex " + std::to_string(rep.theta_nonconvex) + ", Lambda <= 0 " +
               std::to_string(rep.lambda_nonpositive);
  }));
  out.push_back(criterion_bcd_optimality(1004));
  out.push_back(criterion_block_limits(1005));
  out.push_back(criterion_unbiasedness(1006));
  SimConfig cfg = desk_config();
  cfg.run.rounds = 5;
  cfg.run.seeds = {1, 2};
  out.push_back(criterion_determinism(cfg, scratch));
  out.push_back(criterion_gradient(1009));
  return out;
}

std::string format_result(const CriterionResult& r) {
  return "criterion " + std::to_string(r.id) + " " + (r.passed ? "PASS" : "FAIL") + "  " + r.name + ": " +
         r.detail + " [" + fmt("%.1f", r.seconds) + " s]";
}

} // namespace vrvfl::validation
