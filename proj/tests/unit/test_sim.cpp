// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/sim.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace vrvfl;
using namespace vrvfl::sim;

namespace {

SimConfig small(int rounds) {
  SimConfig cfg;
  cfg.run.rounds = rounds;
  cfg.learning.iid_per_class = 5;
  cfg.learning.test_per_class = 50;
  return cfg;
}

std::string csv_of(const SimConfig& cfg, const RunSpec& spec) {
  std::ostringstream os;
  run_experiment(cfg, spec, &os);
  return os.str();
}

} // namespace

TEST_CASE("empty road") {
  SimConfig cfg = small(3);
  cfg.traffic.arrival_rate = 0.0;
  Simulation sim(cfg, 1, SchedulerKind::vrvfl, 0.4);
  const auto start = sim.global_model();
  for (int t = 0; t < 3; ++t) {
    const auto r = sim.run_round();
    CHECK(r.round_time == cfg.optimization.round_time_cap_s);
    CHECK(r.feasible_count == 0);
    CHECK(r.selected_count == 0);
    CHECK(r.success_count == 0);
    CHECK(std::isnan(r.objective));
  }
  CHECK(sim.global_model() == start);
  CHECK(sim.time() == doctest::Approx(3 * cfg.optimization.round_time_cap_s));
}

TEST_CASE("same seed gives byte-identical output") {
  const SimConfig cfg = small(8);
  const RunSpec spec{SchedulerKind::vrvfl, 0.4, 3};
  CHECK(csv_of(cfg, spec) == csv_of(cfg, spec));
  CHECK(csv_of(cfg, spec) != csv_of(cfg, {SchedulerKind::vrvfl, 0.4, 4}));
}

TEST_CASE("cumulative time is the sum of round times") {
  const SimConfig cfg = small(10);
  const auto res = run_experiment(cfg, {SchedulerKind::scheme1, 0.4, 2});
  REQUIRE(res.records.size() == 10);
  double sum = 0.0;
  double prev_end = 0.0;
  for (const auto& r : res.records) {
    sum += r.round_time;
    CHECK(r.time_start == prev_end);
    CHECK(r.time_end > r.time_start);
    CHECK(r.round_time <= cfg.optimization.round_time_cap_s + 1e-9);
    CHECK(r.selected_count <= static_cast<std::size_t>(cfg.physical.resource_blocks));
    CHECK(r.success_count <= r.selected_count);
    prev_end = r.time_end;
  }
  CHECK(res.records.back().time_end == sum);
}

TEST_CASE("schedulers share the environment") {
  const SimConfig cfg = small(6);
  Simulation a(cfg, 5, SchedulerKind::vrvfl, 0.4);
  Simulation b(cfg, 5, SchedulerKind::scheme1, 0.4);
  for (int t = 0; t < 6; ++t) {
    a.run_round();
    b.run_round();
  }
  const auto& la = a.arrival_log();
  const auto& lb = b.arrival_log();
  const std::size_t common = std::min(la.size(), lb.size());
  REQUIRE(common > 0);
  for (std::size_t i = 0; i < common; ++i) {
    CHECK(la[i].id == lb[i].id);
    CHECK(la[i].time == lb[i].time);
  }
  for (const auto& v : a.vehicles()) {
    const bool in_b = std::any_of(b.vehicles().begin(), b.vehicles().end(),
                                  [&](const auto& w) { return w.id == v.id; });
    if (in_b) CHECK(a.partition(v.id) == b.partition(v.id));
  }
  CHECK(a.test_set() == b.test_set());
}

TEST_CASE("zero rounds writes only the header") {
  const auto dir = std::filesystem::temp_directory_path() / "vrvfl_unit_zero";
  std::filesystem::remove_all(dir);
  const RunSpec spec{SchedulerKind::scheme2, 0.4, 1};
  run_to_dir(small(0), spec, dir);
  std::ifstream f(dir / csv_name(spec));
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == std::string(kCsvHeader) + "\n");
  CHECK(std::filesystem::exists(dir / "scheme2_seed1.manifest"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("labels and summaries") {
  CHECK(RunSpec{SchedulerKind::vrvfl, 0.4, 1}.label() == "vrvfl_a0.4");
  CHECK(csv_name({SchedulerKind::scheme1, 0.4, 7}) == "scheme1_seed7.csv");
  std::vector<RoundRecord> recs(3);
  recs[0].accuracy = 0.2;
  recs[0].time_end = 10;
  recs[1].accuracy = 0.6;
  recs[1].time_end = 20;
  recs[2].accuracy = 0.7;
  recs[2].time_end = 30;
  CHECK(final_accuracy(recs, 2) == doctest::Approx(0.65));
  CHECK(time_to_accuracy(recs, 0.5).value() == 20.0);
  CHECK_FALSE(time_to_accuracy(recs, 0.9).has_value());
}

TEST_CASE("the full-length default run completes") {
  SimConfig cfg;
  REQUIRE(cfg.run.rounds == 1000);
  validate_config(cfg);
  const auto res = run_experiment(cfg, {SchedulerKind::vrvfl, 0.4, 1});
  CHECK(res.records.size() == 1000);
  CHECK(res.ok);
}
