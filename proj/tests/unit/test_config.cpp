// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/config.hpp"
#include "vrvfl/error.hpp"

#include <doctest.h>

#include <string>

using namespace vrvfl;

TEST_CASE("empty text gives the defaults") {
  const SimConfig cfg = parse_config_text("");
  CHECK(cfg == SimConfig{});
  CHECK(cfg.physical.carrier_freq_hz == 5.9e9);
  CHECK(cfg.physical.resource_blocks == 20);
  CHECK(cfg.physical.model_bits == 4.38e6);
  CHECK(cfg.geometry.road_length_m == 2000.0);
  CHECK(cfg.geometry.lanes == 6);
  CHECK(cfg.traffic.arrival_rate == 0.2);
  CHECK(cfg.run.rounds == 1000);
  CHECK(parse_config_text("# only a comment\n\n") == SimConfig{});
}

TEST_CASE("serialize then parse is the identity") {
  SimConfig cfg;
  cfg.optimization.alpha = 0.123456789012345;
  cfg.learning.iid = false;
  cfg.run.seeds = {4, 5, 6};
  cfg.physical.noise_density_w_hz = 1.2345e-21;
  cfg.learning.aggregation = fl::AggregationMode::anchored;
  cfg.run.scheduler = SchedulerKind::scheme2;
  const SimConfig back = parse_config_text(serialize_config(cfg));
  CHECK(back == cfg);
  CHECK(config_hash(back) == config_hash(cfg));
  SimConfig other = cfg;
  other.run.rounds = 7;
  CHECK(config_hash(other) != config_hash(cfg));
}

TEST_CASE("range checks and unknown keys") {
  CHECK_THROWS_AS(parse_config_text("optimization.alpha = 1.5"), ConfigError);
  try {
    parse_config_text("physical.warp_factor = 9");
    FAIL("accepted unknown key");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("physical.warp_factor") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("run.rounds = many"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("physical.resource_blocks = 0"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("no equals sign"), ConfigError);
  CHECK(parse_config_text("run.rounds = 0").run.rounds == 0);
}

TEST_CASE("dBm aliases") {
  const SimConfig cfg = parse_config_text("physical.tx_power_dbm = 30\nphysical.noise_density_dbm_hz = -174\n");
  CHECK(cfg.physical.tx_power_w == doctest::Approx(1.0));
  CHECK(cfg.physical.noise_density_w_hz == doctest::Approx(3.981071705534972e-21));
  CHECK(watts_to_dbm(dbm_to_watts(23.0)) == doctest::Approx(23.0));
}

TEST_CASE("derived parameter blocks") {
  SimConfig cfg;
  const auto p = scheduler_params(cfg);
  CHECK(p.bandwidth_per_vehicle() == doctest::Approx(5e5));
  const auto s = speed_range(cfg);
  CHECK(s.min_mps == doctest::Approx(60.0 / 3.6));
  CHECK(s.max_mps == doctest::Approx(100.0 / 3.6));
  CHECK(road_geometry(cfg).rsu_positions.size() == 20);
  CHECK(parse_scheduler("scheme1") == SchedulerKind::scheme1);
  CHECK_THROWS_AS(parse_scheduler("greedy"), ConfigError);
}
