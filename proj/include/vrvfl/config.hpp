// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration. On disk it is flat `section.key = value` text with
// '#' comments. Power-like quantities may be given in dBm (tx_power_dbm,
// noise_density_dbm_hz) but are stored and serialized linear.
#pragma once

#include "vrvfl/channel.hpp"
#include "vrvfl/fl_core.hpp"
#include "vrvfl/mobility.hpp"
#include "vrvfl/scheduler.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vrvfl {

enum class SchedulerKind { vrvfl, scheme1, scheme2 };
enum class DataTotalMode { feasible, present };

std::string_view to_string(SchedulerKind kind);
SchedulerKind parse_scheduler(std::string_view name);

struct PhysicalConfig {
  double carrier_freq_hz = 5.9e9;
  double bandwidth_hz = 10e6;
  int resource_blocks = 20;
  double noise_density_w_hz = 3.981071705534972e-21; // -174 dBm/Hz
  double feedback_delay_s = 0.5e-3;
  double tx_power_w = 0.19952623149688797; // 23 dBm
  double model_bits = 4.38e6;
  double speed_of_light = channel::kSpeedOfLight;
  bool operator==(const PhysicalConfig&) const = default;
};

struct ChannelConfig {
  double pathloss_slope_db = 22.7;
  double pathloss_intercept_db = 41.0;
  double pathloss_freq_slope_db = 20.0;
  double shadowing_sigma_db = 3.0;
  double min_distance_m = 1.0;
  bool operator==(const ChannelConfig&) const = default;
};

struct GeometryConfig {
  double road_length_m = 2000.0;
  int lanes = 6;
  double lane_width_m = 4.0;
  double rsu_spacing_m = 100.0;
  bool operator==(const GeometryConfig&) const = default;
};

struct TrafficConfig {
  double arrival_rate = 0.2; // per lane, 1/s
  double speed_min_kmh = 60.0;
  double speed_max_kmh = 100.0;
  bool warm_start = true;
  bool operator==(const TrafficConfig&) const = default;
};

struct OptimizationConfig {
  double alpha = 0.4;
  double u_min = 0.05;
  double round_time_cap_s = 60.0;
  double block_tol = 1e-10;
  int block_max_iter = 200;
  double bcd_tol = 1e-6;
  int bcd_max_iter = 50;
  DataTotalMode total_data = DataTotalMode::feasible;
  bool operator==(const OptimizationConfig&) const = default;
};

struct LearningConfig {
  int classes = 10;
  int dims = 20;
  double separation = 3.0;
  bool iid = true;
  int iid_per_class = 20;
  int non_iid_min = 100;
  int non_iid_max = 300;
  int non_iid_max_classes = 3;
  int epochs = 5;
  int batch_size = 32;
  double momentum = 0.9;
  double prox_mu = 0.0025;
  double lr_base = 0.1;
  int lr_step = 25;
  int test_per_class = 200;
  fl::AggregationMode aggregation = fl::AggregationMode::verbatim;
  bool operator==(const LearningConfig&) const = default;
};

struct RunConfig {
  int rounds = 1000;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds{1};
  SchedulerKind scheduler = SchedulerKind::vrvfl;
  std::vector<double> compare_alphas{0.4};
  int threads = 1;
  bool operator==(const RunConfig&) const = default;
};

struct SimConfig {
  PhysicalConfig physical;
  ChannelConfig channel;
  GeometryConfig geometry;
  TrafficConfig traffic;
  OptimizationConfig optimization;
  LearningConfig learning;
  RunConfig run;
  bool operator==(const SimConfig&) const = default;
};

struct ConfigKey {
  std::string name;
  std::string help;
  std::string reference; // value of the published highway setup, if any
};

/// Every accepted key, including the dBm input aliases.
const std::vector<ConfigKey>& config_keys();

/// Sets one key; throws ConfigError naming the key if unknown or unparsable.
void set_config_value(SimConfig& cfg, std::string_view key, std::string_view value);
std::string get_config_value(const SimConfig& cfg, std::string_view key);

/// Applies `key = value` lines on top of `base`, then validates.
SimConfig parse_config_text(std::string_view text, SimConfig base = {});
SimConfig load_config_file(const std::string& path, SimConfig base = {});

/// Canonical text (linear units, %.17g); parse_config_text inverts it exactly.
std::string serialize_config(const SimConfig& cfg);

/// Throws ConfigError naming the violated invariant.
void validate_config(const SimConfig& cfg);

std::uint64_t config_hash(const SimConfig& cfg);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

scheduler::SchedulerParams scheduler_params(const SimConfig& cfg);
channel::PathlossModel pathloss_model(const SimConfig& cfg);
mobility::RoadGeometry road_geometry(const SimConfig& cfg);
mobility::SpeedRange speed_range(const SimConfig& cfg);
fl::PartitionConfig partition_config(const SimConfig& cfg);

} // namespace vrvfl
