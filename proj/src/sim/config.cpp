// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/config.hpp"
#include "vrvfl/error.hpp"
#include "vrvfl/rng.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace vrvfl {

std::string_view to_string(SchedulerKind kind) {
  switch (kind) {
  case SchedulerKind::vrvfl: return "vrvfl";
  case SchedulerKind::scheme1: return "scheme1";
  case SchedulerKind::scheme2: return "scheme2";
  }
  return "?";
}

SchedulerKind parse_scheduler(std::string_view name) {
  if (name == "vrvfl") return SchedulerKind::vrvfl;
  if (name == "scheme1") return SchedulerKind::scheme1;
  if (name == "scheme2") return SchedulerKind::scheme2;
  throw ConfigError("run.scheduler: unknown scheduler '" + std::string(name) + "' (vrvfl|scheme1|scheme2)");
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw ConfigError(std::string(key) + ": not a number: '" + s + "'");
  }
  return v;
}

long long to_integer(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw ConfigError(std::string(key) + ": not an integer: '" + s + "'");
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(std::string(key) + ": not a boolean: '" + s + "'");
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss{std::string(text)};
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

struct Entry {
  ConfigKey key;
  std::function<void(SimConfig&, std::string_view)> set;
  std::function<std::string(const SimConfig&)> get; // empty for input-only aliases
};

template <class S, class T>
Entry real(std::string name, std::string help, std::string ref, S SimConfig::*section, T S::*field) {
  const std::string k = name;
  return {{std::move(name), std::move(help), std::move(ref)},
          [=](SimConfig& c, std::string_view v) { (c.*section).*field = to_double(k, v); },
          [=](const SimConfig& c) { return fmt((c.*section).*field); }};
}

template <class S>
Entry integer(std::string name, std::string help, std::string ref, S SimConfig::*section, int S::*field) {
  const std::string k = name;
  return {{std::move(name), std::move(help), std::move(ref)},
          [=](SimConfig& c, std::string_view v) { (c.*section).*field = static_cast<int>(to_integer(k, v)); },
          [=](const SimConfig& c) { return std::to_string((c.*section).*field); }};
}

template <class S>
Entry boolean(std::string name, std::string help, std::string ref, S SimConfig::*section, bool S::*field) {
  const std::string k = name;
  return {{std::move(name), std::move(help), std::move(ref)},
          [=](SimConfig& c, std::string_view v) { (c.*section).*field = to_bool(k, v); },
          [=](const SimConfig& c) { return std::string((c.*section).*field ? "true" : "false"); }};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    using P = PhysicalConfig;
    t.push_back(real("physical.carrier_freq_hz", "carrier frequency, Hz", "5.9 GHz", &SimConfig::physical, &P::carrier_freq_hz));
    t.push_back(real("physical.bandwidth_hz", "total uplink bandwidth, Hz", "10 MHz", &SimConfig::physical, &P::bandwidth_hz));
    t.push_back(integer("physical.resource_blocks", "resource blocks N (bandwidth is split equally)", "20", &SimConfig::physical, &P::resource_blocks));
    t.push_back(real("physical.noise_density_w_hz", "noise density N0, W/Hz", "-174 dBm/Hz", &SimConfig::physical, &P::noise_density_w_hz));
    t.push_back({{"physical.noise_density_dbm_hz", "noise density N0 in dBm/Hz (input alias)", "-174 dBm/Hz"},
                 [](SimConfig& c, std::string_view v) {
                   c.physical.noise_density_w_hz = dbm_to_watts(to_double("physical.noise_density_dbm_hz", v));
                 },
                 {}});
    t.push_back(real("physical.feedback_delay_s", "channel feedback delay T, s", "0.5 ms", &SimConfig::physical, &P::feedback_delay_s));
    t.push_back(real("physical.tx_power_w", "vehicle transmit power, W", "23 dBm", &SimConfig::physical, &P::tx_power_w));
    t.push_back({{"physical.tx_power_dbm", "vehicle transmit power in dBm (input alias)", "23 dBm"},
                 [](SimConfig& c, std::string_view v) {
                   c.physical.tx_power_w = dbm_to_watts(to_double("physical.tx_power_dbm", v));
                 },
                 {}});
    t.push_back(real("physical.model_bits", "model size Z, bits", "4.38 Mbit", &SimConfig::physical, &P::model_bits));
    t.push_back(real("physical.speed_of_light", "speed of light used for Doppler, m/s", "", &SimConfig::physical, &P::speed_of_light));

    using C = ChannelConfig;
    t.push_back(real("channel.pathloss_slope_db", "pathloss slope per decade of distance, dB", "", &SimConfig::channel, &C::pathloss_slope_db));
    t.push_back(real("channel.pathloss_intercept_db", "pathloss intercept, dB", "", &SimConfig::channel, &C::pathloss_intercept_db));
    t.push_back(real("channel.pathloss_freq_slope_db", "pathloss slope per decade of f/5GHz, dB", "", &SimConfig::channel, &C::pathloss_freq_slope_db));
    t.push_back(real("channel.shadowing_sigma_db", "log-normal shadowing std-dev, dB", "", &SimConfig::channel, &C::shadowing_sigma_db));
    t.push_back(real("channel.min_distance_m", "distances below this are clamped, m", "", &SimConfig::channel, &C::min_distance_m));

    using G = GeometryConfig;
    t.push_back(real("geometry.road_length_m", "road segment length, m", "2 km", &SimConfig::geometry, &G::road_length_m));
    t.push_back(integer("geometry.lanes", "traffic lanes", "6", &SimConfig::geometry, &G::lanes));
    t.push_back(real("geometry.lane_width_m", "lane width, m", "4 m", &SimConfig::geometry, &G::lane_width_m));
    t.push_back(real("geometry.rsu_spacing_m", "RSU spacing along the center line, m", "100 m", &SimConfig::geometry, &G::rsu_spacing_m));

    using T = TrafficConfig;
    t.push_back(real("traffic.arrival_rate", "Poisson arrival rate per lane, 1/s", "0.2", &SimConfig::traffic, &T::arrival_rate));
    t.push_back(real("traffic.speed_min_kmh", "lower speed bound, km/h", "60 km/h", &SimConfig::traffic, &T::speed_min_kmh));
    t.push_back(real("traffic.speed_max_kmh", "upper speed bound, km/h", "100 km/h", &SimConfig::traffic, &T::speed_max_kmh));
    t.push_back(boolean("traffic.warm_start", "populate the road before round 0", "", &SimConfig::traffic, &T::warm_start));

    using O = OptimizationConfig;
    t.push_back(real("optimization.alpha", "weight of the convergence term", "0.4", &SimConfig::optimization, &O::alpha));
    t.push_back(real("optimization.u_min", "lower bound on inclusion probabilities", "", &SimConfig::optimization, &O::u_min));
    t.push_back(real("optimization.round_time_cap_s", "maximum round duration, s", "", &SimConfig::optimization, &O::round_time_cap_s));
    t.push_back(real("optimization.block_tol", "block solver tolerance", "", &SimConfig::optimization, &O::block_tol));
    t.push_back(integer("optimization.block_max_iter", "block solver iteration cap", "", &SimConfig::optimization, &O::block_max_iter));
    t.push_back(real("optimization.bcd_tol", "relative objective decrease that stops BCD", "", &SimConfig::optimization, &O::bcd_tol));
    t.push_back(integer("optimization.bcd_max_iter", "BCD outer iteration cap", "", &SimConfig::optimization, &O::bcd_max_iter));
    t.push_back({{"optimization.total_data", "D in objective/aggregation: feasible|present", ""},
                 [](SimConfig& c, std::string_view v) {
                   const std::string s = trim(v);
                   if (s == "feasible") c.optimization.total_data = DataTotalMode::feasible;
                   else if (s == "present") c.optimization.total_data = DataTotalMode::present;
                   else throw ConfigError("optimization.total_data: expected feasible|present, got '" + s + "'");
                 },
                 [](const SimConfig& c) {
                   return std::string(c.optimization.total_data == DataTotalMode::feasible ? "feasible" : "present");
                 }});

    using L = LearningConfig;
    t.push_back(integer("learning.classes", "number of classes", "10", &SimConfig::learning, &L::classes));
    t.push_back(integer("learning.dims", "feature dimension", "", &SimConfig::learning, &L::dims));
    t.push_back(real("learning.separation", "distance of each class mean from the origin", "", &SimConfig::learning, &L::separation));
    t.push_back(boolean("learning.iid", "IID partitions (false: 1-3 classes per vehicle)", "", &SimConfig::learning, &L::iid));
    t.push_back(integer("learning.iid_per_class", "IID samples per class per vehicle", "500", &SimConfig::learning, &L::iid_per_class));
    t.push_back(integer("learning.non_iid_min", "non-IID minimum samples per vehicle", "2500", &SimConfig::learning, &L::non_iid_min));
    t.push_back(integer("learning.non_iid_max", "non-IID maximum samples per vehicle", "7500", &SimConfig::learning, &L::non_iid_max));
    t.push_back(integer("learning.non_iid_max_classes", "non-IID maximum classes per vehicle", "3", &SimConfig::learning, &L::non_iid_max_classes));
    t.push_back(integer("learning.epochs", "local epochs", "5", &SimConfig::learning, &L::epochs));
    t.push_back(integer("learning.batch_size", "local batch size", "32", &SimConfig::learning, &L::batch_size));
    t.push_back(real("learning.momentum", "SGD momentum", "0.9", &SimConfig::learning, &L::momentum));
    t.push_back(real("learning.prox_mu", "FedProx proximal weight", "0.0025", &SimConfig::learning, &L::prox_mu));
    t.push_back(real("learning.lr_base", "learning rate at round 0", "0.1", &SimConfig::learning, &L::lr_base));
    t.push_back(integer("learning.lr_step", "rounds per learning-rate decay step", "25", &SimConfig::learning, &L::lr_step));
    t.push_back(integer("learning.test_per_class", "held-out samples per class", "", &SimConfig::learning, &L::test_per_class));
    t.push_back({{"learning.aggregation", "aggregation form: verbatim|anchored", ""},
                 [](SimConfig& c, std::string_view v) {
                   const std::string s = trim(v);
                   if (s == "verbatim") c.learning.aggregation = fl::AggregationMode::verbatim;
                   else if (s == "anchored") c.learning.aggregation = fl::AggregationMode::anchored;
                   else throw ConfigError("learning.aggregation: expected verbatim|anchored, got '" + s + "'");
                 },
                 [](const SimConfig& c) {
                   return std::string(c.learning.aggregation == fl::AggregationMode::verbatim ? "verbatim" : "anchored");
                 }});

    using R = RunConfig;
    t.push_back(integer("run.rounds", "FL rounds per experiment", "1000", &SimConfig::run, &R::rounds));
    t.push_back({{"run.seed", "master seed of a single run", ""},
                 [](SimConfig& c, std::string_view v) {
                   c.run.seed = static_cast<std::uint64_t>(to_integer("run.seed", v));
                 },
                 [](const SimConfig& c) { return std::to_string(c.run.seed); }});
    t.push_back({{"run.seeds", "comma-separated seeds for compare", "10 runs"},
                 [](SimConfig& c, std::string_view v) {
                   c.run.seeds.clear();
                   for (const auto& s : split_list(v)) c.run.seeds.push_back(static_cast<std::uint64_t>(to_integer("run.seeds", s)));
                 },
                 [](const SimConfig& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.run.seeds.size(); ++i) out += (i ? "," : "") + std::to_string(c.run.seeds[i]);
                   return out;
                 }});
    t.push_back({{"run.scheduler", "vrvfl|scheme1|scheme2", ""},
                 [](SimConfig& c, std::string_view v) { c.run.scheduler = parse_scheduler(trim(v)); },
                 [](const SimConfig& c) { return std::string(to_string(c.run.scheduler)); }});
    t.push_back({{"run.compare_alphas", "comma-separated alphas of the VR-VFL runs in compare", ""},
                 [](SimConfig& c, std::string_view v) {
                   c.run.compare_alphas.clear();
                   for (const auto& s : split_list(v)) c.run.compare_alphas.push_back(to_double("run.compare_alphas", s));
                 },
                 [](const SimConfig& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.run.compare_alphas.size(); ++i) out += (i ? "," : "") + fmt(c.run.compare_alphas[i]);
                   return out;
                 }});
    t.push_back(integer("run.threads", "worker threads for compare", "", &SimConfig::run, &R::threads));
    return t;
  }();
  return table;
}

const Entry* find_entry(std::string_view key) {
  for (const Entry& e : entries()) {
    if (e.key.name == key) return &e;
  }
  return nullptr;
}

} // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const Entry& e : entries()) out.push_back(e.key);
    return out;
  }();
  return keys;
}

void set_config_value(SimConfig& cfg, std::string_view key, std::string_view value) {
  const Entry* e = find_entry(key);
  if (e == nullptr) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  e->set(cfg, value);
}

std::string get_config_value(const SimConfig& cfg, std::string_view key) {
  const Entry* e = find_entry(key);
  if (e == nullptr) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  if (!e->get) throw ConfigError("'" + std::string(key) + "' is an input-only alias");
  return e->get(cfg);
}

SimConfig parse_config_text(std::string_view text, SimConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    set_config_value(base, trim(std::string_view(body).substr(0, eq)), std::string_view(body).substr(eq + 1));
  }
  validate_config(base);
  return base;
}

SimConfig load_config_file(const std::string& path, SimConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

std::string serialize_config(const SimConfig& cfg) {
  std::string out;
  for (const Entry& e : entries()) {
    if (!e.get) continue;
    out += e.key.name + " = " + e.get(cfg) + "\n";
  }
  return out;
}

void validate_config(const SimConfig& cfg) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid configuration: ") + what);
  };
  const auto& p = cfg.physical;
  require(p.carrier_freq_hz > 0.0, "physical.carrier_freq_hz > 0");
  require(p.bandwidth_hz > 0.0, "physical.bandwidth_hz > 0");
  require(p.resource_blocks >= 1, "physical.resource_blocks >= 1");
  require(p.noise_density_w_hz > 0.0, "physical.noise_density_w_hz > 0");
  require(p.feedback_delay_s >= 0.0, "physical.feedback_delay_s >= 0");
  require(p.tx_power_w > 0.0, "physical.tx_power_w > 0");
  require(p.model_bits > 0.0, "physical.model_bits > 0");
  require(p.speed_of_light > 0.0, "physical.speed_of_light > 0");
  require(cfg.channel.shadowing_sigma_db >= 0.0, "channel.shadowing_sigma_db >= 0");
  require(cfg.channel.min_distance_m > 0.0, "channel.min_distance_m > 0");
  const auto& g = cfg.geometry;
  require(g.road_length_m > 0.0, "geometry.road_length_m > 0");
  require(g.lanes >= 1, "geometry.lanes >= 1");
  require(g.lane_width_m > 0.0, "geometry.lane_width_m > 0");
  require(g.rsu_spacing_m > 0.0, "geometry.rsu_spacing_m > 0");
  const auto& t = cfg.traffic;
  require(t.arrival_rate >= 0.0, "traffic.arrival_rate >= 0");
  require(t.speed_min_kmh > 0.0 && t.speed_max_kmh >= t.speed_min_kmh, "0 < traffic.speed_min_kmh <= traffic.speed_max_kmh");
  const auto& o = cfg.optimization;
  require(o.alpha >= 0.0 && o.alpha <= 1.0, "optimization.alpha in [0, 1]");
  require(o.u_min > 0.0 && o.u_min <= 1.0, "optimization.u_min in (0, 1]");
  require(o.round_time_cap_s > 0.0, "optimization.round_time_cap_s > 0");
  require(o.block_tol > 0.0 && o.bcd_tol > 0.0, "solver tolerances > 0");
  require(o.block_max_iter >= 1 && o.bcd_max_iter >= 1, "solver iteration caps >= 1");
  const auto& l = cfg.learning;
  require(l.classes >= 2, "learning.classes >= 2");
  require(l.dims >= l.classes, "learning.dims >= learning.classes");
  require(l.separation > 0.0, "learning.separation > 0");
  require(l.iid_per_class >= 1, "learning.iid_per_class >= 1");
  require(l.non_iid_max_classes >= 1 && l.non_iid_max_classes <= l.classes, "learning.non_iid_max_classes in [1, classes]");
  require(l.non_iid_min >= l.non_iid_max_classes && l.non_iid_max >= l.non_iid_min,
          "learning.non_iid_max_classes <= learning.non_iid_min <= learning.non_iid_max");
  require(l.epochs >= 0, "learning.epochs >= 0");
  require(l.batch_size >= 1, "learning.batch_size >= 1");
  require(l.momentum >= 0.0 && l.momentum < 1.0, "learning.momentum in [0, 1)");
  require(l.prox_mu >= 0.0, "learning.prox_mu >= 0");
  require(l.lr_base > 0.0 && l.lr_step >= 1, "learning.lr_base > 0 and learning.lr_step >= 1");
  require(l.test_per_class >= 1, "learning.test_per_class >= 1");
  const auto& r = cfg.run;
  require(r.rounds >= 0, "run.rounds >= 0");
  require(!r.seeds.empty(), "run.seeds non-empty");
  require(!r.compare_alphas.empty(), "run.compare_alphas non-empty");
  for (double a : r.compare_alphas) require(a >= 0.0 && a <= 1.0, "run.compare_alphas in [0, 1]");
  require(r.threads >= 1, "run.threads >= 1");
}

std::uint64_t config_hash(const SimConfig& cfg) {
  return hash_name(serialize_config(cfg));
}

scheduler::SchedulerParams scheduler_params(const SimConfig& cfg) {
  scheduler::SchedulerParams p;
  p.total_bandwidth_hz = cfg.physical.bandwidth_hz;
  p.resource_blocks = cfg.physical.resource_blocks;
  p.tx_power_w = cfg.physical.tx_power_w;
  p.noise_density_w_hz = cfg.physical.noise_density_w_hz;
  p.model_bits = cfg.physical.model_bits;
  p.round_time_cap_s = cfg.optimization.round_time_cap_s;
  p.u_min = cfg.optimization.u_min;
  p.alpha = cfg.optimization.alpha;
  p.block_tol = cfg.optimization.block_tol;
  p.block_max_iter = cfg.optimization.block_max_iter;
  p.bcd_tol = cfg.optimization.bcd_tol;
  p.bcd_max_iter = cfg.optimization.bcd_max_iter;
  return p;
}

channel::PathlossModel pathloss_model(const SimConfig& cfg) {
  return {cfg.channel.pathloss_slope_db, cfg.channel.pathloss_intercept_db, cfg.channel.pathloss_freq_slope_db,
          cfg.channel.min_distance_m};
}

mobility::RoadGeometry road_geometry(const SimConfig& cfg) {
  return mobility::make_geometry(cfg.geometry.road_length_m, cfg.geometry.lanes, cfg.geometry.lane_width_m,
                                 cfg.geometry.rsu_spacing_m);
}

mobility::SpeedRange speed_range(const SimConfig& cfg) {
  return {cfg.traffic.speed_min_kmh / 3.6, cfg.traffic.speed_max_kmh / 3.6};
}

fl::PartitionConfig partition_config(const SimConfig& cfg) {
  fl::PartitionConfig p;
  p.iid = cfg.learning.iid;
  p.iid_per_class = cfg.learning.iid_per_class;
  p.non_iid_min = cfg.learning.non_iid_min;
  p.non_iid_max = cfg.learning.non_iid_max;
  p.non_iid_max_classes = cfg.learning.non_iid_max_classes;
  return p;
}

} // namespace vrvfl
