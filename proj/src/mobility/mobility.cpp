// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/mobility.hpp"
#include "vrvfl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace vrvfl::mobility {

double RoadGeometry::lane_offset(int lane) const {
  return lane_width * (static_cast<double>(lane) - 0.5 * (lane_count - 1));
}

RoadGeometry make_geometry(double road_length, int lane_count, double lane_width,
                           double rsu_spacing) {
  if (!(road_length > 0.0)) throw ConfigError("geometry.road_length must be positive");
  if (lane_count < 1) throw ConfigError("geometry.lanes must be >= 1");
  if (!(lane_width > 0.0)) throw ConfigError("geometry.lane_width must be positive");
  if (!(rsu_spacing > 0.0)) throw ConfigError("geometry.rsu_spacing must be positive");
  RoadGeometry g;
  g.road_length = road_length;
  g.lane_count = lane_count;
  g.lane_width = lane_width;
  g.rsu_spacing = rsu_spacing;
  for (double x = 0.5 * rsu_spacing; x <= road_length; x += rsu_spacing) {
    g.rsu_positions.push_back({x, 0.0});
  }
  return g;
}

ArrivalProcess::ArrivalProcess(std::uint64_t seed, int lane_count, double rate_per_lane)
    : rate_(rate_per_lane) {
  if (!(rate_per_lane >= 0.0)) throw ConfigError("traffic.arrival_rate must be >= 0");
  if (lane_count < 1) throw ConfigError("geometry.lanes must be >= 1");
  lanes_.reserve(static_cast<std::size_t>(lane_count));
  for (int l = 0; l < lane_count; ++l) {
    Lane lane{make_stream(seed, "arrivals", static_cast<std::uint64_t>(l)), 0.0, 0};
    lane.next_time = draw_gap(lane);
    lanes_.push_back(std::move(lane));
  }
}

double ArrivalProcess::draw_gap(Lane& lane) {
  if (rate_ == 0.0) return std::numeric_limits<double>::infinity();
  std::exponential_distribution<double> gap(rate_);
  return gap(lane.rng);
}

std::vector<Arrival> ArrivalProcess::advance(double dt) {
  if (!(dt >= 0.0)) throw DomainError("ArrivalProcess::advance: negative dt");
  const double end = now_ + dt;
  std::vector<Arrival> out;
  const int lane_count = static_cast<int>(lanes_.size());
  for (int l = 0; l < lane_count; ++l) {
    Lane& lane = lanes_[static_cast<std::size_t>(l)];
    while (lane.next_time <= end) {
      out.push_back({l, lane.count, lane.next_time, vehicle_id(l, lane.count, lane_count)});
      ++lane.count;
      lane.next_time += draw_gap(lane);
    }
  }
  std::sort(out.begin(), out.end(), [](const Arrival& a, const Arrival& b) {
    return a.time != b.time ? a.time < b.time : a.lane < b.lane;
  });
  now_ = end;
  return out;
}

VehicleId vehicle_id(int lane, std::uint64_t lane_index, int lane_count) {
  return lane_index * static_cast<std::uint64_t>(lane_count) + static_cast<std::uint64_t>(lane);
}

std::vector<VehicleState> spawn_arrivals(ArrivalProcess& process, double dt,
                                         const RoadGeometry& geometry, SpeedRange speeds,
                                         std::uint64_t attribute_seed,
                                         double shadowing_sigma_db) {
  if (!(dt > 0.0)) throw DomainError("spawn_arrivals: dt must be positive");
  if (!(speeds.min_mps > 0.0) || !(speeds.max_mps >= speeds.min_mps)) {
    throw ConfigError("traffic speed range is empty or non-positive");
  }
  std::vector<VehicleState> spawned;
  for (const Arrival& a : process.advance(dt)) {
    Rng rng = make_stream(attribute_seed, "vehicle", a.id);
    std::uniform_real_distribution<double> speed(speeds.min_mps, speeds.max_mps);
    VehicleState v;
    v.id = a.id;
    v.lane = a.lane;
    v.position = 0.0;
    v.velocity = speeds.max_mps > speeds.min_mps ? speed(rng) : speeds.min_mps;
    v.spawn_time = a.time;
    if (shadowing_sigma_db > 0.0) {
      std::normal_distribution<double> shadow(0.0, shadowing_sigma_db);
      v.shadowing_db = shadow(rng);
    }
    v.dataset = a.id;
    spawned.push_back(v);
  }
  (void)geometry;
  return spawned;
}

AdvanceResult advance(std::vector<VehicleState>& vehicles, double dt, const RoadGeometry& geometry) {
  if (!(dt >= 0.0)) throw DomainError("advance: negative dt");
  AdvanceResult result;
  for (VehicleState& v : vehicles) {
    v.position += v.velocity * dt;
    if (v.position > geometry.road_length) result.departed.push_back(v.id);
  }
  std::erase_if(vehicles, [&](const VehicleState& v) { return v.position > geometry.road_length; });
  return result;
}

double remaining_sojourn(const VehicleState& vehicle, const RoadGeometry& geometry) {
  if (vehicle.position < 0.0 || vehicle.position > geometry.road_length) {
    throw DomainError("remaining_sojourn: vehicle " + std::to_string(vehicle.id) + " out of coverage");
  }
  if (!(vehicle.velocity > 0.0)) throw DomainError("remaining_sojourn: non-positive velocity");
  return (geometry.road_length - vehicle.position) / vehicle.velocity;
}

double nearest_rsu_distance(const VehicleState& vehicle, const RoadGeometry& geometry) {
  if (geometry.rsu_positions.empty()) throw ConfigError("geometry has no RSUs");
  const double y = geometry.lane_offset(vehicle.lane);
  double best = std::numeric_limits<double>::infinity();
  for (const Point& rsu : geometry.rsu_positions) {
    best = std::min(best, std::hypot(vehicle.position - rsu.x, y - rsu.y));
  }
  return best;
}

} // namespace vrvfl::mobility
