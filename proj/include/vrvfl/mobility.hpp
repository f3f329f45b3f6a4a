// SPDX-License-Identifier: Apache-2.0
//
// Highway population: Poisson arrivals per lane at x = 0, constant speeds,
// departure once x > road_length. RSUs sit on the road center line.
#pragma once

#include "vrvfl/channel.hpp"
#include "vrvfl/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace vrvfl::mobility {

using VehicleId = std::uint64_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct RoadGeometry {
  double road_length = 2000.0;
  int lane_count = 6;
  double lane_width = 4.0;
  double rsu_spacing = 100.0;
  std::vector<Point> rsu_positions;

  /// Lanes split symmetrically about the center line: y = lane_width * (lane - (L-1)/2).
  double lane_offset(int lane) const;
  double half_width() const { return 0.5 * lane_width * lane_count; }
};

/// RSUs at x = spacing/2 + k * spacing, y = 0, for every x inside the road.
RoadGeometry make_geometry(double road_length, int lane_count, double lane_width,
                           double rsu_spacing);

struct SpeedRange {
  double min_mps = 60.0 / 3.6;
  double max_mps = 100.0 / 3.6;
};

struct VehicleState {
  VehicleId id = 0;
  int lane = 0;
  double position = 0.0; // along the road, m
  double velocity = 0.0; // m/s, constant for the lifetime
  double spawn_time = 0.0;
  double shadowing_db = 0.0;
  std::uint64_t dataset = 0; // handle into the partition store
  channel::ChannelState channel;
};

struct Arrival {
  int lane = 0;
  std::uint64_t lane_index = 0; // k-th arrival on this lane
  double time = 0.0;
  VehicleId id = 0;
};

/// Independent exponential inter-arrival clocks, one per lane, in absolute
/// time. Arrival times depend only on (seed, lane), never on how the caller
/// slices time into windows.
class ArrivalProcess {
public:
  ArrivalProcess(std::uint64_t seed, int lane_count, double rate_per_lane);

  /// Arrivals with time in (now, now + dt], ordered by (time, lane). Advances now.
  std::vector<Arrival> advance(double dt);
  double now() const { return now_; }
  double rate_per_lane() const { return rate_; }

private:
  struct Lane {
    Rng rng;
    double next_time = 0.0;
    std::uint64_t count = 0;
  };
  double draw_gap(Lane& lane);

  double rate_;
  double now_ = 0.0;
  std::vector<Lane> lanes_;
};

/// Vehicle ids interleave lanes: id = lane_index * lane_count + lane.
VehicleId vehicle_id(int lane, std::uint64_t lane_index, int lane_count);

/// New vehicles at position 0 for every arrival in the next dt seconds.
/// Speed and shadowing come from the vehicle's own stream
/// make_stream(attribute_seed, "vehicle", id).
std::vector<VehicleState> spawn_arrivals(ArrivalProcess& process, double dt,
                                         const RoadGeometry& geometry, SpeedRange speeds,
                                         std::uint64_t attribute_seed,
                                         double shadowing_sigma_db = 0.0);

struct AdvanceResult {
  std::vector<VehicleId> departed;
};

/// position += velocity * dt; removes (and reports) vehicles past the road end.
AdvanceResult advance(std::vector<VehicleState>& vehicles, double dt, const RoadGeometry& geometry);

/// Time left in coverage, (road_length - position) / velocity.
double remaining_sojourn(const VehicleState& vehicle, const RoadGeometry& geometry);

double nearest_rsu_distance(const VehicleState& vehicle, const RoadGeometry& geometry);

} // namespace vrvfl::mobility
