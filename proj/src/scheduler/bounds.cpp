// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/error.hpp"
#include "vrvfl/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vrvfl::scheduler {

channel::OutageCoefficients Candidate::coefficients(double rate) const {
  return channel::outage_coefficients(rate, bandwidth_hz, epsilon, tx_power_w, large_scale_gain,
                                      noise_density_w_hz);
}

double Candidate::success_probability(double rate) const {
  return channel::success_probability(coefficients(rate), h_est_power);
}

RateBounds rate_bounds(double h_est_power, double epsilon, double large_scale_gain,
                       double sojourn_s, const SchedulerParams& params) {
  RateBounds b;
  const double w = params.bandwidth_per_vehicle();
  const double snr_est = params.tx_power_w * large_scale_gain * epsilon * epsilon * h_est_power /
                         (w * params.noise_density_w_hz);
  b.r_max = channel::capacity(w, std::max(0.0, snr_est));
  if (!(sojourn_s > 0.0)) {
    b.r_min = std::numeric_limits<double>::infinity();
  } else {
    b.r_min = params.model_bits / std::min(params.round_time_cap_s, sojourn_s);
  }
  return b;
}

RateBounds rate_bounds(const mobility::VehicleState& vehicle, const mobility::RoadGeometry& geometry,
                       const SchedulerParams& params) {
  const double sojourn = (vehicle.position >= 0.0 && vehicle.position <= geometry.road_length)
                             ? mobility::remaining_sojourn(vehicle, geometry)
                             : 0.0;
  return rate_bounds(vehicle.channel.h_est_power(), vehicle.channel.epsilon,
                     vehicle.channel.large_scale_gain, sojourn, params);
}

Candidate make_candidate(const mobility::VehicleState& vehicle, const mobility::RoadGeometry& geometry,
                         const SchedulerParams& params, double data_size) {
  Candidate c;
  c.id = vehicle.id;
  c.data_size = data_size;
  c.h_est_power = vehicle.channel.h_est_power();
  c.epsilon = vehicle.channel.epsilon;
  c.large_scale_gain = vehicle.channel.large_scale_gain;
  c.sojourn_s = (vehicle.position >= 0.0 && vehicle.position <= geometry.road_length)
                    ? mobility::remaining_sojourn(vehicle, geometry)
                    : 0.0;
  c.bandwidth_hz = params.bandwidth_per_vehicle();
  c.tx_power_w = params.tx_power_w;
  c.noise_density_w_hz = params.noise_density_w_hz;
  c.bounds = rate_bounds(vehicle, geometry, params);
  return c;
}

std::vector<VehicleId> compute_feasible_set(std::span<const Candidate> candidates) {
  std::vector<VehicleId> ids;
  for (const Candidate& c : candidates) {
    if (c.bounds.feasible() && c.epsilon != 0.0) ids.push_back(c.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

RoundContext build_context(std::span<const Candidate> candidates, const SchedulerParams& params,
                           double alpha, std::optional<double> total_data_override) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("optimization.alpha must lie in [0, 1]");
  if (!(params.u_min > 0.0 && params.u_min <= 1.0)) throw ConfigError("optimization.u_min must lie in (0, 1]");
  if (params.resource_blocks < 1) throw ConfigError("physical.resource_blocks must be >= 1");

  RoundContext ctx;
  ctx.alpha = alpha;
  ctx.u_min = params.u_min;
  ctx.resource_blocks = static_cast<double>(params.resource_blocks);
  for (const Candidate& c : candidates) {
    if (c.bounds.feasible() && c.epsilon != 0.0) ctx.vehicles.push_back(c);
  }
  std::sort(ctx.vehicles.begin(), ctx.vehicles.end(),
            [](const Candidate& a, const Candidate& b) { return a.id < b.id; });

  const auto capacity_limit = static_cast<std::size_t>(
      std::floor(ctx.resource_blocks / ctx.u_min + 1e-9));
  if (ctx.vehicles.size() > capacity_limit) {
    std::vector<Candidate> by_rmax = ctx.vehicles;
    std::stable_sort(by_rmax.begin(), by_rmax.end(), [](const Candidate& a, const Candidate& b) {
      return a.bounds.r_max != b.bounds.r_max ? a.bounds.r_max < b.bounds.r_max : a.id < b.id;
    });
    const std::size_t excess = ctx.vehicles.size() - capacity_limit;
    for (std::size_t i = 0; i < excess; ++i) ctx.dropped.push_back(by_rmax[i].id);
    std::sort(ctx.dropped.begin(), ctx.dropped.end());
    std::erase_if(ctx.vehicles, [&](const Candidate& c) {
      return std::binary_search(ctx.dropped.begin(), ctx.dropped.end(), c.id);
    });
  }

  double total = 0.0;
  for (const Candidate& c : ctx.vehicles) total += c.data_size;
  ctx.total_data = total_data_override.value_or(total);
  return ctx;
}

} // namespace vrvfl::scheduler
