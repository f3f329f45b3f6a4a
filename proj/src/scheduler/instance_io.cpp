// SPDX-License-Identifier: Apache-2.0
//
// Text dump of one scheduling instance:
//
//   vrvfl-instance v1
//   alpha <real>
//   u_min <real>
//   resource_blocks <real>
//   total_data <real>
//   vehicles <count>
//   <id> <D> <h_est_power> <epsilon> <L> <sojourn_s> <W_hz> <P_w> <N0_w_hz> <r_min> <r_max>
//   ... one line per vehicle, id ascending
#include "vrvfl/error.hpp"
#include "vrvfl/scheduler.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace vrvfl::scheduler {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double expect_field(std::istream& is, const std::string& key) {
  std::string got;
  double value = 0.0;
  if (!(is >> got) || got != key || !(is >> value)) {
    throw ConfigError("instance: expected field '" + key + "'");
  }
  return value;
}

} // namespace

void write_instance(std::ostream& os, const RoundContext& ctx) {
  os << "vrvfl-instance v1\n";
  os << "alpha " << num(ctx.alpha) << '\n';
  os << "u_min " << num(ctx.u_min) << '\n';
  os << "resource_blocks " << num(ctx.resource_blocks) << '\n';
  os << "total_data " << num(ctx.total_data) << '\n';
  os << "vehicles " << ctx.size() << '\n';
  for (const Candidate& v : ctx.vehicles) {
    os << v.id << ' ' << num(v.data_size) << ' ' << num(v.h_est_power) << ' ' << num(v.epsilon) << ' '
       << num(v.large_scale_gain) << ' ' << num(v.sojourn_s) << ' ' << num(v.bandwidth_hz) << ' '
       << num(v.tx_power_w) << ' ' << num(v.noise_density_w_hz) << ' ' << num(v.bounds.r_min) << ' '
       << num(v.bounds.r_max) << '\n';
  }
}

RoundContext read_instance(std::istream& is) {
  std::string magic, version;
  if (!(is >> magic >> version) || magic != "vrvfl-instance" || version != "v1") {
    throw ConfigError("instance: missing 'vrvfl-instance v1' header");
  }
  RoundContext ctx;
  ctx.alpha = expect_field(is, "alpha");
  ctx.u_min = expect_field(is, "u_min");
  ctx.resource_blocks = expect_field(is, "resource_blocks");
  ctx.total_data = expect_field(is, "total_data");
  const double count = expect_field(is, "vehicles");
  for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) {
    Candidate v;
    if (!(is >> v.id >> v.data_size >> v.h_est_power >> v.epsilon >> v.large_scale_gain >> v.sojourn_s >>
          v.bandwidth_hz >> v.tx_power_w >> v.noise_density_w_hz >> v.bounds.r_min >> v.bounds.r_max)) {
      throw ConfigError("instance: malformed vehicle row " + std::to_string(i));
    }
    ctx.vehicles.push_back(v);
  }
  return ctx;
}

} // namespace vrvfl::scheduler
