// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/mobility.hpp"

#include <doctest.h>

#include <cmath>

using namespace vrvfl;
using namespace vrvfl::mobility;

namespace {

VehicleState at(double x, double v, int lane = 0) {
  VehicleState s;
  s.position = x;
  s.velocity = v;
  s.lane = lane;
  return s;
}

} // namespace

TEST_CASE("geometry") {
  const auto g = make_geometry(2000.0, 6, 4.0, 100.0);
  REQUIRE(g.rsu_positions.size() == 20);
  CHECK(g.rsu_positions.front().x == 50.0);
  CHECK(g.rsu_positions.back().x == 1950.0);
  CHECK(g.lane_offset(0) == -10.0);
  CHECK(g.lane_offset(3) == 2.0);
  CHECK(g.half_width() == 12.0);
}

TEST_CASE("arrivals") {
  ArrivalProcess none(1, 6, 0.0);
  CHECK(none.advance(1e4).empty());

  const int trials = 10000;
  double total = 0.0;
  for (int k = 0; k < trials; ++k) {
    ArrivalProcess p(static_cast<std::uint64_t>(k), 6, 0.2);
    total += static_cast<double>(p.advance(10.0).size());
  }
  CHECK(total / trials == doctest::Approx(12.0).epsilon(0.05));

  // window slicing does not change arrival times
  ArrivalProcess a(5, 6, 0.2), b(5, 6, 0.2);
  const auto whole = a.advance(50.0);
  std::vector<Arrival> sliced;
  for (int i = 0; i < 50; ++i)
    for (const auto& x : b.advance(1.0)) sliced.push_back(x);
  REQUIRE(whole.size() == sliced.size());
  for (std::size_t i = 0; i < whole.size(); ++i) {
    CHECK(whole[i].time == sliced[i].time);
    CHECK(whole[i].id == sliced[i].id);
  }
  CHECK(vehicle_id(2, 3, 6) == 20);
}

TEST_CASE("spawned speeds stay in range") {
  const auto g = make_geometry(2000.0, 6, 4.0, 100.0);
  ArrivalProcess p(3, 6, 0.2);
  const SpeedRange speeds;
  const auto cars = spawn_arrivals(p, 500.0, g, speeds, 3, 3.0);
  REQUIRE(!cars.empty());
  for (const auto& c : cars) {
    CHECK(c.velocity >= 16.6666);
    CHECK(c.velocity <= 27.7778);
    CHECK(c.position == 0.0);
  }
}

TEST_CASE("advance") {
  const auto g = make_geometry(2000.0, 6, 4.0, 100.0);
  std::vector<VehicleState> cars{at(10, 20), at(1999, 25), at(500, 18)};
  cars[0].id = 1;
  cars[1].id = 2;
  cars[2].id = 3;
  auto copy = cars;
  CHECK(advance(copy, 0.0, g).departed.empty());
  CHECK(copy[1].position == 1999.0);

  const auto r = advance(cars, 1.0, g);
  REQUIRE(r.departed.size() == 1);
  CHECK(r.departed[0] == 2);
  CHECK(cars.size() + r.departed.size() == 3);
  CHECK(cars[0].position == 30.0);
}

TEST_CASE("sojourn and rsu distance") {
  const auto g = make_geometry(2000.0, 6, 4.0, 100.0);
  CHECK(remaining_sojourn(at(1000, 25), g) == doctest::Approx(40.0));
  CHECK(remaining_sojourn(at(2000, 25), g) == 0.0);
  CHECK(remaining_sojourn(at(0, 16.6667), g) == doctest::Approx(120.0).epsilon(1e-5));

  const auto single = make_geometry(2000.0, 1, 4.0, 100.0);
  CHECK(nearest_rsu_distance(at(120, 20), single) == doctest::Approx(30.0));
  CHECK(nearest_rsu_distance(at(150, 20, 3), g) == doctest::Approx(2.0));
  CHECK(nearest_rsu_distance(at(137, 20, 1), g) == doctest::Approx(nearest_rsu_distance(at(163, 20, 1), g)));
}
