// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/channel.hpp"
#include "vrvfl/error.hpp"
#include "vrvfl/validation.hpp"

#include <doctest.h>

#include <cmath>

using namespace vrvfl;
using namespace vrvfl::channel;

// values below were produced by the long-double series oracle and frozen
TEST_CASE("bessel_j0 fixed points") {
  CHECK(bessel_j0(0.0) == 1.0);
  CHECK(bessel_j0(1.0) == doctest::Approx(0.765197686557967).epsilon(1e-12));
  CHECK(std::abs(bessel_j0(2.40482555769577277)) < 1e-8);
  CHECK(bessel_j0(-3.3) == bessel_j0(3.3));
}

TEST_CASE("bessel_j0 matches the series oracle on |x| <= 20") {
  for (int i = -400; i <= 400; ++i) {
    const double x = 0.05 * i + 0.0123;
    CAPTURE(x);
    CHECK(std::abs(bessel_j0(x) - static_cast<double>(validation::bessel_j0_reference(x))) < 1e-9);
  }
}

TEST_CASE("temporal correlation") {
  CHECK(temporal_correlation(0.0, 5.9e9, 5e-4) == 1.0);
  CHECK(temporal_correlation(27.7778, 5.9e9, 5e-4) == doctest::Approx(0.38790598455).epsilon(1e-9));
  CHECK(temporal_correlation(16.6667, 5.9e9, 5e-4) == doctest::Approx(0.751644809102).epsilon(1e-9));
  CHECK(temporal_correlation(27.7778, 5.9e9, 5e-4, 3e8) == doctest::Approx(0.388593537678).epsilon(1e-9));
  CHECK(temporal_correlation(16.6667, 5.9e9, 5e-4, 3e8) == doctest::Approx(0.751965383487).epsilon(1e-9));
}

TEST_CASE("large scale gain") {
  const PathlossModel pl;
  CHECK(pl.pathloss_db(50.0, 5.9e9) == doctest::Approx(81.0042592446).epsilon(1e-10));
  CHECK(large_scale_gain(50.0, 5.9e9, 0.0) == doctest::Approx(7.93549597217e-09).epsilon(1e-9));
  CHECK(large_scale_gain(100.0, 5.9e9, 0.0) < large_scale_gain(50.0, 5.9e9, 0.0));
  CHECK(large_scale_gain(50.0, 5.9e9, 3.0) ==
        doctest::Approx(large_scale_gain(50.0, 5.9e9, 0.0) * std::pow(10.0, -0.3)).epsilon(1e-12));
  CHECK(large_scale_gain(0.2, 5.9e9, 0.0) == large_scale_gain(1.0, 5.9e9, 0.0));
}

TEST_CASE("fading statistics") {
  Rng rng(42);
  const double eps = 0.6;
  const int n = 100000;
  double power = 0.0;
  Complex corr{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    const auto pair = sample_fading_pair(rng);
    ChannelState s{pair.h_est, pair.h_err, eps, 1.0};
    power += s.h_est_power();
    corr += s.composed() * std::conj(pair.h_est);
  }
  CHECK(power / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(corr.real() / n - eps) < 0.02);
  CHECK(std::abs(corr.imag() / n) < 0.02);

  ChannelState perfect{{0.3, -0.4}, {1.0, 2.0}, 1.0, 1.0};
  CHECK(perfect.composed() == perfect.h_est);
}

TEST_CASE("sinr and capacity") {
  ChannelState s{{1.0, 0.0}, {0.0, 0.0}, 1.0, 1.0};
  CHECK(sinr(1.0, s, 1.0, 1.0) == doctest::Approx(1.0));
  ChannelState t{{std::sqrt(2.0), 0.0}, {1.0, 0.0}, std::sqrt(0.5), 1.0};
  CHECK(sinr(1.0, t, 0.5, 1.0) == doctest::Approx(1.0));
  const double limit = 0.5 * 2.0 / (0.5 * 1.0);
  CHECK(sinr(1e9, t, 0.5, 1.0) == doctest::Approx(limit).epsilon(1e-3));

  CHECK(capacity(1.0, 1.0) == doctest::Approx(1.0));
  CHECK(capacity(5e5, 3.0) == doctest::Approx(1e6));
  CHECK(capacity(5e5, 0.0) == 0.0);
  CHECK(perfect_csi_capacity(1.0, t, 0.5, 1.0) == doctest::Approx(capacity(1.0, 2.0)));
}

TEST_CASE("outage coefficients and success probability") {
  auto c = outage_coefficients(1.0, 1.0, std::sqrt(0.5), 2.0, 1.0, 1.0);
  CHECK(c.a == doctest::Approx(1.0));
  CHECK(c.b == doctest::Approx(1.0));
  c = outage_coefficients(0.0, 1.0, 0.5, 2.0, 1.0, 1.0);
  CHECK(c.a == 0.0);
  CHECK(c.b == 0.0);
  CHECK(outage_coefficients(3.0, 1.0, 1.0, 2.0, 1.0, 1.0).a == 0.0);
  CHECK_THROWS_AS(outage_coefficients(1.0, 1.0, 0.0, 2.0, 1.0, 1.0), DegenerateChannelError);

  CHECK(success_probability({1.0, 1.0}, 1.0 + std::log(2.0)) == doctest::Approx(0.5));
  CHECK(success_probability({1.0, 1.0}, 1.0) == 0.0);
  CHECK(success_probability({1.0, 1.0}, 0.5) == 0.0);
  CHECK(success_probability({0.0, 1.0}, 1.5) == 1.0);
  CHECK(success_probability({0.0, 1.0}, 0.5) == 0.0);

  CHECK(transmission_succeeds({1.0, 1.0}, 2.0, 0.99));
  CHECK_FALSE(transmission_succeeds({1.0, 1.0}, 2.0, 1.01));
}

TEST_CASE("success probability matches Monte Carlo") {
  Rng rng(3);
  for (double h : {0.8, 1.5, 3.0}) {
    const OutageCoefficients c{0.7, 0.4};
    const double mc = validation::monte_carlo_success(c.a, c.b, h, 200000, rng);
    CHECK(std::abs(mc - success_probability(c, h)) < 0.01);
  }
}
