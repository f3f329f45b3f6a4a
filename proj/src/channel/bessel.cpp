// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/channel.hpp"
#include "vrvfl/error.hpp"

#include <cmath>
#include <numbers>

namespace vrvfl::channel {

namespace {

constexpr double kSeriesLimit = 12.0;

double j0_series(double x) {
  // sum_k (-x^2/4)^k / (k!)^2
  const double q = -0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (std::abs(term) < 1e-17) break;
  }
  return sum;
}

double j0_asymptotic(double x) {
  // J0(x) ~ sqrt(2/(pi x)) (P cos w - Q sin w), w = x - pi/4, with
  // t_k = t_{k-1} * (-(2k-1)^2) / (8 k x); P takes even k with alternating
  // sign, Q the odd ones.
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double last_abs = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(odd * odd) / (8.0 * k * x);
    const double mag = std::abs(term);
    if (mag > last_abs) break; // asymptotic series starts diverging
    last_abs = mag;
    // a_k / x^k carries sign (-1)^k; P/Q use (-1)^(k/2) a_{2j}, (-1)^j a_{2j+1}.
    const int j = k / 2;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sign * std::abs(term);
    } else {
      q += sign * -std::abs(term);
    }
    if (mag < 1e-17) break;
  }
  const double w = x - 0.25 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(w) - q * std::sin(w));
}

} // namespace

double bessel_j0(double x) {
  if (!std::isfinite(x)) throw DomainError("bessel_j0: non-finite argument");
  const double ax = std::abs(x);
  return ax <= kSeriesLimit ? j0_series(ax) : j0_asymptotic(ax);
}

} // namespace vrvfl::channel
