// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/error.hpp"
#include "vrvfl/kernels.hpp"
#include "vrvfl/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace vrvfl;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

// rounding budget for a length-n reduction of O(1) terms
double budget(std::size_t n) { return 1e-13 * static_cast<double>(n + 1); }

} // namespace

TEST_CASE("scalar kernels against hand loops") {
  Rng rng(7);
  const auto a = random_vec(rng, 13);
  const auto b = random_vec(rng, 13);
  double ref = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ref += a[i] * b[i];
  CHECK(kernels::scalar::dot(a.data(), b.data(), a.size()) == doctest::Approx(ref).epsilon(1e-14));

  std::vector<double> m = random_vec(rng, 3 * 5), x = random_vec(rng, 5), y(3);
  kernels::scalar::gemv(m.data(), 3, 5, x.data(), y.data());
  for (std::size_t r = 0; r < 3; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < 5; ++c) s += m[r * 5 + c] * x[c];
    CHECK(y[r] == doctest::Approx(s).epsilon(1e-14));
  }

  auto g = m;
  const auto xr = random_vec(rng, 3);
  kernels::scalar::ger(0.5, xr.data(), 3, x.data(), 5, g.data());
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 5; ++c) CHECK(g[r * 5 + c] == doctest::Approx(m[r * 5 + c] + 0.5 * xr[r] * x[c]));

  CHECK(kernels::scalar::dot(a.data(), b.data(), 0) == 0.0);
}

TEST_CASE("avx2 kernels agree with scalar over odd sizes") {
#if defined(VRVFL_HAVE_AVX2)
  if (!kernels::isa_available(kernels::Isa::avx2)) {
    MESSAGE("cpu lacks AVX2+FMA, skipped");
    return;
  }
  Rng rng(11);
  for (std::size_t n = 0; n <= 67; ++n) {
    CAPTURE(n);
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);
    const double s = kernels::scalar::dot(a.data(), b.data(), n);
    const double v = kernels::avx2::dot(a.data(), b.data(), n);
    CHECK(std::abs(s - v) <= budget(n) * 10);

    auto y1 = b, y2 = b;
    kernels::scalar::axpy(-0.75, a.data(), y1.data(), n);
    kernels::avx2::axpy(-0.75, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15 * (1 + std::abs(y1[i])));

    const std::size_t rows = 1 + n % 7;
    const auto m = random_vec(rng, rows * n);
    std::vector<double> g1(rows), g2(rows);
    kernels::scalar::gemv(m.data(), rows, n, a.data(), g1.data());
    kernels::avx2::gemv(m.data(), rows, n, a.data(), g2.data());
    for (std::size_t r = 0; r < rows; ++r) CHECK(std::abs(g1[r] - g2[r]) <= budget(n) * 10);

    const auto xr = random_vec(rng, rows);
    auto m1 = m, m2 = m;
    kernels::scalar::ger(1.3, xr.data(), rows, a.data(), n, m1.data());
    kernels::avx2::ger(1.3, xr.data(), rows, a.data(), n, m2.data());
    for (std::size_t i = 0; i < m1.size(); ++i) CHECK(std::abs(m1[i] - m2[i]) <= 1e-14 * (1 + std::abs(m1[i])));
  }
#else
  MESSAGE("built without AVX2 variants");
#endif
}

TEST_CASE("dispatch can be pinned") {
  const auto before = kernels::active_isa();
  kernels::force_isa(kernels::Isa::scalar);
  CHECK(kernels::active_isa() == kernels::Isa::scalar);
  CHECK(kernels::isa_name(kernels::Isa::scalar) == "scalar");
  if (!kernels::isa_available(kernels::Isa::avx2)) {
    CHECK_THROWS_AS(kernels::force_isa(kernels::Isa::avx2), DomainError);
  }
  kernels::force_isa(before);
  CHECK(kernels::active_isa() == before);
}

TEST_CASE("span wrappers reject mismatched lengths") {
  std::vector<double> a(3), b(4);
  CHECK_THROWS(kernels::dot(a, b));
  CHECK_THROWS(kernels::axpy(1.0, a, b));
}
