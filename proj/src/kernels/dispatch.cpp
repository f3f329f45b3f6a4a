// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/error.hpp"
#include "vrvfl/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace vrvfl::kernels {

namespace {

constexpr KernelTable kScalarTable{scalar::dot, scalar::axpy, scalar::gemv, scalar::ger};
#if defined(VRVFL_HAVE_AVX2)
constexpr KernelTable kAvx2Table{avx2::dot, avx2::axpy, avx2::gemv, avx2::ger};
#endif

bool cpu_has_avx2() {
#if defined(VRVFL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("VRVFL_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return Isa::scalar;
    if (want == "avx2" && cpu_has_avx2()) return Isa::avx2;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<int>& active_slot() {
  static std::atomic<int> slot{static_cast<int>(detect())};
  return slot;
}

} // namespace

std::string_view isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool isa_available(Isa isa) {
  return isa == Isa::scalar || cpu_has_avx2();
}

Isa active_isa() {
  return static_cast<Isa>(active_slot().load(std::memory_order_relaxed));
}

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw DomainError("kernel ISA not available: " + std::string(isa_name(isa)));
  }
  active_slot().store(static_cast<int>(isa), std::memory_order_relaxed);
}

const KernelTable& table(Isa isa) {
#if defined(VRVFL_HAVE_AVX2)
  if (isa == Isa::avx2) return kAvx2Table;
#endif
  (void)isa;
  return kScalarTable;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("dot: length mismatch");
  return table(active_isa()).dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw DomainError("axpy: length mismatch");
  table(active_isa()).axpy(alpha, x.data(), y.data(), x.size());
}

void gemv(std::span<const double> m, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y) {
  if (m.size() != rows * cols || x.size() != cols || y.size() != rows) {
    throw DomainError("gemv: shape mismatch");
  }
  table(active_isa()).gemv(m.data(), rows, cols, x.data(), y.data());
}

void ger(double alpha, std::span<const double> x, std::span<const double> z,
         std::span<double> m) {
  if (m.size() != x.size() * z.size()) throw DomainError("ger: shape mismatch");
  table(active_isa()).ger(alpha, x.data(), x.size(), z.data(), z.size(), m.data());
}

} // namespace vrvfl::kernels
