// SPDX-License-Identifier: Apache-2.0
//
// Dense double-precision kernels behind the learning hot loops. Every kernel
// has a scalar reference and, on x86-64, an AVX2+FMA variant; the variant is
// picked once at runtime from CPUID and can be pinned with VRVFL_SIMD=scalar
// (or avx2). The variants agree to rounding, not bit-for-bit.
#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace vrvfl::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
Isa active_isa();
/// Throws DomainError if the ISA was not compiled in or the CPU lacks it.
void force_isa(Isa isa);

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y[r] = sum_c m[r*cols + c] * x[c]
  void (*gemv)(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);
  // m[r*cols + c] += alpha * x[r] * z[c]
  void (*ger)(double alpha, const double* x, std::size_t rows, const double* z, std::size_t cols,
              double* m);
};

const KernelTable& table(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void gemv(std::span<const double> m, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y);
void ger(double alpha, std::span<const double> x, std::span<const double> z,
         std::span<double> m);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);
void ger(double alpha, const double* x, std::size_t rows, const double* z, std::size_t cols,
         double* m);
} // namespace scalar

#if defined(VRVFL_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);
void ger(double alpha, const double* x, std::size_t rows, const double* z, std::size_t cols,
         double* m);
} // namespace avx2
#endif

} // namespace vrvfl::kernels
