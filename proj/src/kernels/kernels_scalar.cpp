// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/kernels.hpp"

namespace vrvfl::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(m + r * cols, x, cols);
}

void ger(double alpha, const double* x, std::size_t rows, const double* z, std::size_t cols,
         double* m) {
  for (std::size_t r = 0; r < rows; ++r) axpy(alpha * x[r], z, m + r * cols, cols);
}

} // namespace vrvfl::kernels::scalar
