// Scalar reference kernels. These define the semantics the SIMD variants must match.

#include <algorithm>

#include "kernels/kernels_internal.hpp"

namespace fairspec::kernels::detail {
namespace {

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double min_sum_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::min(a[i], b[i]);
  return acc;
}

double positive_diff_scalar(const double* a, const double* b, double* out, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::max(0.0, a[i] - b[i]);
    acc += out[i];
  }
  return acc;
}

void scale_scalar(const double* x, double c, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = c * x[i];
}

void axpy_scalar(double c, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += c * x[i];
}

void lerp_scalar(double* x, const double* v, double t, std::size_t n) {
  const double keep = 1.0 - t;
  for (std::size_t i = 0; i < n; ++i) x[i] = keep * x[i] + t * v[i];
}

void reciprocal_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / x[i];
}

void min_plus_scaled_scalar(const double* a, const double* b, const double* r, double c,
                            double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::min(a[i], b[i]) + c * r[i];
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static constexpr KernelTable table{
      sum_scalar,   dot_scalar,  min_sum_scalar,    positive_diff_scalar,  scale_scalar,
      axpy_scalar,  lerp_scalar, reciprocal_scalar, min_plus_scaled_scalar,
  };
  return table;
}

}  // namespace fairspec::kernels::detail
