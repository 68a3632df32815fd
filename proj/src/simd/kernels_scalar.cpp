#include <cmath>

#include "kernels_internal.hpp"

namespace dyadlab::simd::detail {
namespace {

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void pair_sums_scalar(const double* in, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = in[2 * i] + in[2 * i + 1];
}

void add_scalar_scalar(double* x, std::size_t n, double c) {
  for (std::size_t i = 0; i < n; ++i) x[i] += c;
}

void max_scalar_scalar(double* x, std::size_t n, double c) {
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] < c ? c : x[i];
}

void sqrt_scalar(double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sqrt(x[i]);
}

void multiply_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_scalar(double* x, std::size_t n, double c) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= c;
}

}  // namespace

const KernelTable kScalarTable{
    Backend::scalar,  "scalar",       &sum_scalar,      &dot_scalar,    &pair_sums_scalar,
    &add_scalar_scalar, &max_scalar_scalar, &sqrt_scalar, &multiply_scalar, &scale_scalar,
};

}  // namespace dyadlab::simd::detail
