#pragma once

// Data-parallel inner loops shared by the grid operators and norms.
//
// Every kernel has a scalar reference implementation. On x86-64 an AVX2
// variant is compiled in a separate translation unit and selected at first
// use when the CPU reports AVX2 support. Setting DYADLAB_SIMD=scalar in the
// environment forces the reference path.
//
// Element-wise kernels (pair_sums, add_scalar, max_scalar, sqrt_inplace,
// multiply, scale) produce bit-identical results on every backend.
// Reductions (sum, dot) reassociate and agree to rounding only.

#include <cstddef>
#include <span>
#include <string_view>

namespace dyadlab::simd {

enum class Backend { scalar, avx2 };

struct KernelTable {
  Backend backend;
  std::string_view name;
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // out[i] = in[2i] + in[2i+1], n = output length
  void (*pair_sums)(const double* in, double* out, std::size_t n);
  void (*add_scalar)(double* x, std::size_t n, double c);
  // x[i] = max(x[i], c)
  void (*max_scalar)(double* x, std::size_t n, double c);
  void (*sqrt_inplace)(double* x, std::size_t n);
  void (*multiply)(const double* a, const double* b, double* out, std::size_t n);
  void (*scale)(double* x, std::size_t n, double c);
};

const KernelTable& scalar_kernels() noexcept;

// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_kernels() noexcept;

const KernelTable& active() noexcept;

// Test hook; returns false if the requested backend is unavailable.
bool select_backend(Backend b) noexcept;

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

inline void pair_sums(std::span<const double> in, std::span<double> out) {
  active().pair_sums(in.data(), out.data(), out.size());
}

inline void add_scalar(std::span<double> x, double c) { active().add_scalar(x.data(), x.size(), c); }

inline void max_scalar(std::span<double> x, double c) { active().max_scalar(x.data(), x.size(), c); }

inline void sqrt_inplace(std::span<double> x) { active().sqrt_inplace(x.data(), x.size()); }

inline void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  active().multiply(a.data(), b.data(), out.data(), out.size());
}

inline void scale(std::span<double> x, double c) { active().scale(x.data(), x.size(), c); }

}  // namespace dyadlab::simd
