#pragma once

// Finite dictionaries of grid-sampled kernels supported in [-1, 1] with mean
// zero and a certified Holder-alpha bound |g(x) - g(y)| <= |x - y|^alpha on
// all sample pairs.

#include <cstddef>
#include <vector>

namespace dyadlab {

class KernelDictionary {
 public:
  // sin(w pi z + phase) (1 - z^2)^2 for w in {1, 2} and phases
  // {0, pi/4, pi/2, 3pi/4}, mean corrected and scaled to the Holder bound.
  // count <= 8 keeps a prefix of that list.
  static KernelDictionary standard(double alpha, std::size_t count = 8, int samples_per_unit = 64);

  double alpha() const noexcept { return alpha_; }
  int samples_per_unit() const noexcept { return n_; }
  std::size_t size() const noexcept { return kernels_.size(); }
  bool empty() const noexcept { return kernels_.empty(); }
  // Samples at z = -1 + i / n, i = 0..2n.
  const std::vector<double>& samples(std::size_t k) const { return kernels_.at(k); }
  // Linear interpolation of the samples; zero outside [-1, 1].
  double eval(std::size_t k, double z) const;

  // Re-checks support, mean and the Holder bound on every sample pair.
  bool certify() const;
  double max_mean_error() const;
  double max_holder_quotient() const;

  KernelDictionary prefix(std::size_t count) const;

 private:
  double alpha_ = 1.0;
  int n_ = 64;
  std::vector<std::vector<double>> kernels_;
};

}  // namespace dyadlab
