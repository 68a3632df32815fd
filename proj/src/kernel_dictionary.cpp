#include "dyadlab/kernel_dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dyadlab/error.hpp"

namespace dyadlab {

KernelDictionary KernelDictionary::standard(double alpha, std::size_t count, int samples_per_unit) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw PreconditionError("Holder exponent must lie in (0, 1]");
  if (count == 0 || count > 8) throw PreconditionError("standard dictionary has 1..8 kernels");
  if (samples_per_unit < 2) throw PreconditionError("need at least two samples per unit");
  KernelDictionary dict;
  dict.alpha_ = alpha;
  dict.n_ = samples_per_unit;
  const int n = samples_per_unit;
  const std::size_t len = static_cast<std::size_t>(2 * n + 1);
  std::vector<double> bump(len);
  for (std::size_t i = 0; i < len; ++i) {
    const double z = -1.0 + static_cast<double>(i) / n;
    bump[i] = (1.0 - z * z) * (1.0 - z * z);
  }
  double bump_sum = 0.0;
  for (double b : bump) bump_sum += b;

  for (std::size_t idx = 0; idx < count; ++idx) {
    const double omega = static_cast<double>(1 + idx / 4);
    const double phase = static_cast<double>(idx % 4) * std::numbers::pi / 4.0;
    std::vector<double> g(len);
    double sum = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const double z = -1.0 + static_cast<double>(i) / n;
      g[i] = std::sin(omega * std::numbers::pi * z + phase) * bump[i];
      sum += g[i];
    }
    const double shift = sum / bump_sum;
    for (std::size_t i = 0; i < len; ++i) g[i] -= shift * bump[i];
    double q = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      for (std::size_t j = i + 1; j < len; ++j) {
        const double dz = static_cast<double>(j - i) / n;
        q = std::max(q, std::abs(g[i] - g[j]) / std::pow(dz, alpha));
      }
    }
    // a hair below 1 so rounding in the recheck cannot flip the certificate
    const double scale = (1.0 - 1e-12) / q;
    for (double& v : g) v *= scale;
    dict.kernels_.push_back(std::move(g));
  }
  if (!dict.certify()) throw std::logic_error("standard kernel dictionary failed its own certificate");
  return dict;
}

double KernelDictionary::eval(std::size_t k, double z) const {
  const auto& s = kernels_.at(k);
  if (!(z > -1.0 && z < 1.0)) return 0.0;
  const double u = (z + 1.0) * n_;
  const auto i = static_cast<std::size_t>(u);
  const double frac = u - static_cast<double>(i);
  if (i + 1 >= s.size()) return s.back();
  return s[i] + frac * (s[i + 1] - s[i]);
}

double KernelDictionary::max_mean_error() const {
  double worst = 0.0;
  for (const auto& g : kernels_) {
    double sum = 0.0;
    for (double v : g) sum += v;
    worst = std::max(worst, std::abs(sum) / (2.0 * n_));
  }
  return worst;
}

double KernelDictionary::max_holder_quotient() const {
  double q = 0.0;
  for (const auto& g : kernels_) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = i + 1; j < g.size(); ++j) {
        const double dz = static_cast<double>(j - i) / n_;
        q = std::max(q, std::abs(g[i] - g[j]) / std::pow(dz, alpha_));
      }
    }
  }
  return q;
}

bool KernelDictionary::certify() const {
  for (const auto& g : kernels_) {
    if (g.size() != static_cast<std::size_t>(2 * n_ + 1)) return false;
    if (g.front() != 0.0 || g.back() != 0.0) return false;
  }
  return max_mean_error() <= 1e-12 && max_holder_quotient() <= 1.0;
}

KernelDictionary KernelDictionary::prefix(std::size_t count) const {
  KernelDictionary out = *this;
  if (count < out.kernels_.size()) out.kernels_.resize(count);
  return out;
}

}  // namespace dyadlab
