#include "dyadlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dyadlab/error.hpp"
#include "dyadlab/operators.hpp"
#include "dyadlab/testing_sequence.hpp"
#include "dyadlab/weights.hpp"

namespace dyadlab {
namespace {

constexpr double kLn2 = std::numbers::ln2;

// sum_{m >= 1} m^{-alpha} 2^{-eps m}
double damped_series(double alpha, double epsilon, double rel_tol) {
  const double r = std::exp2(-epsilon);
  const double one_minus_r = -std::expm1(-epsilon * kLn2);
  double sum = 0.0;
  double rm = 1.0;
  for (std::int64_t m = 1;; ++m) {
    rm *= r;
    sum += std::pow(static_cast<double>(m), -alpha) * rm;
    const double tail = std::pow(static_cast<double>(m + 1), -alpha) * rm * r / one_minus_r;
    if (tail < rel_tol * sum) break;
  }
  return sum;
}

}  // namespace

std::vector<double> dyadic_epsilons(int first, int last) {
  std::vector<double> out;
  for (int k = first; k <= last; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

double power_weight_ap(double epsilon, double p) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw PreconditionError("power weight needs 0 < eps <= 1");
  if (!(p > 1.0)) throw PreconditionError("A_p needs p > 1");
  return 1.0 / (epsilon * std::pow(1.0 + (1.0 - epsilon) / (p - 1.0), p - 1.0));
}

ExampleResult example_power_weight(double p, std::span<const double> epsilons, const Domain& d) {
  if (d.top_level < 6) throw PreconditionError("power weight example needs M >= 6");
  ExampleResult out;
  const GridFunction f = GridFunction::indicator(d, 0.0, 1.0);
  std::vector<std::pair<double, double>> xy;
  for (double eps : epsilons) {
    const Weight w = Weight::power(eps);
    ExperimentRecord r;
    r.p = p;
    r.epsilon = eps;
    r.ap_char = ap_characteristic(w, p, d).value;
    r.ratio = sigma_testing_ratio(haar_square_function, f, w, p);
    r.op = "haar";
    r.norm_kind = "weak";
    out.records.push_back(r);
    xy.emplace_back(r.ap_char, r.ratio);
  }
  std::sort(xy.begin(), xy.end());
  if (xy.size() >= 3) out.fit = fit_exponent(xy);
  return out;
}

ExperimentRecord lebesgue_reference(double p, const Domain& d) {
  const Weight w = Weight::lebesgue(d);
  ExperimentRecord r;
  r.p = p;
  r.epsilon = 1.0;
  r.ap_char = ap_characteristic(w, p, d).value;
  r.ratio = sigma_testing_ratio(haar_square_function, GridFunction::indicator(d, 0.0, 1.0), w, p);
  r.op = "haar";
  r.norm_kind = "weak";
  r.notes = "lebesgue reference, not fitted";
  return r;
}

double dual_testing_average(double alpha, double epsilon, int k, double rel_tol) {
  if (k < 1) throw PreconditionError("testing index starts at 1");
  const double c = testing_constant(alpha);
  return c * std::expm1(epsilon * kLn2) / epsilon * std::exp2(k * (1.0 - epsilon)) * damped_series(alpha, epsilon, rel_tol);
}

double dual_testing_average_quadrature(double alpha, double epsilon, int k, int resolution) {
  const double c = testing_constant(alpha);
  const double top = std::exp2(-k * epsilon);
  const auto n = std::int64_t{1} << resolution;
  const double du = top / static_cast<double>(n);
  double s = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double u = (static_cast<double>(i) + 0.5) * du;
    // x = u^{1/eps} lies in [2^-j, 2^-j+1) with j = ceil(-log2 x)
    const double j = std::ceil(-std::log2(u) / epsilon);
    s += c * std::pow(j - k, -alpha);
  }
  return s * du / epsilon * std::exp2(k);
}

DualTestingPoint dual_testing_point(double p, double alpha, double epsilon, std::int64_t bands) {
  if (!(p > 1.0)) throw PreconditionError("dual testing needs p > 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("dual testing needs 0 < eps < 1");
  const double pp = p / (p - 1.0);
  const double c = testing_constant(alpha);
  DualTestingPoint out;
  out.epsilon = epsilon;
  out.ap_char = power_weight_ap(epsilon, p);
  out.bands = bands > 0 ? bands : static_cast<std::int64_t>(std::ceil(60.0 / epsilon)) + 50;

  // <a_k w> = A_1 2^{(k-1)(1-eps)}, so sum_{k<=n} <a_k w>^2 = A_1^2 S_n with
  // S_n = (q^n - 1)/(q - 1), q = 4^{1-eps}.
  const double log_a1 = std::log(dual_testing_average(alpha, epsilon, 1));
  const double log_q = 2.0 * (1.0 - epsilon) * kLn2;
  const double log_qm1 = std::log(std::expm1(log_q));
  const double t = 1.0 + (1.0 - epsilon) * (pp - 1.0);  // sigma = x^{t-1}
  const double log_band_const = std::log(std::expm1(t * kLn2) / t);
  double lhs = 0.0;
  for (std::int64_t j = 2; j <= out.bands; ++j) {
    const double n = static_cast<double>(j - 1);
    const double log_s = n * log_q + std::log(-std::expm1(-n * log_q)) - log_qm1;
    const double log_sigma = -static_cast<double>(j) * t * kLn2 + log_band_const;
    lhs += std::exp(0.5 * pp * (2.0 * log_a1 + log_s) + log_sigma);
  }
  out.log_lhs = std::log(lhs);

  // sum_k a_k^2 = c^2 H_n on the band [2^{-n-1}, 2^{-n}); w([0, 2^{-n})) = 2^{-n eps}/eps
  double h = 0.0;
  double g_prev = 0.0;
  double lorentz = 0.0;
  for (std::int64_t n = 1; n < out.bands; ++n) {
    h += std::pow(static_cast<double>(n), -2.0 * alpha);
    const double g = c * std::sqrt(h);
    lorentz += (g - g_prev) * std::pow(std::exp2(-static_cast<double>(n) * epsilon) / epsilon, 1.0 / pp);
    g_prev = g;
  }
  out.lorentz = lorentz;
  out.ratio = std::exp(out.log_lhs / pp) / lorentz;
  return out;
}

ExampleResult example_dual_testing(double p, double alpha, std::span<const double> epsilons, std::int64_t bands) {
  ExampleResult out;
  std::vector<std::pair<double, double>> xy;
  for (double eps : epsilons) {
    const DualTestingPoint pt = dual_testing_point(p, alpha, eps, bands);
    ExperimentRecord r;
    r.p = p;
    r.epsilon = eps;
    r.ap_char = pt.ap_char;
    r.ratio = pt.ratio;
    r.op = "dual_testing";
    r.norm_kind = "lorentz";
    out.records.push_back(r);
    xy.emplace_back(pt.ap_char, pt.ratio);
  }
  std::sort(xy.begin(), xy.end());
  if (xy.size() >= 3) out.fit = fit_exponent(xy);
  return out;
}

}  // namespace dyadlab
