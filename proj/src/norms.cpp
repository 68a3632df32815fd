#include "dyadlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dyadlab/error.hpp"
#include "dyadlab/simd/kernels.hpp"

namespace dyadlab {
namespace {

void require_p(double p, double lo_inclusive) {
  if (!(p >= lo_inclusive) || !std::isfinite(p)) throw PreconditionError("norm exponent out of range");
}

}  // namespace

const char* to_string(NormKind k) noexcept {
  switch (k) {
    case NormKind::strong:
      return "strong";
    case NormKind::weak:
      return "weak";
    case NormKind::lorentz:
      return "lorentz";
  }
  return "?";
}

Distribution distribution(std::span<const double> g, std::span<const double> masses) {
  if (g.size() != masses.size()) throw PreconditionError("function and masses differ in length");
  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::abs(g[a]) > std::abs(g[b]); });
  Distribution out;
  double mass = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double v = std::abs(g[order[i]]);
    if (v == 0.0) break;
    while (i < order.size() && std::abs(g[order[i]]) == v) mass += masses[order[i++]];
    out.values.push_back(v);
    out.tail_mass.push_back(mass);
  }
  return out;
}

double strong_norm(std::span<const double> g, std::span<const double> masses, double p) {
  require_p(p, 1.0);
  if (g.size() != masses.size()) throw PreconditionError("function and masses differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] != 0.0) s += std::pow(std::abs(g[i]), p) * masses[i];
  }
  return std::pow(s, 1.0 / p);
}

double weak_norm(const Distribution& dist, double p) {
  require_p(p, 1.0);
  // With the >= convention the candidates are v_i w{|g| >= v_i}^{1/p}. With
  // the strict one, lambda in [v_{i+1}, v_i) sees the same set and the sup
  // over that range is the same candidate approached from below.
  double best = 0.0;
  for (std::size_t i = 0; i < dist.values.size(); ++i) {
    best = std::max(best, dist.values[i] * std::pow(dist.tail_mass[i], 1.0 / p));
  }
  return best;
}

double lorentz_p1_norm(const Distribution& dist, double p) {
  require_p(p, 1.0);
  double s = 0.0;
  for (std::size_t i = 0; i < dist.values.size(); ++i) {
    const double next = i + 1 < dist.values.size() ? dist.values[i + 1] : 0.0;
    s += (dist.values[i] - next) * std::pow(dist.tail_mass[i], 1.0 / p);
  }
  return s;
}

NormValue strong_norm(const GridFunction& g, const Weight& w, double p) {
  const auto masses = w.cell_masses(g.domain());
  return {strong_norm(g.values(), masses, p), NormKind::strong, p, w.id()};
}

NormValue weak_norm(const GridFunction& g, const Weight& w, double p) {
  const auto masses = w.cell_masses(g.domain());
  return {weak_norm(distribution(g.values(), masses), p), NormKind::weak, p, w.id()};
}

NormValue lorentz_p1_norm(const GridFunction& g, const Weight& w, double p) {
  if (!(p > 1.0)) throw PreconditionError("Lorentz L^{p,1} needs p > 1");
  const auto masses = w.cell_masses(g.domain());
  return {lorentz_p1_norm(distribution(g.values(), masses), p), NormKind::lorentz, p, w.id()};
}

GridFunction times_density(const GridFunction& f, const Weight& v) {
  std::vector<double> dens = v.cell_densities(f.domain());
  std::vector<double> out(dens.size());
  simd::multiply(f.values(), dens, out);
  return GridFunction(f.domain(), std::move(out));
}

double sigma_testing_ratio(const GridOperator& t, const GridFunction& f, const Weight& w, double p) {
  if (!f.nonnegative()) throw PreconditionError("testing function must be nonnegative");
  const Weight sigma = w.dual(p);
  const double den = strong_norm(f, sigma, p).value;
  if (!(den > 0.0)) throw PreconditionError("testing function has zero L^p(sigma) norm");
  const GridFunction tf = t(times_density(f, sigma));
  return weak_norm(tf, w, p).value / den;
}

FitResult fit_exponent(std::span<const std::pair<double, double>> xy) {
  if (xy.size() < 3) throw PreconditionError("exponent fit needs at least 3 points");
  FitResult out;
  for (std::size_t i = 0; i < xy.size(); ++i) {
    const auto [x, y] = xy[i];
    if (!(x > 0.0) || !(y > 0.0)) throw PreconditionError("exponent fit needs positive data");
    if (i > 0 && !(x > xy[i - 1].first)) throw PreconditionError("exponent fit needs strictly increasing x");
    out.points.emplace_back(std::log(x), std::log(y));
  }
  const double n = static_cast<double>(out.points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [a, b] : out.points) {
    mx += a;
    my += b;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& [a, b] : out.points) {
    sxx += (a - mx) * (a - mx);
    sxy += (a - mx) * (b - my);
    syy += (b - my) * (b - my);
  }
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double sse = 0.0;
  for (const auto& [a, b] : out.points) {
    const double r = b - (out.intercept + out.slope * a);
    sse += r * r;
  }
  out.r2 = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  out.narrow_range = xy.back().first / xy.front().first < 4.0;
  return out;
}

double default_slope_tolerance(const FitResult& fit) {
  const double decades = (fit.points.back().first - fit.points.front().first) / std::log(10.0);
  return decades >= 2.5 ? 0.05 : 0.10;
}

}  // namespace dyadlab
