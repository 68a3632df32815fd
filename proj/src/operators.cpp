#include "dyadlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dyadlab/error.hpp"
#include "dyadlab/simd/kernels.hpp"

namespace dyadlab {
namespace {

std::size_t level_slot(const Domain& d, int level) { return static_cast<std::size_t>(level + d.top_level); }

std::vector<std::vector<double>> empty_nodes(const Domain& d) {
  std::vector<std::vector<double>> nodes;
  for (int j = d.min_level(); j <= d.max_level(); ++j) nodes.emplace_back(static_cast<std::size_t>(d.count_at(j)), 0.0);
  return nodes;
}

// Top-down max propagation of per-interval values to the cells.
GridFunction push_down_max(const Domain& d, std::vector<std::vector<double>> nodes) {
  for (std::size_t L = 1; L < nodes.size(); ++L) {
    auto& cur = nodes[L];
    const auto& up = nodes[L - 1];
    for (std::size_t k = 0; k < cur.size(); ++k) cur[k] = std::max(cur[k], up[k >> 1]);
  }
  return GridFunction(d, std::move(nodes.back()));
}

}  // namespace

double average(const IntegralTable& table, const DilatedInterval& interval) {
  const double len = interval.nominal_length();
  if (!(len > 0.0)) throw PreconditionError("average over an empty interval");
  return table.integral_units(interval.lo_units(), interval.hi_units(), interval.units_per_cell()) / len;
}

double average(const GridFunction& f, const DilatedInterval& interval) { return average(IntegralTable(f), interval); }

GridFunction maximal_function(const GridFunction& f) {
  const Domain& d = f.domain();
  const IntegralTable table(f.abs());
  auto nodes = empty_nodes(d);
  for (int j = d.min_level(); j <= d.max_level(); ++j) {
    const auto sums = table.level(j);
    auto& out = nodes[level_slot(d, j)];
    const double inv = std::ldexp(1.0, j);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = sums[k] * inv;
  }
  return push_down_max(d, std::move(nodes));
}

GridFunction maximal_function(const GridFunction& f, Rational rho) {
  if (rho == Rational(1)) return maximal_function(f);
  const Domain& d = f.domain();
  const IntegralTable table(f.abs());
  auto nodes = empty_nodes(d);
  for (int j = d.min_level(); j <= d.max_level(); ++j) {
    auto& out = nodes[level_slot(d, j)];
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = average(table, DilatedInterval(d, {j, static_cast<std::int64_t>(k)}, rho));
    }
  }
  return push_down_max(d, std::move(nodes));
}

std::vector<double> push_down_sums(const Domain& d, const std::vector<std::vector<double>>& nodes) {
  if (nodes.size() != static_cast<std::size_t>(d.top_level + d.resolution + 1)) {
    throw PreconditionError("node table does not match the domain");
  }
  std::vector<double> acc = nodes.front();
  for (std::size_t L = 1; L < nodes.size(); ++L) {
    std::vector<double> next(nodes[L].size());
    for (std::size_t k = 0; k < next.size(); ++k) next[k] = acc[k >> 1] + nodes[L][k];
    acc = std::move(next);
  }
  return acc;
}

HaarCoefficientTable::HaarCoefficientTable(const GridFunction& f) : domain_(f.domain()) {
  const IntegralTable table(f);
  for (int j = domain_.min_level(); j < domain_.max_level(); ++j) {
    const auto children = table.level(j + 1);
    std::vector<double> c(static_cast<std::size_t>(domain_.count_at(j)));
    const double norm = std::sqrt(std::ldexp(1.0, j));
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = (children[2 * k] - children[2 * k + 1]) * norm;
    coeffs_.push_back(std::move(c));
  }
  const double total = table.total();
  mean_energy_ = total * total / domain_.length();
}

double HaarCoefficientTable::coefficient(const DyadicInterval& q) const {
  q.require_in(domain_);
  if (q.level >= domain_.max_level()) throw DomainError("no Haar function at the cell level");
  return coeffs_[level_slot(domain_, q.level)][static_cast<std::size_t>(q.index)];
}

std::span<const double> HaarCoefficientTable::level(int j) const {
  if (j < domain_.min_level() || j >= domain_.max_level()) throw DomainError("Haar level out of range");
  return coeffs_[level_slot(domain_, j)];
}

double HaarCoefficientTable::energy() const {
  double e = 0.0;
  for (const auto& c : coeffs_) e += simd::dot(c, c);
  return e;
}

GridFunction haar_square_function(const GridFunction& f) {
  const Domain& d = f.domain();
  const IntegralTable table(f);
  auto nodes = empty_nodes(d);
  for (int j = d.min_level(); j < d.max_level(); ++j) {
    const auto children = table.level(j + 1);
    auto& out = nodes[level_slot(d, j)];
    // ((<f>_left - <f>_right) / 2)^2 = coefficient^2 / |Q|
    const double scale = std::ldexp(1.0, j);
    for (std::size_t k = 0; k < out.size(); ++k) {
      const double diff = (children[2 * k] - children[2 * k + 1]) * scale;
      out[k] = diff * diff;
    }
  }
  std::vector<double> sq = push_down_sums(d, nodes);
  simd::sqrt_inplace(sq);
  return GridFunction(d, std::move(sq));
}

GridFunction sparse_square_operator(const GridFunction& f, const SparseFamily& s, Rational rho) {
  const Domain& d = f.domain();
  if (!s.empty() && !(s.domain() == d)) throw DomainError("family and function live on different domains");
  const IntegralTable table(f);
  auto nodes = empty_nodes(d);
  for (const auto& q : s.members()) {
    const double a = average(table, DilatedInterval(d, q, rho));
    nodes[level_slot(d, q.level)][static_cast<std::size_t>(q.index)] += a * a;
  }
  std::vector<double> sq = push_down_sums(d, nodes);
  simd::sqrt_inplace(sq);
  return GridFunction(d, std::move(sq));
}

std::vector<double> weighted_averages(const std::vector<std::pair<DyadicInterval, GridFunction>>& a, const Weight& w) {
  std::vector<double> out;
  if (a.empty()) return out;
  const Domain& d = a.front().second.domain();
  const std::vector<double> masses = w.cell_masses(d);
  for (const auto& [q, g] : a) {
    if (!(g.domain() == d)) throw DomainError("testing functions must share one domain");
    q.require_in(d);
    if (!g.nonnegative()) throw PreconditionError("testing functions must be nonnegative");
    const auto first = static_cast<std::size_t>(q.first_cell(d));
    const auto n = static_cast<std::size_t>(q.cell_count(d));
    const double s = simd::dot(g.values().subspan(first, n), std::span<const double>(masses).subspan(first, n));
    out.push_back(s / q.length());
  }
  return out;
}

GridFunction dual_testing_operator(const std::vector<std::pair<DyadicInterval, GridFunction>>& a, const Weight& w) {
  if (a.empty()) throw PreconditionError("dual testing needs at least one interval");
  const Domain& d = a.front().second.domain();
  const std::vector<double> avg = weighted_averages(a, w);
  auto nodes = empty_nodes(d);
  for (std::size_t i = 0; i < a.size(); ++i) {
    nodes[level_slot(d, a[i].first.level)][static_cast<std::size_t>(a[i].first.index)] += avg[i] * avg[i];
  }
  std::vector<double> sq = push_down_sums(d, nodes);
  simd::sqrt_inplace(sq);
  return GridFunction(d, std::move(sq));
}

std::vector<int> default_intrinsic_scales(const Domain& d) {
  std::vector<int> m;
  for (int j = d.min_level(); j <= d.max_level() - 1; ++j) m.push_back(j);
  return m;
}

GridFunction intrinsic_square_discrete(const GridFunction& f, const KernelDictionary& dict, std::span<const int> scales) {
  if (dict.empty()) throw PreconditionError("empty kernel dictionary");
  if (scales.empty()) throw PreconditionError("empty scale list");
  const Domain& d = f.domain();
  const auto n = static_cast<std::size_t>(d.cells());
  const double h = d.cell_width();
  std::vector<double> g2(n, 0.0);
  std::vector<double> amax(n);
  std::vector<double> conv(n);
  std::vector<double> prefix(n + 1);
  for (int m : scales) {
    if (m > d.max_level() - 1) throw PreconditionError("scale narrower than two cells");
    const double t = std::ldexp(1.0, -m);
    const auto r = static_cast<std::int64_t>(std::ldexp(1.0, d.resolution - m));  // t / h
    std::fill(amax.begin(), amax.end(), 0.0);
    for (std::size_t k = 0; k < dict.size(); ++k) {
      // gamma_t sampled at the cell offsets, times the cell width
      std::vector<double> tap(static_cast<std::size_t>(2 * r + 1));
      for (std::int64_t o = -r; o <= r; ++o) {
        tap[static_cast<std::size_t>(o + r)] = dict.eval(k, static_cast<double>(o) / static_cast<double>(r)) * h / t;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<std::int64_t>(i);
        const std::int64_t lo = std::max<std::int64_t>(-r, ii - static_cast<std::int64_t>(n) + 1);
        const std::int64_t hi = std::min<std::int64_t>(r, ii);
        double s = 0.0;
        for (std::int64_t o = lo; o <= hi; ++o) s += f[ii - o] * tap[static_cast<std::size_t>(o + r)];
        conv[i] = std::abs(s);
      }
      for (std::size_t i = 0; i < n; ++i) amax[i] = std::max(amax[i], conv[i]);
    }
    prefix[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + amax[i] * amax[i];
    const double weight = std::numbers::ln2 / t * h;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<std::int64_t>(i);
      const auto lo = static_cast<std::size_t>(std::max<std::int64_t>(0, ii - r + 1));
      const auto hi = static_cast<std::size_t>(std::min<std::int64_t>(static_cast<std::int64_t>(n), ii + r));
      g2[i] += weight * (prefix[hi] - prefix[lo]);
    }
  }
  simd::sqrt_inplace(g2);
  return GridFunction(d, std::move(g2));
}

}  // namespace dyadlab
