#include "dyadlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "dyadlab/error.hpp"
#include "dyadlab/simd/kernels.hpp"

namespace dyadlab {
namespace {

// int_a^b x^s dx with t = s + 1 > 0, written to avoid cancellation when
// b/a is close to 1 or t is small.
double power_mass(double a, double b, double s) {
  if (b <= a) return 0.0;
  const double t = s + 1.0;
  if (a <= 0.0) return std::pow(b, t) / t;
  return std::pow(a, t) * std::expm1(t * std::log1p((b - a) / a)) / t;
}

std::vector<std::vector<double>> pyramid(std::vector<double> base) {
  std::vector<std::vector<double>> out;
  out.push_back(std::move(base));
  while (out.back().size() > 1) {
    std::vector<double> next(out.back().size() / 2);
    simd::pair_sums(out.back(), next);
    out.push_back(std::move(next));
  }
  return out;
}

double range_sum(const std::vector<std::vector<double>>& pyr, std::int64_t a, std::int64_t b) {
  double s = 0.0;
  const int top = static_cast<int>(pyr.size()) - 1;
  while (a < b) {
    int L = 0;
    while (L < top && (a & ((std::int64_t{2} << L) - 1)) == 0 && a + (std::int64_t{2} << L) <= b) ++L;
    s += pyr[static_cast<std::size_t>(L)][static_cast<std::size_t>(a >> L)];
    a += std::int64_t{1} << L;
  }
  return s;
}

}  // namespace

double conjugate_exponent(double p) {
  if (!(p > 1.0)) throw PreconditionError("conjugate exponent needs p > 1");
  return p / (p - 1.0);
}

Weight Weight::power(double epsilon) {
  if (!(epsilon > 0.0)) throw PreconditionError("power weight needs eps > 0");
  return Weight(Power{epsilon - 1.0});
}

Weight Weight::power_exponent(double exponent) {
  if (!(exponent > -1.0)) throw PreconditionError("power weight x^s needs s > -1 to be locally integrable");
  return Weight(Power{exponent});
}

Weight Weight::step(const Domain& d, std::vector<double> density) {
  if (static_cast<std::int64_t>(density.size()) != d.cells()) throw PreconditionError("step weight size mismatch");
  for (double v : density) {
    if (!(v > 0.0) || !std::isfinite(v)) throw PositivityError("step weight cells must be finite and > 0");
  }
  return Weight(Step{d, std::move(density)});
}

Weight Weight::from_cell_masses(const Domain& d, const std::vector<double>& masses) {
  std::vector<double> density(masses);
  simd::scale(density, 1.0 / d.cell_width());
  return step(d, std::move(density));
}

std::optional<double> Weight::epsilon() const noexcept {
  if (const auto* p = as_power()) return p->exponent + 1.0;
  return std::nullopt;
}

double Weight::measure(double a, double b) const {
  if (b <= a) return 0.0;
  if (const auto* p = as_power()) {
    if (a < 0.0) throw DomainError("power weights live on [0, inf)");
    return power_mass(a, b, p->exponent);
  }
  const auto& s = std::get<Step>(kind_);
  const double h = s.domain.cell_width();
  a = std::max(a, 0.0);
  b = std::min(b, s.domain.length());
  double m = 0.0;
  for (auto i = static_cast<std::int64_t>(std::floor(a / h)); i < s.domain.cells() && static_cast<double>(i) * h < b; ++i) {
    const double lo = std::max(a, static_cast<double>(i) * h);
    const double hi = std::min(b, static_cast<double>(i + 1) * h);
    if (hi > lo) m += s.density[static_cast<std::size_t>(i)] * (hi - lo);
  }
  return m;
}

std::vector<double> Weight::cell_masses(const Domain& d) const {
  const auto n = static_cast<std::size_t>(d.cells());
  std::vector<double> out(n);
  const double h = d.cell_width();
  if (const auto* p = as_power()) {
    for (std::size_t i = 0; i < n; ++i) out[i] = power_mass(static_cast<double>(i) * h, static_cast<double>(i + 1) * h, p->exponent);
    return out;
  }
  const auto& s = std::get<Step>(kind_);
  if (s.domain.top_level != d.top_level) throw DomainError("step weight defined on a different domain");
  const int shift = d.resolution - s.domain.resolution;
  if (shift >= 0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = s.density[i >> shift] * h;
  } else {
    const std::size_t block = std::size_t{1} << (-shift);
    const double hw = s.domain.cell_width();
    for (std::size_t i = 0; i < n; ++i) {
      double m = 0.0;
      for (std::size_t k = 0; k < block; ++k) m += s.density[i * block + k] * hw;
      out[i] = m;
    }
  }
  return out;
}

std::vector<double> Weight::cell_densities(const Domain& d) const {
  std::vector<double> m = cell_masses(d);
  simd::scale(m, 1.0 / d.cell_width());
  return m;
}

Weight Weight::dual(double p) const {
  const double exponent = 1.0 - conjugate_exponent(p);
  if (const auto* pw = as_power()) return power_exponent(pw->exponent * exponent);
  const auto& s = std::get<Step>(kind_);
  std::vector<double> density(s.density.size());
  for (std::size_t i = 0; i < density.size(); ++i) density[i] = std::pow(s.density[i], exponent);
  return step(s.domain, std::move(density));
}

std::string Weight::id() const {
  std::ostringstream os;
  os.precision(17);
  if (const auto* p = as_power()) {
    os << "power:" << p->exponent + 1.0;
  } else {
    const auto& s = std::get<Step>(kind_);
    // FNV-1a over the raw densities, enough to tell weights apart in a CSV
    std::uint64_t hash = 1469598103934665603ull;
    for (double v : s.density) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, &v, sizeof bits);
      hash = (hash ^ bits) * 1099511628211ull;
    }
    os << "step:" << std::hex << hash;
  }
  return os.str();
}

std::string Weight::to_json() const {
  nlohmann::json j;
  if (const auto* p = as_power()) {
    j["kind"] = "power";
    j["epsilon"] = p->exponent + 1.0;
  } else {
    const auto& s = std::get<Step>(kind_);
    j["kind"] = "step";
    j["J"] = s.domain.resolution;
    j["M"] = s.domain.top_level;
    j["cells"] = s.density;
  }
  return j.dump();
}

Weight Weight::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "power") return power(j.at("epsilon").get<double>());
    if (kind == "step") {
      return step(Domain(j.at("M").get<int>(), j.at("J").get<int>()), j.at("cells").get<std::vector<double>>());
    }
    throw FormatError("unknown weight kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad weight record: ") + e.what());
  }
}

double ap_quantity(double w_mass, double sigma_mass, double length, double p) {
  return (w_mass / length) * std::pow(sigma_mass / length, p - 1.0);
}

ApCharacteristic ap_characteristic_from_masses(const Domain& d, const std::vector<double>& w_masses,
                                               const std::vector<double>& sigma_masses, double p,
                                               ApScanOptions opts) {
  if (!(p > 1.0)) throw PreconditionError("A_p characteristic needs p > 1");
  const auto wp = pyramid(w_masses);
  const auto sp = pyramid(sigma_masses);
  ApCharacteristic best;
  best.p = p;
  best.value = -1.0;
  const int J = d.resolution;
  for (int j = d.min_level(); j <= d.max_level(); ++j) {
    const auto& wl = wp[static_cast<std::size_t>(J - j)];
    const auto& sl = sp[static_cast<std::size_t>(J - j)];
    const double len = std::ldexp(1.0, -j);
    for (std::size_t k = 0; k < wl.size(); ++k) {
      const double v = ap_quantity(wl[k], sl[k], len, p);
      if (v > best.value) {
        best.value = v;
        best.witness = {j, static_cast<std::int64_t>(k)};
        best.witness_is_triple = false;
      }
    }
  }
  if (opts.include_triples) {
    const double h = d.cell_width();
    for (int j = d.min_level(); j <= d.max_level(); ++j) {
      const std::int64_t s = std::int64_t{1} << (J - j);
      for (std::int64_t k = 0; k < d.count_at(j); ++k) {
        const std::int64_t a = std::max<std::int64_t>((k - 1) * s, 0);
        const std::int64_t b = std::min<std::int64_t>((k + 2) * s, d.cells());
        const double len = static_cast<double>(b - a) * h;
        const double v = ap_quantity(range_sum(wp, a, b), range_sum(sp, a, b), len, p);
        if (v > best.value) {
          best.value = v;
          best.witness = {j, k};
          best.witness_is_triple = true;
        }
      }
    }
  }
  return best;
}

ApCharacteristic ap_characteristic(const Weight& w, double p, const Domain& d, ApScanOptions opts) {
  return ap_characteristic_from_masses(d, w.cell_masses(d), w.dual(p).cell_masses(d), p, opts);
}

double a1_characteristic_from_masses(const Domain& d, const std::vector<double>& masses) {
  const double h = d.cell_width();
  std::vector<double> mins(masses.size());
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!(masses[i] > 0.0)) throw PositivityError("A_1 characteristic needs a strictly positive weight");
    mins[i] = masses[i] / h;
  }
  std::vector<double> sums = masses;
  double best = 0.0;
  double len = h;
  while (true) {
    for (std::size_t i = 0; i < sums.size(); ++i) best = std::max(best, (sums[i] / len) / mins[i]);
    if (sums.size() == 1) break;
    std::vector<double> next_sums(sums.size() / 2);
    std::vector<double> next_mins(sums.size() / 2);
    simd::pair_sums(sums, next_sums);
    for (std::size_t i = 0; i < next_mins.size(); ++i) next_mins[i] = std::min(mins[2 * i], mins[2 * i + 1]);
    sums = std::move(next_sums);
    mins = std::move(next_mins);
    len *= 2.0;
  }
  return best;
}

double a1_characteristic(const Weight& w, const Domain& d) { return a1_characteristic_from_masses(d, w.cell_masses(d)); }

AinftyDecay ainfty_decay_check(const Weight& w, const Domain& d, const DyadicInterval& q,
                               const std::vector<std::int64_t>& e_cells, double a2_char, double c_min) {
  q.require_in(d);
  std::vector<std::int64_t> cells = e_cells;
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  if (2 * static_cast<std::int64_t>(cells.size()) >= q.cell_count(d)) {
    throw PreconditionError("A_infty check needs |E| < |Q|/2");
  }
  const double h = d.cell_width();
  double we = 0.0;
  for (auto c : cells) {
    if (!q.contains_cell(d, c)) throw PreconditionError("E must lie inside Q");
    we += w.measure(static_cast<double>(c) * h, static_cast<double>(c + 1) * h);
  }
  AinftyDecay out;
  out.ratio = we / w.measure(q.left(), q.right());
  out.implied_c = (1.0 - out.ratio) * a2_char;
  out.pass = out.implied_c >= c_min;
  return out;
}

std::vector<std::int64_t> heaviest_minority_cells(const Weight& w, const Domain& d, const DyadicInterval& q) {
  q.require_in(d);
  const double h = d.cell_width();
  std::vector<std::pair<double, std::int64_t>> cells;
  for (std::int64_t c = q.first_cell(d); c < q.end_cell(d); ++c) {
    cells.emplace_back(w.measure(static_cast<double>(c) * h, static_cast<double>(c + 1) * h), c);
  }
  std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  const auto take = static_cast<std::size_t>((q.cell_count(d) - 1) / 2);
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < take; ++i) out.push_back(cells[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dyadlab
