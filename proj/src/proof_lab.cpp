#include "dyadlab/proof_lab.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>

#include "dyadlab/error.hpp"
#include "dyadlab/norms.hpp"
#include "dyadlab/operators.hpp"
#include "dyadlab/random_instances.hpp"

namespace dyadlab {
namespace {

constexpr double kRoundingSlack = 1e-12;

std::vector<std::vector<double>> zero_nodes(const Domain& d) {
  std::vector<std::vector<double>> nodes;
  for (int j = d.min_level(); j <= d.max_level(); ++j) nodes.emplace_back(static_cast<std::size_t>(d.count_at(j)), 0.0);
  return nodes;
}

double& node(std::vector<std::vector<double>>& nodes, const Domain& d, const DyadicInterval& q) {
  return nodes[static_cast<std::size_t>(q.level + d.top_level)][static_cast<std::size_t>(q.index)];
}

// Per-cell sum over the members of value(Q) 1_Q.
template <class F>
std::vector<double> cell_sums(const Domain& d, const std::vector<DyadicInterval>& members, F value) {
  auto nodes = zero_nodes(d);
  for (const auto& q : members) node(nodes, d, q) += value(q);
  return push_down_sums(d, nodes);
}

template <class P>
double mass_where(const std::vector<double>& values, const std::vector<double>& masses, P pred) {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (pred(values[i])) m += masses[i];
  }
  return m;
}

double integral_over(const IntegralTable& t, const IntervalSet& s, std::int64_t upc) {
  double v = 0.0;
  for (const auto& [lo, hi] : s.pieces()) v += t.integral_units(lo, hi, upc);
  return v;
}

void require_strengthened(const SparseFamily& s, Rational rho) {
  if (!s.strengthened_for_rho() || !(*s.strengthened_for_rho() == rho)) {
    throw PreconditionError("family lacks a strengthened certificate for rho = " + rho.str());
  }
}

std::vector<DyadicInterval> level_members(const LevelDecomposition& dec) {
  std::vector<DyadicInterval> out;
  for (const auto& [ell, fam] : dec.levels) out.insert(out.end(), fam.members().begin(), fam.members().end());
  return out;
}

}  // namespace

int level_index(double a) {
  if (!(a > 0.0 && a <= 1.0)) throw PreconditionError("level index needs 0 < a <= 1");
  int e = 0;
  const double m = std::frexp(a, &e);  // a = m 2^e, m in [1/2, 1)
  return m == 0.5 ? 1 - e : -e;
}

std::size_t LevelDecomposition::total_members() const {
  std::size_t n = s1.size() + residual.size();
  for (const auto& [ell, fam] : levels) n += fam.size();
  return n;
}

LevelDecomposition decompose(const SparseFamily& s, const GridFunction& f, Rational rho, int ell_max) {
  if (!s.certified()) throw PreconditionError("decompose needs a certified sparse family");
  if (!f.nonnegative()) throw PreconditionError("decompose needs f >= 0");
  const Domain& d = f.domain();
  if (!s.empty() && !(s.domain() == d)) throw DomainError("family and function live on different domains");
  const IntegralTable table(f);
  LevelDecomposition out;
  out.rho = rho;
  out.ell_max = ell_max;
  std::vector<DyadicInterval> top;
  std::map<int, std::vector<DyadicInterval>> buckets;
  for (const auto& q : s.members()) {
    const double a = average(table, DilatedInterval(d, q, rho));
    if (a > 1.0) {
      top.push_back(q);
    } else if (a == 0.0) {
      out.residual.push_back(q);
    } else {
      const int ell = level_index(a);
      if (ell > ell_max) {
        out.residual.push_back(q);
      } else {
        buckets[ell].push_back(q);
      }
    }
  }
  out.s1 = s.subfamily(std::move(top));
  for (auto& [ell, members] : buckets) {
    SparseFamily fam = s.subfamily(std::move(members));
    certify_strengthened(fam, rho);
    out.levels.emplace(ell, std::move(fam));
  }
  return out;
}

bool ExceptionalSets::bounds_ok() const {
  return std::all_of(entries.begin(), entries.end(), [](const ExceptionalEntry& e) { return e.bound_ok; });
}

bool ExceptionalSets::r_small() const {
  return std::all_of(entries.begin(), entries.end(), [](const ExceptionalEntry& e) { return e.r_small; });
}

ExceptionalSets exceptional_sets(const SparseFamily& fam, const GridFunction& f, Rational rho, int ell) {
  require_strengthened(fam, rho);
  const Domain& d = f.domain();
  const IntegralTable table(f);
  const auto& members = fam.members();
  ExceptionalSets out;
  out.ell = ell;
  out.rho = rho;
  out.units_per_cell = 2 * rho.den();
  std::vector<IntervalSet> dilates;
  std::vector<double> nominal;
  for (const auto& q : members) {
    const DilatedInterval di(d, q, rho);
    IntervalSet s;
    s.add(di.lo_units(), di.hi_units());
    dilates.push_back(std::move(s));
    nominal.push_back(di.nominal_length());
  }
  const double floor_value = 0.375 * std::ldexp(1.0, -ell);
  for (std::size_t i = 0; i < members.size(); ++i) {
    ExceptionalEntry e;
    e.q = members[i];
    e.dilate = dilates[i];
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (members[i].strictly_contains(members[j])) e.r = e.r.united(dilates[j]);
    }
    e.e = e.dilate.minus(e.r);
    e.average = integral_over(table, e.dilate, out.units_per_cell) / nominal[i];
    e.average_e = integral_over(table, e.e, out.units_per_cell) / nominal[i];
    e.average_r = integral_over(table, e.r, out.units_per_cell) / nominal[i];
    e.bound_ok = e.average_e >= floor_value;
    // |rho Q| in fine units is 2 rho.num times the cell count of Q
    e.r_small = 8 * e.r.measure() < 2 * rho.num() * members[i].cell_count(d);
    out.entries.push_back(std::move(e));
  }
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    for (std::size_t j = i + 1; j < out.entries.size(); ++j) {
      if (out.entries[i].e.intersects(out.entries[j].e)) ++out.overlapping_pairs;
    }
  }
  const double level_sq = std::ldexp(1.0, -2 * ell);
  const auto lhs = cell_sums(d, members, [&](const DyadicInterval&) { return level_sq; });
  auto nodes = zero_nodes(d);
  for (const auto& e : out.entries) node(nodes, d, e.q) += (64.0 / 9.0) * e.average_e * e.average_e;
  const auto rhs = push_down_sums(d, nodes);
  out.pointwise_ok = true;
  for (std::size_t c = 0; c < lhs.size(); ++c) {
    if (lhs[c] > rhs[c] * (1.0 + kRoundingSlack)) out.pointwise_ok = false;
  }
  return out;
}

WeakRhoReport lemma_weakrho_check(const Domain& d, const std::vector<DyadicInterval>& family,
                                  const std::vector<GridFunction>& g, const Weight& w, double p, Rational rho) {
  if (family.size() != g.size()) throw PreconditionError("one function per interval is required");
  if (!(p > 1.0)) throw PreconditionError("lemma check needs p > 1");
  const std::vector<double> masses = w.cell_masses(d);
  std::vector<double> prefix(masses.size() + 1, 0.0);
  for (std::size_t i = 0; i < masses.size(); ++i) prefix[i + 1] = prefix[i] + masses[i];
  WeakRhoReport out;
  out.ap_char = ap_characteristic(w, p, d).value;
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const DyadicInterval& q = family[i];
    q.require_in(d);
    if (!(g[i].domain() == d)) throw DomainError("function on a different domain");
    if (!g[i].nonnegative()) throw PreconditionError("g_Q must be nonnegative");
    const double a = average(g[i], DilatedInterval(d, q, rho));
    const double wq = prefix[static_cast<std::size_t>(q.end_cell(d))] - prefix[static_cast<std::size_t>(q.first_cell(d))];
    lhs += std::pow(a, p) * wq;
    rhs += std::pow(strong_norm(g[i].values(), masses, p), p);
  }
  out.lhs = std::pow(lhs, 1.0 / p);
  out.rhs = std::pow(out.ap_char * rhs, 1.0 / p);
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

std::string trace_to_json(const std::vector<TraceRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    arr.push_back({{"ell", r.ell}, {"bucket_size", r.bucket_size}, {"level_mass", r.level_mass}, {"bound_term", r.bound_term}});
  }
  return arr.dump();
}

PLessThan2Trace weak_bound_p_lt_2(const SparseFamily& s, const GridFunction& f, const Weight& w, double p, Rational rho) {
  if (!(p > 1.0 && p < 2.0)) throw PreconditionError("this bound needs 1 < p < 2");
  require_strengthened(s, rho);
  const Domain& d = f.domain();
  PLessThan2Trace out;
  out.p = p;
  out.epsilon = 1.0 - p / 2.0;
  out.k_eps = 1.0 / (1.0 - std::exp2(-out.epsilon));
  const double rate = (2.0 - p - out.epsilon) * p / 2.0;
  out.decay = std::exp2(-rate);
  out.summable = out.decay < 1.0;
  out.ap_char = ap_characteristic(w, p, d).value;
  const std::vector<double> masses = w.cell_masses(d);
  out.f_norm_p = std::pow(strong_norm(f.values(), masses, p), p);
  const LevelDecomposition dec = decompose(s, f, rho);
  const double c = std::pow(8.0 / 3.0, p);
  out.terms_ok = true;
  for (const auto& [ell, fam] : dec.levels) {
    const auto count = cell_sums(d, fam.members(), [](const DyadicInterval&) { return 1.0; });
    const double lhs_scale = std::ldexp(1.0, -2 * ell);
    const double threshold = std::exp2(-out.epsilon * ell);
    TraceRecord r;
    r.ell = ell;
    r.bucket_size = fam.size();
    r.level_mass = mass_where(count, masses, [&](double n) { return n * lhs_scale > threshold; });
    r.bound_term = c * out.ap_char * std::exp2(-rate * ell) * out.f_norm_p;
    if (r.level_mass > r.bound_term * (1.0 + kRoundingSlack)) out.terms_ok = false;
    out.level_mass_total += r.level_mass;
    out.bound_total += r.bound_term;
    out.records.push_back(r);
  }
  const IntegralTable table(f);
  const auto sq = cell_sums(d, level_members(dec), [&](const DyadicInterval& q) {
    const double a = average(table, DilatedInterval(d, q, rho));
    return a * a;
  });
  out.direct_mass = mass_where(sq, masses, [&](double v) { return v > out.k_eps; });
  out.union_ok = out.direct_mass <= out.level_mass_total * (1.0 + kRoundingSlack);
  return out;
}

PEqual2Trace weak_bound_p_eq_2(const SparseFamily& s, const GridFunction& f, const Weight& w, Rational rho,
                               double c_ell0) {
  require_strengthened(s, rho);
  if (!(c_ell0 > 0.0)) throw PreconditionError("ell0 constant must be positive");
  const Domain& d = f.domain();
  PEqual2Trace out;
  out.c_ell0 = c_ell0;
  out.ap_char = ap_characteristic(w, 2.0, d).value;
  out.ell0 = std::max(1, static_cast<int>(std::floor(c_ell0 * (1.0 + std::log2(out.ap_char)))));
  out.tau = std::exp2(-out.ell0 / 8.0) / (1.0 - std::exp2(-1.0 / 8.0));
  const std::vector<double> masses = w.cell_masses(d);
  const double fn = strong_norm(f.values(), masses, 2.0);
  out.f_norm_sq = fn * fn;
  const LevelDecomposition dec = decompose(s, f, rho);
  const IntegralTable table(f);
  auto avg_sq = [&](const DyadicInterval& q) {
    const double a = average(table, DilatedInterval(d, q, rho));
    return a * a;
  };
  out.head_ok = true;
  out.tail_ok = true;
  double mass_sum = 0.0;
  const double head_bound = (64.0 / 9.0) * out.ell0 * out.ap_char * out.f_norm_sq;
  for (const auto& [ell, fam] : dec.levels) {
    const auto sq = cell_sums(d, fam.members(), avg_sq);
    TraceRecord r;
    r.ell = ell;
    r.bucket_size = fam.size();
    if (ell < out.ell0) {
      const double thr = 1.0 / out.ell0;
      r.level_mass = mass_where(sq, masses, [&](double v) { return v > thr; });
      r.bound_term = head_bound;
      if (r.level_mass > r.bound_term * (1.0 + kRoundingSlack)) out.head_ok = false;
      out.head_bound_total += r.bound_term;
      out.head.push_back(r);
    } else {
      const double thr = std::exp2(-ell / 8.0);
      r.level_mass = mass_where(sq, masses, [&](double v) { return v > thr; });
      const auto count = cell_sums(d, fam.members(), [](const DyadicInterval&) { return 1.0; });
      const double n_thr = std::exp2(15.0 * ell / 8.0);
      r.bound_term = mass_where(count, masses, [&](double n) { return n >= n_thr; });
      if (r.level_mass > r.bound_term * (1.0 + kRoundingSlack)) out.tail_ok = false;
      out.tail_bound_total += r.bound_term;
      out.tail.push_back(r);
    }
    mass_sum += r.level_mass;
  }
  const auto all = cell_sums(d, level_members(dec), avg_sq);
  out.direct_mass = mass_where(all, masses, [&](double v) { return v > 1.0 + out.tau; });
  out.union_ok = out.direct_mass <= mass_sum * (1.0 + kRoundingSlack);
  out.total_bound = out.head_bound_total + out.tail_bound_total;
  const double lg = 1.0 + std::log(out.ap_char);
  const double scale = out.ap_char * lg * lg * out.f_norm_sq;
  out.envelope_ratio = scale > 0.0 ? out.total_bound / scale : 0.0;

  std::vector<std::pair<double, double>> pts;
  for (const auto& r : out.tail) {
    if (r.bound_term > 0.0) pts.emplace_back(std::exp2(15.0 * r.ell / 8.0) / out.ap_char, std::log(r.bound_term));
  }
  out.envelope_points = pts.size();
  if (pts.size() >= 2) {
    double mx = 0, my = 0;
    for (auto [x, y] : pts) {
      mx += x;
      my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
      sxx += (x - mx) * (x - mx);
      sxy += (x - mx) * (y - my);
    }
    if (sxx > 0.0) {
      out.envelope_c = -sxy / sxx;
      out.envelope_a = std::exp(my + *out.envelope_c * mx);
    }
  }
  return out;
}

double estimate_maximal_norm(const Weight& w, const Domain& d, double q, std::size_t samples, std::uint64_t seed) {
  if (!(q > 1.0)) throw PreconditionError("maximal norm estimate needs q > 1");
  const std::vector<double> masses = w.cell_masses(d);
  double best = 1.0;
  for (std::size_t i = 0; i < samples; ++i) {
    Rng rng(task_seed(seed, i));
    const GridFunction g = random_nonnegative_function(d, rng, 1 + static_cast<int>(i % 8));
    const double den = strong_norm(g.values(), masses, q);
    if (den > 0.0) best = std::max(best, strong_norm(maximal_function(g).values(), masses, q) / den);
  }
  return best;
}

GridFunction rdf_step(const GridFunction& g, const std::vector<double>& density) {
  std::vector<double> gw(density.size());
  for (std::size_t c = 0; c < gw.size(); ++c) gw[c] = g.values()[c] * density[c];
  GridFunction m = maximal_function(GridFunction(g.domain(), std::move(gw)));
  std::vector<double> out(density.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = m.values()[c] / density[c];
  return GridFunction(g.domain(), std::move(out));
}

double estimate_rdf_norm(const Weight& w, const Domain& d, double q, std::size_t samples, std::uint64_t seed) {
  if (!(q > 1.0)) throw PreconditionError("norm estimate needs q > 1");
  const std::vector<double> masses = w.cell_masses(d);
  const std::vector<double> density = w.cell_densities(d);
  if (std::any_of(density.begin(), density.end(), [](double x) { return !(x > 0.0); })) {
    throw PositivityError("the weighted iteration needs w > 0 on every cell");
  }
  double best = 1.0;
  for (std::size_t i = 0; i < samples; ++i) {
    Rng rng(task_seed(seed, i));
    const GridFunction g = random_nonnegative_function(d, rng, 1 + static_cast<int>(i % 8));
    const double den = strong_norm(g.values(), masses, q);
    if (den > 0.0) best = std::max(best, strong_norm(rdf_step(g, density).values(), masses, q) / den);
  }
  return best;
}

ExtrapolationMajorant rubio_de_francia(const GridFunction& h, const Weight& w, double qprime, double a, int terms,
                                       RdfOptions opts) {
  if (!(qprime > 1.0)) throw PreconditionError("Rubio de Francia needs q' > 1");
  if (terms < 1) throw PreconditionError("Rubio de Francia needs at least one term");
  if (!h.nonnegative()) throw PreconditionError("Rubio de Francia needs h >= 0");
  const Domain& d = h.domain();
  ExtrapolationMajorant out;
  out.h = h;
  out.terms = terms;
  out.a = a;
  out.qprime = qprime;
  out.m_estimate = estimate_rdf_norm(w, d, qprime, opts.samples, opts.seed);
  if (a < out.m_estimate) {
    throw PreconditionError("A = " + std::to_string(a) + " is below the iteration norm estimate " +
                            std::to_string(out.m_estimate));
  }
  const std::vector<double> masses = w.cell_masses(d);
  const std::vector<double> density = w.cell_densities(d);
  std::vector<double> big(h.values().begin(), h.values().end());
  GridFunction iter = h;
  out.iterate_norms.push_back(strong_norm(h.values(), masses, qprime));
  double factor = 1.0;
  for (int k = 1; k <= terms + 1; ++k) {
    iter = rdf_step(iter, density);
    const double nk = strong_norm(iter.values(), masses, qprime);
    if (nk > a * out.iterate_norms.back() * (1.0 + kRoundingSlack)) {
      throw PreconditionError("iterate grew by more than A at step " + std::to_string(k));
    }
    out.iterate_norms.push_back(nk);
    if (k <= terms) {
      factor /= 2.0 * a;
      for (std::size_t c = 0; c < big.size(); ++c) big[c] += iter.values()[c] * factor;
    }
  }
  out.H = GridFunction(d, big);
  std::vector<double> tail(big.size());
  for (std::size_t c = 0; c < big.size(); ++c) tail[c] = iter.values()[c] * factor;
  out.tail_max = *std::max_element(tail.begin(), tail.end());
  out.h_le_big_h = true;
  for (std::size_t c = 0; c < big.size(); ++c) {
    if (h[static_cast<std::int64_t>(c)] > big[c]) out.h_le_big_h = false;
  }
  out.norm_h = out.iterate_norms.front();
  out.norm_big_h = strong_norm(big, masses, qprime);
  out.norm_ok = out.norm_big_h <= 2.0 * out.norm_h * (1.0 + 1e-6);
  const GridFunction mh = rdf_step(out.H, density);
  out.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < big.size(); ++c) {
    const double bound = 2.0 * a * big[c];
    if (bound <= 0.0) continue;
    out.max_excess = std::max(out.max_excess, (mh.values()[c] - bound - tail[c]) / bound);
  }
  out.pointwise_ok = out.max_excess <= kRoundingSlack;
  std::vector<double> hw(big.size());
  for (std::size_t c = 0; c < big.size(); ++c) hw[c] = big[c] * masses[c];
  if (std::all_of(hw.begin(), hw.end(), [](double x) { return x > 0.0; })) out.a1_hw = a1_characteristic_from_masses(d, hw);
  else out.a1_hw = std::numeric_limits<double>::infinity();
  const double q = qprime / (qprime - 1.0);
  out.ap_w = ap_characteristic(w, 2.0 * q, d).value;
  return out;
}

ExtrapolationTrace extrapolate_p_gt_2(const GridFunction& f, const Weight& w, double p, const SparseFamily& s,
                                      Rational rho, ExtrapolationOptions opts) {
  if (!(p > 2.0 && p < 3.0)) throw PreconditionError("extrapolation is run for 2 < p < 3");
  if (!(rho == Rational(1))) throw PreconditionError("the extrapolation chain is certified at rho = 1 only");
  require_strengthened(s, rho);
  if (!f.nonnegative()) throw PreconditionError("extrapolation needs f >= 0");
  const Domain& d = f.domain();
  ExtrapolationTrace out;
  out.p = p;
  out.qprime = p / (p - 2.0);
  out.ap_char = ap_characteristic(w, p, d).value;
  const std::vector<double> masses = w.cell_masses(d);
  out.f_norm = strong_norm(f.values(), masses, p);
  // ell0 >= c_ell0, so 1 + tau(ell0) never exceeds this square
  const double tau_max = std::exp2(-opts.c_ell0 / 8.0) / (1.0 - std::exp2(-1.0 / 8.0));
  out.threshold = std::sqrt(1.0 + tau_max);
  const GridFunction tf = sparse_square_operator(f, s, rho);
  std::vector<double> h(masses.size(), 0.0);
  for (std::size_t c = 0; c < h.size(); ++c) {
    if (tf.values()[c] > out.threshold) {
      h[c] = 1.0;
      out.level_mass += masses[c];
    }
  }
  double mass_e = out.level_mass;
  if (mass_e == 0.0) {
    std::fill(h.begin(), h.end(), 1.0);
    mass_e = 0.0;
    for (double m : masses) mass_e += m;
  }
  const double scale = std::pow(mass_e, -1.0 / out.qprime);
  for (double& v : h) v *= scale;
  const double a = opts.a > 0.0 ? opts.a : 2.5 * estimate_rdf_norm(w, d, out.qprime, opts.rdf.samples, opts.rdf.seed);
  out.majorant = rubio_de_francia(GridFunction(d, std::move(h)), w, out.qprime, a, opts.terms, opts.rdf);

  std::vector<double> hw(masses.size());
  for (std::size_t c = 0; c < hw.size(); ++c) hw[c] = out.majorant.H.values()[c] * masses[c];
  const Weight v = Weight::from_cell_masses(d, hw);
  const PEqual2Trace t2 = weak_bound_p_eq_2(s, f, v, rho, opts.c_ell0);
  out.hw_a2 = t2.ap_char;
  out.ell0 = t2.ell0;
  out.tail_mass = t2.tail_bound_total;
  // int f^2 H w <= ||f||_p^2 ||H||_{q'}
  const double f2_bound = out.f_norm * out.f_norm * out.majorant.norm_big_h;
  const double head_coef = t2.f_norm_sq > 0.0 ? t2.head_bound_total / t2.f_norm_sq : 0.0;
  out.chain_bound = std::sqrt((out.hw_a2 + head_coef) * f2_bound + out.tail_mass);
  out.realized = std::pow(out.level_mass, 1.0 / p);
  out.consistent = out.realized <= out.chain_bound * (1.0 + kRoundingSlack);
  out.envelope = std::sqrt(out.ap_char) * (1.0 + std::log(out.ap_char)) * out.f_norm;
  out.chain_ratio = out.envelope > 0.0 ? out.chain_bound / out.envelope : 0.0;
  out.realized_ratio = out.envelope > 0.0 ? out.realized / out.envelope : 0.0;
  return out;
}

}  // namespace dyadlab
