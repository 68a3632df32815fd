// Acceptance run: one PASS/FAIL line per check, exit code 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dyadlab/corpora.hpp"
#include "dyadlab/experiments.hpp"
#include "dyadlab/norms.hpp"
#include "dyadlab/operators.hpp"
#include "dyadlab/proof_lab.hpp"
#include "dyadlab/random_instances.hpp"
#include "dyadlab/sparse_family.hpp"
#include "dyadlab/weights.hpp"

using namespace dyadlab;

namespace {

// Tolerances and sizes, fixed here.
constexpr double kSlopeTol = 0.05;
constexpr double kApR2 = 0.999;
constexpr double kWeakRhoTol = 1e-9;
constexpr double kEnvelopeK = 10.0;
constexpr double kRdfNormTol = 1e-6;
constexpr double kRdfK = 50.0;
constexpr double kAinftyFloor = 0.01;
constexpr double kSplitC = 3.0;
constexpr double kChebyshevRel = 1e-14;
constexpr double kLorentzRel = 1e-6;
constexpr double kPlancherelRel = 1e-9;
constexpr double kPs[] = {1.5, 2.0, 2.5};

const Domain kExampleDomain(6, 10);

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<double> sweep_eps() { return dyadic_epsilons(1, 9); }

Outcome ap_scaling() {
  Outcome o{true, ""};
  for (double p : kPs) {
    std::vector<std::pair<double, double>> xy;
    bool closed_ok = true;
    for (double e : sweep_eps()) {
      const double v = ap_characteristic(Weight::power(e), p, kExampleDomain).value;
      closed_ok = closed_ok && std::abs(v - power_weight_ap(e, p)) <= 1e-9 * v;
      xy.emplace_back(1.0 / e, v);
    }
    std::sort(xy.begin(), xy.end());
    const FitResult f = fit_exponent(xy);
    const bool ok = std::abs(f.slope - 1.0) <= kSlopeTol && f.r2 >= kApR2 && closed_ok;
    o.pass = o.pass && ok;
    o.detail += fmt("p=%.1f", p) + fmt(" slope %.4f", f.slope) + fmt(" r2 %.5f", f.r2) + (ok ? "; " : " (out); ");
  }
  return o;
}

std::map<double, std::vector<ExperimentRecord>> g_haar_lower;

Outcome lower_bound_exponent() {
  Outcome o{true, ""};
  const auto eps = sweep_eps();
  for (double p : kPs) {
    const ExampleResult r = example_power_weight(p, eps, kExampleDomain);
    g_haar_lower[p] = r.records;
    const bool ok = r.fit && std::abs(r.fit->slope - 1.0 / p) <= kSlopeTol;
    o.pass = o.pass && ok;
    o.detail += fmt("p=%.1f", p) + fmt(" slope %.4f", r.fit ? r.fit->slope : NAN) + fmt(" (1/p = %.4f); ", 1.0 / p);
  }
  return o;
}

Outcome dual_testing_exponent() {
  Outcome o{true, ""};
  const auto eps = dyadic_epsilons(8, 16);
  double prev = -1.0;
  for (double alpha : {0.75, 0.65, 0.55}) {
    const ExampleResult r = example_dual_testing(2.0, alpha, eps);
    const double s = r.fit ? r.fit->slope : NAN;
    const bool ok = std::abs(s - (1.0 - alpha)) <= kSlopeTol && s > prev;
    prev = s;
    o.pass = o.pass && ok;
    o.detail += fmt("alpha=%.2f", alpha) + fmt(" slope %.4f", s) + "; ";
  }
  o.detail += "slopes increase as alpha decreases";
  return o;
}

Outcome weakrho() {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const WeakRhoCase c = weakrho_case(i);
    worst = std::max(worst, lemma_weakrho_check(c.domain, c.family, c.g, c.w, c.p, Rational(1)).ratio);
  }
  return {worst <= 1.0 + kWeakRhoTol, "200 instances, max L/R " + fmt("%.6g", worst)};
}

Outcome exceptional() {
  std::size_t fails = 0, members = 0;
  std::int64_t overlaps = 0;
  double margin = INFINITY;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const ExceptionalCaseResult c = exceptional_case(i, Rational(1));
    fails += c.bound_failures;
    overlaps += c.overlapping_pairs;
    members += c.members;
    if (c.members) margin = std::min(margin, c.min_margin);
  }
  // rho = 3: bound asserted, overlaps only reported
  std::size_t fails3 = 0;
  std::int64_t overlaps3 = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const ExceptionalCaseResult c = exceptional_case(i, Rational(3));
    fails3 += c.bound_failures;
    overlaps3 += c.overlapping_pairs;
  }
  return {fails == 0 && overlaps == 0 && fails3 == 0,
          std::to_string(members) + " members at rho=1, " + std::to_string(fails) + " bound failures, " +
              std::to_string(overlaps) + " overlaps, min margin " + fmt("%.4f", margin) + "; rho=3: " +
              std::to_string(fails3) + " bound failures, " + std::to_string(overlaps3) + " overlapping pairs"};
}

Outcome envelope() {
  SweepConfig cfg;
  cfg.p_list = {2.0};
  cfg.epsilon_list = sweep_eps();
  cfg.M = kExampleDomain.top_level;
  cfg.J = kExampleDomain.resolution;
  cfg.op = SweepOperator::sparse;
  cfg.output_path = "unused.csv";
  const SweepResult r = run_sweep(cfg);
  const double k = r.summaries.front().envelope_constant.value_or(INFINITY);
  // the Haar lower bound from the exponent check stays below the sparse envelope
  bool below = true;
  for (const auto& low : g_haar_lower[2.0]) {
    for (const auto& up : r.records) {
      if (up.norm_kind == "weak_envelope" && up.epsilon == low.epsilon && low.ratio > up.ratio) below = false;
    }
  }
  return {k <= kEnvelopeK && r.lower_le_upper && below,
          fmt("K = %.4f", k) + (r.lower_le_upper ? ", f0 ratio <= envelope" : ", f0 ratio exceeds envelope") +
              (below ? ", Haar lower bound <= envelope" : ", Haar lower bound exceeds envelope")};
}

Outcome rubio_de_francia_check() {
  const Domain d(0, 8);
  bool ok = true;
  double worst_norm = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng rng(task_seed(0x2d, i));
    const double p = 2.0 + (static_cast<double>(i) + 0.5) / 50.0;
    const double qprime = p / (p - 2.0);
    const GridFunction h = random_nonnegative_function(d, rng);
    const Weight w = random_step_weight(d, rng);
    const double a = std::max(2.0, 2.5 * estimate_rdf_norm(w, d, qprime, 100, i));
    const ExtrapolationMajorant m = rubio_de_francia(h, w, qprime, a, 40);
    ok = ok && m.h_le_big_h && m.norm_big_h <= 2.0 * m.norm_h * (1.0 + kRdfNormTol);
    worst_norm = std::max(worst_norm, m.norm_big_h / m.norm_h);
  }
  // power-weight sweep at p = 2.5, h = 1_[0,1)
  double kmax = 0.0;
  std::vector<std::pair<double, double>> xy;
  const Domain pd(2, 8);
  const GridFunction h = GridFunction::indicator(pd, 0.0, 1.0);
  for (double e : sweep_eps()) {
    const Weight w = Weight::power(e);
    const double qprime = 2.5 / 0.5;
    const double a = std::max(2.0, 2.5 * estimate_rdf_norm(w, pd, qprime, 100, 1));
    const ExtrapolationMajorant m = rubio_de_francia(h, w, qprime, a, 40);
    ok = ok && m.h_le_big_h;
    const double k = m.a1_hw / m.ap_w;
    kmax = std::max(kmax, k);
    xy.emplace_back(m.ap_w, m.a1_hw);
  }
  std::sort(xy.begin(), xy.end());
  const FitResult f = fit_exponent(xy);
  ok = ok && kmax <= kRdfK && f.slope <= 1.0 + kSlopeTol;
  return {ok, "50 instances, max ||H||/||h|| " + fmt("%.4f", worst_norm) + "; power sweep max [Hw]_A1/[w]_Ap " +
                  fmt("%.4f", kmax) + fmt(", slope %.3f", f.slope)};
}

Outcome ainfty() {
  const Domain d(0, 10);
  std::size_t checks = 0, violations = 0, oracle_mismatch = 0;
  double min_c = INFINITY;
  for (double e : sweep_eps()) {
    const Weight w = Weight::power(e);
    const double a2 = ap_characteristic(w, 2.0, d).value;
    const auto masses = w.cell_masses(d);
    for (int level = 6; level <= 8; ++level) {
      for (std::int64_t idx : {std::int64_t{0}, std::int64_t{1}, std::int64_t{5}, d.count_at(level) - 1}) {
        const DyadicInterval q{level, idx};
        const std::int64_t first = q.first_cell(d);
        const int n = static_cast<int>(q.cell_count(d));
        const auto greedy = heaviest_minority_cells(w, d, q);
        const AinftyDecay g = ainfty_decay_check(w, d, q, greedy, a2, kAinftyFloor);
        ++checks;
        if (!g.pass) ++violations;
        min_c = std::min(min_c, g.implied_c);
        if (n <= 16) {
          // brute force over every subset with 2|E| < |Q|
          double best = 0.0;
          for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            if (2 * std::popcount(mask) >= n) continue;
            double s = 0.0;
            for (int b = 0; b < n; ++b) {
              if (mask >> b & 1u) s += masses[static_cast<std::size_t>(first + b)];
            }
            best = std::max(best, s);
          }
          double gs = 0.0;
          for (auto c : greedy) gs += masses[static_cast<std::size_t>(c)];
          if (std::abs(best - gs) > 1e-12 * best) ++oracle_mismatch;
        }
      }
    }
  }
  return {violations == 0 && oracle_mismatch == 0,
          std::to_string(checks) + " intervals, " + std::to_string(violations) + " violations, min implied c " +
              fmt("%.4f", min_c) + ", greedy vs brute force mismatches " + std::to_string(oracle_mismatch)};
}

Outcome splitting() {
  bool ok = true;
  double worst = 0.0;
  std::string detail;
  for (int rho : {1, 2, 3, 5}) {
    std::size_t max_groups = 0;
    for (std::uint64_t i = 0; i < 50; ++i) {
      const SplitCaseResult c = split_case(i, Rational(rho));
      ok = ok && c.union_ok && c.all_strengthened;
      max_groups = std::max(max_groups, c.groups);
    }
    const double ratio = static_cast<double>(max_groups) / (rho * rho);
    worst = std::max(worst, ratio);
    detail += "rho=" + std::to_string(rho) + ": max " + std::to_string(max_groups) + " groups; ";
  }
  ok = ok && worst <= kSplitC;
  return {ok, detail + fmt("max groups/rho^2 = %.3f", worst)};
}

Outcome norm_oracles() {
  const Domain d(0, 10);
  std::size_t cheb_fail = 0;
  double lorentz_err = 0.0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    Rng rng(task_seed(0x70, i));
    const GridFunction g = random_lattice_function(d, rng);
    const Weight w = random_step_weight(d, rng);
    const double p = 1.1 + 1.9 * static_cast<double>(i % 20) / 19.0;
    const double weak = weak_norm(g, w, p).value;
    const double strong = strong_norm(g, w, p).value;
    if (weak > strong * (1.0 + kChebyshevRel)) ++cheb_fail;
    if (i < 50) {
      // midpoint rule on a lambda grid aligned with the 1/64 value lattice;
      // each midpoint mass is summed directly from the cells
      const auto m = w.cell_masses(d);
      const double top = *std::max_element(g.values().begin(), g.values().end());
      const double h = 1.0 / 256.0;
      double quad = 0.0;
      for (double lam = h / 2; lam < top; lam += h) {
        double mass = 0.0;
        for (std::int64_t c = 0; c < d.cells(); ++c) {
          if (g[c] > lam) mass += m[static_cast<std::size_t>(c)];
        }
        quad += std::pow(mass, 1.0 / p) * h;
      }
      const double lz = lorentz_p1_norm(g, w, p).value;
      lorentz_err = std::max(lorentz_err, std::abs(lz - quad) / quad);
    }
  }
  double planch = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng(task_seed(0x71, i));
    const GridFunction f = random_signed_function(Domain(3, 9), rng);
    const double lhs = haar_square_function(f).squared().integral() + HaarCoefficientTable(f).mean_energy();
    const double rhs = f.squared().integral();
    planch = std::max(planch, std::abs(lhs - rhs) / rhs);
  }
  return {cheb_fail == 0 && lorentz_err <= kLorentzRel && planch <= kPlancherelRel,
          std::to_string(cheb_fail) + " Chebyshev violations in 500, Lorentz vs quadrature " +
              fmt("%.2e", lorentz_err) + ", Plancherel " + fmt("%.2e", planch)};
}

}  // namespace

int main() {
  struct Check {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Check> checks = {
      {"ap-scaling", ap_scaling},
      {"lower-bound-exponent", lower_bound_exponent},
      {"dual-testing-exponent", dual_testing_exponent},
      {"averaging-lemma", weakrho},
      {"exceptional-sets", exceptional},
      {"p2-envelope", envelope},
      {"rubio-de-francia", rubio_de_francia_check},
      {"ainfty-decay", ainfty},
      {"sparse-splitting", splitting},
      {"norm-oracles", norm_oracles},
  };
  int failed = 0;
  int n = 0;
  for (const auto& c : checks) {
    ++n;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %-22s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", n, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %d checks passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
