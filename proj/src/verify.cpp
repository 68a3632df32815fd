#include <cmath>
#include <json.hpp>
#include <sstream>

#include "dyadlab/corpora.hpp"
#include "dyadlab/error.hpp"
#include "dyadlab/experiments.hpp"
#include "dyadlab/operators.hpp"
#include "dyadlab/proof_lab.hpp"
#include "dyadlab/random_instances.hpp"
#include "dyadlab/sparse_family.hpp"

namespace dyadlab {
namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void add(VerifyReport& r, const std::string& suite, const std::string& name, bool pass, std::string detail) {
  r.entries.push_back({suite, name, pass, std::move(detail)});
}

// Entry that records an exception as a failure instead of aborting the run.
template <class F>
void guarded(VerifyReport& r, const std::string& suite, const std::string& name, F body) {
  try {
    body();
  } catch (const std::exception& e) {
    add(r, suite, name, false, std::string("exception: ") + e.what());
  }
}

void core_suite(VerifyReport& r) {
  const std::string s = "core";
  guarded(r, s, "sparse_examples", [&] {
    const Domain d(0, 4);
    const bool a = verify_sparse(d, {{0, 0}}).certified();
    const bool b = !verify_sparse(d, {{0, 0}, {1, 0}}).certified();
    const bool c = !verify_sparse(d, {{0, 0}, {2, 0}, {2, 2}}).certified();
    add(r, s, "sparse_examples", a && b && c, "singleton, half and quarter-pair cases");
  });
  guarded(r, s, "split_rho3", [&] {
    const SplitCaseResult c = split_case(0, Rational(3));
    add(r, s, "split_rho3", c.union_ok && c.all_strengthened && static_cast<std::int64_t>(c.groups) <= c.group_bound,
        std::to_string(c.members) + " members in " + std::to_string(c.groups) + " groups");
  });
  guarded(r, s, "dominating_family", [&] {
    const Domain d(0, 10);
    bool ok = true;
    for (std::uint64_t i = 0; i < 20; ++i) {
      Rng rng(task_seed(7, i));
      const GridFunction f = random_nonnegative_function(d, rng);
      const SparseFamily fam = dominating_family(f, DyadicInterval::whole(d));
      double total = 0.0;
      for (const auto& q : fam.members()) total += q.length();
      ok = ok && fam.certified() && total <= 2.0 * d.length();
    }
    add(r, s, "dominating_family", ok, "20 random functions: certified, total length <= 2|Q0|");
  });
  guarded(r, s, "haar_plancherel", [&] {
    const Domain d(2, 8);
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 10; ++i) {
      Rng rng(task_seed(11, i));
      const GridFunction f = random_signed_function(d, rng);
      const GridFunction sf = haar_square_function(f);
      const double lhs = sf.squared().integral() + HaarCoefficientTable(f).mean_energy();
      const double rhs = f.squared().integral();
      worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    add(r, s, "haar_plancherel", worst <= 1e-9, "max relative error " + num(worst));
  });
  guarded(r, s, "ap_jensen", [&] {
    const Domain d(0, 8);
    double worst = 2.0;
    for (std::uint64_t i = 0; i < 10; ++i) {
      Rng rng(task_seed(13, i));
      const Weight w = random_step_weight(d, rng);
      for (double p : {1.5, 2.0, 3.0}) {
        const auto wm = w.cell_masses(d);
        const auto sm = w.dual(p).cell_masses(d);
        for (const auto& q : all_dyadic_intervals(d)) {
          double a = 0.0, b = 0.0;
          for (auto c = q.first_cell(d); c < q.end_cell(d); ++c) {
            a += wm[static_cast<std::size_t>(c)];
            b += sm[static_cast<std::size_t>(c)];
          }
          worst = std::min(worst, ap_quantity(a, b, q.length(), p));
        }
      }
    }
    add(r, s, "ap_jensen", worst >= 1.0 - 1e-9, "min A_p quantity " + num(worst));
  });
}

void proof_suite(VerifyReport& r) {
  const std::string s = "proof";
  guarded(r, s, "lemma_weakrho", [&] {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 60; ++i) {
      const WeakRhoCase c = weakrho_case(i);
      worst = std::max(worst, lemma_weakrho_check(c.domain, c.family, c.g, c.w, c.p, Rational(1)).ratio);
    }
    add(r, s, "lemma_weakrho", worst <= 1.0 + 1e-9, "60 instances, max ratio " + num(worst));
  });
  guarded(r, s, "exceptional_sets", [&] {
    std::size_t fails = 0, members = 0;
    std::int64_t overlaps = 0;
    for (std::uint64_t i = 0; i < 20; ++i) {
      const ExceptionalCaseResult c = exceptional_case(i, Rational(1));
      fails += c.bound_failures + c.r_failures + c.pointwise_failures;
      overlaps += c.overlapping_pairs;
      members += c.members;
    }
    add(r, s, "exceptional_sets", fails == 0 && overlaps == 0,
        std::to_string(members) + " members, " + std::to_string(fails) + " bound failures, " +
            std::to_string(overlaps) + " overlaps");
  });
  guarded(r, s, "rubio_de_francia", [&] {
    const Domain d(0, 8);
    Rng rng(task_seed(17, 0));
    const GridFunction h = random_nonnegative_function(d, rng);
    const Weight w = Weight::lebesgue(d);
    const double est = estimate_rdf_norm(w, d, 2.0, 100, 1);
    const ExtrapolationMajorant m = rubio_de_francia(h, w, 2.0, std::max(2.0, 2.5 * est), 30);
    add(r, s, "rubio_de_francia", m.h_le_big_h && m.norm_ok && m.pointwise_ok,
        "[Hw]_A1 = " + num(m.a1_hw) + ", ||H||/||h|| = " + num(m.norm_big_h / m.norm_h));
  });
}

void examples_suite(VerifyReport& r) {
  const std::string s = "examples";
  guarded(r, s, "power_weight_p2", [&] {
    const auto eps = dyadic_epsilons(1, 9);
    const ExampleResult e = example_power_weight(2.0, eps, Domain(6, 10));
    const double slope = e.fit->slope;
    add(r, s, "power_weight_p2", std::abs(slope - 0.5) <= 0.05, "slope " + num(slope) + " (target 0.5)");
  });
  guarded(r, s, "dual_testing_alpha075", [&] {
    const auto eps = dyadic_epsilons(8, 16);
    const ExampleResult e = example_dual_testing(2.0, 0.75, eps);
    const double slope = e.fit->slope;
    add(r, s, "dual_testing_alpha075", std::abs(slope - 0.25) <= 0.05, "slope " + num(slope) + " (target 0.25)");
  });
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const VerifyEntry& e) { return e.pass; });
}

std::string VerifyReport::to_json() const {
  nlohmann::json j;
  j["passed"] = passed();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries) arr.push_back({{"suite", e.suite}, {"name", e.name}, {"pass", e.pass}, {"detail", e.detail}});
  j["entries"] = arr;
  return j.dump(2);
}

VerifyReport verify(const std::string& suite) {
  VerifyReport r;
  const bool all = suite == "all";
  if (!all && suite != "core" && suite != "proof" && suite != "examples") {
    throw PreconditionError("unknown suite '" + suite + "' (core, proof, examples, all)");
  }
  if (all || suite == "core") core_suite(r);
  if (all || suite == "proof") proof_suite(r);
  if (all || suite == "examples") examples_suite(r);
  return r;
}

}  // namespace dyadlab
