#include <doctest.h>

#include <cmath>

#include "dyadlab/corpora.hpp"
#include "dyadlab/error.hpp"
#include "dyadlab/experiments.hpp"
#include "dyadlab/operators.hpp"
#include "dyadlab/proof_lab.hpp"
#include "dyadlab/random_instances.hpp"

using namespace dyadlab;

TEST_CASE("level index") {
  CHECK(level_index(1.0) == 0);
  CHECK(level_index(0.75) == 0);
  CHECK(level_index(0.5) == 1);
  CHECK(level_index(0.3) == 1);
  CHECK(level_index(0.25) == 2);
  CHECK(level_index(std::ldexp(1.0, -40)) == 40);
  CHECK(level_index(std::ldexp(1.5, -41)) == 40);
  CHECK(level_index(std::ldexp(1.0, -1070)) == 1070);
}

TEST_CASE("level decomposition") {
  const Domain d(0, 5);
  const DyadicInterval q0 = DyadicInterval::whole(d);
  const SparseFamily single = verify_sparse(d, {q0});
  const LevelDecomposition a = decompose(single, GridFunction(d, 1.0), Rational(1));
  CHECK(a.s1.size() == 0);
  REQUIRE(a.levels.count(0));
  CHECK(a.levels.at(0).members() == single.members());
  const LevelDecomposition b = decompose(single, GridFunction(d, 2.0), Rational(1));
  CHECK(b.s1.members() == single.members());
  CHECK(b.levels.empty());

  Rng rng(14);
  const SparseFamily fam = random_sparse_family(d, rng, 30);
  const GridFunction f = random_multiscale_function(d, rng);
  for (int rho : {1, 3}) {
    const LevelDecomposition dec = decompose(fam, f, Rational(rho));
    CHECK(dec.total_members() == fam.size());
    for (const auto& [ell, lf] : dec.levels) {
      for (const auto& q : lf.members()) {
        const double avg = average(f, DilatedInterval(d, q, Rational(rho)));
        CHECK(avg > std::ldexp(1.0, -ell - 1));
        CHECK(avg <= std::ldexp(1.0, -ell));
      }
    }
    for (const auto& q : dec.s1.members()) CHECK(average(f, DilatedInterval(d, q, Rational(rho))) > 1.0);
    for (const auto& q : dec.residual) CHECK(average(f, DilatedInterval(d, q, Rational(rho))) == 0.0);
  }
}

TEST_CASE("exceptional sets") {
  const Domain d(0, 6);
  // no nested members: R is empty and E is the whole dilate
  SparseFamily flat = verify_sparse(d, {{2, 0}, {2, 2}});
  REQUIRE(certify_strengthened(flat, Rational(1)));
  const GridFunction f(d, 0.75);
  const ExceptionalSets a = exceptional_sets(flat, f, Rational(1), 0);
  for (const auto& e : a.entries) {
    CHECK(e.r.empty());
    CHECK(e.e == e.dilate);
    CHECK(e.average_e == doctest::Approx(0.75));
  }
  CHECK(a.bounds_ok());
  CHECK(a.disjoint());

  // nested pair at one level: |R| = |Q'| measured in fine units
  SparseFamily nested = verify_sparse(d, {{0, 0}, {5, 3}});
  REQUIRE(certify_strengthened(nested, Rational(1)));
  const ExceptionalSets b = exceptional_sets(nested, GridFunction(d, 0.5), Rational(1), 1);
  REQUIRE(b.entries.size() == 2);
  CHECK(b.entries[0].r.measure() == 2 * 2);
  CHECK(b.entries[0].average_e == doctest::Approx(0.5 * (1.0 - 1.0 / 32.0)));
  CHECK(b.r_small());
  CHECK(b.bounds_ok());

  // average_e = average - average_r on random instances, and the bound holds
  for (std::uint64_t s = 0; s < 10; ++s) {
    const ExceptionalCaseResult r = exceptional_case(s, Rational(1));
    CHECK(r.bound_failures == 0);
    CHECK(r.r_failures == 0);
    CHECK(r.overlapping_pairs == 0);
    CHECK(r.pointwise_failures == 0);
  }
  Rng rng(99);
  const Domain e(0, 8);
  const SparseFamily fam = random_sparse_family(e, rng, 40);
  const GridFunction g = random_multiscale_function(e, rng);
  const LevelDecomposition dec = decompose(split_sparse(fam, Rational(1)).front(), g, Rational(1));
  for (const auto& [ell, lf] : dec.levels) {
    const ExceptionalSets xs = exceptional_sets(lf, g, Rational(1), ell);
    for (const auto& en : xs.entries) {
      CHECK(en.average_e == doctest::Approx(en.average - en.average_r).epsilon(1e-12));
      CHECK(en.average_e >= en.average - en.average / 8.0 - 1e-15);
    }
  }
  SparseFamily plain = verify_sparse(d, {{0, 0}});
  CHECK_THROWS_AS(exceptional_sets(plain, f, Rational(1), 0), PreconditionError);
}

TEST_CASE("averaging lemma") {
  const Domain d(0, 4);
  const DyadicInterval q{1, 0};
  const WeakRhoReport one =
      lemma_weakrho_check(d, {q}, {GridFunction::indicator(d, q)}, Weight::lebesgue(d), 2.0, Rational(1));
  CHECK(one.ratio == doctest::Approx(1.0));
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const WeakRhoCase c = weakrho_case(s);
    const double r = lemma_weakrho_check(c.domain, c.family, c.g, c.w, c.p, Rational(1)).ratio;
    CHECK(r <= 1.0 + 1e-9);
    worst = std::max(worst, r);
  }
  double worst3 = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const WeakRhoCase c = weakrho_case(s);
    worst3 = std::max(worst3, lemma_weakrho_check(c.domain, c.family, c.g, c.w, c.p, Rational(3)).ratio);
  }
  MESSAGE("max ratio rho=1: " << worst << ", rho=3: " << worst3);
}

TEST_CASE("p < 2 trace") {
  const Domain d(0, 6);
  const DyadicInterval q0 = DyadicInterval::whole(d);
  SparseFamily single = verify_sparse(d, {q0});
  REQUIRE(certify_strengthened(single, Rational(1)));
  const PLessThan2Trace t = weak_bound_p_lt_2(single, GridFunction(d, 0.5), Weight::lebesgue(d), 1.5, Rational(1));
  REQUIRE(t.records.size() == 1);
  CHECK(t.records[0].ell == 1);
  CHECK(t.records[0].bucket_size == 1);
  CHECK(t.epsilon == doctest::Approx(0.25));
  CHECK(t.k_eps == doctest::Approx(1.0 / (1.0 - std::exp2(-0.25))));
  // 0.25 <= k_eps, so the union side is empty
  CHECK(t.direct_mass == 0.0);
  CHECK(t.ok());

  // a chain [0, 16^-k) with f = 0.9 puts every member at level 0 and stacks them
  const Domain pd(0, 12);
  std::vector<DyadicInterval> chain;
  for (int k = 0; k <= 3; ++k) chain.push_back({4 * k, 0});
  SparseFamily stack = verify_sparse(pd, chain);
  REQUIRE(certify_strengthened(stack, Rational(1)));
  double worst = 0.0;
  for (double e : dyadic_epsilons(1, 6)) {
    const PLessThan2Trace tr = weak_bound_p_lt_2(stack, GridFunction(pd, 0.9), Weight::power(e), 1.5, Rational(1));
    CHECK(tr.ok());
    CHECK(tr.level_mass_total > 0.0);
    worst = std::max(worst, tr.level_mass_total / (tr.ap_char * tr.f_norm_p));
  }
  MESSAGE("p<2 level mass / ([w] ||f||^p) max " << worst);

  Rng rng(4);
  const Domain rd(0, 8);
  const SparseFamily fam = random_sparse_family(rd, rng, 60);
  const GridFunction f = random_multiscale_function(rd, rng);
  for (const auto& g : split_sparse(fam, Rational(1))) {
    CHECK(weak_bound_p_lt_2(g, f, Weight::power(0.125), 1.2, Rational(1)).ok());
  }
  CHECK_THROWS_AS(weak_bound_p_lt_2(single, GridFunction(d, 0.5), Weight::lebesgue(d), 2.0, Rational(1)), PreconditionError);
}

TEST_CASE("p = 2 trace") {
  const Domain d(0, 8);
  Rng rng(5);
  const GridFunction f = random_multiscale_function(d, rng);
  SparseFamily fam = random_sparse_family(d, rng, 60);
  const auto groups = split_sparse(fam, Rational(1));
  const PEqual2Trace leb = weak_bound_p_eq_2(groups.front(), f, Weight::lebesgue(d), Rational(1));
  CHECK(leb.ell0 == 4);
  CHECK(leb.ok());
  double worst = 0.0;
  for (double e : dyadic_epsilons(1, 8)) {
    const PEqual2Trace t = weak_bound_p_eq_2(groups.front(), f, Weight::power(e), Rational(1));
    CHECK(t.ok());
    CHECK(t.ell0 == static_cast<int>(std::floor(4.0 * (1.0 + std::log2(t.ap_char)))));
    worst = std::max(worst, t.envelope_ratio);
    // tail masses never increase past ell0
    for (std::size_t i = 1; i < t.tail.size(); ++i) CHECK(t.tail[i].level_mass <= t.tail[i - 1].level_mass);
  }
  MESSAGE("p=2 envelope ratio max " << worst);
  CHECK(!trace_to_json(leb.head).empty());
}

TEST_CASE("Rubio de Francia majorant") {
  const Domain d(0, 6);
  const Weight one = Weight::lebesgue(d);
  const ExtrapolationMajorant flat = rubio_de_francia(GridFunction(d, 1.0), one, 2.0, 2.0, 10);
  double expect = 0.0;
  for (int k = 0; k <= 10; ++k) expect += std::pow(4.0, -k);
  for (std::int64_t c = 0; c < d.cells(); ++c) CHECK(flat.H[c] == doctest::Approx(expect).epsilon(1e-14));
  CHECK(flat.h_le_big_h);
  CHECK(flat.norm_ok);
  CHECK(flat.pointwise_ok);

  Rng rng(6);
  const GridFunction h = random_nonnegative_function(d, rng);
  const ExtrapolationMajorant m = rubio_de_francia(h, one, 2.0, 2.0, 30);
  CHECK(m.h_le_big_h);
  CHECK(m.norm_ok);
  CHECK(m.pointwise_ok);
  CHECK(std::isfinite(m.a1_hw));
  CHECK(m.a1_hw <= 2.0 * 2.0 * (1.0 + 1e-9) + m.tail_max);
  CHECK_THROWS_AS(rubio_de_francia(h, one, 2.0, 0.5, 30), PreconditionError);
  CHECK_THROWS_AS(rubio_de_francia(h, one, 1.0, 2.0, 30), PreconditionError);

  // power weights: [Hw]_A1 stays below a fixed multiple of [w]_Ap
  const GridFunction h1 = GridFunction::indicator(d, 0.0, 1.0);
  for (double e : dyadic_epsilons(1, 6)) {
    const Weight w = Weight::power(e);
    const double a = 2.5 * estimate_rdf_norm(w, d, 5.0, 100, 1);
    const ExtrapolationMajorant p = rubio_de_francia(h1, w, 5.0, a, 40);
    CHECK(p.h_le_big_h);
    CHECK(p.norm_ok);
    CHECK(p.pointwise_ok);
    CHECK(p.a1_hw <= 2.0 * a * (1.0 + 1e-9) + 1.0);
  }
}

TEST_CASE("extrapolation chain") {
  const Domain d(0, 7);
  Rng rng(8);
  const GridFunction f = random_nonnegative_function(d, rng);
  const SparseFamily fam = dominating_family(f, DyadicInterval::whole(d));
  const auto groups = split_sparse(fam, Rational(1));
  const ExtrapolationTrace t = extrapolate_p_gt_2(f, Weight::lebesgue(d), 2.5, groups.front(), Rational(1));
  CHECK(t.consistent);
  CHECK(t.qprime == doctest::Approx(5.0));
  for (double e : dyadic_epsilons(1, 5)) {
    const ExtrapolationTrace p = extrapolate_p_gt_2(f, Weight::power(e), 2.5, groups.front(), Rational(1));
    CHECK(p.consistent);
    CHECK(p.realized <= p.chain_bound);
  }
  CHECK_THROWS_AS(extrapolate_p_gt_2(f, Weight::lebesgue(d), 2.0, groups.front(), Rational(1)), PreconditionError);
  CHECK_THROWS_AS(extrapolate_p_gt_2(f, Weight::lebesgue(d), 2.5, groups.front(), Rational(3)), PreconditionError);
}
