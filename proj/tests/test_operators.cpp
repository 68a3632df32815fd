#include <doctest.h>

#include <cmath>

#include "dyadlab/error.hpp"
#include "dyadlab/kernel_dictionary.hpp"
#include "dyadlab/operators.hpp"
#include "dyadlab/random_instances.hpp"
#include "dyadlab/simd/kernels.hpp"
#include "dyadlab/sparse_family.hpp"

using namespace dyadlab;

TEST_CASE("averages over dilates") {
  const Domain d(0, 5);
  CHECK(average(GridFunction(d, 3.0), DilatedInterval(d, {2, 1}, Rational(1))) == doctest::Approx(3.0));
  CHECK(average(GridFunction::indicator(d, 0.0, 0.5), DilatedInterval(d, {0, 0}, Rational(1))) == 0.5);

  Rng rng(2);
  const GridFunction f = random_nonnegative_function(d, rng);
  // 3 [1/4, 1/2) = [0, 3/4)
  double s = 0.0;
  for (std::int64_t c = 0; c < 24; ++c) s += f[c];
  CHECK(average(f, DilatedInterval(d, {2, 1}, Rational(3))) == doctest::Approx(s / 24.0).epsilon(1e-13));
  // clipped dilate keeps the unclipped length in the denominator
  s = 0.0;
  for (std::int64_t c = 0; c < 16; ++c) s += f[c];
  CHECK(average(f, DilatedInterval(d, {2, 0}, Rational(3))) == doctest::Approx(s / 24.0).epsilon(1e-13));
  // 3/2 [1/4, 1/2) = [3/16, 9/16), cells 6..17
  s = 0.0;
  for (std::int64_t c = 6; c < 18; ++c) s += f[c];
  CHECK(average(f, DilatedInterval(d, {2, 1}, Rational(3, 2))) == doctest::Approx(s / 12.0).epsilon(1e-13));
  // a single cell dilated by 3/2 reaches half into both neighbours
  const double v = average(f, DilatedInterval(d, {5, 9}, Rational(3, 2)));
  CHECK(v == doctest::Approx((0.25 * f[8] + f[9] + 0.25 * f[10]) / 1.5).epsilon(1e-13));
}

TEST_CASE("dyadic maximal function") {
  const Domain d(0, 6);
  const GridFunction one = GridFunction::indicator(d, 0.0, 1.0);
  const GridFunction m1 = maximal_function(one);
  for (std::int64_t c = 0; c < d.cells(); ++c) CHECK(m1[c] == 1.0);

  const GridFunction f = GridFunction::indicator(d, 0.0, 1.0 / 16.0);
  const GridFunction mf = maximal_function(f);
  const auto all = all_dyadic_intervals(d);
  const IntegralTable t(f);
  for (std::int64_t c = 0; c < d.cells(); ++c) {
    double best = 0.0;
    for (const auto& q : all) {
      if (q.contains_cell(d, c)) best = std::max(best, t.average(q));
    }
    CHECK(mf[c] == doctest::Approx(best).epsilon(1e-14));
  }

  Rng rng(8);
  const GridFunction g = random_signed_function(Domain(1, 6), rng);
  const GridFunction mg = maximal_function(g);
  const IntegralTable ta(g.abs());
  for (const auto& q : all_dyadic_intervals(g.domain())) {
    for (auto c = q.first_cell(g.domain()); c < q.end_cell(g.domain()); ++c) {
      CHECK(mg[c] >= ta.average(q) * (1.0 - 1e-14));
    }
  }
  const GridFunction m3 = maximal_function(g, Rational(3));
  const GridFunction ga = g.abs();
  for (std::int64_t c = 0; c < g.size(); c += 7) {
    double best = 0.0;
    for (const auto& q : all_dyadic_intervals(g.domain())) {
      if (q.contains_cell(g.domain(), c)) best = std::max(best, average(ga, DilatedInterval(g.domain(), q, Rational(3))));
    }
    CHECK(m3[c] == doctest::Approx(best).epsilon(1e-13));
  }
}

TEST_CASE("Haar square function") {
  const Domain d(3, 6);
  CHECK(haar_square_function(GridFunction(d, 2.5)).is_zero());

  const GridFunction f = GridFunction::indicator(d, 0.0, 1.0);
  const GridFunction sf = haar_square_function(f);
  const double expect = (1.0 - std::pow(4.0, -3.0)) / 3.0;
  for (std::int64_t c = 0; c < 64; ++c) CHECK(sf[c] * sf[c] == doctest::Approx(expect).epsilon(1e-14));

  for (std::uint64_t s = 0; s < 5; ++s) {
    Rng rng(task_seed(21, s));
    const GridFunction g = random_signed_function(d, rng);
    const GridFunction sg = haar_square_function(g);
    const double lhs = sg.squared().integral() + HaarCoefficientTable(g).mean_energy();
    CHECK(lhs == doctest::Approx(g.squared().integral()).epsilon(1e-9));
    CHECK(sg.squared().integral() <= g.squared().integral() * (1.0 + 1e-12));
    CHECK(HaarCoefficientTable(g).energy() == doctest::Approx(sg.squared().integral()).epsilon(1e-12));
  }
}

TEST_CASE("sparse square operator") {
  const Domain d(0, 5);
  Rng rng(30);
  const GridFunction f = random_nonnegative_function(d, rng);
  const DyadicInterval q0 = DyadicInterval::whole(d);
  const GridFunction t0 = sparse_square_operator(f, verify_sparse(d, {q0}));
  for (std::int64_t c = 0; c < d.cells(); ++c) CHECK(t0[c] == doctest::Approx(f.integral()));

  const GridFunction one(d, 1.0);
  const GridFunction tn = sparse_square_operator(one, verify_sparse(d, {{0, 0}, {2, 0}}));
  for (std::int64_t c = 0; c < d.cells(); ++c) CHECK(tn[c] == doctest::Approx(c < 8 ? std::sqrt(2.0) : 1.0));

  for (int rho : {1, 3}) {
    const SparseFamily s = random_sparse_family(d, rng, 25);
    const GridFunction t = sparse_square_operator(f, s, Rational(rho));
    for (std::int64_t c = 0; c < d.cells(); ++c) {
      double acc = 0.0;
      for (const auto& q : s.members()) {
        if (!q.contains_cell(d, c)) continue;
        const double a = average(f, DilatedInterval(d, q, Rational(rho)));
        acc += a * a;
      }
      CHECK(t[c] == doctest::Approx(std::sqrt(acc)).epsilon(1e-12));
    }
    const GridFunction t2 = sparse_square_operator(f.scaled(3.0), s, Rational(rho));
    for (std::int64_t c = 0; c < d.cells(); ++c) CHECK(t2[c] == doctest::Approx(3.0 * t[c]).epsilon(1e-14));
  }
}

TEST_CASE("dual testing operator") {
  const Domain d(0, 4);
  const DyadicInterval q{2, 1};
  const GridFunction a = GridFunction::indicator(d, q);
  const GridFunction out = dual_testing_operator({{q, a}}, Weight::lebesgue(d));
  for (std::int64_t c = 0; c < d.cells(); ++c) CHECK(out[c] == doctest::Approx(q.contains_cell(d, c) ? 1.0 : 0.0));
  CHECK(dual_testing_operator({{q, GridFunction(d)}}, Weight::lebesgue(d)).is_zero());
  const auto avg = weighted_averages({{q, a}}, Weight::step(d, std::vector<double>(16, 2.0)));
  CHECK(avg.front() == doctest::Approx(2.0));
}

TEST_CASE("kernel dictionary") {
  const KernelDictionary dict = KernelDictionary::standard(0.75);
  CHECK(dict.size() == 8);
  CHECK(dict.certify());
  CHECK(dict.max_mean_error() < 1e-12);
  CHECK(dict.max_holder_quotient() <= 1.0);
  CHECK(dict.eval(0, 1.5) == 0.0);
  CHECK(dict.prefix(3).size() == 3);
}

TEST_CASE("intrinsic square function") {
  const Domain d(0, 7);
  const KernelDictionary dict = KernelDictionary::standard(0.75);
  const auto scales = default_intrinsic_scales(d);
  CHECK(intrinsic_square_discrete(GridFunction(d), dict, scales).is_zero());

  Rng rng(12);
  const GridFunction f = random_signed_function(d, rng);
  const GridFunction small = intrinsic_square_discrete(f, dict.prefix(3), scales);
  const GridFunction full = intrinsic_square_discrete(f, dict, scales);
  const std::vector<int> fewer(scales.begin(), scales.begin() + scales.size() / 2);
  const GridFunction part = intrinsic_square_discrete(f, dict, fewer);
  for (std::int64_t c = 0; c < d.cells(); ++c) {
    CHECK(small[c] <= full[c]);
    CHECK(part[c] <= full[c]);
  }
  const std::vector<int> too_fine{d.resolution};
  CHECK_THROWS_AS(intrinsic_square_discrete(f, dict, too_fine), PreconditionError);

  // domination sanity: G f^2 against M f^2 + (T_S f)^2 with S the stopping family
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng r(task_seed(77, s));
    const GridFunction g = random_nonnegative_function(d, r);
    const GridFunction gi = intrinsic_square_discrete(g, dict, scales);
    const GridFunction mg = maximal_function(g);
    const GridFunction ts = sparse_square_operator(g, dominating_family(g, DyadicInterval::whole(d)));
    for (std::int64_t c = 0; c < d.cells(); ++c) {
      worst = std::max(worst, gi[c] * gi[c] / (mg[c] * mg[c] + ts[c] * ts[c] + 1e-12));
    }
  }
  MESSAGE("intrinsic domination constant " << worst);
  CHECK(std::isfinite(worst));
}

TEST_CASE("operators agree across SIMD backends") {
  if (!simd::avx2_kernels()) return;
  const Domain d(2, 8);
  Rng rng(41);
  const GridFunction f = random_signed_function(d, rng);
  simd::select_backend(simd::Backend::scalar);
  const GridFunction s0 = haar_square_function(f);
  const GridFunction m0 = maximal_function(f);
  simd::select_backend(simd::Backend::avx2);
  const GridFunction s1 = haar_square_function(f);
  const GridFunction m1 = maximal_function(f);
  for (std::int64_t c = 0; c < d.cells(); ++c) {
    CHECK(s1[c] == doctest::Approx(s0[c]).epsilon(1e-13));
    CHECK(m1[c] == m0[c]);
  }
}
