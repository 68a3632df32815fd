#include <doctest.h>

#include <cmath>
#include <vector>

#include "dyadlab/error.hpp"
#include "dyadlab/experiments.hpp"
#include "dyadlab/norms.hpp"
#include "dyadlab/random_instances.hpp"
#include "dyadlab/weights.hpp"

using namespace dyadlab;

TEST_CASE("power weight measures") {
  const Weight w = Weight::power(0.25);
  CHECK(w.measure(0.0, 1.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(w.measure(0.5, 1.0) == doctest::Approx((1.0 - std::pow(0.5, 0.25)) / 0.25).epsilon(1e-14));
  // tiny epsilon stays accurate through expm1
  const Weight t = Weight::power(std::ldexp(1.0, -16));
  CHECK(t.measure(0.5, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-4));
  const Domain d(1, 4);
  double s = 0.0;
  for (double m : w.cell_masses(d)) s += m;
  CHECK(s == doctest::Approx(w.measure(0.0, 2.0)).epsilon(1e-13));
  CHECK(*w.dual(2.0).epsilon() == doctest::Approx(1.75));
  CHECK_THROWS_AS(Weight::power(0.0), PreconditionError);
}

TEST_CASE("step weights and json") {
  const Domain d(0, 3);
  const Weight w = Weight::step(d, {1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(w.measure(DyadicInterval{1, 1}) == doctest::Approx(26.0 / 8.0));
  const Weight back = Weight::from_json(w.to_json());
  CHECK(back.id() == w.id());
  CHECK(back.cell_masses(d) == w.cell_masses(d));
  const Weight p = Weight::from_json(Weight::power(0.125).to_json());
  CHECK(*p.epsilon() == 0.125);
  CHECK_THROWS_AS(Weight::from_json("{\"kind\":\"circle\"}"), FormatError);
  CHECK_THROWS_AS(Weight::from_json("not json"), FormatError);
  CHECK_THROWS_AS(Weight::step(d, {1, 2}), PreconditionError);
}

TEST_CASE("A_p of the Lebesgue weight is 1") {
  const Domain d(2, 6);
  for (double p : {1.5, 2.0, 3.0}) CHECK(ap_characteristic(Weight::lebesgue(d), p, d).value == doctest::Approx(1.0));
  CHECK(a1_characteristic(Weight::lebesgue(d), d) == doctest::Approx(1.0));
}

TEST_CASE("A_p of power weights") {
  const Domain d(6, 10);
  std::vector<std::pair<double, double>> xy;
  for (double e : dyadic_epsilons(1, 8)) {
    const ApCharacteristic a = ap_characteristic(Weight::power(e), 2.0, d);
    CHECK(a.value == doctest::Approx(power_weight_ap(e, 2.0)).epsilon(1e-9));
    CHECK(a.witness.index == 0);
    xy.emplace_back(1.0 / e, a.value);
  }
  std::sort(xy.begin(), xy.end());
  CHECK(fit_exponent(xy).slope == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("A_p scan equals an independent brute force") {
  const Domain d(0, 6);
  Rng rng(17);
  const Weight w = random_step_weight(d, rng, 1.0 / 64.0, 64.0);
  for (double p : {1.5, 2.0, 2.7}) {
    const auto wm = w.cell_masses(d);
    const auto sm = w.dual(p).cell_masses(d);
    double best = 0.0;
    for (int level = 0; level <= 6; ++level) {
      const std::int64_t len = std::int64_t{1} << (6 - level);
      for (std::int64_t k = 0; k < (std::int64_t{1} << level); ++k) {
        double a = 0.0, b = 0.0;
        for (std::int64_t c = k * len; c < (k + 1) * len; ++c) {
          a += wm[c];
          b += sm[c];
        }
        const double ql = std::ldexp(1.0, -level);
        best = std::max(best, (a / ql) * std::pow(b / ql, p - 1.0));
      }
    }
    CHECK(ap_characteristic(w, p, d).value == doctest::Approx(best).epsilon(1e-12));
    // triples only enlarge the scan
    CHECK(ap_characteristic(w, p, d, {true}).value >= ap_characteristic(w, p, d).value);
  }
}

TEST_CASE("A_1 characteristic") {
  const Domain d(0, 3);
  // increasing: essinf is the left cell
  const Weight w = Weight::step(d, {1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(a1_characteristic(w, d) == doctest::Approx(4.5));
  CHECK_THROWS_AS(a1_characteristic(Weight::step(d, {0, 1, 1, 1, 1, 1, 1, 1}), d), PositivityError);
  const Domain pd(4, 10);
  std::vector<std::pair<double, double>> xy;
  for (double e : dyadic_epsilons(1, 8)) xy.emplace_back(1.0 / e, a1_characteristic(Weight::power(e), pd));
  std::sort(xy.begin(), xy.end());
  CHECK(fit_exponent(xy).slope == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("A_infinity decay") {
  const Domain d(0, 4);
  const Weight one = Weight::lebesgue(d);
  const AinftyDecay a = ainfty_decay_check(one, d, {0, 0}, {0, 1, 2, 3}, 1.0);
  CHECK(a.ratio == doctest::Approx(0.25));
  CHECK(a.implied_c == doctest::Approx(0.75));
  CHECK(a.pass);

  const double e = 0.125;
  const Weight w = Weight::power(e);
  const double a2 = ap_characteristic(w, 2.0, d).value;
  const AinftyDecay b = ainfty_decay_check(w, d, {0, 0}, {0}, a2);
  CHECK(b.ratio == doctest::Approx(std::exp2(-4.0 * e)).epsilon(1e-12));
  CHECK(b.implied_c == doctest::Approx((1.0 - std::exp2(-4.0 * e)) * a2));
  CHECK_THROWS_AS(ainfty_decay_check(w, d, {0, 0}, {0, 1, 2, 3, 4, 5, 6, 7}, a2), PreconditionError);

  const auto heavy = heaviest_minority_cells(w, d, {0, 0});
  CHECK(heavy.size() == 7);
  CHECK(heavy.front() == 0);
}
