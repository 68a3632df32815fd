#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "dyadlab/corpora.hpp"
#include "dyadlab/error.hpp"
#include "dyadlab/random_instances.hpp"
#include "dyadlab/sparse_family.hpp"

using namespace dyadlab;

namespace {

// Brute force: for every member, count cells covered by members strictly inside it.
bool brute_certified(const Domain& d, const std::vector<DyadicInterval>& m) {
  for (const auto& q : m) {
    std::int64_t covered = 0;
    for (auto c = q.first_cell(d); c < q.end_cell(d); ++c) {
      const bool hit = std::any_of(m.begin(), m.end(), [&](const DyadicInterval& p) {
        return q.strictly_contains(p) && p.contains_cell(d, c);
      });
      covered += hit;
    }
    if (2 * covered >= q.cell_count(d)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("sparseness certificate") {
  const Domain d(0, 4);
  CHECK(verify_sparse(d, {{0, 0}}).certified());
  const SparseFamily half = verify_sparse(d, {{0, 0}, {1, 0}});
  CHECK_FALSE(half.certified());
  REQUIRE(half.worst());
  CHECK(half.worst()->member == DyadicInterval{0, 0});
  const std::vector<DyadicInterval> pair{{0, 0}, {2, 0}, {2, 2}};
  CHECK(verify_sparse(d, pair).certified() == brute_certified(d, pair));
  CHECK_FALSE(verify_sparse(d, pair).certified());
  CHECK(verify_sparse(d, {{0, 0}, {2, 0}, {3, 4}}).certified());
  CHECK_THROWS_AS(verify_sparse(d, {{0, 1}}), DomainError);
}

TEST_CASE("certificate agrees with brute force on random families") {
  const Domain d(0, 7);
  for (std::uint64_t s = 0; s < 40; ++s) {
    Rng rng(task_seed(3, s));
    std::vector<DyadicInterval> m;
    std::uniform_int_distribution<int> lv(0, 6);
    for (int i = 0; i < 6; ++i) {
      const int l = lv(rng);
      m.push_back({l, std::uniform_int_distribution<std::int64_t>(0, (1 << l) - 1)(rng)});
    }
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
    CHECK(verify_sparse(d, m).certified() == brute_certified(d, m));
  }
  Rng rng(1);
  const SparseFamily fam = random_sparse_family(d, rng, 60);
  CHECK(fam.certified());
  CHECK(brute_certified(d, fam.members()));
}

TEST_CASE("strengthened conditions") {
  const Domain d(0, 6);
  SparseFamily a = verify_sparse(d, {{0, 0}, {4, 0}});
  CHECK(certify_strengthened(a, Rational(1)));
  CHECK(a.strengthened_for_rho() == Rational(1));
  // 1/16 covered is not < 1/(8*2)
  SparseFamily b = verify_sparse(d, {{0, 0}, {4, 0}});
  CHECK_FALSE(certify_strengthened(b, Rational(2)));
  // neighbours at the same scale overlap once dilated by 3/2
  SparseFamily c = verify_sparse(d, {{3, 0}, {3, 1}});
  CHECK(certify_strengthened(c, Rational(1)));
  const StrengthenedReport r = check_strengthened(c, Rational(3, 2));
  CHECK_FALSE(r.dilates_disjoint);
  REQUIRE(r.overlapping_pair);
}

TEST_CASE("splitting into strengthened groups") {
  const Domain d(0, 4);
  const SparseFamily single = verify_sparse(d, {{1, 1}});
  const auto one = split_sparse(single, Rational(1));
  REQUIRE(one.size() == 1);
  CHECK(one[0].members() == single.members());

  for (int rho : {1, 2, 3, 5}) {
    const SplitCaseResult r = split_case(11, Rational(rho));
    CHECK(r.members == 200);
    CHECK(r.union_ok);
    CHECK(r.all_strengthened);
    CHECK(static_cast<std::int64_t>(r.groups) <= r.group_bound);
  }
  CHECK(split_group_bound(Rational(1)) == 3);
  CHECK(split_group_bound(Rational(3)) == 15);
  CHECK_THROWS_AS(split_sparse(verify_sparse(d, {{0, 0}, {1, 0}}), Rational(1)), PreconditionError);
}

TEST_CASE("stopping-time family") {
  const Domain d(0, 6);
  const DyadicInterval q0 = DyadicInterval::whole(d);
  const SparseFamily flat = dominating_family(GridFunction(d, 1.0), q0);
  CHECK(flat.members() == std::vector<DyadicInterval>{q0});

  // left half: <f>_{[0,1/2)} = 1 = 2 <f>_{[0,1)} is not a strict doubling
  const GridFunction left = GridFunction::indicator(d, 0.0, 0.5);
  CHECK(dominating_family(left, q0).members() == std::vector<DyadicInterval>{q0});
  const GridFunction quarter = GridFunction::indicator(d, 0.0, 0.25);
  const SparseFamily fq = dominating_family(quarter, q0);
  CHECK(fq.members() == std::vector<DyadicInterval>{q0, {2, 0}});

  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(task_seed(9, s));
    const GridFunction f = random_nonnegative_function(d, rng);
    const SparseFamily fam = dominating_family(f, q0);
    CHECK(fam.certified());
    double total = 0.0;
    for (const auto& q : fam.members()) total += q.length();
    CHECK(total <= 2.0 * q0.length());
    // every member beyond the root has an average more than twice that of
    // its closest member ancestor
    const IntegralTable t(f);
    const FamilyForest forest = build_forest(d, fam.members());
    for (std::size_t i = 0; i < fam.size(); ++i) {
      if (forest.parent[i] < 0) continue;
      const auto& q = fam.members()[i];
      const auto& p = fam.members()[static_cast<std::size_t>(forest.parent[i])];
      CHECK(t.average(q) > 2.0 * t.average(p));
    }
  }
  CHECK_THROWS_AS(dominating_family(GridFunction(d, -1.0), q0), PreconditionError);
}

TEST_CASE("family text format round trip") {
  const Domain d(1, 5);
  Rng rng(4);
  const SparseFamily fam = random_sparse_family(d, rng, 30);
  std::stringstream ss;
  fam.write(ss);
  const SparseFamily back = SparseFamily::read(ss);
  CHECK(back.domain() == d);
  CHECK(back.members() == fam.members());
  CHECK(back.certified());
  std::stringstream bad("0 0\n");
  CHECK_THROWS_AS(SparseFamily::read(bad), FormatError);
}
