#include "dyadlab/corpora.hpp"

#include <algorithm>
#include <limits>

#include "dyadlab/random_instances.hpp"
#include "dyadlab/sparse_family.hpp"

namespace dyadlab {

WeakRhoCase weakrho_case(std::uint64_t seed) {
  Rng rng(task_seed(0x5eed, seed));
  WeakRhoCase c;
  c.domain = Domain(0, 10);
  std::uniform_int_distribution<int> size(4, 40);
  const SparseFamily fam = random_sparse_family(c.domain, rng, static_cast<std::size_t>(size(rng)));
  c.family = fam.members();
  // g_Q lives on Q, where it meets its own average
  for (const auto& q : c.family) c.g.push_back(random_nonnegative_function(c.domain, rng, q, 4));
  // mild weights keep [w] small, so the ratio sits close to its ceiling
  c.w = seed % 2 ? random_step_weight(c.domain, rng, 0.5, 2.0) : random_step_weight(c.domain, rng);
  c.p = kWeakRhoExponents[seed % 3];
  return c;
}

ExceptionalCaseResult exceptional_case(std::uint64_t seed, Rational rho) {
  Rng rng(task_seed(0xe0e0, seed));
  const Domain d(0, 10);
  ExceptionalCaseResult out;
  out.min_margin = std::numeric_limits<double>::infinity();
  const SparseFamily fam = random_sparse_family(d, rng, 80);
  const GridFunction f = random_multiscale_function(d, rng);
  for (const SparseFamily& group : split_sparse(fam, rho)) {
    const LevelDecomposition dec = decompose(group, f, rho);
    for (const auto& [ell, level] : dec.levels) {
      const ExceptionalSets ex = exceptional_sets(level, f, rho, ell);
      ++out.families;
      out.members += ex.entries.size();
      const double floor_value = 0.375 * std::ldexp(1.0, -ell);
      for (const auto& e : ex.entries) {
        if (!e.bound_ok) ++out.bound_failures;
        if (!e.r_small) ++out.r_failures;
        out.min_margin = std::min(out.min_margin, e.average_e / floor_value);
      }
      out.overlapping_pairs += ex.overlapping_pairs;
      if (!ex.pointwise_ok) ++out.pointwise_failures;
    }
  }
  return out;
}

SplitCaseResult split_case(std::uint64_t seed, Rational rho) {
  Rng rng(task_seed(0x5917, seed));
  const Domain d(0, 12);
  const SparseFamily fam = random_sparse_family(d, rng, 200);
  SplitCaseResult out;
  out.members = fam.size();
  const auto groups = split_sparse(fam, rho);
  out.groups = groups.size();
  out.group_bound = split_group_bound(rho);
  std::vector<DyadicInterval> all;
  out.all_strengthened = true;
  for (const auto& g : groups) {
    all.insert(all.end(), g.members().begin(), g.members().end());
    if (!g.certified() || !check_strengthened(g, rho).ok()) out.all_strengthened = false;
  }
  std::sort(all.begin(), all.end());
  out.union_ok = all == fam.members();
  return out;
}

}  // namespace dyadlab
