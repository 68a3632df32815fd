#include "dyadlab/random_instances.hpp"

#include <algorithm>
#include <cmath>

#include "dyadlab/error.hpp"
#include "dyadlab/interval_set.hpp"

namespace dyadlab {

std::uint64_t task_seed(std::uint64_t base, std::uint64_t index) noexcept {
  // splitmix64 of the pair
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

GridFunction random_nonnegative_function(const Domain& d, Rng& rng, const DyadicInterval& support, int pieces) {
  support.require_in(d);
  std::vector<double> v(static_cast<std::size_t>(d.cells()), 0.0);
  std::uniform_int_distribution<int> level(support.level, d.max_level());
  std::uniform_int_distribution<int> height(1, 8);
  for (int i = 0; i < pieces; ++i) {
    const int j = level(rng);
    const std::int64_t span = std::int64_t{1} << (j - support.level);
    std::uniform_int_distribution<std::int64_t> pick(0, span - 1);
    const DyadicInterval q{j, (support.index << (j - support.level)) + pick(rng)};
    const double hgt = height(rng) / 8.0;
    for (std::int64_t c = q.first_cell(d); c < q.end_cell(d); ++c) v[static_cast<std::size_t>(c)] += hgt;
  }
  return GridFunction(d, std::move(v));
}

GridFunction random_nonnegative_function(const Domain& d, Rng& rng, int pieces) {
  return random_nonnegative_function(d, rng, DyadicInterval::whole(d), pieces);
}

GridFunction random_multiscale_function(const Domain& d, Rng& rng, int pieces, int max_shift) {
  std::vector<double> v(static_cast<std::size_t>(d.cells()), 0.0);
  std::uniform_int_distribution<int> level(d.min_level(), d.max_level());
  std::uniform_int_distribution<int> height(1, 8);
  std::uniform_int_distribution<int> shift(0, max_shift);
  for (int i = 0; i < pieces; ++i) {
    const int j = level(rng);
    std::uniform_int_distribution<std::int64_t> pick(0, d.count_at(j) - 1);
    const DyadicInterval q{j, pick(rng)};
    const double hgt = std::ldexp(height(rng) / 8.0, -shift(rng));
    for (std::int64_t c = q.first_cell(d); c < q.end_cell(d); ++c) v[static_cast<std::size_t>(c)] += hgt;
  }
  return GridFunction(d, std::move(v));
}

GridFunction random_lattice_function(const Domain& d, Rng& rng, std::int64_t denominator, std::int64_t max_numerator) {
  std::uniform_int_distribution<std::int64_t> k(0, max_numerator);
  return GridFunction::from_cells(d, [&](std::int64_t) {
    return static_cast<double>(k(rng)) / static_cast<double>(denominator);
  });
}

GridFunction random_signed_function(const Domain& d, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return GridFunction::from_cells(d, [&](std::int64_t) { return u(rng); });
}

Weight random_step_weight(const Domain& d, Rng& rng, double lo, double hi) {
  if (!(lo > 0.0 && hi >= lo)) throw PreconditionError("step weight range must be positive");
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  std::vector<double> dens(static_cast<std::size_t>(d.cells()));
  for (double& x : dens) x = std::exp(u(rng));
  return Weight::step(d, std::move(dens));
}

SparseFamily random_sparse_family(const Domain& d, Rng& rng, std::size_t target, const DyadicInterval& root) {
  root.require_in(d);
  std::vector<DyadicInterval> members{root};
  // cells of each member already covered by its children
  std::vector<IntervalSet> used(1);
  // Repeated passes over the members so a sparse first generation does not
  // end the growth early.
  bool grew = true;
  while (grew && members.size() < target) {
    grew = false;
    for (std::size_t i = 0; i < members.size() && members.size() < target; ++i) {
      const DyadicInterval q = members[i];
      if (q.level + 2 > d.max_level()) continue;
      const std::int64_t whole = q.cell_count(d);
      std::uniform_int_distribution<int> tries(1, 4);
      std::uniform_int_distribution<int> depth(q.level + 2, std::min(d.max_level(), q.level + 5));
      const int n = tries(rng);
      for (int t = 0; t < n && members.size() < target; ++t) {
        const int j = depth(rng);
        std::uniform_int_distribution<std::int64_t> pick(0, (std::int64_t{1} << (j - q.level)) - 1);
        const DyadicInterval c{j, (q.index << (j - q.level)) + pick(rng)};
        IntervalSet piece;
        piece.add(c.first_cell(d), c.end_cell(d));
        if (used[i].intersects(piece)) continue;
        if (2 * (used[i].measure() + piece.measure()) >= whole) continue;
        used[i] = used[i].united(piece);
        members.push_back(c);
        used.emplace_back();
        grew = true;
      }
    }
  }
  SparseFamily out = verify_sparse(d, std::move(members));
  if (!out.certified()) throw std::logic_error("random sparse family failed certification");
  return out;
}

SparseFamily random_sparse_family(const Domain& d, Rng& rng, std::size_t target) {
  return random_sparse_family(d, rng, target, DyadicInterval::whole(d));
}

}  // namespace dyadlab
