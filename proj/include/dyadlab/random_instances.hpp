#pragma once

// Seeded generators for property corpora. Values are kept on dyadic lattices
// where exact comparisons matter.

#include <cstdint>
#include <random>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/grid_function.hpp"
#include "dyadlab/sparse_family.hpp"
#include "dyadlab/weights.hpp"

namespace dyadlab {

using Rng = std::mt19937_64;

// Seed for task `index` of a run seeded with `base`; independent of schedule.
std::uint64_t task_seed(std::uint64_t base, std::uint64_t index) noexcept;

// Sum of `pieces` indicators of random dyadic subintervals of `support`
// with heights k/8, k = 1..8.
GridFunction random_nonnegative_function(const Domain& d, Rng& rng, const DyadicInterval& support, int pieces = 8);
GridFunction random_nonnegative_function(const Domain& d, Rng& rng, int pieces = 8);

// Sum of `pieces` dyadic indicators with heights (k/8) 2^{-s}, k = 1..8,
// s = 0..max_shift, so averages spread over many dyadic levels while every
// value stays on a dyadic lattice.
GridFunction random_multiscale_function(const Domain& d, Rng& rng, int pieces = 12, int max_shift = 10);

// Every cell an independent k / denominator with k uniform in [0, max_numerator].
GridFunction random_lattice_function(const Domain& d, Rng& rng, std::int64_t denominator = 64,
                                     std::int64_t max_numerator = 256);

// Signed values uniform in [-1, 1].
GridFunction random_signed_function(const Domain& d, Rng& rng);

// Densities log-uniform in [lo, hi].
Weight random_step_weight(const Domain& d, Rng& rng, double lo = 1.0 / 64.0, double hi = 64.0);

// Certified sparse family under `root` with up to `target` members.
SparseFamily random_sparse_family(const Domain& d, Rng& rng, std::size_t target, const DyadicInterval& root);
SparseFamily random_sparse_family(const Domain& d, Rng& rng, std::size_t target);

}  // namespace dyadlab
