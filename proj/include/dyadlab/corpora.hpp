#pragma once

// Seeded property corpora shared by the verification suites and the
// acceptance run. Each case is a pure function of its seed.

#include <cstdint>
#include <vector>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/grid_function.hpp"
#include "dyadlab/proof_lab.hpp"
#include "dyadlab/rational.hpp"
#include "dyadlab/weights.hpp"

namespace dyadlab {

inline constexpr double kWeakRhoExponents[] = {1.5, 2.0, 2.7};

struct WeakRhoCase {
  Domain domain;
  std::vector<DyadicInterval> family;
  std::vector<GridFunction> g;
  Weight w = Weight::power(1.0);
  double p = 2.0;
};

// Certified family on [0, 1) at J = 10, random nonnegative g_Q supported on
// Q, random step weight, p cycling through kWeakRhoExponents.
WeakRhoCase weakrho_case(std::uint64_t seed);

struct ExceptionalCaseResult {
  std::size_t families = 0;      // strengthened level families checked
  std::size_t members = 0;
  std::size_t bound_failures = 0;
  std::size_t r_failures = 0;
  std::int64_t overlapping_pairs = 0;
  std::size_t pointwise_failures = 0;
  double min_margin = 0.0;       // min over Q of <f 1_E>_{rho Q} / ((3/8) 2^{-ell})
};

// Random certified family split into strengthened groups for rho, a dyadic
// lattice f, and exceptional sets built for every level of every group.
ExceptionalCaseResult exceptional_case(std::uint64_t seed, Rational rho);

struct SplitCaseResult {
  std::size_t members = 0;
  std::size_t groups = 0;
  std::int64_t group_bound = 0;
  bool union_ok = false;
  bool all_strengthened = false;
};

// 200-member certified family on [0, 1) at J = 12, split for rho.
SplitCaseResult split_case(std::uint64_t seed, Rational rho);

}  // namespace dyadlab
