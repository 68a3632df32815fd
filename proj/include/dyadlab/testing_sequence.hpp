#pragma once

// The family a_k(x) = c sum_{j >= k+1} (j - k)^{-alpha} 1_{[2^{-j}, 2^{-j+1})}(x)
// normalized so that sum_k a_k^2 <= 1.

#include <vector>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/grid_function.hpp"

namespace dyadlab {

// sum_{m >= 1} m^{-s} for s > 1, direct sum plus an Euler-Maclaurin tail.
double zeta_series(double s, double rel_tol = 1e-10);

// zeta(2 alpha)^{-1/2}; alpha must exceed 1/2.
double testing_constant(double alpha);

// Band index j of a cell of [0, 1): the cell lies in [2^{-j}, 2^{-j+1}).
// Cell 0 is assigned j = J + 1 (its midpoint band). Returns 0 for cells
// outside [0, 1).
int band_of_cell(const Domain& d, std::int64_t cell);

struct TestingSequence {
  double alpha = 0.75;
  double c_alpha = 0.0;
  int count = 0;                       // K
  std::vector<GridFunction> entries;   // a_1 .. a_K
  double max_square_sum = 0.0;         // max over cells of sum_k a_k^2
  bool normalized = false;             // max_square_sum <= 1, no tolerance
};

TestingSequence build_testing_sequence(double alpha, int count, const Domain& d);

}  // namespace dyadlab
