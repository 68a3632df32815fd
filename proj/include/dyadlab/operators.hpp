#pragma once

// Model operators on grid functions. All outputs live on the input's grid.

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/grid_function.hpp"
#include "dyadlab/kernel_dictionary.hpp"
#include "dyadlab/sparse_family.hpp"
#include "dyadlab/weights.hpp"

namespace dyadlab {

using GridOperator = std::function<GridFunction(const GridFunction&)>;

// <f>_I: integral over the clipped dilate divided by the unclipped length.
double average(const IntegralTable& table, const DilatedInterval& interval);
double average(const GridFunction& f, const DilatedInterval& interval);

// Dyadic maximal function: sup over dyadic Q containing x of <|f|>_Q.
GridFunction maximal_function(const GridFunction& f);
// Dilated variant: sup over dyadic Q containing x of <|f|>_{rho Q}.
GridFunction maximal_function(const GridFunction& f, Rational rho);

// Per-cell sums of node values pushed down the dyadic tree. nodes[L] holds
// one value per interval of level -M + L; the sum for each cell is taken in
// increasing level order.
std::vector<double> push_down_sums(const Domain& d, const std::vector<std::vector<double>>& nodes);

// <f, h_Q> for every dyadic Q of levels -M..J-1, with
// h_Q = |Q|^{-1/2} (1_left - 1_right).
class HaarCoefficientTable {
 public:
  explicit HaarCoefficientTable(const GridFunction& f);

  const Domain& domain() const noexcept { return domain_; }
  double coefficient(const DyadicInterval& q) const;
  std::span<const double> level(int j) const;
  // Sum of squared coefficients.
  double energy() const;
  // <f>_domain^2 |domain|
  double mean_energy() const noexcept { return mean_energy_; }

 private:
  Domain domain_;
  std::vector<std::vector<double>> coeffs_;
  double mean_energy_ = 0.0;
};

GridFunction haar_square_function(const GridFunction& f);

// (sum over Q in S of <f>_{rho Q}^2 1_Q)^{1/2}
GridFunction sparse_square_operator(const GridFunction& f, const SparseFamily& s, Rational rho = Rational(1));

// (sum over Q of <a_Q w>_Q^2 1_Q)^{1/2}, with <a_Q w>_Q = (1/|Q|) sum over
// cells of a_Q times the weight mass of the cell.
GridFunction dual_testing_operator(const std::vector<std::pair<DyadicInterval, GridFunction>>& a, const Weight& w);
// Averages <a_Q w>_Q used above, in the same order.
std::vector<double> weighted_averages(const std::vector<std::pair<DyadicInterval, GridFunction>>& a, const Weight& w);

// Discretized intrinsic square function:
//   G(x)^2 = sum_m (ln 2 / t_m) h sum_{cells y, |y - x| < t_m} A_m(y)^2
//   A_m(y) = max over kernels of |f * gamma_{t_m}(y)|
// with gamma_t(x) = gamma(x / t) / t and t_m = 2^{-m}. The scale list holds
// the exponents m; every scale must be at least two cells wide.
GridFunction intrinsic_square_discrete(const GridFunction& f, const KernelDictionary& dict, std::span<const int> scales);

// Default scales: t from 2 cells up to the domain length.
std::vector<int> default_intrinsic_scales(const Domain& d);

}  // namespace dyadlab
