#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "dyadlab/dyadic.hpp"

namespace dyadlab {

// Piecewise-constant function on the level-J cells of the domain.
// Values are cell averages; integrals over dyadic intervals are finite sums.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(const Domain& d, double fill = 0.0);
  GridFunction(const Domain& d, std::vector<double> values);

  static GridFunction indicator(const Domain& d, const DyadicInterval& q);
  // Indicator of [a, b) where a and b are multiples of the cell width.
  static GridFunction indicator(const Domain& d, double a, double b);
  static GridFunction from_cells(const Domain& d, const std::function<double(std::int64_t)>& cell_value);

  const Domain& domain() const noexcept { return domain_; }
  std::int64_t size() const noexcept { return static_cast<std::int64_t>(values_.size()); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::int64_t i) const noexcept { return values_[static_cast<std::size_t>(i)]; }
  double cell_midpoint(std::int64_t i) const noexcept { return (static_cast<double>(i) + 0.5) * domain_.cell_width(); }

  double integral() const;
  double min_value() const;
  double max_value() const;
  bool nonnegative() const;
  bool is_zero() const;

  GridFunction operator+(const GridFunction& o) const;
  GridFunction operator*(const GridFunction& o) const;
  GridFunction scaled(double c) const;
  GridFunction abs() const;
  GridFunction pointwise_max(const GridFunction& o) const;
  GridFunction sqrt() const;
  GridFunction squared() const;

  // CSV with header "x,value"; x is the cell midpoint.
  void write_csv(std::ostream& os) const;
  // Reads the CSV above; M and J are recovered from the row count and the
  // first midpoint.
  static GridFunction read_csv(std::istream& is);

 private:
  void require_same_domain(const GridFunction& o) const;

  Domain domain_;
  std::vector<double> values_;
};

// Pairwise-summed integrals of a grid function over every dyadic interval.
// Level L of the table holds integrals over blocks of 2^L cells.
class IntegralTable {
 public:
  explicit IntegralTable(const GridFunction& f);

  const Domain& domain() const noexcept { return domain_; }
  double integral(const DyadicInterval& q) const;
  double average(const DyadicInterval& q) const { return integral(q) / q.length(); }
  // Integral over the cell range [a, b).
  double integral_cells(std::int64_t a, std::int64_t b) const;
  // Integral over [lo, hi) given in units of 1/units_per_cell of a cell.
  double integral_units(std::int64_t lo, std::int64_t hi, std::int64_t units_per_cell) const;
  double total() const { return blocks_.back().front(); }
  // Integrals over the 2^(M+j) intervals of level j.
  std::span<const double> level(int j) const;

 private:
  Domain domain_;
  std::vector<double> cell_values_;
  std::vector<std::vector<double>> blocks_;
};

}  // namespace dyadlab
