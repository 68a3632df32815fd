#pragma once

// Dyadic intervals of the working domain [0, 2^M) at resolution 2^-J.
//
// All positions are kept as integers. A dyadic interval at level j covers
// 2^(J-j) cells; a rho-dilate with rho = a/b has endpoints that are integers
// in "fine units" of 1/(2b) cell.

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "dyadlab/rational.hpp"

namespace dyadlab {

struct Domain {
  int top_level = 0;   // M: domain is [0, 2^M)
  int resolution = 0;  // J: cells have width 2^-J

  Domain() = default;
  Domain(int M, int J);

  std::int64_t cells() const noexcept { return std::int64_t{1} << (top_level + resolution); }
  double cell_width() const noexcept;
  double length() const noexcept;
  int min_level() const noexcept { return -top_level; }
  int max_level() const noexcept { return resolution; }
  // Number of dyadic intervals at a level.
  std::int64_t count_at(int level) const noexcept { return std::int64_t{1} << (top_level + level); }

  friend bool operator==(const Domain&, const Domain&) = default;
};

// [k 2^-j, (k+1) 2^-j)
struct DyadicInterval {
  int level = 0;
  std::int64_t index = 0;

  double length() const noexcept;
  double left() const noexcept;
  double right() const noexcept;

  bool valid_in(const Domain& d) const noexcept;
  // Throws DomainError when outside the domain.
  void require_in(const Domain& d) const;

  std::int64_t first_cell(const Domain& d) const noexcept { return index << (d.resolution - level); }
  std::int64_t cell_count(const Domain& d) const noexcept { return std::int64_t{1} << (d.resolution - level); }
  std::int64_t end_cell(const Domain& d) const noexcept { return first_cell(d) + cell_count(d); }

  // Non-strict containment.
  bool contains(const DyadicInterval& other) const noexcept;
  bool strictly_contains(const DyadicInterval& other) const noexcept {
    return other.level > level && contains(other);
  }
  bool contains_cell(const Domain& d, std::int64_t cell) const noexcept {
    return cell >= first_cell(d) && cell < end_cell(d);
  }

  DyadicInterval parent() const noexcept { return {level - 1, index >> 1}; }
  DyadicInterval left_child() const noexcept { return {level + 1, 2 * index}; }
  DyadicInterval right_child() const noexcept { return {level + 1, 2 * index + 1}; }
  DyadicInterval ancestor_at(int lvl) const noexcept { return {lvl, index >> (level - lvl)}; }

  static DyadicInterval cell(const Domain& d, std::int64_t i) noexcept { return {d.resolution, i}; }
  static DyadicInterval whole(const Domain& d) noexcept { return {-d.top_level, 0}; }

  std::string str() const;

  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
  friend auto operator<=>(const DyadicInterval&, const DyadicInterval&) = default;
};

// rho Q: same centre, length rho |Q|, clipped to the domain.
class DilatedInterval {
 public:
  DilatedInterval(const Domain& d, DyadicInterval base, Rational rho);

  const DyadicInterval& base() const noexcept { return base_; }
  const Rational& rho() const noexcept { return rho_; }

  // Fine unit = 1/(2 rho.den) cell.
  std::int64_t units_per_cell() const noexcept { return 2 * rho_.den(); }
  std::int64_t lo_units() const noexcept { return lo_; }
  std::int64_t hi_units() const noexcept { return hi_; }
  bool clipped() const noexcept { return clipped_; }

  double lo_cells() const noexcept;
  double hi_cells() const noexcept;
  // Unclipped length rho |Q|, in domain units.
  double nominal_length() const noexcept;
  double clipped_length(const Domain& d) const noexcept;

  // True when both clipped endpoints fall on cell boundaries.
  bool cell_aligned() const noexcept;

 private:
  DyadicInterval base_;
  Rational rho_;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
  bool clipped_ = false;
};

// All dyadic intervals of the domain in (level, index) order.
std::vector<DyadicInterval> all_dyadic_intervals(const Domain& d);

}  // namespace dyadlab
