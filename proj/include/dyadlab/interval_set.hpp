#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace dyadlab {

// Finite union of half-open integer intervals [lo, hi), kept sorted and
// disjoint. Units are whatever the caller chooses (cells, fine units).
class IntervalSet {
 public:
  using Piece = std::pair<std::int64_t, std::int64_t>;

  IntervalSet() = default;
  static IntervalSet from_pieces(std::vector<Piece> pieces);

  void add(std::int64_t lo, std::int64_t hi);
  IntervalSet united(const IntervalSet& o) const;
  IntervalSet minus(const IntervalSet& o) const;
  IntervalSet intersected(const IntervalSet& o) const;

  std::int64_t measure() const noexcept;
  bool empty() const noexcept { return pieces_.empty(); }
  bool intersects(const IntervalSet& o) const { return !intersected(o).empty(); }
  const std::vector<Piece>& pieces() const noexcept { return pieces_; }

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  void normalize();
  std::vector<Piece> pieces_;
};

}  // namespace dyadlab
