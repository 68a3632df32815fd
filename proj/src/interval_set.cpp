#include "dyadlab/interval_set.hpp"

#include <algorithm>

namespace dyadlab {

IntervalSet IntervalSet::from_pieces(std::vector<Piece> pieces) {
  IntervalSet s;
  s.pieces_ = std::move(pieces);
  s.normalize();
  return s;
}

void IntervalSet::normalize() {
  std::erase_if(pieces_, [](const Piece& p) { return p.second <= p.first; });
  std::sort(pieces_.begin(), pieces_.end());
  std::vector<Piece> merged;
  merged.reserve(pieces_.size());
  for (const auto& p : pieces_) {
    if (!merged.empty() && p.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, p.second);
    } else {
      merged.push_back(p);
    }
  }
  pieces_ = std::move(merged);
}

void IntervalSet::add(std::int64_t lo, std::int64_t hi) {
  pieces_.emplace_back(lo, hi);
  normalize();
}

IntervalSet IntervalSet::united(const IntervalSet& o) const {
  std::vector<Piece> all = pieces_;
  all.insert(all.end(), o.pieces_.begin(), o.pieces_.end());
  return from_pieces(std::move(all));
}

IntervalSet IntervalSet::intersected(const IntervalSet& o) const {
  std::vector<Piece> out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < pieces_.size() && j < o.pieces_.size()) {
    const auto lo = std::max(pieces_[i].first, o.pieces_[j].first);
    const auto hi = std::min(pieces_[i].second, o.pieces_[j].second);
    if (lo < hi) out.emplace_back(lo, hi);
    if (pieces_[i].second < o.pieces_[j].second) {
      ++i;
    } else {
      ++j;
    }
  }
  IntervalSet s;
  s.pieces_ = std::move(out);
  return s;
}

IntervalSet IntervalSet::minus(const IntervalSet& o) const {
  std::vector<Piece> out;
  std::size_t j = 0;
  for (auto [lo, hi] : pieces_) {
    while (j < o.pieces_.size() && o.pieces_[j].second <= lo) ++j;
    std::size_t k = j;
    std::int64_t cur = lo;
    while (k < o.pieces_.size() && o.pieces_[k].first < hi) {
      if (o.pieces_[k].first > cur) out.emplace_back(cur, o.pieces_[k].first);
      cur = std::max(cur, o.pieces_[k].second);
      ++k;
    }
    if (cur < hi) out.emplace_back(cur, hi);
  }
  IntervalSet s;
  s.pieces_ = std::move(out);
  return s;
}

std::int64_t IntervalSet::measure() const noexcept {
  std::int64_t m = 0;
  for (const auto& [lo, hi] : pieces_) m += hi - lo;
  return m;
}

}  // namespace dyadlab
