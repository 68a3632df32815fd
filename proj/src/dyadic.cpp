#include "dyadlab/dyadic.hpp"

#include <cmath>

#include "dyadlab/error.hpp"

namespace dyadlab {

Domain::Domain(int M, int J) : top_level(M), resolution(J) {
  if (M < 0 || J < 0 || M + J > 30) {
    throw PreconditionError("domain levels out of range: M=" + std::to_string(M) + " J=" + std::to_string(J));
  }
}

double Domain::cell_width() const noexcept { return std::ldexp(1.0, -resolution); }
double Domain::length() const noexcept { return std::ldexp(1.0, top_level); }

double DyadicInterval::length() const noexcept { return std::ldexp(1.0, -level); }
double DyadicInterval::left() const noexcept { return std::ldexp(static_cast<double>(index), -level); }
double DyadicInterval::right() const noexcept { return std::ldexp(static_cast<double>(index + 1), -level); }

bool DyadicInterval::valid_in(const Domain& d) const noexcept {
  return level >= d.min_level() && level <= d.max_level() && index >= 0 && index < d.count_at(level);
}

void DyadicInterval::require_in(const Domain& d) const {
  if (!valid_in(d)) {
    throw DomainError("interval " + str() + " outside domain M=" + std::to_string(d.top_level) +
                      " J=" + std::to_string(d.resolution));
  }
}

bool DyadicInterval::contains(const DyadicInterval& other) const noexcept {
  if (other.level < level) return false;
  return (other.index >> (other.level - level)) == index;
}

std::string DyadicInterval::str() const {
  return "(" + std::to_string(level) + "," + std::to_string(index) + ")";
}

DilatedInterval::DilatedInterval(const Domain& d, DyadicInterval base, Rational rho) : base_(base), rho_(rho) {
  base.require_in(d);
  if (rho < Rational(1)) throw PreconditionError("dilation factor must be >= 1, got " + rho.str());
  const std::int64_t s = base.cell_count(d);
  const std::int64_t a = rho.num();
  const std::int64_t b = rho.den();
  // endpoints (k + 1/2 -+ rho/2) s cells = s (2kb + b -+ a) / (2b)
  const std::int64_t centre = 2 * base.index * b + b;
  lo_ = s * (centre - a);
  hi_ = s * (centre + a);
  const std::int64_t top = d.cells() * 2 * b;
  if (lo_ < 0) {
    lo_ = 0;
    clipped_ = true;
  }
  if (hi_ > top) {
    hi_ = top;
    clipped_ = true;
  }
}

double DilatedInterval::lo_cells() const noexcept {
  return static_cast<double>(lo_) / static_cast<double>(units_per_cell());
}
double DilatedInterval::hi_cells() const noexcept {
  return static_cast<double>(hi_) / static_cast<double>(units_per_cell());
}

double DilatedInterval::nominal_length() const noexcept { return rho_.to_double() * base_.length(); }

double DilatedInterval::clipped_length(const Domain& d) const noexcept {
  return (hi_cells() - lo_cells()) * d.cell_width();
}

bool DilatedInterval::cell_aligned() const noexcept {
  return lo_ % units_per_cell() == 0 && hi_ % units_per_cell() == 0;
}

std::vector<DyadicInterval> all_dyadic_intervals(const Domain& d) {
  std::vector<DyadicInterval> out;
  out.reserve(static_cast<std::size_t>(2 * d.cells()));
  for (int j = d.min_level(); j <= d.max_level(); ++j) {
    for (std::int64_t k = 0; k < d.count_at(j); ++k) out.push_back({j, k});
  }
  return out;
}

}  // namespace dyadlab
