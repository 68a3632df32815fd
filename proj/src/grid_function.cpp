#include "dyadlab/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dyadlab/error.hpp"
#include "dyadlab/simd/kernels.hpp"

namespace dyadlab {

GridFunction::GridFunction(const Domain& d, double fill)
    : domain_(d), values_(static_cast<std::size_t>(d.cells()), fill) {}

GridFunction::GridFunction(const Domain& d, std::vector<double> values) : domain_(d), values_(std::move(values)) {
  if (static_cast<std::int64_t>(values_.size()) != d.cells()) {
    throw PreconditionError("grid function needs " + std::to_string(d.cells()) + " cells, got " +
                            std::to_string(values_.size()));
  }
}

GridFunction GridFunction::indicator(const Domain& d, const DyadicInterval& q) {
  q.require_in(d);
  GridFunction g(d);
  std::fill(g.values_.begin() + q.first_cell(d), g.values_.begin() + q.end_cell(d), 1.0);
  return g;
}

GridFunction GridFunction::indicator(const Domain& d, double a, double b) {
  const double ca = a / d.cell_width();
  const double cb = b / d.cell_width();
  if (ca != std::floor(ca) || cb != std::floor(cb)) throw PreconditionError("indicator endpoints not on cells");
  const auto lo = std::clamp<std::int64_t>(static_cast<std::int64_t>(ca), 0, d.cells());
  const auto hi = std::clamp<std::int64_t>(static_cast<std::int64_t>(cb), 0, d.cells());
  GridFunction g(d);
  for (std::int64_t i = lo; i < hi; ++i) g.values_[static_cast<std::size_t>(i)] = 1.0;
  return g;
}

GridFunction GridFunction::from_cells(const Domain& d, const std::function<double(std::int64_t)>& cell_value) {
  GridFunction g(d);
  for (std::int64_t i = 0; i < d.cells(); ++i) g.values_[static_cast<std::size_t>(i)] = cell_value(i);
  return g;
}

double GridFunction::integral() const { return simd::sum(values_) * domain_.cell_width(); }

double GridFunction::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

bool GridFunction::nonnegative() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
}

bool GridFunction::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

void GridFunction::require_same_domain(const GridFunction& o) const {
  if (!(domain_ == o.domain_)) throw PreconditionError("grid functions live on different domains");
}

GridFunction GridFunction::operator+(const GridFunction& o) const {
  require_same_domain(o);
  GridFunction g(domain_);
  for (std::size_t i = 0; i < values_.size(); ++i) g.values_[i] = values_[i] + o.values_[i];
  return g;
}

GridFunction GridFunction::operator*(const GridFunction& o) const {
  require_same_domain(o);
  GridFunction g(domain_);
  simd::multiply(values_, o.values_, g.values_);
  return g;
}

GridFunction GridFunction::scaled(double c) const {
  GridFunction g = *this;
  simd::scale(g.values_, c);
  return g;
}

GridFunction GridFunction::abs() const {
  GridFunction g = *this;
  for (double& v : g.values_) v = std::fabs(v);
  return g;
}

GridFunction GridFunction::pointwise_max(const GridFunction& o) const {
  require_same_domain(o);
  GridFunction g(domain_);
  for (std::size_t i = 0; i < values_.size(); ++i) g.values_[i] = std::max(values_[i], o.values_[i]);
  return g;
}

GridFunction GridFunction::sqrt() const {
  GridFunction g = *this;
  simd::sqrt_inplace(g.values_);
  return g;
}

GridFunction GridFunction::squared() const {
  GridFunction g(domain_);
  simd::multiply(values_, values_, g.values_);
  return g;
}

void GridFunction::write_csv(std::ostream& os) const {
  os << "x,value\n";
  os.precision(17);
  for (std::int64_t i = 0; i < size(); ++i) os << cell_midpoint(i) << ',' << values_[static_cast<std::size_t>(i)] << '\n';
}

GridFunction GridFunction::read_csv(std::istream& is) {
  std::string line;
  std::vector<double> xs;
  std::vector<double> vs;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError("expected 'x,value' row: " + line);
    const std::string xs_text = line.substr(0, comma);
    if (xs_text == "x") continue;
    try {
      xs.push_back(std::stod(xs_text));
      vs.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw FormatError("unparsable row: " + line);
    }
  }
  if (xs.empty()) throw FormatError("empty grid function csv");
  const double h = 2.0 * xs.front();
  int e = 0;
  const double mant = std::frexp(h, &e);
  if (mant != 0.5) throw FormatError("first midpoint is not half a dyadic cell width");
  const int J = 1 - e;
  const auto n = static_cast<std::int64_t>(xs.size());
  if ((n & (n - 1)) != 0) throw FormatError("row count is not a power of two");
  int total = 0;
  while ((std::int64_t{1} << total) < n) ++total;
  if (J < 0 || total - J < 0) throw FormatError("csv does not describe a domain [0, 2^M) with M >= 0");
  return GridFunction(Domain(total - J, J), std::move(vs));
}

IntegralTable::IntegralTable(const GridFunction& f) : domain_(f.domain()) {
  const int levels = domain_.top_level + domain_.resolution;
  cell_values_.assign(f.values().begin(), f.values().end());
  blocks_.resize(static_cast<std::size_t>(levels + 1));
  blocks_[0] = cell_values_;
  simd::scale(blocks_[0], domain_.cell_width());
  for (int L = 1; L <= levels; ++L) {
    blocks_[L].resize(blocks_[L - 1].size() / 2);
    simd::pair_sums(blocks_[L - 1], blocks_[L]);
  }
}

std::span<const double> IntegralTable::level(int j) const {
  const int L = domain_.resolution - j;
  if (L < 0 || L >= static_cast<int>(blocks_.size())) throw DomainError("level outside domain");
  return blocks_[static_cast<std::size_t>(L)];
}

double IntegralTable::integral(const DyadicInterval& q) const {
  q.require_in(domain_);
  return blocks_[static_cast<std::size_t>(domain_.resolution - q.level)][static_cast<std::size_t>(q.index)];
}

double IntegralTable::integral_cells(std::int64_t a, std::int64_t b) const {
  a = std::max<std::int64_t>(a, 0);
  b = std::min<std::int64_t>(b, domain_.cells());
  double s = 0.0;
  const int top = static_cast<int>(blocks_.size()) - 1;
  while (a < b) {
    int L = 0;
    while (L < top && (a & ((std::int64_t{2} << L) - 1)) == 0 && a + (std::int64_t{2} << L) <= b) ++L;
    s += blocks_[static_cast<std::size_t>(L)][static_cast<std::size_t>(a >> L)];
    a += std::int64_t{1} << L;
  }
  return s;
}

double IntegralTable::integral_units(std::int64_t lo, std::int64_t hi, std::int64_t units_per_cell) const {
  if (hi <= lo) return 0.0;
  const std::int64_t first_full = (lo + units_per_cell - 1) / units_per_cell;
  const std::int64_t last_full = hi / units_per_cell;
  const double h = domain_.cell_width();
  if (first_full > last_full) {
    // both ends inside one cell
    const std::int64_t c = lo / units_per_cell;
    return cell_values_[static_cast<std::size_t>(c)] * h * static_cast<double>(hi - lo) / static_cast<double>(units_per_cell);
  }
  double s = integral_cells(first_full, last_full);
  if (const std::int64_t head = first_full * units_per_cell - lo; head > 0) {
    s += cell_values_[static_cast<std::size_t>(first_full - 1)] * h * static_cast<double>(head) / static_cast<double>(units_per_cell);
  }
  if (const std::int64_t tail = hi - last_full * units_per_cell; tail > 0) {
    s += cell_values_[static_cast<std::size_t>(last_full)] * h * static_cast<double>(tail) / static_cast<double>(units_per_cell);
  }
  return s;
}

}  // namespace dyadlab
