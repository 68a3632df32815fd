#include "dyadlab/testing_sequence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "dyadlab/error.hpp"

namespace dyadlab {

double zeta_series(double s, double rel_tol) {
  if (!(s > 1.0)) throw PreconditionError("zeta series diverges for s <= 1");
  // Tail from N on: N^{1-s}/(s-1) + N^{-s}/2 + s N^{-s-1}/12 - s(s+1)(s+2) N^{-s-3}/720,
  // remainder of order N^{-s-5}.
  const int n = rel_tol < 1e-6 ? 1000 : 100;
  double head = 0.0;
  for (int m = n - 1; m >= 1; --m) head += std::pow(static_cast<double>(m), -s);
  const double N = n;
  const double tail = std::pow(N, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(N, -s) + s * std::pow(N, -s - 1.0) / 12.0 -
                      s * (s + 1.0) * (s + 2.0) * std::pow(N, -s - 3.0) / 720.0;
  return head + tail;
}

double testing_constant(double alpha) {
  if (!(alpha > 0.5)) throw PreconditionError("testing sequence needs alpha > 1/2");
  return 1.0 / std::sqrt(zeta_series(2.0 * alpha));
}

int band_of_cell(const Domain& d, std::int64_t cell) {
  const std::int64_t unit = std::int64_t{1} << d.resolution;
  if (cell < 0 || cell >= unit) return 0;
  if (cell == 0) return d.resolution + 1;
  return d.resolution - (std::bit_width(static_cast<std::uint64_t>(cell)) - 1);
}

TestingSequence build_testing_sequence(double alpha, int count, const Domain& d) {
  if (!(alpha > 0.5)) throw PreconditionError("testing sequence needs alpha > 1/2 (the normalizing series diverges)");
  if (!(alpha < 1.0)) throw PreconditionError("testing sequence needs alpha < 1");
  if (count < 1 || count > d.resolution) throw PreconditionError("testing sequence needs 1 <= K <= J");
  TestingSequence out;
  out.alpha = alpha;
  out.count = count;
  out.c_alpha = testing_constant(alpha);
  std::vector<double> sq(static_cast<std::size_t>(d.cells()), 0.0);
  for (int k = 1; k <= count; ++k) {
    GridFunction a = GridFunction::from_cells(d, [&](std::int64_t c) {
      const int j = band_of_cell(d, c);
      return j >= k + 1 ? out.c_alpha * std::pow(static_cast<double>(j - k), -alpha) : 0.0;
    });
    for (std::size_t c = 0; c < sq.size(); ++c) sq[c] += a[static_cast<std::int64_t>(c)] * a[static_cast<std::int64_t>(c)];
    out.entries.push_back(std::move(a));
  }
  out.max_square_sum = 0.0;
  for (double v : sq) out.max_square_sum = std::max(out.max_square_sum, v);
  out.normalized = out.max_square_sum <= 1.0;
  return out;
}

}  // namespace dyadlab
