#include "dyadlab/rational.hpp"

#include <charconv>
#include <numeric>

#include "dyadlab/error.hpp"

namespace dyadlab {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw PreconditionError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

namespace {

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw FormatError("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string digits(text.substr(0, dot));
    std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 15) throw FormatError("too many decimal places: '" + std::string(text) + "'");
    digits += frac;
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    return Rational(parse_int(digits), den);
  }
  return Rational(parse_int(text));
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

}  // namespace dyadlab
