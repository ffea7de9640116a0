#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace chronoform {

/// Exact beat arithmetic. Onsets, durations and derived ratios never touch
/// floating point until a value is reported.
using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

namespace detail {

inline std::optional<std::int64_t> parse_digits(std::string_view s) {
  if (s.empty() || s.size() > 15) return std::nullopt;
  std::int64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace detail

/// Parses "n", "-n" or "p/q" (q > 0). Returns nullopt on anything else.
inline std::optional<Rational> parse_rational(std::string_view s) {
  bool negative = false;
  if (!s.empty() && s.front() == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  const auto slash = s.find('/');
  auto num = detail::parse_digits(s.substr(0, slash));
  if (!num) return std::nullopt;
  std::int64_t den = 1;
  if (slash != std::string_view::npos) {
    auto d = detail::parse_digits(s.substr(slash + 1));
    if (!d || *d == 0) return std::nullopt;
    den = *d;
  }
  return Rational(negative ? -*num : *num, den);
}

}  // namespace chronoform
