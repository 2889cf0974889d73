#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hspace {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt big_pow(std::uint64_t base, std::uint64_t exponent) {
  return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(exponent));
}

inline BigInt factorial(std::uint64_t n) {
  BigInt r = 1;
  for (std::uint64_t k = 2; k <= n; ++k) r *= k;
  return r;
}

/// Parses "p", "-p", "p/q" (q > 0) into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  auto parse_int = [](std::string_view s) -> BigInt {
    std::size_t i = 0;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) throw std::invalid_argument("malformed rational '" + std::string(s) + "'");
    for (std::size_t k = i; k < s.size(); ++k)
      if (s[k] < '0' || s[k] > '9') throw std::invalid_argument("malformed rational '" + std::string(s) + "'");
    return BigInt(std::string(s[0] == '+' ? s.substr(1) : s));
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  const BigInt num = parse_int(trim(text.substr(0, slash)));
  const BigInt den = parse_int(trim(text.substr(slash + 1)));
  if (den <= 0) throw std::invalid_argument("rational denominator must be positive");
  return Rational(num, den);
}

inline std::string to_string(const BigInt& v) { return v.str(); }

/// "p" for integers, "p/q" otherwise.
inline std::string to_string(const Rational& v) {
  const BigInt num = boost::multiprecision::numerator(v);
  const BigInt den = boost::multiprecision::denominator(v);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace hspace
