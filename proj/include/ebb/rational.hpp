#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace ebb {

// All exact quantities in the library are arbitrary-precision rationals.
// Enumeration, expectation and certificate checks are equality tests on
// these values; nothing in the exact lane ever rounds.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Renders "p" when the denominator is 1, "p/q" otherwise.
inline std::string format_rational(const Rational& r) {
  const BigInt num = numerator(r);
  const BigInt den = denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

// Parses "p", "-p", "p/q". Decimal notation is rejected on purpose: callers
// that need exactness must say exactly what they mean.
inline Rational parse_rational(std::string_view text) {
  size_t begin = text.find_first_not_of(" \t");
  size_t end = text.find_last_not_of(" \t");
  if (begin == std::string_view::npos)
    throw std::invalid_argument("parse_rational: empty input");
  text = text.substr(begin, end - begin + 1);
  if (text.find('.') != std::string_view::npos)
    throw std::invalid_argument("parse_rational: decimal notation rejected, use p/q: '" +
                                std::string(text) + "'");

  const size_t slash = text.find('/');
  const std::string num_part(text.substr(0, slash));
  std::string den_part = slash == std::string_view::npos ? "1" : std::string(text.substr(slash + 1));

  auto parse_int = [&text](std::string s) {
    bool negative = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
      negative = s[0] == '-';
      s.erase(0, 1);
    }
    if (s.empty())
      throw std::invalid_argument("parse_rational: malformed rational '" + std::string(text) +
                                  "'");
    for (char c : s)
      if (c < '0' || c > '9')
        throw std::invalid_argument("parse_rational: malformed rational '" + std::string(text) +
                                    "'");
    BigInt v(s);
    return negative ? BigInt(-v) : v;
  };

  BigInt num = parse_int(num_part);
  BigInt den = parse_int(den_part);
  if (den == 0) throw std::invalid_argument("parse_rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Rational(num, den);
}

inline Rational rational_abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

}  // namespace ebb
