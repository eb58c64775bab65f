#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ebb/rational.hpp"

using namespace ebb;

TEST_CASE("parsing accepts integers and fractions") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("-1/2") == Rational(-1, 2));
  CHECK(parse_rational("7") == Rational(7));
  CHECK(parse_rational(" -7 ") == Rational(-7));
  CHECK(parse_rational("+5/10") == Rational(1, 2));
  CHECK(parse_rational("2/-4") == Rational(-1, 2));
}

TEST_CASE("parsing rejects decimals and garbage") {
  CHECK_THROWS_AS(parse_rational("0.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1/2/3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1e3"), std::invalid_argument);
}

TEST_CASE("formatting is canonical") {
  CHECK(format_rational(Rational(3, 4)) == "3/4");
  CHECK(format_rational(Rational(-3, 4)) == "-3/4");
  CHECK(format_rational(Rational(8, 4)) == "2");
  CHECK(format_rational(Rational(0)) == "0");
  CHECK(format_rational(parse_rational("5/-10")) == "-1/2");
}

TEST_CASE("format and parse round-trip on a hash-driven sample") {
  uint64_t h = 88172645463325252ULL;
  for (int i = 0; i < 500; ++i) {
    h ^= h << 13;
    h ^= h >> 7;
    h ^= h << 17;
    const int64_t num = static_cast<int64_t>(h % 20001) - 10000;
    const int64_t den = 1 + static_cast<int64_t>((h >> 32) % 999);
    const Rational r(num, den);
    CHECK(parse_rational(format_rational(r)) == r);
  }
}

TEST_CASE("exactness survives long products") {
  Rational r(1);
  for (int i = 0; i < 64; ++i) r *= Rational(11, 10);
  for (int i = 0; i < 64; ++i) r *= Rational(10, 11);
  CHECK(r == 1);
}

TEST_CASE("to_double stays close for representable values") {
  CHECK(to_double(Rational(1, 2)) == 0.5);
  CHECK(to_double(Rational(-3, 4)) == -0.75);
  CHECK(to_double(Rational(1, 3)) == doctest::Approx(1.0 / 3.0));
}
