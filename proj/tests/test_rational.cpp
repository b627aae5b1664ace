#include <doctest.h>

#include "wqs/rational.hpp"

using wqs::Rational;

TEST_CASE("rationals normalize on construction") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-2, 4) == Rational(-1, 2));
  CHECK(Rational(2, -4) == Rational(-1, 2));
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(6, 3).num() == 2);
  CHECK(Rational(6, 3).den() == 1);
}

TEST_CASE("arithmetic is exact") {
  const Rational third(1, 3);
  CHECK(third + third + third == Rational(1));
  CHECK(Rational(1, 10) + Rational(2, 10) == Rational(3, 10));
  CHECK(Rational(1) - Rational(1, 4) - Rational(1, 4) == Rational(1, 2));
  CHECK(Rational(3, 4) * Rational(2, 3) == Rational(1, 2));
  CHECK(Rational(7, 2) / Rational(7) == Rational(1, 2));
  CHECK(-Rational(1, 2) == Rational(-1, 2));
}

TEST_CASE("comparisons use cross-multiplication, not floats") {
  CHECK(Rational(1, 3) < Rational(34, 100));
  CHECK(Rational(2, 3) > Rational(66, 100));
  CHECK(Rational(7, 10) <= Rational(7, 10));
  CHECK_FALSE(Rational(7, 10) < Rational(7, 10));
  // 0.7 boundary of the n=7, f=2 weight floor
  CHECK(Rational(7, 10) < Rational(7, 10) + Rational(1, 1000000));
}

TEST_CASE("parse and print round-trip") {
  CHECK(Rational::parse("3/2") == Rational(3, 2));
  CHECK(Rational::parse("-1/2") == Rational(-1, 2));
  CHECK(Rational::parse("5") == Rational(5));
  CHECK(Rational(3, 2).to_string() == "3/2");
  CHECK(Rational(4).to_string() == "4");
  CHECK(Rational(-1, 2).to_string() == "-1/2");
  CHECK_THROWS(Rational::parse("1/0"));
  CHECK_THROWS(Rational::parse("a/b"));
  CHECK_THROWS(Rational::parse("1/ 2"));
}

TEST_CASE("error cases") {
  CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::invalid_argument);
  const Rational big(INT64_MAX, 1);
  CHECK_THROWS_AS(big * big, wqs::RationalOverflow);
}

TEST_CASE("gcd keeps long sums small") {
  Rational sum;
  for (int i = 0; i < 1000; ++i) {
    sum += Rational(1, 20);
  }
  CHECK(sum == Rational(50));
  CHECK(sum.den() == 1);
}
