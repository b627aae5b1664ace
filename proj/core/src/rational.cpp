#include "wqs/rational.hpp"

#include <charconv>
#include <numeric>
#include <ostream>

namespace wqs {

namespace {

using Wide = __int128;

std::int64_t narrow(Wide v, const char* what) {
  if (v > Wide(INT64_MAX) || v < Wide(INT64_MIN)) {
    throw RationalOverflow(std::string("rational overflow in ") + what);
  }
  return static_cast<std::int64_t>(v);
}

Wide wide_gcd(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) {
    throw std::invalid_argument("rational with zero denominator");
  }
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

// Reduce in wide precision before narrowing back to 64 bits.
Rational& Rational::operator+=(const Rational& other) {
  Wide nn = Wide(num_) * other.den_ + Wide(other.num_) * den_;
  Wide dd = Wide(den_) * other.den_;
  const Wide g = wide_gcd(nn, dd);
  if (g != 0) {
    nn /= g;
    dd /= g;
  } else {
    dd = 1;
  }
  num_ = narrow(nn, "add");
  den_ = narrow(dd, "add");
  return *this;
}

Rational& Rational::operator-=(const Rational& other) {
  return *this += -other;
}

Rational& Rational::operator*=(const Rational& other) {
  Wide nn = Wide(num_) * other.num_;
  Wide dd = Wide(den_) * other.den_;
  const Wide g = wide_gcd(nn, dd);
  if (g != 0) {
    nn /= g;
    dd /= g;
  } else {
    dd = 1;
  }
  num_ = narrow(nn, "mul");
  den_ = narrow(dd, "mul");
  return *this;
}

Rational& Rational::operator/=(const Rational& other) {
  if (other.num_ == 0) {
    throw std::invalid_argument("rational division by zero");
  }
  Rational inv;
  inv.num_ = other.den_;
  inv.den_ = other.num_;
  if (inv.den_ < 0) {
    inv.num_ = -inv.num_;
    inv.den_ = -inv.den_;
  }
  return *this *= inv;
}

Rational Rational::parse(const std::string& text) {
  const auto slash = text.find('/');
  auto parse_int = [&](std::size_t begin, std::size_t end) {
    std::int64_t out = 0;
    const char* first = text.data() + begin;
    const char* last = text.data() + end;
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) {
      throw std::invalid_argument("bad rational literal: " + text);
    }
    return out;
  };
  if (slash == std::string::npos) {
    return Rational(parse_int(0, text.size()));
  }
  const std::int64_t num = parse_int(0, slash);
  const std::int64_t den = parse_int(slash + 1, text.size());
  if (den <= 0) {
    throw std::invalid_argument("rational denominator must be positive: " +
                                text);
  }
  return Rational(num, den);
}

std::string Rational::to_string() const {
  if (den_ == 1) {
    return std::to_string(num_);
  }
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
  return os << r.to_string();
}

}  // namespace wqs
