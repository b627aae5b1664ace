#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace wqs {

// Exact rational arithmetic for server weights and thresholds.
//
// Every weight comparison in the protocol is a strict inequality against
// quantities like W/2 or W/(2(n-f)); doing this in floating point would make
// boundary cases (a transfer that lands a server exactly on the threshold)
// depend on rounding.  Values are kept normalized (gcd 1, positive
// denominator) and all intermediate products go through 128-bit integers;
// anything that would not fit back into 64 bits throws.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT: implicit
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }
  bool is_positive() const { return num_ > 0; }

  Rational operator-() const;
  Rational& operator+=(const Rational& other);
  Rational& operator-=(const Rational& other);
  Rational& operator*=(const Rational& other);
  Rational& operator/=(const Rational& other);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs) {
      return std::strong_ordering::less;
    }
    if (lhs > rhs) {
      return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
  }

  // "3", "-1/2".  Whitespace is not accepted; denominator must be positive.
  static Rational parse(const std::string& text);
  std::string to_string() const;

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

 private:
  std::int64_t num_;
  std::int64_t den_;
};

struct RationalOverflow : std::overflow_error {
  using std::overflow_error::overflow_error;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace wqs

template <>
struct std::hash<wqs::Rational> {
  std::size_t operator()(const wqs::Rational& r) const noexcept {
    std::size_t h = std::hash<std::int64_t>{}(r.num());
    return h ^ (std::hash<std::int64_t>{}(r.den()) + 0x9e3779b97f4a7c15ULL +
                (h << 6) + (h >> 2));
  }
};
