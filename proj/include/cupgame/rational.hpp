#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace cupgame {

// Exact rational number, always stored in lowest terms with a positive
// denominator.
//
// Values that fit in a pair of int64 are kept inline; anything larger lives
// in a heap-allocated GMP rational. The representation is canonical: a value
// is stored big iff it does not fit the small form, so equality and hashing
// can look at the representation directly.
class Rational {
 public:
  struct Big;  // wraps mpq_class, defined in rational.cpp

  Rational() noexcept : num_(0), den_(1) {}
  Rational(std::int64_t value) : num_(value), den_(1) {  // NOLINT: implicit by intent
    // INT64_MIN has no inline negation, so it lives in the big form.
    if (value == std::numeric_limits<std::int64_t>::min()) assign_i128(value, 1);
  }
  Rational(std::int64_t num, std::int64_t den);

  Rational(const Rational& other) : den_(other.den_) {
    if (other.den_ == 0) {
      big_ = clone_big(other.big_);
    } else {
      num_ = other.num_;
    }
  }
  Rational(Rational&& other) noexcept : den_(other.den_) {
    if (other.den_ == 0) {
      big_ = other.big_;
      other.den_ = 1;
      other.num_ = 0;
    } else {
      num_ = other.num_;
    }
  }
  Rational& operator=(const Rational& other) {
    if (this != &other) {
      Rational tmp(other);
      swap(tmp);
    }
    return *this;
  }
  Rational& operator=(Rational&& other) noexcept {
    swap(other);
    return *this;
  }
  ~Rational() {
    if (den_ == 0) destroy_big(big_);
  }

  void swap(Rational& other) noexcept {
    std::swap(raw_, other.raw_);
    std::swap(den_, other.den_);
  }

  // Accepts "p", "p/q" and finite decimals such as "-0.0125".
  static Rational parse(std::string_view text);

  bool is_small() const noexcept { return den_ != 0; }
  // Only meaningful when is_small().
  std::int64_t small_num() const noexcept { return num_; }
  std::int64_t small_den() const noexcept { return den_; }
  bool is_zero() const noexcept { return den_ == 1 && num_ == 0; }
  bool is_integer() const;
  int sign() const;

  // "p/q" in lowest terms; integers are written with denominator 1.
  std::string str() const;
  // Decimal rendering rounded to `digits` fractional digits, for humans only.
  std::string decimal(int digits = 6) const;
  std::string numerator_str() const;
  std::string denominator_str() const;

  double to_double() const;
  // Throws std::overflow_error when the value is not an int64 integer.
  std::int64_t to_int64() const;

  Rational floor() const;
  Rational ceil() const;
  Rational abs() const { return sign() < 0 ? -*this : *this; }
  Rational reciprocal() const;

  Rational operator-() const;
  Rational& operator+=(const Rational& rhs);
  Rational& operator-=(const Rational& rhs);
  Rational& operator*=(const Rational& rhs);
  Rational& operator/=(const Rational& rhs);

  friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
  friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
  friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
  friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }

  friend bool operator==(const Rational& a, const Rational& b) {
    if (a.den_ != 0 && b.den_ != 0) return a.num_ == b.num_ && a.den_ == b.den_;
    // Canonical form: a small value never equals a big one.
    if ((a.den_ == 0) != (b.den_ == 0)) return false;
    return equal_slow(a, b);
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) { return compare(a, b) < 0; }
  friend bool operator>(const Rational& a, const Rational& b) { return compare(a, b) > 0; }
  friend bool operator<=(const Rational& a, const Rational& b) { return compare(a, b) <= 0; }
  friend bool operator>=(const Rational& a, const Rational& b) { return compare(a, b) >= 0; }

  static int compare(const Rational& a, const Rational& b) {
    if (a.den_ != 0 && b.den_ != 0) {
      if (a.den_ == b.den_) return a.num_ < b.num_ ? -1 : (a.num_ > b.num_ ? 1 : 0);
      const __int128 l = static_cast<__int128>(a.num_) * b.den_;
      const __int128 r = static_cast<__int128>(b.num_) * a.den_;
      return l < r ? -1 : (l > r ? 1 : 0);
    }
    return compare_slow(a, b);
  }

  const Big& big() const { return *big_; }
  static Rational from_big(Big&& value);

 private:
  static Big* clone_big(const Big* b);
  static void destroy_big(Big* b) noexcept;
  static int compare_slow(const Rational& a, const Rational& b);
  static bool equal_slow(const Rational& a, const Rational& b);
  void add_slow(const Rational& rhs, bool subtract);
  void mul_slow(const Rational& rhs);
  // Stores num/den (den != 0, any sign, not necessarily reduced).
  void assign_i128(__int128 num, __int128 den);

  union {
    std::int64_t num_;
    Big* big_;
    std::int64_t raw_;
  };
  std::int64_t den_;  // 0 marks the big representation
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

inline void swap(Rational& a, Rational& b) noexcept { a.swap(b); }

Rational pow(const Rational& base, unsigned exponent);

inline const Rational& max_of(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace cupgame
