#include "cupgame/rational.hpp"

#include <cctype>
#include <limits>
#include <ostream>

#include "cupgame/rational_gmp.hpp"

namespace cupgame {

namespace {

constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

inline std::uint64_t gcd64(std::uint64_t a, std::uint64_t b) {
  if (a == 0) return b;
  if (b == 0) return a;
  const int shift = __builtin_ctzll(a | b);
  a >>= __builtin_ctzll(a);
  do {
    b >>= __builtin_ctzll(b);
    if (a > b) std::swap(a, b);
    b -= a;
  } while (b != 0);
  return a << shift;
}

using u128 = unsigned __int128;

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    if ((a >> 64) == 0 && (b >> 64) == 0) {
      return gcd64(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
    }
    const u128 r = a % b;
    a = b;
    b = r;
  }
  return a;
}

inline u128 uabs(__int128 v) { return v < 0 ? static_cast<u128>(-v) : static_cast<u128>(v); }
inline std::uint64_t uabs64(std::int64_t v) {
  return v < 0 ? static_cast<std::uint64_t>(-v) : static_cast<std::uint64_t>(v);
}

inline bool fits(__int128 v) { return v >= -kMax && v <= kMax; }

mpz_class mpz_from_i128(__int128 v) {
  const bool neg = v < 0;
  const u128 u = uabs(v);
  mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64)));
  mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(u)));
  mpz_class out = (hi << 64) + lo;
  if (neg) out = -out;
  return out;
}

bool mpz_fits_small(const mpz_class& z) {
  return mpz_fits_slong_p(z.get_mpz_t()) != 0 && z.get_si() != std::numeric_limits<long>::min();
}

mpz_class parse_integer(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty integer");
  std::size_t i = 0;
  if (text[0] == '-' || text[0] == '+') i = 1;
  if (i == text.size()) throw std::invalid_argument("bad integer: " + std::string(text));
  for (std::size_t j = i; j < text.size(); ++j) {
    if (!std::isdigit(static_cast<unsigned char>(text[j]))) {
      throw std::invalid_argument("bad integer: " + std::string(text));
    }
  }
  mpz_class z(std::string(text.substr(i)), 10);
  if (text[0] == '-') z = -z;
  return z;
}

}  // namespace

mpq_class to_mpq(const Rational& r) {
  if (!r.is_small()) return r.big().q;
  mpq_class out;
  mpq_set_si(out.get_mpq_t(), r.small_num(), static_cast<unsigned long>(r.small_den()));
  return out;
}

Rational from_mpq(mpq_class q) {
  Rational::Big big{std::move(q)};
  return Rational::from_big(std::move(big));
}

Rational::Rational(std::int64_t num, std::int64_t den) : num_(0), den_(1) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  assign_i128(num, den);
}

Rational Rational::from_big(Big&& value) {
  Rational out;
  const mpz_class& n = value.q.get_num();
  const mpz_class& d = value.q.get_den();
  if (mpz_fits_small(n) && mpz_fits_small(d)) {
    out.num_ = n.get_si();
    out.den_ = d.get_si();
    return out;
  }
  out.big_ = new Big(std::move(value));
  out.den_ = 0;
  return out;
}

Rational::Big* Rational::clone_big(const Big* b) { return new Big(*b); }

void Rational::destroy_big(Big* b) noexcept { delete b; }

void Rational::assign_i128(__int128 num, __int128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const u128 g = gcd128(uabs(num), static_cast<u128>(den));
  if (g > 1) {
    num /= static_cast<__int128>(g);
    den /= static_cast<__int128>(g);
  }
  if (fits(num) && fits(den)) {
    if (den_ == 0) destroy_big(big_);
    num_ = static_cast<std::int64_t>(num);
    den_ = static_cast<std::int64_t>(den);
    return;
  }
  mpq_class q(mpz_from_i128(num), mpz_from_i128(den));
  *this = from_mpq(std::move(q));
}

Rational Rational::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational");
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    mpz_class n = parse_integer(text.substr(0, slash));
    const std::string_view den_text = text.substr(slash + 1);
    if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+')) {
      throw std::invalid_argument("bad rational: " + std::string(text));
    }
    mpz_class d = parse_integer(den_text);
    if (d == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
    mpq_class q(n, d);
    q.canonicalize();
    return from_mpq(std::move(q));
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    const std::string_view frac_part = text.substr(dot + 1);
    bool neg = false;
    if (!int_part.empty() && (int_part[0] == '-' || int_part[0] == '+')) {
      neg = int_part[0] == '-';
      int_part.remove_prefix(1);
    }
    if (int_part.empty() && frac_part.empty()) throw std::invalid_argument("bad decimal: " + std::string(text));
    for (char ch : frac_part) {
      if (!std::isdigit(static_cast<unsigned char>(ch))) {
        throw std::invalid_argument("bad decimal: " + std::string(text));
      }
    }
    mpz_class whole = int_part.empty() ? mpz_class(0) : parse_integer(int_part);
    if (whole < 0) throw std::invalid_argument("bad decimal: " + std::string(text));
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac_part.size());
    mpz_class frac = frac_part.empty() ? mpz_class(0) : mpz_class(std::string(frac_part), 10);
    mpq_class q(whole * scale + frac, scale);
    if (neg) q = -q;
    q.canonicalize();
    return from_mpq(std::move(q));
  }
  mpq_class q(parse_integer(text));
  return from_mpq(std::move(q));
}

bool Rational::is_integer() const { return den_ == 1 || (den_ == 0 && big_->q.get_den() == 1); }

int Rational::sign() const {
  if (den_ != 0) return num_ < 0 ? -1 : (num_ > 0 ? 1 : 0);
  return sgn(big_->q);
}

std::string Rational::str() const {
  if (den_ != 0) return std::to_string(num_) + "/" + std::to_string(den_);
  return big_->q.get_num().get_str() + "/" + big_->q.get_den().get_str();
}

std::string Rational::numerator_str() const {
  return den_ != 0 ? std::to_string(num_) : big_->q.get_num().get_str();
}

std::string Rational::denominator_str() const {
  return den_ != 0 ? std::to_string(den_) : big_->q.get_den().get_str();
}

std::string Rational::decimal(int digits) const {
  if (digits < 0) digits = 0;
  mpq_class q = to_mpq(*this);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  // Round half away from zero.
  mpq_class scaled = ::abs(q) * scale;
  mpz_class rounded = (2 * scaled.get_num() + scaled.get_den()) / (2 * scaled.get_den());
  std::string s = rounded.get_str();
  if (digits > 0) {
    if (s.size() <= static_cast<std::size_t>(digits)) s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  }
  if (sgn(q) < 0 && rounded != 0) s.insert(0, "-");
  return s;
}

double Rational::to_double() const {
  if (den_ != 0) return static_cast<double>(num_) / static_cast<double>(den_);
  return big_->q.get_d();
}

std::int64_t Rational::to_int64() const {
  if (den_ != 1) throw std::overflow_error("Rational::to_int64: not a small integer: " + str());
  return num_;
}

Rational Rational::floor() const {
  if (den_ != 0) {
    std::int64_t q = num_ / den_;
    if ((num_ % den_ != 0) && (num_ < 0)) --q;
    return Rational(q);
  }
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), big_->q.get_num_mpz_t(), big_->q.get_den_mpz_t());
  return from_mpq(mpq_class(q));
}

Rational Rational::ceil() const { return -((-*this).floor()); }

Rational Rational::reciprocal() const {
  if (is_zero()) throw std::domain_error("Rational: reciprocal of zero");
  if (den_ != 0) {
    Rational out;
    out.assign_i128(den_, num_);
    return out;
  }
  mpq_class q = 1 / big_->q;
  return from_mpq(std::move(q));
}

Rational Rational::operator-() const {
  if (den_ != 0) {
    Rational out;
    out.num_ = -num_;
    out.den_ = den_;
    return out;
  }
  return from_mpq(mpq_class(-big_->q));
}

Rational& Rational::operator+=(const Rational& rhs) {
  if (den_ != 0 && rhs.den_ != 0) {
    if (rhs.num_ == 0) return *this;
    if (num_ == 0) {
      num_ = rhs.num_;
      den_ = rhs.den_;
      return *this;
    }
    if (den_ == rhs.den_) {
      std::int64_t t;
      if (!__builtin_add_overflow(num_, rhs.num_, &t) && t != std::numeric_limits<std::int64_t>::min()) {
        const std::uint64_t g = gcd64(uabs64(t), static_cast<std::uint64_t>(den_));
        num_ = t / static_cast<std::int64_t>(g);
        den_ = den_ / static_cast<std::int64_t>(g);
        if (num_ == 0) den_ = 1;
        return *this;
      }
      assign_i128(static_cast<__int128>(num_) + rhs.num_, den_);
      return *this;
    }
    const std::uint64_t g = gcd64(static_cast<std::uint64_t>(den_), static_cast<std::uint64_t>(rhs.den_));
    if (g == 1) {
      const __int128 t = static_cast<__int128>(num_) * rhs.den_ + static_cast<__int128>(rhs.num_) * den_;
      const __int128 d = static_cast<__int128>(den_) * rhs.den_;
      if (fits(t) && fits(d)) {
        num_ = static_cast<std::int64_t>(t);
        den_ = static_cast<std::int64_t>(d);
        if (num_ == 0) den_ = 1;
        return *this;
      }
      assign_i128(t, d);
      return *this;
    }
    const std::int64_t sg = static_cast<std::int64_t>(g);
    const std::int64_t b1 = den_ / sg;
    const std::int64_t d1 = rhs.den_ / sg;
    // 64-bit route first; __int128 division is several times slower.
    std::int64_t p1, p2, t64, d64;
    if (!__builtin_mul_overflow(num_, d1, &p1) && !__builtin_mul_overflow(rhs.num_, b1, &p2) &&
        !__builtin_add_overflow(p1, p2, &t64) && t64 != std::numeric_limits<std::int64_t>::min()) {
      const std::uint64_t g2 = gcd64(uabs64(t64) % g, g);
      if (!__builtin_mul_overflow(b1, rhs.den_ / static_cast<std::int64_t>(g2), &d64)) {
        num_ = t64 / static_cast<std::int64_t>(g2);
        den_ = d64;
        if (num_ == 0) den_ = 1;
        return *this;
      }
    }
    const __int128 t = static_cast<__int128>(num_) * d1 + static_cast<__int128>(rhs.num_) * b1;
    const std::uint64_t g2 = gcd64(static_cast<std::uint64_t>(uabs(t) % g), g);
    const __int128 n = t / static_cast<__int128>(g2);
    const __int128 d = static_cast<__int128>(b1) * (rhs.den_ / static_cast<std::int64_t>(g2));
    if (fits(n) && fits(d)) {
      num_ = static_cast<std::int64_t>(n);
      den_ = static_cast<std::int64_t>(d);
      if (num_ == 0) den_ = 1;
      return *this;
    }
    assign_i128(n, d);
    return *this;
  }
  add_slow(rhs, false);
  return *this;
}

Rational& Rational::operator-=(const Rational& rhs) {
  if (rhs.den_ != 0) return *this += -rhs;
  add_slow(rhs, true);
  return *this;
}

void Rational::add_slow(const Rational& rhs, bool subtract) {
  mpq_class q = to_mpq(*this);
  if (subtract) {
    q -= to_mpq(rhs);
  } else {
    q += to_mpq(rhs);
  }
  *this = from_mpq(std::move(q));
}

Rational& Rational::operator*=(const Rational& rhs) {
  if (den_ != 0 && rhs.den_ != 0) {
    if (num_ == 0) return *this;
    if (rhs.num_ == 0) {
      num_ = 0;
      den_ = 1;
      return *this;
    }
    const std::int64_t g1 = static_cast<std::int64_t>(gcd64(uabs64(num_), static_cast<std::uint64_t>(rhs.den_)));
    const std::int64_t g2 = static_cast<std::int64_t>(gcd64(uabs64(rhs.num_), static_cast<std::uint64_t>(den_)));
    const __int128 n = static_cast<__int128>(num_ / g1) * (rhs.num_ / g2);
    const __int128 d = static_cast<__int128>(den_ / g2) * (rhs.den_ / g1);
    if (fits(n) && fits(d)) {
      num_ = static_cast<std::int64_t>(n);
      den_ = static_cast<std::int64_t>(d);
      return *this;
    }
    mpq_class q(mpz_from_i128(n), mpz_from_i128(d));
    *this = from_mpq(std::move(q));
    return *this;
  }
  mul_slow(rhs);
  return *this;
}

void Rational::mul_slow(const Rational& rhs) {
  mpq_class q = to_mpq(*this) * to_mpq(rhs);
  *this = from_mpq(std::move(q));
}

Rational& Rational::operator/=(const Rational& rhs) { return *this *= rhs.reciprocal(); }

int Rational::compare_slow(const Rational& a, const Rational& b) {
  if (a.den_ == 0 && b.den_ != 0) {
    return mpq_cmp_si(a.big_->q.get_mpq_t(), b.num_, static_cast<unsigned long>(b.den_)) < 0
               ? -1
               : (mpq_cmp_si(a.big_->q.get_mpq_t(), b.num_, static_cast<unsigned long>(b.den_)) > 0 ? 1 : 0);
  }
  if (a.den_ != 0 && b.den_ == 0) return -compare_slow(b, a);
  if (a.big_ == b.big_) return 0;
  int c;
  if (mpz_cmp(a.big_->q.get_den_mpz_t(), b.big_->q.get_den_mpz_t()) == 0) {
    c = mpz_cmp(a.big_->q.get_num_mpz_t(), b.big_->q.get_num_mpz_t());
  } else {
    c = cmp(a.big_->q, b.big_->q);
  }
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

bool Rational::equal_slow(const Rational& a, const Rational& b) {
  return a.big_ == b.big_ || mpq_equal(a.big_->q.get_mpq_t(), b.big_->q.get_mpq_t()) != 0;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational pow(const Rational& base, unsigned exponent) {
  Rational result(1);
  Rational b = base;
  while (exponent > 0) {
    if (exponent & 1U) result *= b;
    exponent >>= 1U;
    if (exponent > 0) b *= b;
  }
  return result;
}

}  // namespace cupgame
