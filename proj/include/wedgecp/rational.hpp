#pragma once

// Exact rationals over 64-bit integers with 128-bit intermediates, plus
// ExactTime: a rational placed exactly on the double line so that continuous
// event times can be compared against it without rounding.

#include <cctype>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "wedgecp/errors.hpp"

namespace wedgecp {

class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  int sign() const { return (num_ > 0) - (num_ < 0); }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  // Largest integer <= value.
  std::int64_t floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }
  std::int64_t ceil() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
  }

  Rational operator-() const { return from_wide(-static_cast<__int128>(num_), den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 l = static_cast<__int128>(a.num_) * b.den_;
    const __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l <=> r;
  }

  // "p/q", or "p" when the denominator is one.
  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Accepts "p", "p/q", and finite decimals such as "-0.25" (converted exactly).
  static Rational parse(std::string_view text);

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  static std::int64_t narrow(__int128 v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
      throw std::overflow_error("rational overflow");
    return static_cast<std::int64_t>(v);
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational from_wide(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const __int128 g = gcd128(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    Rational r;
    r.num_ = narrow(n);
    r.den_ = narrow(d);
    return r;
  }

  void assign(std::int64_t n, std::int64_t d) { *this = from_wide(n, d); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

inline Rational Rational::parse(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw InvalidArgument("not a rational number: '" + std::string(text) + "'");
  };
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  auto parse_int = [&](std::string_view s, bool allow_sign) -> std::int64_t {
    s = trim(s);
    if (s.empty()) fail();
    bool neg = false;
    if (allow_sign && (s.front() == '-' || s.front() == '+')) {
      neg = s.front() == '-';
      s.remove_prefix(1);
    }
    if (s.empty()) fail();
    __int128 v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') fail();
      v = v * 10 + (c - '0');
      if (v > std::numeric_limits<std::int64_t>::max()) fail();
    }
    return static_cast<std::int64_t>(neg ? -v : v);
  };

  std::string_view s = trim(text);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    const std::int64_t n = parse_int(s.substr(0, slash), true);
    const std::int64_t d = parse_int(s.substr(slash + 1), false);
    if (d == 0) fail();
    return Rational(n, d);
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view whole = s.substr(0, dot);
    std::string_view frac = s.substr(dot + 1);
    bool neg = !whole.empty() && whole.front() == '-';
    if (!whole.empty() && (whole.front() == '-' || whole.front() == '+')) whole.remove_prefix(1);
    if (frac.size() > 17) fail();
    const std::int64_t w = whole.empty() ? 0 : parse_int(whole, false);
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const std::int64_t f = frac.empty() ? 0 : parse_int(frac, false);
    Rational r = Rational(w) + Rational(f, scale);
    return neg ? -r : r;
  }
  return Rational(parse_int(s, true));
}

// Rational time placed on the double line. `down` is the largest double not
// exceeding the value; `exact` says whether `down` equals the value. Every
// comparison with a double is therefore exact.
struct ExactTime {
  double down = 0.0;
  bool exact = true;

  static ExactTime from_double(double t) { return {t, true}; }

  static ExactTime infinity() { return {std::numeric_limits<double>::infinity(), true}; }

  static ExactTime from_rational(const Rational& r) {
    constexpr std::int64_t kLimit = std::int64_t{1} << 53;
    if (r.num() > -kLimit && r.num() < kLimit && r.den() < kLimit) {
      const double p = static_cast<double>(r.num());
      const double q = static_cast<double>(r.den());
      const double d = p / q;
      // sign(d*q - p) is preserved by the single rounding of fma.
      const double residual = std::fma(d, q, -p);
      if (residual == 0.0) return {d, true};
      if (residual > 0.0) return {std::nextafter(d, -std::numeric_limits<double>::infinity()), false};
      return {d, false};
    }
    // Out of the exactly representable range: fall back to long double with a
    // one-ulp guard, then resolve exactness conservatively.
    const long double v = static_cast<long double>(r.num()) / static_cast<long double>(r.den());
    double d = static_cast<double>(v);
    if (static_cast<long double>(d) > v) d = std::nextafter(d, -std::numeric_limits<double>::infinity());
    return {d, static_cast<long double>(d) == v};
  }

  bool is_infinite() const { return std::isinf(down); }

  // Smallest double strictly greater than the value.
  double strictly_after() const {
    return std::nextafter(down, std::numeric_limits<double>::infinity());
  }

  // Double closest to the value from below; exact when representable.
  double approx() const { return down; }
};

// t <= b
inline bool le(double t, const ExactTime& b) { return t <= b.down; }
// t < b
inline bool lt(double t, const ExactTime& b) { return t < b.down || (t == b.down && !b.exact); }
// t >= b
inline bool ge(double t, const ExactTime& b) { return !lt(t, b); }
// t > b
inline bool gt(double t, const ExactTime& b) { return !le(t, b); }

// a <= b for two rationals placed on the double line. Two inexact values in the
// same ulp gap are not distinguishable and compare as equal.
inline bool le(const ExactTime& a, const ExactTime& b) {
  if (a.down != b.down) return a.down < b.down;
  return a.exact || !b.exact;
}

// Exact comparison of a double with a rational.
inline std::strong_ordering compare(double t, const Rational& r) {
  const ExactTime e = ExactTime::from_rational(r);
  if (lt(t, e)) return std::strong_ordering::less;
  if (le(t, e)) return std::strong_ordering::equal;
  return std::strong_ordering::greater;
}

}  // namespace wedgecp
