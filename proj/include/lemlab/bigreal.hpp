#pragma once

// Arbitrary-precision binary floating point on top of MPFR.
//
// Every BigReal carries its own precision in bits. Binary operations are
// carried out at the larger of the two operand precisions, so mixing a
// 128-bit and a 256-bit value never silently truncates the wider one.

#include <mpfr.h>

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>

#include "lemlab/errors.hpp"

namespace lemlab {

inline constexpr mpfr_prec_t kMinBits = 64;
inline constexpr mpfr_prec_t kDefaultBits = 256;

class BigReal {
 public:
  explicit BigReal(mpfr_prec_t bits = kDefaultBits) {
    mpfr_init2(v_, clamp(bits));
    mpfr_set_zero(v_, 1);
  }
  BigReal(double x, mpfr_prec_t bits) {
    mpfr_init2(v_, clamp(bits));
    mpfr_set_d(v_, x, MPFR_RNDN);
  }
  BigReal(long x, mpfr_prec_t bits) {
    mpfr_init2(v_, clamp(bits));
    mpfr_set_si(v_, x, MPFR_RNDN);
  }
  BigReal(int x, mpfr_prec_t bits) : BigReal(static_cast<long>(x), bits) {}
  // Rounds `other` to `bits`.
  BigReal(const BigReal& other, mpfr_prec_t bits) {
    mpfr_init2(v_, clamp(bits));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }

  BigReal(const BigReal& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  BigReal(BigReal&& other) noexcept {
    mpfr_init2(v_, kMinBits);
    mpfr_swap(v_, other.v_);
  }
  BigReal& operator=(const BigReal& other) {
    if (this != &other) {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigReal& operator=(BigReal&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~BigReal() { mpfr_clear(v_); }

  static BigReal parse(std::string_view text, mpfr_prec_t bits) {
    BigReal r(bits);
    std::string s(text);
    if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0 && !mpfr_number_p(r.v_))
      throw std::invalid_argument("BigReal::parse: not a number: " + s);
    return r;
  }

  static BigReal pi(mpfr_prec_t bits) {
    BigReal r(bits);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }
  static BigReal euler_gamma(mpfr_prec_t bits) {
    BigReal r(bits);
    mpfr_const_euler(r.v_, MPFR_RNDN);
    return r;
  }
  static BigReal ln2(mpfr_prec_t bits) {
    BigReal r(bits);
    mpfr_const_log2(r.v_, MPFR_RNDN);
    return r;
  }
  // 2^e at the given precision.
  static BigReal pow2(long e, mpfr_prec_t bits) {
    BigReal r(1L, bits);
    mpfr_mul_2si(r.v_, r.v_, e, MPFR_RNDN);
    return r;
  }

  mpfr_prec_t bits() const { return mpfr_get_prec(v_); }
  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  // Binary exponent e with |x| = f·2^e, f ∈ [1/2, 1). Zero maps to LONG_MIN.
  long exponent2() const { return is_zero() ? LONG_MIN : static_cast<long>(mpfr_get_exp(v_)); }

  // Decimal scientific notation with `digits` significant digits; 0 picks
  // enough digits to round-trip (bits·log10(2) + 2).
  std::string to_string(int digits = 0) const {
    if (digits <= 0) digits = static_cast<int>(static_cast<double>(bits()) * 0.30103) + 2;
    if (!is_finite()) return mpfr_nan_p(v_) ? "nan" : (sign() > 0 ? "inf" : "-inf");
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Re", digits - 1, v_);
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
  }

  BigReal& operator+=(const BigReal& o) { return binop(o, mpfr_add); }
  BigReal& operator-=(const BigReal& o) { return binop(o, mpfr_sub); }
  BigReal& operator*=(const BigReal& o) { return binop(o, mpfr_mul); }
  BigReal& operator/=(const BigReal& o) { return binop(o, mpfr_div); }
  template <class S, class = std::enable_if_t<std::is_arithmetic_v<S>>>
  BigReal& operator+=(S o) {
    if constexpr (std::is_integral_v<S>) mpfr_add_si(v_, v_, static_cast<long>(o), MPFR_RNDN);
    else mpfr_add_d(v_, v_, static_cast<double>(o), MPFR_RNDN);
    return *this;
  }
  template <class S, class = std::enable_if_t<std::is_arithmetic_v<S>>>
  BigReal& operator-=(S o) {
    if constexpr (std::is_integral_v<S>) mpfr_sub_si(v_, v_, static_cast<long>(o), MPFR_RNDN);
    else mpfr_sub_d(v_, v_, static_cast<double>(o), MPFR_RNDN);
    return *this;
  }
  template <class S, class = std::enable_if_t<std::is_arithmetic_v<S>>>
  BigReal& operator*=(S o) {
    if constexpr (std::is_integral_v<S>) mpfr_mul_si(v_, v_, static_cast<long>(o), MPFR_RNDN);
    else mpfr_mul_d(v_, v_, static_cast<double>(o), MPFR_RNDN);
    return *this;
  }
  template <class S, class = std::enable_if_t<std::is_arithmetic_v<S>>>
  BigReal& operator/=(S o) {
    if constexpr (std::is_integral_v<S>) mpfr_div_si(v_, v_, static_cast<long>(o), MPFR_RNDN);
    else mpfr_div_d(v_, v_, static_cast<double>(o), MPFR_RNDN);
    return *this;
  }

  BigReal operator-() const {
    BigReal r(*this);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
  }

  friend BigReal operator+(BigReal a, const BigReal& b) { return a += b; }
  friend BigReal operator-(BigReal a, const BigReal& b) { return a -= b; }
  friend BigReal operator*(BigReal a, const BigReal& b) { return a *= b; }
  friend BigReal operator/(BigReal a, const BigReal& b) { return a /= b; }
  template <class S, class = std::enable_if_t<std::is_arithmetic_v<S>>>
  friend BigReal operator+(BigReal a, S b) { return a += b; }
  template <class S, class = std::enable_if_t<std::is_arithmetic_v<S>>>
  friend BigReal operator-(BigReal a, S b) { return a -= b; }
  template <class S, class = std::enable_if_t<std::is_arithmetic_v<S>>>
  friend BigReal operator*(BigReal a, S b) { return a *= b; }
  template <class S, class = std::enable_if_t<std::is_arithmetic_v<S>>>
  friend BigReal operator/(BigReal a, S b) { return a /= b; }
  template <class S, class = std::enable_if_t<std::is_arithmetic_v<S>>>
  friend BigReal operator+(S a, BigReal b) { return b += a; }
  template <class S, class = std::enable_if_t<std::is_arithmetic_v<S>>>
  friend BigReal operator*(S a, BigReal b) { return b *= a; }
  template <class S, class = std::enable_if_t<std::is_arithmetic_v<S>>>
  friend BigReal operator-(S a, const BigReal& b) { return -b + a; }
  template <class S, class = std::enable_if_t<std::is_arithmetic_v<S>>>
  friend BigReal operator/(S a, const BigReal& b) {
    BigReal r(b.bits());
    mpfr_d_div(r.v_, static_cast<double>(a), b.v_, MPFR_RNDN);
    return r;
  }

  friend int compare(const BigReal& a, const BigReal& b) { return mpfr_cmp(a.v_, b.v_); }
  friend bool operator<(const BigReal& a, const BigReal& b) { return compare(a, b) < 0; }
  friend bool operator>(const BigReal& a, const BigReal& b) { return compare(a, b) > 0; }
  friend bool operator<=(const BigReal& a, const BigReal& b) { return compare(a, b) <= 0; }
  friend bool operator>=(const BigReal& a, const BigReal& b) { return compare(a, b) >= 0; }
  friend bool operator==(const BigReal& a, const BigReal& b) { return compare(a, b) == 0; }
  friend bool operator<(const BigReal& a, double b) { return mpfr_cmp_d(a.v_, b) < 0; }
  friend bool operator>(const BigReal& a, double b) { return mpfr_cmp_d(a.v_, b) > 0; }
  friend bool operator<=(const BigReal& a, double b) { return mpfr_cmp_d(a.v_, b) <= 0; }
  friend bool operator>=(const BigReal& a, double b) { return mpfr_cmp_d(a.v_, b) >= 0; }

  friend std::ostream& operator<<(std::ostream& os, const BigReal& x) {
    return os << x.to_string(static_cast<int>(os.precision()) > 0 ? static_cast<int>(os.precision()) : 17);
  }

  // Unary functions evaluated at the argument's precision.
  template <class F>
  BigReal apply(F f) const {
    BigReal r(bits());
    f(r.v_, v_, MPFR_RNDN);
    return r;
  }

 private:
  static mpfr_prec_t clamp(mpfr_prec_t bits) { return bits < kMinBits ? kMinBits : bits; }

  template <class Op>
  BigReal& binop(const BigReal& o, Op op) {
    if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
    op(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }

  mpfr_t v_;
};

inline BigReal log(const BigReal& x) { return x.apply(mpfr_log); }
inline BigReal exp(const BigReal& x) { return x.apply(mpfr_exp); }
inline BigReal sqrt(const BigReal& x) { return x.apply(mpfr_sqrt); }
inline BigReal log1p(const BigReal& x) { return x.apply(mpfr_log1p); }
inline BigReal expm1(const BigReal& x) { return x.apply(mpfr_expm1); }
inline BigReal abs(const BigReal& x) { return x.apply(mpfr_abs); }
inline BigReal sin(const BigReal& x) { return x.apply(mpfr_sin); }
inline BigReal cos(const BigReal& x) { return x.apply(mpfr_cos); }
inline BigReal floor(const BigReal& x) {
  BigReal r(x.bits());
  mpfr_floor(r.get(), x.get());
  return r;
}
inline BigReal pow(const BigReal& x, const BigReal& y) {
  BigReal r(std::max(x.bits(), y.bits()));
  mpfr_pow(r.get(), x.get(), y.get(), MPFR_RNDN);
  return r;
}
inline BigReal pow(const BigReal& x, long n) {
  BigReal r(x.bits());
  mpfr_pow_si(r.get(), x.get(), n, MPFR_RNDN);
  return r;
}
inline BigReal square(const BigReal& x) { return x.apply(mpfr_sqr); }
// log(|x|) without forming a possibly out-of-range intermediate.
inline BigReal log_abs(const BigReal& x) { return log(abs(x)); }

inline BigReal max(const BigReal& a, const BigReal& b) { return a < b ? b : a; }
inline BigReal min(const BigReal& a, const BigReal& b) { return a < b ? a : b; }

// Relative difference |a - b| / max(|a|, |b|, tiny).
inline double rel_diff(const BigReal& a, const BigReal& b) {
  BigReal scale = max(abs(a), abs(b));
  BigReal diff = abs(a - b);
  if (scale.is_zero()) return 0.0;
  return (diff / scale).to_double();
}

// Unit in the last place of x at its own precision.
inline BigReal ulp(const BigReal& x) {
  if (x.is_zero()) return BigReal::pow2(-static_cast<long>(x.bits()), x.bits());
  return BigReal::pow2(x.exponent2() - static_cast<long>(x.bits()), x.bits());
}

}  // namespace lemlab
