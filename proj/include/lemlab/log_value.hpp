#pragma once

#include "lemlab/bigreal.hpp"

namespace lemlab {

// A real number stored as sign · exp(log_abs). Partition functions are far
// outside double range, so they only ever exist in this form.
class LogValue {
 public:
  LogValue() : sign_(0), log_abs_(kDefaultBits) {}
  LogValue(int sign, BigReal log_abs) : sign_(sign > 0 ? 1 : (sign < 0 ? -1 : 0)), log_abs_(std::move(log_abs)) {}

  static LogValue from_value(const BigReal& x) {
    if (x.is_zero()) return LogValue(0, BigReal(x.bits()));
    return LogValue(x.sign(), log(abs(x)));
  }
  static LogValue from_log(BigReal log_abs) { return LogValue(1, std::move(log_abs)); }

  int sign() const { return sign_; }
  const BigReal& log_abs() const { return log_abs_; }
  bool is_zero() const { return sign_ == 0; }

  BigReal value() const {
    if (sign_ == 0) return BigReal(log_abs_.bits());
    BigReal v = exp(log_abs_);
    return sign_ < 0 ? -v : v;
  }

  LogValue& operator*=(const LogValue& o) {
    sign_ *= o.sign_;
    if (sign_ != 0) log_abs_ += o.log_abs_;
    return *this;
  }
  LogValue& operator/=(const LogValue& o) {
    if (o.sign_ == 0) throw DomainError("LogValue: division by zero");
    sign_ *= o.sign_;
    if (sign_ != 0) log_abs_ -= o.log_abs_;
    return *this;
  }
  friend LogValue operator*(LogValue a, const LogValue& b) { return a *= b; }
  friend LogValue operator/(LogValue a, const LogValue& b) { return a /= b; }

  // Sum without leaving the log domain.
  friend LogValue operator+(const LogValue& a, const LogValue& b) {
    if (a.sign_ == 0) return b;
    if (b.sign_ == 0) return a;
    const bool a_big = a.log_abs_ >= b.log_abs_;
    const LogValue& hi = a_big ? a : b;
    const LogValue& lo = a_big ? b : a;
    BigReal ratio = exp(lo.log_abs_ - hi.log_abs_);
    if (hi.sign_ == lo.sign_) return LogValue(hi.sign_, hi.log_abs_ + log1p(ratio));
    if (ratio == BigReal(1L, ratio.bits())) return LogValue(0, BigReal(hi.log_abs_.bits()));
    return LogValue(hi.sign_, hi.log_abs_ + log1p(-ratio));
  }

 private:
  int sign_;
  BigReal log_abs_;
};

}  // namespace lemlab
