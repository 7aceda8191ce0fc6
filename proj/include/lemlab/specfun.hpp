#pragma once

// Special functions at arbitrary precision: log-gamma, log Barnes G,
// Bernoulli numbers, zeta'(-1) and the regularized incomplete gamma ratio.
//
// log Γ and log G are evaluated by shifting the argument upward with the
// functional recurrences until it is past `shift_threshold`, then summing
// the Stirling-type asymptotic series. The series is cut when the next
// term stops decreasing or drops below 2^-(bits+8).

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "lemlab/bigreal.hpp"

namespace lemlab {

using Rational = mpq_class;

struct SpecfunConfig {
  // Lower bound on the argument at which the asymptotic series is used. The
  // effective threshold is raised with precision so that the smallest
  // Bernoulli term stays below the working ulp.
  double shift_threshold = 30.0;
};

inline SpecfunConfig& specfun_config() {
  static SpecfunConfig cfg;
  return cfg;
}

namespace detail {

inline constexpr mpfr_prec_t kGuardBits = 32;

inline double effective_threshold(mpfr_prec_t bits) {
  // The minimal Bernoulli term near index 2πz has size ~e^{-2πz}.
  const double needed = static_cast<double>(bits + 8) * std::log(2.0) / (2.0 * M_PI) + 4.0;
  return std::max(specfun_config().shift_threshold, needed);
}

// Bernoulli numbers B_{2k} via the Brent-Harvey tangent-number recurrence,
// which works in exact integers only.
class BernoulliCache {
 public:
  Rational even(long k) {
    std::lock_guard<std::mutex> lock(mu_);
    if (k >= static_cast<long>(b2k_.size())) grow(std::max<long>(k + 1, 2 * static_cast<long>(b2k_.size())));
    return b2k_[static_cast<std::size_t>(k)];
  }

 private:
  void grow(long count) {
    // T_1..T_n tangent numbers.
    const long n = count;
    std::vector<mpz_class> t(static_cast<std::size_t>(n + 1));
    t[1] = 1;
    for (long k = 2; k <= n; ++k) t[k] = (k - 1) * t[k - 1];
    for (long k = 2; k <= n; ++k)
      for (long j = k; j <= n; ++j) t[j] = (j - k) * t[j - 1] + (j - k + 2) * t[j];
    b2k_.assign(static_cast<std::size_t>(n + 1), Rational(0));
    b2k_[0] = 1;
    for (long k = 1; k <= n; ++k) {
      mpz_class pow4;
      mpz_ui_pow_ui(pow4.get_mpz_t(), 4, static_cast<unsigned long>(k));
      Rational b(mpz_class(2 * k) * t[k], pow4 * (pow4 - 1));
      b.canonicalize();
      if (k % 2 == 0) b = -b;
      b2k_[static_cast<std::size_t>(k)] = b;
    }
  }

  std::mutex mu_;
  std::vector<Rational> b2k_;
};

inline BernoulliCache& bernoulli_cache() {
  static BernoulliCache cache;
  return cache;
}

inline BigReal to_big(const Rational& q, mpfr_prec_t bits) {
  BigReal r(bits);
  mpfr_set_q(r.get(), q.get_mpq_t(), MPFR_RNDN);
  return r;
}

}  // namespace detail

/// Exact Bernoulli number B_k with B_1 = -1/2.
inline Rational bernoulli(long k) {
  if (k < 0) throw DomainError("bernoulli: negative index");
  if (k == 1) return Rational(-1, 2);
  if (k % 2 == 1) return Rational(0);
  return detail::bernoulli_cache().even(k / 2);
}

inline BigReal bernoulli_real(long k, mpfr_prec_t bits) { return detail::to_big(bernoulli(k), bits); }

inline BigReal log_factorial(unsigned long n, mpfr_prec_t bits) {
  BigReal f(bits + detail::kGuardBits);
  mpfr_fac_ui(f.get(), n, MPFR_RNDN);
  return BigReal(log(f), bits);
}

inline BigReal log_two_pi(mpfr_prec_t bits) { return log(BigReal::pi(bits) * 2); }

/// Stirling series for log Γ(z) truncated after `terms` Bernoulli terms.
inline BigReal gamma_asymptotic_series(const BigReal& z, int terms) {
  const mpfr_prec_t bits = z.bits();
  BigReal lz = log(z);
  BigReal s = (z - 0.5) * lz - z + log_two_pi(bits) / 2;
  BigReal zpow = z;  // z^{2k-1}
  const BigReal z2 = square(z);
  for (int k = 1; k <= terms; ++k) {
    s += bernoulli_real(2 * k, bits) / (zpow * (2L * k * (2 * k - 1)));
    zpow *= z2;
  }
  return s;
}

namespace detail {

// Stirling series with the adaptive cut. Requires z past the threshold.
inline BigReal log_gamma_large(const BigReal& z) {
  const mpfr_prec_t bits = z.bits();
  BigReal s = (z - 0.5) * log(z) - z + log_two_pi(bits) / 2;
  const BigReal z2 = square(z);
  BigReal zpow = z;
  const BigReal floor_mag = BigReal::pow2(-static_cast<long>(bits) - 8, bits) * max(abs(s), BigReal(1L, bits));
  BigReal prev_mag(bits);
  for (long k = 1;; ++k) {
    BigReal term = bernoulli_real(2 * k, bits) / (zpow * (2L * k * (2 * k - 1)));
    BigReal mag = abs(term);
    if (k > 1 && mag > prev_mag) break;
    s += term;
    if (mag < floor_mag) break;
    prev_mag = mag;
    zpow *= z2;
  }
  return s;
}

inline BigReal zeta_prime_minus_one_uncached(mpfr_prec_t bits);

}  // namespace detail

/// log Γ(x) for x > 0.
inline BigReal log_gamma(const BigReal& x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
  const mpfr_prec_t bits = x.bits();
  if (mpfr_cmp_ui(x.get(), 1) == 0 || mpfr_cmp_ui(x.get(), 2) == 0) return BigReal(bits);
  const mpfr_prec_t wb = bits + detail::kGuardBits;
  BigReal z(x, wb);
  const double thr = detail::effective_threshold(wb);
  BigReal prod(1L, wb);
  bool shifted = false;
  while (z.to_double() < thr) {
    prod *= z;
    z += 1L;
    shifted = true;
  }
  BigReal r = detail::log_gamma_large(z);
  if (shifted) r -= log(prod);
  return BigReal(r, bits);
}

/// Truncation of the asymptotic series for log G(z+1) after `terms`
/// Bernoulli terms.
inline BigReal barnes_asymptotic_series(const BigReal& z, int terms);

/// ζ'(-1), computed at the requested precision and cached per precision.
inline BigReal zeta_prime_minus_one(mpfr_prec_t bits = kDefaultBits) {
  static std::mutex mu;
  static std::map<mpfr_prec_t, BigReal> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(bits);
  if (it != cache.end()) return it->second;
  BigReal v = detail::zeta_prime_minus_one_uncached(bits);
  cache.emplace(bits, v);
  return v;
}

inline BigReal barnes_asymptotic_series(const BigReal& z, int terms) {
  const mpfr_prec_t bits = z.bits();
  const BigReal lz = log(z);
  const BigReal z2 = square(z);
  BigReal s = z2 * lz / 2 - z2 * 0.75 + log_two_pi(bits) * z / 2 - lz / 12 + zeta_prime_minus_one(bits);
  BigReal zpow = z2;
  for (int k = 1; k <= terms; ++k) {
    s += bernoulli_real(2 * k + 2, bits) / (zpow * (4L * k * (k + 1)));
    zpow *= z2;
  }
  return s;
}

namespace detail {

inline BigReal log_barnes_large(const BigReal& z) {  // log G(z+1)
  const mpfr_prec_t bits = z.bits();
  const BigReal lz = log(z);
  const BigReal z2 = square(z);
  BigReal s = z2 * lz / 2 - z2 * 0.75 + log_two_pi(bits) * z / 2 - lz / 12 + zeta_prime_minus_one(bits);
  const BigReal floor_mag = BigReal::pow2(-static_cast<long>(bits) - 8, bits) * max(abs(s), BigReal(1L, bits));
  BigReal zpow = z2;
  BigReal prev_mag(bits);
  for (long k = 1;; ++k) {
    BigReal term = bernoulli_real(2 * k + 2, bits) / (zpow * (4L * k * (k + 1)));
    BigReal mag = abs(term);
    if (k > 1 && mag > prev_mag) break;
    s += term;
    if (mag < floor_mag) break;
    prev_mag = mag;
    zpow *= z2;
  }
  return s;
}

inline BigReal zeta_prime_minus_one_uncached(mpfr_prec_t bits) {
  // ζ'(2) = -Σ log k / k² by Euler-Maclaurin, then
  // ζ'(-1) = (1 - γ - log 2π)/12 + ζ'(2)/(2π²).
  const mpfr_prec_t wb = bits + kGuardBits;
  const long cutoff = static_cast<long>(std::ceil(static_cast<double>(wb + 16) * std::log(2.0) / (2.0 * M_PI))) + 4;
  BigReal head(wb);
  for (long k = 2; k < cutoff; ++k) {
    BigReal kk(k, wb);
    head += log(kk) / (kk * kk);
  }
  const BigReal kk(cutoff, wb);
  const BigReal lk = log(kk);
  BigReal tail = (lk + 1L) / kk + lk / (kk * kk) / 2;
  // f^{(m)}(x) = x^{-2-m} (α_m log x + β_m) for f(x) = log x / x².
  BigReal alpha(1L, wb), beta(0L, wb);
  BigReal fact(1L, wb);  // (2j)!
  const BigReal floor_mag = BigReal::pow2(-static_cast<long>(wb) - 8, wb);
  BigReal prev_mag(wb);
  for (long m = 0;; ++m) {
    // Advance (α, β) from order m to m+1.
    BigReal na = alpha * static_cast<long>(-(2 + m));
    BigReal nb = beta * static_cast<long>(-(2 + m)) + alpha;
    alpha = na;
    beta = nb;
    const long order = m + 1;
    if (order % 2 == 0) continue;  // only odd derivatives enter
    const long j = (order + 1) / 2;
    fact *= (2 * j - 1) * (2 * j);
    BigReal deriv = (alpha * lk + beta) / pow(kk, 2 + order);
    BigReal term = bernoulli_real(2 * j, wb) / fact * deriv;
    BigReal mag = abs(term);
    if (j > 1 && mag > prev_mag) break;
    tail -= term;
    if (mag < floor_mag) break;
    prev_mag = mag;
  }
  const BigReal pi = BigReal::pi(wb);
  const BigReal zeta_prime_2 = -(head + tail);
  BigReal r = (1L - BigReal::euler_gamma(wb) - log(pi * 2)) / 12 + zeta_prime_2 / (square(pi) * 2);
  return BigReal(r, bits);
}

}  // namespace detail

/// log G(x) for x > 0, G the Barnes G-function.
inline BigReal log_barnes_g(const BigReal& x) {
  if (!(x > 0.0)) throw DomainError("log_barnes_g: argument must be positive");
  const mpfr_prec_t bits = x.bits();
  const mpfr_prec_t wb = bits + detail::kGuardBits + 16;
  BigReal y(x, wb);
  const double thr = detail::effective_threshold(wb);
  long k = 0;
  if (y.to_double() - 1.0 < thr) k = static_cast<long>(std::ceil(thr - (y.to_double() - 1.0)));
  // log G(y) = log G(y+k) - Σ_{i<k} log Γ(y+i), and with L = log Γ(y+k),
  // Σ_{i<k} log Γ(y+i) = k L - Σ_{j<k} (j+1) log(y+j).
  BigReal top = y + k;
  BigReal r = detail::log_barnes_large(top - 1L);
  if (k > 0) {
    BigReal lg = detail::log_gamma_large(top);
    BigReal acc = lg * k;
    for (long j = 0; j < k; ++j) acc -= log(y + j) * (j + 1);
    r -= acc;
  }
  return BigReal(r, bits);
}

/// Lower regularized incomplete gamma P(s, x) by its power series.
inline BigReal regularized_gamma_p(const BigReal& s, const BigReal& x) {
  if (!(s > 0.0) || x < 0.0) throw DomainError("regularized_gamma_p: need s > 0, x >= 0");
  const mpfr_prec_t bits = std::max(s.bits(), x.bits());
  if (x.is_zero()) return BigReal(bits);
  const mpfr_prec_t wb = bits + detail::kGuardBits;
  BigReal ss(s, wb), xx(x, wb);
  BigReal term = 1L / ss;
  BigReal sum = term;
  const BigReal eps = BigReal::pow2(-static_cast<long>(wb), wb);
  for (long n = 1; n < 100000; ++n) {
    term *= xx / (ss + n);
    sum += term;
    if (abs(term) < abs(sum) * eps) break;
  }
  BigReal logpref = ss * log(xx) - xx - log_gamma(ss);
  return BigReal(exp(logpref) * sum, bits);
}

namespace detail {

// Γ(s,x)/Γ(s) by the modified Lentz continued fraction; good for x ≥ s+1.
inline BigReal gamma_q_cf(const BigReal& s, const BigReal& x) {
  const mpfr_prec_t wb = x.bits();
  const BigReal tiny = BigReal::pow2(-static_cast<long>(4 * wb), wb);
  const BigReal eps = BigReal::pow2(-static_cast<long>(wb), wb);
  BigReal b = x + 1L - s;
  BigReal c = 1L / tiny;
  BigReal d = 1L / b;
  BigReal h = d;
  for (long i = 1; i < 100000; ++i) {
    BigReal an = -(BigReal(i, wb) * (BigReal(i, wb) - s));
    b += 2L;
    d = an * d + b;
    if (abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (abs(c) < tiny) c = tiny;
    d = 1L / d;
    BigReal delta = d * c;
    h *= delta;
    if (abs(delta - 1L) < eps) break;
  }
  BigReal logpref = s * log(x) - x - log_gamma(s);
  return exp(logpref) * h;
}

}  // namespace detail

/// Upper regularized incomplete gamma Q(s, x) = Γ(s,x)/Γ(s) ∈ [0, 1].
inline BigReal regularized_gamma_q(const BigReal& s, const BigReal& x) {
  if (!(s > 0.0) || x < 0.0) throw DomainError("regularized_gamma_q: need s > 0, x >= 0");
  const mpfr_prec_t bits = std::max(s.bits(), x.bits());
  if (x.is_zero()) return BigReal(1L, bits);
  const mpfr_prec_t wb = bits + detail::kGuardBits;
  BigReal ss(s, wb), xx(x, wb);
  if (xx < ss + 1L) return BigReal(1L - regularized_gamma_p(ss, xx), bits);
  return BigReal(detail::gamma_q_cf(ss, xx), bits);
}

}  // namespace lemlab
