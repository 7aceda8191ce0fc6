#pragma once

// Moments E|det(G_N - a)|^γ of the complex Ginibre matrix: exact values
// from orthogonal norms, and the large-N expansions inside and outside the
// unit disk.

#include <string>

#include "lemlab/bigreal.hpp"
#include "lemlab/errors.hpp"
#include "lemlab/exact_z.hpp"
#include "lemlab/specfun.hpp"

namespace lemlab {

inline constexpr int kMaxCorrections = 12;

struct MomentQuery {
  long N = 1;
  double a = 0;  // |a|; the moment is rotation invariant
  double gamma = 0;

  void validate() const {
    if (N < 1) throw DomainError("MomentQuery: N must be >= 1");
    if (!(gamma > -2.0)) throw DomainError("MomentQuery: gamma must be > -2");
    if (!(a >= 0.0)) throw DomainError("MomentQuery: a must be >= 0");
  }
  // Exponent of |z - a|^{2c} in the orthogonality weight.
  BigReal c(mpfr_prec_t bits) const { return BigReal(gamma, bits) / 2L; }
};

/// log N! - log Z_N^Gin + Σ_{j<N} log h_j^{(γ/2)}(a).
inline BigReal log_moment_exact(const MomentQuery& q, mpfr_prec_t bits = kDefaultBits) {
  q.validate();
  if (q.gamma == 0.0) return BigReal(bits);
  const mpfr_prec_t wb = bits + 16;
  OrthoNormTable tab = ortho_norms(q.N, q.c(wb), BigReal(q.a, wb), q.N - 1, wb);
  BigReal r = log_factorial(static_cast<unsigned long>(q.N), wb) - log_Z_ginibre(q.N, wb);
  for (const BigReal& h : tab.norms) r += log(h);
  return BigReal(r, bits);
}

/// a = 0: N^{-γN/2} G(N+1+γ/2) / (G(N+1) G(1+γ/2)).
inline BigReal log_moment_a0_closed(long N, double gamma, mpfr_prec_t bits = kDefaultBits) {
  MomentQuery{N, 0.0, gamma}.validate();
  if (gamma == 0.0) return BigReal(bits);
  const mpfr_prec_t wb = bits + 16;
  const BigReal c = BigReal(gamma, wb) / 2L;
  const BigReal nn(N, wb);
  BigReal r = -c * nn * log(nn) + log_barnes_g(nn + c + 1L) - log_barnes_g(nn + 1L) - log_barnes_g(c + 1L);
  return BigReal(r, bits);
}

/// |a| > 1: γ N log a - (γ²/4) log((a²-1)/a²).
inline BigReal log_moment_asymptotic_outside(long N, double a, double gamma, mpfr_prec_t bits = kDefaultBits) {
  MomentQuery{N, a, gamma}.validate();
  if (!(a > 1.0)) throw RegimeError("log_moment_asymptotic_outside: requires a > 1");
  const mpfr_prec_t wb = bits + 16;
  const BigReal aa(a, wb), g(gamma, wb);
  const BigReal a2 = square(aa);
  BigReal r = g * N * log(aa) - square(g) / 4L * log((a2 - 1L) / a2);
  return BigReal(r, bits);
}

/// Coefficient of N^{-m} in the bulk expansion, exact for rational γ.
inline Rational correction_coefficient_exact(int m, const Rational& gamma) {
  if (m < 1) throw DomainError("correction_coefficient: m must be >= 1");
  const Rational half = gamma / 2;
  auto qpow = [](Rational b, int e) {
    Rational r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
  };
  Rational first = (gamma * gamma / Rational(4L * m * (m + 1) * (m + 2)) - Rational(1, 12L * m)) * qpow(half, m);
  if (m % 2 == 0) first = -first;
  Rational second = 0;
  mpz_class fact_m1, fact_mk, fact_2k1;
  for (int k = 1; k <= (m - 1) / 2; ++k) {
    mpz_fac_ui(fact_m1.get_mpz_t(), static_cast<unsigned long>(m - 1));
    mpz_fac_ui(fact_mk.get_mpz_t(), static_cast<unsigned long>(m - 2 * k));
    mpz_fac_ui(fact_2k1.get_mpz_t(), static_cast<unsigned long>(2 * k - 1));
    Rational term = bernoulli(2 * k + 2) / (Rational(4L * k * (k + 1)) * Rational(fact_2k1)) *
                    Rational(fact_m1, fact_mk) * qpow(half, m - 2 * k);
    term.canonicalize();
    second += term;
  }
  if (m % 2 == 1) second = -second;
  Rational r = first + second;
  r.canonicalize();
  return r;
}

inline BigReal correction_coefficient(int m, const BigReal& gamma) {
  if (m < 1) throw DomainError("correction_coefficient: m must be >= 1");
  const mpfr_prec_t bits = gamma.bits();
  const BigReal half = gamma / 2L;
  BigReal first = (square(gamma) / (4L * m * (m + 1) * (m + 2)) - BigReal(1L, bits) / (12L * m)) * pow(half, static_cast<long>(m));
  if (m % 2 == 0) first = -first;
  BigReal second(bits);
  for (int k = 1; k <= (m - 1) / 2; ++k) {
    BigReal f(bits);
    // (m-1)!/((m-2k)! (2k-1)!) = C(m-1, 2k-1)
    mpz_class binom;
    mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(m - 1), static_cast<unsigned long>(2 * k - 1));
    mpfr_set_z(f.get(), binom.get_mpz_t(), MPFR_RNDN);
    second += bernoulli_real(2 * k + 2, bits) / (4L * k * (k + 1)) * f * pow(half, static_cast<long>(m - 2 * k));
  }
  if (m % 2 == 1) second = -second;
  return first + second;
}

inline BigReal correction_coefficient(int m, double gamma, mpfr_prec_t bits = kDefaultBits) {
  return correction_coefficient(m, BigReal(gamma, bits));
}

/// 0 ≤ a < 1: (γ/2)(a²-1)N + (γ²/8) log N + (γ/4) log 2π - log G(1+γ/2) + Σ_{m≤corrections} C_m N^{-m}.
inline BigReal log_moment_asymptotic_bulk(long N, double a, double gamma, int corrections,
                                          mpfr_prec_t bits = kDefaultBits) {
  MomentQuery{N, a, gamma}.validate();
  if (!(a < 1.0)) throw RegimeError("log_moment_asymptotic_bulk: requires a < 1");
  if (corrections < 0 || corrections > kMaxCorrections)
    throw UnsupportedParameterError("log_moment_asymptotic_bulk: corrections must lie in [0, " +
                                    std::to_string(kMaxCorrections) + "]");
  if (gamma == 0.0) return BigReal(bits);
  const mpfr_prec_t wb = bits + 16;
  const BigReal g(gamma, wb), aa(a, wb), nn(N, wb);
  BigReal r = g / 2L * (square(aa) - 1L) * nn + square(g) / 8L * log(nn) + g / 4L * log_two_pi(wb) -
              log_barnes_g(g / 2L + 1L);
  BigReal inv = 1L / nn;
  BigReal pw = inv;
  for (int m = 1; m <= corrections; ++m) {
    r += correction_coefficient(m, g) * pw;
    pw *= inv;
  }
  return BigReal(r, bits);
}

/// 0 ≤ a < 1: Barnes G form plus (γ/2) a² N, accurate beyond every power of 1/N.
inline BigReal log_moment_unified_bulk(long N, double a, double gamma, mpfr_prec_t bits = kDefaultBits) {
  MomentQuery{N, a, gamma}.validate();
  if (!(a < 1.0)) throw RegimeError("log_moment_unified_bulk: requires a < 1");
  const mpfr_prec_t wb = bits + 16;
  BigReal r = log_moment_a0_closed(N, gamma, wb) + BigReal(gamma, wb) / 2L * square(BigReal(a, wb)) * N;
  return BigReal(r, bits);
}

/// Leading behaviour of log h_N^{(c)}(a): -N + ½ log(2π/N), plus 2c log a for a > 1.
inline BigReal norm_asymptotic(long N, double a, double c, mpfr_prec_t bits = kDefaultBits) {
  if (N < 1) throw DomainError("norm_asymptotic: N must be >= 1");
  if (!(c > -1.0)) throw DomainError("norm_asymptotic: c must be > -1");
  if (a < 0.0) throw DomainError("norm_asymptotic: a must be >= 0");
  if (a == 1.0) throw RegimeError("norm_asymptotic: a = 1 is the edge regime");
  const mpfr_prec_t wb = bits + 16;
  const BigReal nn(N, wb);
  BigReal r = -nn + log(BigReal::pi(wb) * 2 / nn) / 2L;
  if (a > 1.0) r += BigReal(c, wb) * 2 * log(BigReal(a, wb));
  return BigReal(r, bits);
}

/// Coefficient of z^{N-1} in the monic orthogonal polynomial P_N^{(c)}(z; a).
inline BigReal subleading_coefficient(long N, double c, double a, mpfr_prec_t bits = kDefaultBits) {
  if (N < 1) throw DomainError("subleading_coefficient: N must be >= 1");
  if (!(c > -1.0)) throw DomainError("subleading_coefficient: c must be > -1");
  if (c == 0.0 || a == 0.0) return BigReal(bits);
  const mpfr_prec_t wb = bits + 16;
  OrthoNormTable tab = ortho_norms(N, BigReal(c, wb), BigReal(a, wb), N, wb);
  // In u = z - a the coefficient of u^{N-1} is -L_{N,N-1}; expanding
  // (z - a)^N contributes -N a more.
  BigReal r = -tab.subdiagonal[static_cast<std::size_t>(N - 1)] - BigReal(a, wb) * N;
  return BigReal(r, bits);
}

}  // namespace lemlab
