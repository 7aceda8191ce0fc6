#pragma once

// Exact log partition functions: Ginibre, radial (t = 0), the multi-fold
// decomposition for general t, the dual potential, and a direct Gram
// determinant route used for validation.
//
// Norms h_j^{(c)}(a) come from an LDL^T factorization of the moment matrix
// in the translated monomials u^p, u = z - a. In that basis
//
//   ∫ u^p conj(u)^q |u|^{2c} e^{-N|u+a|^2} d²u/π
//     = (-1)^δ (Na)^δ e^{-Na²} N^{-(p+c+1)} Σ_r x^r Γ(p+r+c+1) / (r! (r+δ)!)
//
// with p ≥ q, δ = p - q, x = N a². Every term of the series is positive.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "lemlab/bigreal.hpp"
#include "lemlab/errors.hpp"
#include "lemlab/linalg.hpp"
#include "lemlab/model.hpp"
#include "lemlab/specfun.hpp"

namespace lemlab {

inline constexpr long kDegreeCap = 1024;

struct ReducedParams {
  long N = 0;
  int m = 0;
  BigReal a{kDefaultBits};
  std::vector<BigReal> gammas;  // γ_{ℓ,c}, ℓ = 0..d-1
};

struct OrthoNormTable {
  long N = 0;
  BigReal c{kDefaultBits};
  BigReal a{kDefaultBits};
  std::vector<BigReal> norms;  // h_j, j = 0..n_max
  std::vector<BigReal> subdiagonal;  // L_{j,j-1} in the translated basis, j ≥ 1
  mpfr_prec_t bits = kDefaultBits;
  mpfr_prec_t working_bits = kDefaultBits;
};

inline BigReal log_Z_ginibre(long N, mpfr_prec_t bits = kDefaultBits) {
  if (N < 1) throw DomainError("log_Z_ginibre: N must be >= 1");
  const mpfr_prec_t wb = bits + 16;
  BigReal r = log_barnes_g(BigReal(N + 2, wb)) - log(BigReal(N, wb)) * (N * (N + 1) / 2.0);
  return BigReal(r, bits);
}

/// log Z_n at t = 0 via the Barnes G regrouping of Σ_j log Γ((j+c+1)/d).
inline BigReal log_Z_radial(long n, int d, const BigReal& c) {
  if (n < 1 || d < 1) throw DomainError("log_Z_radial: need n, d >= 1");
  if (!(c > -1.0)) throw DomainError("log_Z_radial: c must be > -1");
  const mpfr_prec_t bits = c.bits();
  const mpfr_prec_t wb = bits + 16;
  const BigReal cc(c, wb);
  const long N = n / d;
  const long m = n % d;
  BigReal r = log_factorial(static_cast<unsigned long>(n), wb) - log(BigReal(d, wb)) * n -
              (cc * 2 + (n + 1)) * n / (2L * d) * log(BigReal(n, wb));
  for (long l = 0; l < d; ++l) {
    const BigReal b = (cc + (l + 1)) / d;
    r -= log_barnes_g(b);
    r += log_barnes_g(b + (l < m ? N + 1 : N));
  }
  return BigReal(r, bits);
}

inline BigReal log_Z_radial(long n, int d, double c, mpfr_prec_t bits = kDefaultBits) {
  return log_Z_radial(n, d, BigReal(c, bits));
}

/// Same quantity summing log Γ((j+c+1)/d) directly.
inline BigReal log_Z_radial_product(long n, int d, const BigReal& c) {
  if (n < 1 || d < 1) throw DomainError("log_Z_radial_product: need n, d >= 1");
  const mpfr_prec_t bits = c.bits();
  const mpfr_prec_t wb = bits + 16;
  const BigReal cc(c, wb);
  BigReal r = log_factorial(static_cast<unsigned long>(n), wb) - log(BigReal(d, wb)) * n -
              (cc * 2 + (n + 1)) * n / (2L * d) * log(BigReal(n, wb));
  for (long j = 0; j < n; ++j) r += log_gamma((cc + (j + 1)) / d);
  return BigReal(r, bits);
}

namespace detail {

// Series part Σ_r x^r Γ(p+r+c+1)/(r!(r+δ)!) given Γ(p+c+1).
inline BigReal translated_series(const BigReal& gamma_p, const BigReal& x, const BigReal& pc1, long delta,
                                 mpfr_prec_t wb) {
  BigReal term(gamma_p, wb);
  if (delta > 0) {
    BigReal f(wb);
    mpfr_fac_ui(f.get(), static_cast<unsigned long>(delta), MPFR_RNDN);
    term /= f;
  }
  if (x.is_zero()) return term;
  BigReal sum(term, wb);
  const BigReal eps = BigReal::pow2(-static_cast<long>(wb) - 8, wb);
  BigReal factor(wb);
  for (long r = 0;; ++r) {
    // term ratio x (p+r+c+1) / ((r+1)(r+δ+1))
    factor = pc1 + r;
    factor *= x;
    factor /= static_cast<double>(r + 1) * static_cast<double>(r + delta + 1);
    term *= factor;
    sum += term;
    if (factor < 1.0 && term < sum * eps) break;
  }
  return sum;
}

// Translated-basis moment matrix of size n at working precision wb.
inline Matrix translated_moment_matrix(long N, const BigReal& c, const BigReal& a, long n, mpfr_prec_t wb) {
  const BigReal cc(c, wb), aa(a, wb), NN(N, wb);
  const BigReal x = NN * square(aa);
  const BigReal na = NN * aa;
  const BigReal logN = log(NN);
  Matrix m(static_cast<std::size_t>(n));
  // Γ(p+c+1) by upward recurrence from Γ(c+1).
  BigReal gam(wb);
  {
    BigReal c1 = cc + 1L;
    mpfr_gamma(gam.get(), c1.get(), MPFR_RNDN);
  }
  const BigReal pref0 = exp(-x - (cc + 1L) * logN);  // e^{-x} N^{-(c+1)}
  BigReal pref_p(pref0, wb);
  const BigReal invN = 1L / NN;
  for (long p = 0; p < n; ++p) {
    const BigReal pc1 = cc + (p + 1);
    BigReal napow(1L, wb);
    // Entries q = 0..p have δ = p - q; compute (Na)^δ incrementally from δ = 0.
    std::vector<BigReal> tmp(static_cast<std::size_t>(p + 1), BigReal(wb));
    for (long delta = 0; delta <= p; ++delta) {
      BigReal s = translated_series(gam, x, pc1, delta, wb);
      s *= napow;
      s *= pref_p;
      if (delta % 2 == 1) s = -s;
      tmp[static_cast<std::size_t>(p - delta)] = std::move(s);
      napow *= na;
    }
    m[static_cast<std::size_t>(p)] = std::move(tmp);
    gam *= pc1;
    pref_p *= invN;
  }
  return m;
}

// log2 of the largest diagonal moment relative to the Gaussian norm j!/N^{j+1},
// in double precision; used to pick the starting working precision.
inline double translated_loss_estimate(long N, double c, double a, long n) {
  const double x = N * a * a;
  double worst = 0;
  for (long p = 0; p < n; ++p) {
    double mx = -INFINITY;
    std::vector<double> logs;
    for (long r = 0;; ++r) {
      const double lt = (r > 0 ? r * std::log(x) : 0.0) + std::lgamma(p + r + c + 1) - 2 * std::lgamma(r + 1.0);
      logs.push_back(lt);
      mx = std::max(mx, lt);
      if (x == 0 || (r > x && lt < mx - 60)) break;
    }
    double s = 0;
    for (double l : logs) s += std::exp(l - mx);
    const double log_diag = -x - (p + c + 1) * std::log(static_cast<double>(N)) + mx + std::log(s);
    const double log_gauss = std::lgamma(p + 1.0) - (p + 1) * std::log(static_cast<double>(N));
    worst = std::max(worst, (log_diag - log_gauss) / std::log(2.0));
  }
  return worst;
}

}  // namespace detail

/// ∫ u^p conj(u)^q |u|^{2c} e^{-N|u+a|²} d²u/π for p ≥ q (translated basis).
inline BigReal translated_moment(long N, const BigReal& c, const BigReal& a, long p, long q) {
  if (p < q) std::swap(p, q);
  const mpfr_prec_t wb = std::max(c.bits(), a.bits()) + 32;
  Matrix m = detail::translated_moment_matrix(N, c, a, p + 1, wb);
  return BigReal(m[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)], wb - 32);
}

/// ∫ z^j conj(z)^k |z-a|^{2c} e^{-N|z|²} d²z/π.
inline BigReal planar_moment(long N, double c, double a, long j, long k, mpfr_prec_t bits = kDefaultBits) {
  if (N < 1) throw DomainError("planar_moment: N must be >= 1");
  if (j < 0 || k < 0) throw DomainError("planar_moment: negative degree");
  if (!(c > -1.0)) throw DomainError("planar_moment: c must be > -1");
  // Binomial expansion of z = u + a mixes signs; the extra bits absorb it.
  const mpfr_prec_t wb = 2 * bits + 4 * (j + k) + 64;
  const BigReal cc(c, wb), aa(a, wb);
  const long n = std::max(j, k) + 1;
  Matrix m = detail::translated_moment_matrix(N, cc, aa, n, wb);
  BigReal sum(wb);
  mpz_class bj, bk;
  for (long p = 0; p <= j; ++p) {
    mpz_bin_uiui(bj.get_mpz_t(), static_cast<unsigned long>(j), static_cast<unsigned long>(p));
    for (long q = 0; q <= k; ++q) {
      mpz_bin_uiui(bk.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(q));
      const BigReal& mpq = p >= q ? m[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)]
                                  : m[static_cast<std::size_t>(q)][static_cast<std::size_t>(p)];
      BigReal coeff(wb);
      mpz_class b = bj * bk;
      mpfr_set_z(coeff.get(), b.get_mpz_t(), MPFR_RNDN);
      sum += coeff * pow(aa, (j - p) + (k - q)) * mpq;
    }
  }
  return BigReal(sum, bits);
}

/// Squared norms h_j^{(c)}(a), j = 0..n_max, of the monic orthogonal
/// polynomials for |z-a|^{2c} e^{-N|z|²} d²z/π.
inline OrthoNormTable ortho_norms(long N, const BigReal& c, const BigReal& a, long n_max, mpfr_prec_t bits) {
  if (N < 1) throw DomainError("ortho_norms: N must be >= 1");
  if (n_max < 0) throw DomainError("ortho_norms: n_max must be >= 0");
  if (n_max > kDegreeCap) throw UnsupportedParameterError("ortho_norms: n_max exceeds the degree cap");
  if (!(c > -1.0)) throw DomainError("ortho_norms: c must be > -1");
  if (a < 0.0) throw DomainError("ortho_norms: a must be >= 0");
  OrthoNormTable tab;
  tab.N = N;
  tab.c = BigReal(c, bits);
  tab.a = BigReal(a, bits);
  tab.bits = bits;
  const long n = n_max + 1;
  if (a.is_zero()) {
    // Radial weight: the matrix is diagonal with Γ(j+c+1)/N^{j+c+1}.
    const mpfr_prec_t wb = bits + 16;
    const BigReal cc(c, wb), NN(N, wb);
    BigReal g(wb);
    BigReal c1 = cc + 1L;
    mpfr_gamma(g.get(), c1.get(), MPFR_RNDN);
    BigReal np = pow(NN, cc + 1L);
    for (long j = 0; j < n; ++j) {
      tab.norms.emplace_back(g / np, bits);
      g *= cc + (j + 1);
      np *= NN;
      if (j > 0) tab.subdiagonal.emplace_back(bits);
    }
    tab.working_bits = wb;
    return tab;
  }
  EscalationPolicy pol;
  pol.initial_loss_estimate = detail::translated_loss_estimate(N, c.to_double(), a.to_double(), n);
  LdlFactor f = ldl_escalating(
      [&](mpfr_prec_t wb) { return detail::translated_moment_matrix(N, BigReal(c, wb), BigReal(a, wb), n, wb); }, bits,
      pol);
  for (long j = 0; j < n; ++j) {
    tab.norms.emplace_back(f.pivots[static_cast<std::size_t>(j)], bits);
    if (j > 0) tab.subdiagonal.emplace_back(f.lower[static_cast<std::size_t>(j)][static_cast<std::size_t>(j - 1)], bits);
  }
  tab.working_bits = f.working_bits;
  return tab;
}

inline OrthoNormTable ortho_norms(long N, double c, double a, long n_max, mpfr_prec_t bits = kDefaultBits) {
  return ortho_norms(N, BigReal(c, bits), BigReal(a, bits), n_max, bits);
}

/// h_k^{(1)}(a) = (k+1)!/N^{k+2} · Q(k+2, Na²)/Q(k+1, Na²).
inline BigReal norm_c1_incomplete_gamma(long N, double a, long k, mpfr_prec_t bits = kDefaultBits) {
  if (N < 1 || k < 0) throw DomainError("norm_c1_incomplete_gamma: need N >= 1, k >= 0");
  const mpfr_prec_t wb = bits + 32;
  const BigReal NN(N, wb), aa(a, wb);
  const BigReal x = NN * square(aa);
  const BigReal q2 = regularized_gamma_q(BigReal(k + 2, wb), x);
  const BigReal q1 = regularized_gamma_q(BigReal(k + 1, wb), x);
  BigReal r = exp(log_factorial(static_cast<unsigned long>(k + 1), wb) - log(NN) * (k + 2)) * q2 / q1;
  return BigReal(r, bits);
}

inline ReducedParams map_parameters(long n, const LemniscateParams& p, mpfr_prec_t bits = kDefaultBits) {
  p.validate();
  if (n < p.d) throw DomainError("map_parameters: need n >= d so that N >= 1");
  ReducedParams r;
  r.N = n / p.d;
  r.m = static_cast<int>(n % p.d);
  r.a = sqrt(BigReal(n, bits) / BigReal(r.N, bits)) * BigReal(p.t, bits);
  const BigReal c(p.c, bits);
  for (int l = 0; l < p.d; ++l) r.gammas.push_back(((c + (l + 1)) / p.d - 1L) * 2);
  return r;
}

/// log c_{N,d}(m).
inline BigReal prefactor_log_cNdm(long N, int d, int m, const BigReal& c) {
  if (m < 0 || m >= d) throw DomainError("prefactor_log_cNdm: need 0 <= m < d");
  if (N < 1) throw DomainError("prefactor_log_cNdm: N must be >= 1");
  const mpfr_prec_t bits = c.bits();
  const mpfr_prec_t wb = bits + 16;
  const BigReal cc(c, wb);
  const long n = static_cast<long>(d) * N + m;
  const BigReal NN(N, wb);
  const BigReal expo = NN * NN * d / 2L + (cc * 2 + (1 + 2 * m)) * NN / 2L + (cc * 2 + (1 + m)) * m / (2L * d);
  BigReal r = log_factorial(static_cast<unsigned long>(n), wb) -
              log_factorial(static_cast<unsigned long>(N), wb) * d - log(BigReal(d, wb)) * n +
              expo * log(NN / BigReal(n, wb));
  return BigReal(r, bits);
}

inline BigReal prefactor_log_cNdm(long N, int d, int m, double c, mpfr_prec_t bits = kDefaultBits) {
  return prefactor_log_cNdm(N, d, m, BigReal(c, bits));
}

struct LemniscateDecomposition {
  BigReal A1{kDefaultBits}, A2{kDefaultBits}, A3{kDefaultBits}, total{kDefaultBits};
  ReducedParams reduced;
};

inline BigReal lemniscate_moment(long n, const LemniscateParams& p, long j, long k, mpfr_prec_t bits = kDefaultBits);

/// For n < d there are no complete blocks and the Gram matrix is diagonal:
/// A1 = log n!, A2 = 0 and A3 collects the n diagonal moments.
inline LemniscateDecomposition log_Z_lemniscate_parts(long n, const LemniscateParams& p,
                                                      mpfr_prec_t bits = kDefaultBits) {
  const mpfr_prec_t wb = bits + 16;
  p.validate();
  if (n < 1) throw DomainError("log_Z_lemniscate: n must be >= 1");
  if (n < p.d) {
    LemniscateDecomposition out;
    out.A1 = BigReal(log_factorial(static_cast<unsigned long>(n), wb), bits);
    out.A2 = BigReal(bits);
    BigReal a3(wb);
    for (long j = 0; j < n; ++j) a3 += log(lemniscate_moment(n, p, j, j, wb));
    out.A3 = BigReal(a3, bits);
    out.total = BigReal(out.A1 + a3, bits);
    out.reduced.N = 0;
    out.reduced.m = static_cast<int>(n);
    out.reduced.a = BigReal(bits);
    return out;
  }
  ReducedParams rp = map_parameters(n, p, wb);
  const long N = rp.N;
  const BigReal t(p.t, wb), c(p.c, wb);
  const BigReal lzg = log_Z_ginibre(N, wb);
  const BigReal lnf = log_factorial(static_cast<unsigned long>(N), wb);
  LemniscateDecomposition out;
  out.A1 = BigReal(n * n, wb) * square(t) + prefactor_log_cNdm(N, p.d, rp.m, c) + lzg * p.d;
  BigReal a2(wb), a3(wb);
  for (int l = 0; l < p.d; ++l) {
    const BigReal cl = rp.gammas[static_cast<std::size_t>(l)] / 2L;
    const long n_max = l < rp.m ? N : N - 1;
    OrthoNormTable tab = ortho_norms(N, cl, rp.a, n_max, wb);
    a2 += lnf - lzg;
    for (long j = 0; j < N; ++j) a2 += log(tab.norms[static_cast<std::size_t>(j)]);
    if (l < rp.m) a3 += log(tab.norms[static_cast<std::size_t>(N)]);
  }
  out.A2 = std::move(a2);
  out.A3 = std::move(a3);
  out.total = BigReal(out.A1 + out.A2 + out.A3, bits);
  out.A1 = BigReal(out.A1, bits);
  out.A2 = BigReal(out.A2, bits);
  out.A3 = BigReal(out.A3, bits);
  out.reduced = std::move(rp);
  return out;
}

/// log Z_n(V_{d,t}^{(c)}) by the multi-fold decomposition A1 + A2 + A3.
inline BigReal log_Z_lemniscate(long n, const LemniscateParams& p, mpfr_prec_t bits = kDefaultBits) {
  return log_Z_lemniscate_parts(n, p, bits).total;
}

/// log Z_n for the dual potential Ṽ_d(z) = |z|^{2/d}, in closed form.
inline BigReal log_Z_dual_potential(long n, int d, mpfr_prec_t bits = kDefaultBits) {
  if (n < 1 || d < 1) throw DomainError("log_Z_dual_potential: need n, d >= 1");
  const mpfr_prec_t wb = bits + 16;
  const BigReal nn(n, wb);
  const BigReal half_dnn1 = BigReal(d, wb) * n * (n + 1) / 2L;
  BigReal r = log_factorial(static_cast<unsigned long>(n), wb) + (half_dnn1 + nn / 2L) * log(BigReal(d, wb)) -
              half_dnn1 * log(nn) + nn * (1 - d) / 2L * log_two_pi(wb);
  for (int l = 0; l < d; ++l) {
    const BigReal f = BigReal(l, wb) / d;
    r += log_barnes_g(f + (n + 1)) - log_barnes_g(f + 1L);
  }
  return BigReal(r, bits);
}

// ---------------------------------------------------------------------------
// Direct route through the lemniscate weight |z|^{2c} e^{-nV_{d,t}(z)}.

/// ∫ z^j conj(z)^k |z|^{2c} e^{-n V_{d,t}(z)} d²z/π, zero unless j ≡ k (mod d).
inline BigReal lemniscate_moment(long n, const LemniscateParams& p, long j, long k, mpfr_prec_t bits) {
  p.validate();
  if (j < 0 || k < 0) throw DomainError("lemniscate_moment: negative degree");
  const long diff = std::abs(k - j);
  if (diff % p.d != 0) return BigReal(bits);
  const long nu = diff / p.d;
  const mpfr_prec_t wb = bits + 32;
  const BigReal nn(n, wb), t(p.t, wb), c(p.c, wb);
  if (t.is_zero() && nu > 0) return BigReal(bits);
  const BigReal alpha0 = (c * 2 + (j + k + 2)) / (2L * p.d) + BigReal(nu, wb) / 2L;
  BigReal fac(wb);
  mpfr_fac_ui(fac.get(), static_cast<unsigned long>(nu), MPFR_RNDN);
  // term_0 = (nt)^ν Γ(α0) / (ν! d n^{α0}), kept in logs until exponentiated.
  BigReal lt0 = log_gamma(alpha0) - log(fac) - log(BigReal(p.d, wb)) - alpha0 * log(nn);
  if (nu > 0) lt0 += log(nn * t) * nu;
  BigReal term = exp(lt0);
  BigReal sum(term, wb);
  const BigReal y = nn * square(t);
  if (!y.is_zero()) {
    const BigReal eps = BigReal::pow2(-static_cast<long>(wb) - 8, wb);
    for (long s = 0;; ++s) {
      BigReal ratio = y * (alpha0 + s) / (static_cast<double>(s + 1) * static_cast<double>(s + nu + 1));
      term *= ratio;
      sum += term;
      if (ratio < 1.0 && term < sum * eps) break;
    }
  }
  return BigReal(sum, bits);
}

/// Squared norms 𝗁_j of the monic orthogonal polynomials for the lemniscate
/// weight at particle number n, j = 0..count-1, from the Gram matrix.
inline std::vector<BigReal> lemniscate_norms(long n, const LemniscateParams& p, long count,
                                             mpfr_prec_t bits = kDefaultBits) {
  if (count < 1) throw DomainError("lemniscate_norms: count must be >= 1");
  auto build = [&](mpfr_prec_t wb) {
    Matrix m(static_cast<std::size_t>(count));
    for (long j = 0; j < count; ++j)
      for (long k = 0; k <= j; ++k) m[static_cast<std::size_t>(j)].push_back(lemniscate_moment(n, p, j, k, wb));
    return m;
  };
  EscalationPolicy pol;
  pol.initial_loss_estimate = 32;
  LdlFactor f = ldl_escalating(build, bits, pol);
  std::vector<BigReal> out;
  for (const BigReal& d : f.pivots) out.emplace_back(d, bits);
  return out;
}

/// log Z_n = log n! + log det of the n×n Gram matrix of the lemniscate weight.
inline BigReal log_Z_gram_determinant(long n, const LemniscateParams& p, mpfr_prec_t bits = kDefaultBits) {
  if (n < 1) throw DomainError("log_Z_gram_determinant: n must be >= 1");
  if (n > 64) throw UnsupportedParameterError("log_Z_gram_determinant: validation route limited to n <= 64");
  const mpfr_prec_t wb = bits + 16;
  BigReal r = log_factorial(static_cast<unsigned long>(n), wb);
  for (const BigReal& h : lemniscate_norms(n, p, n, wb)) r += log(h);
  return BigReal(r, bits);
}

/// CSV with columns j, log_h.
inline void write_norm_table_csv(std::ostream& os, const OrthoNormTable& tab) {
  os << "j,log_h\n";
  for (std::size_t j = 0; j < tab.norms.size(); ++j) os << j << ',' << log(tab.norms[j]).to_string(20) << '\n';
}

}  // namespace lemlab
