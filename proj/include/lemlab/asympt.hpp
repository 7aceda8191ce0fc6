#pragma once

// Large-n expansion of log Z_n(V_{d,t}^{(c)}):
//
//   C1 n² + C2 n log n + C3 n + C4 log n + C5 + O(1/n),
//
// the functionals of the general free energy ansatz at c = 0, the
// expansions of the three pieces A1, A2, A3 of the multi-fold
// decomposition, and the Deaño–Simm product formula.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "lemlab/bigreal.hpp"
#include "lemlab/errors.hpp"
#include "lemlab/exact_z.hpp"
#include "lemlab/model.hpp"
#include "lemlab/specfun.hpp"

namespace lemlab {

struct ExpansionCoefficients {
  BigReal C1{kDefaultBits}, C2{kDefaultBits}, C3{kDefaultBits}, C4{kDefaultBits}, C5{kDefaultBits};
  BigReal C5_oscillatory{kDefaultBits};  // d{n/d}({n/d}-1) log(√d t), included in C5
  Regime regime = Regime::ConformalSingularity;
  bool n_dependent = false;
};

struct FunctionalSet {
  BigReal F{kDefaultBits}, G_n{kDefaultBits}, H_n{kDefaultBits};
  int chi = 1;
};

namespace detail {

inline Regime require_regime(const LemniscateParams& p, const char* who) {
  p.validate();
  const Regime r = regime(p);
  if (r == Regime::Critical) throw UnsupportedParameterError(std::string(who) + ": t = 1/sqrt(d) is not covered");
  return r;
}

// log(√d t)
inline BigReal log_sqrt_d_t(int d, const BigReal& t) { return log(sqrt(BigReal(d, t.bits())) * t); }

// log((d t² - 1)/(d t²))
inline BigReal log_gap(int d, const BigReal& t) {
  const BigReal dt2 = square(t) * d;
  return log((dt2 - 1L) / dt2);
}

// {n/d} as an exact rational in [0, 1), returned at the given precision.
inline BigReal frac_n_over_d(long n, int d, mpfr_prec_t bits) {
  const long r = ((n % d) + d) % d;
  return BigReal(r, bits) / d;
}

inline BigReal sum_log_barnes(int d, const BigReal& c) {
  BigReal s(c.bits());
  for (int l = 0; l < d; ++l) s += log_barnes_g((c + (l + 1)) / d);
  return s;
}

}  // namespace detail

inline ExpansionCoefficients coefficients(const LemniscateParams& p, long n, mpfr_prec_t bits = kDefaultBits) {
  const Regime reg = detail::require_regime(p, "coefficients");
  if (n < 1) throw DomainError("coefficients: n must be >= 1");
  const mpfr_prec_t wb = bits + 16;
  const int d = p.d;
  const BigReal t(p.t, wb), c(p.c, wb), dd(d, wb);
  const BigReal logd = log(dd), l2pi = log_two_pi(wb), zp = zeta_prime_minus_one(wb);
  const BigReal cdc = c * (dd - c - 1L);  // c(d-c-1)
  const BigReal kappa6 = BigReal((d - 1) * (2 * d - 1), wb);
  ExpansionCoefficients out;
  out.regime = reg;
  BigReal C1 = square(t) - BigReal(3L, wb) / (4L * d) - logd / (2L * d);
  BigReal C2 = BigReal(1L, wb) / 2L;
  BigReal C3(wb), C4(wb), C5(wb), osc(wb);
  if (reg == Regime::MultiComponent) {
    C3 = l2pi / 2L - 1L + (c * 2 + (1 - d)) / d * log(t) - logd;
    C4 = BigReal(6 - d, wb) / 12L;
    const BigReal x = detail::frac_n_over_d(n, d, wb);
    osc = dd * x * (x - 1L) * detail::log_sqrt_d_t(d, t);
    C5 = dd * zp + l2pi / 2L + (cdc - kappa6 / 6L) / d * detail::log_gap(d, t) + dd / 12L * logd + osc;
    out.n_dependent = true;
  } else {
    C3 = l2pi / 2L - 1L + (c * 2 + (1 - d)) / (2L * d) * (square(t) * d - 1L) - (c * 2 + (1 + d)) / (2L * d) * logd;
    C4 = BigReal(5L, wb) / 12L + BigReal((d - 1) * (d - 1), wb) / (12L * d) - cdc / (2L * d);
    C5 = dd * zp + (c * 2 + (3 - d)) / 4L * l2pi +
         (dd / 12L - kappa6 / (12L * d) + cdc / (2L * d)) * logd - detail::sum_log_barnes(d, c);
  }
  out.C1 = BigReal(C1, bits);
  out.C2 = BigReal(C2, bits);
  out.C3 = BigReal(C3, bits);
  out.C4 = BigReal(C4, bits);
  out.C5 = BigReal(C5, bits);
  out.C5_oscillatory = BigReal(osc, bits);
  return out;
}

inline BigReal expansion_value(const ExpansionCoefficients& k, long n) {
  const mpfr_prec_t bits = k.C1.bits();
  const BigReal nn(n, bits);
  const BigReal ln = log(nn);
  return k.C1 * square(nn) + k.C2 * nn * ln + k.C3 * nn + k.C4 * ln + k.C5;
}

/// C1 n² + C2 n log n + C3 n + C4 log n + C5(n).
inline BigReal expansion_value(const LemniscateParams& p, long n, mpfr_prec_t bits = kDefaultBits) {
  return expansion_value(coefficients(p, n, bits), n);
}

/// F, G_n, H_n and χ of the general free energy ansatz for W = V_{d,t}.
inline FunctionalSet functionals(const LemniscateParams& p, long n, mpfr_prec_t bits = kDefaultBits) {
  const Regime reg = detail::require_regime(p, "functionals");
  if (p.c != 0.0) throw UnsupportedParameterError("functionals: only defined for c = 0");
  if (n < 1) throw DomainError("functionals: n must be >= 1");
  const mpfr_prec_t wb = bits + 16;
  const int d = p.d;
  const BigReal t(p.t, wb), dd(d, wb), logd = log(dd);
  const BigReal kappa6 = BigReal((d - 1) * (2 * d - 1), wb);
  FunctionalSet out;
  if (reg == Regime::MultiComponent) {
    out.chi = d;
    const BigReal x = detail::frac_n_over_d(n, d, wb);
    out.F = BigReal(-kappa6 / (6L * d) * detail::log_gap(d, t) + dd / 12L * logd, bits);
    out.G_n = BigReal(dd * x * (x - 1L) * detail::log_sqrt_d_t(d, t), bits);
    out.H_n = BigReal(bits);
  } else {
    out.chi = 1;
    out.F = BigReal((dd / 12L - kappa6 / (12L * d)) * logd, bits);
    out.G_n = BigReal(bits);
    BigReal h = BigReal((d - 1) * (d - 1), wb) / (12L * d) * log(BigReal(n, wb)) +
                (zeta_prime_minus_one(wb) - log_two_pi(wb) / 4L) * (d - 1) - detail::sum_log_barnes(d, BigReal(wb));
    out.H_n = BigReal(h, bits);
  }
  return out;
}

/// (6 - χ)/12 + (d-1)²/(12d).
inline double conjectured_log_coefficient(int chi, int d) {
  if (d < 1) throw DomainError("conjectured_log_coefficient: d must be >= 1");
  return (6.0 - chi) / 12.0 + static_cast<double>((d - 1) * (d - 1)) / (12.0 * d);
}

// ---------------------------------------------------------------------------
// Expansions of A1, A2, A3 with n = dN + m.

namespace detail {

inline void check_Ndm(long N, int d, int m, const char* who) {
  if (d < 1) throw DomainError(std::string(who) + ": d must be >= 1");
  if (m < 0 || m >= d) throw DomainError(std::string(who) + ": need 0 <= m < d");
  if (N < 1) throw DomainError(std::string(who) + ": N must be >= 1");
}

// N + ½ log N - ½ log 2π
inline BigReal table_block(long N, mpfr_prec_t bits) {
  const BigReal nn(N, bits);
  return nn + log(nn) / 2L - log_two_pi(bits) / 2L;
}

}  // namespace detail

inline BigReal a1_asymptotic(long N, int d, int m, double c, double t, mpfr_prec_t bits = kDefaultBits) {
  detail::check_Ndm(N, d, m, "a1_asymptotic");
  const mpfr_prec_t wb = bits + 16;
  const long n = static_cast<long>(d) * N + m;
  const BigReal nn(n, wb), tt(t, wb), cc(c, wb), dd(d, wb);
  const BigReal logd = log(dd), logn = log(nn), l2pi = log_two_pi(wb);
  BigReal r = (square(tt) - BigReal(3L, wb) / (4L * d) - logd / (2L * d)) * square(nn) + nn * logn / 2L +
              (l2pi / 2L - 1L - (cc * 2 + (1 + d)) / (2L * d) * logd) * nn + BigReal(6 - d, wb) / 12L * logn +
              dd * zeta_prime_minus_one(wb) + dd / 12L * logd + l2pi / 2L +
              BigReal(m, wb) * (detail::table_block(N, wb) + (BigReal(d - 1, wb) - cc * 2) / (2L * d));
  return BigReal(r, bits);
}

inline BigReal a2_asymptotic(long N, int d, int m, double c, double t, mpfr_prec_t bits = kDefaultBits) {
  detail::check_Ndm(N, d, m, "a2_asymptotic");
  const LemniscateParams p{d, t, c};
  const Regime reg = detail::require_regime(p, "a2_asymptotic");
  const mpfr_prec_t wb = bits + 16;
  const long n = static_cast<long>(d) * N + m;
  const BigReal nn(n, wb), tt(t, wb), cc(c, wb), dd(d, wb);
  const BigReal e = cc * 2 + (1 - d);  // 1 + 2c - d
  const BigReal cdc = cc * (dd - cc - 1L);
  const BigReal kappa6 = BigReal((d - 1) * (2 * d - 1), wb);
  BigReal r(wb);
  if (reg == Regime::MultiComponent) {
    const BigReal L = detail::log_sqrt_d_t(d, tt);
    r = e * L / d * nn + (cdc / d - kappa6 / (6L * d)) * detail::log_gap(d, tt) + e * m / (2L * d) * (1L - L * 2);
  } else {
    r = e / (2L * d) * (square(tt) * d - 1L) * nn + (kappa6 / (12L * d) - cdc / (2L * d)) * log(nn / dd) +
        e / 4L * log_two_pi(wb) - detail::sum_log_barnes(d, cc) + e * m / (2L * d);
  }
  return BigReal(r, bits);
}

inline BigReal a3_asymptotic(long N, int d, int m, double c, double t, mpfr_prec_t bits = kDefaultBits) {
  detail::check_Ndm(N, d, m, "a3_asymptotic");
  const LemniscateParams p{d, t, c};
  const Regime reg = detail::require_regime(p, "a3_asymptotic");
  if (m == 0) return BigReal(bits);
  const mpfr_prec_t wb = bits + 16;
  const BigReal tt(t, wb), cc(c, wb);
  BigReal r = -BigReal(m, wb) * detail::table_block(N, wb);
  if (reg == Regime::MultiComponent)
    r += BigReal(m, wb) * (cc * 2 + (m + 1 - 2 * d)) / d * detail::log_sqrt_d_t(d, tt);
  return BigReal(r, bits);
}

/// One row of the m-dependent parts: block·(N + ½ log N - ½ log 2π) + constant.
struct OscillationRow {
  BigReal block_coefficient{kDefaultBits};
  BigReal constant{kDefaultBits};
};

struct OscillationTable {
  OscillationRow A1, A2, A3, total;
};

inline OscillationTable oscillation_cancellation(int d, double t, double c, int m, mpfr_prec_t bits = kDefaultBits) {
  const LemniscateParams p{d, t, c};
  const Regime reg = detail::require_regime(p, "oscillation_cancellation");
  if (m < 0 || m >= d) throw DomainError("oscillation_cancellation: need 0 <= m < d");
  const mpfr_prec_t wb = bits + 16;
  const BigReal mm(m, wb), cc(c, wb), tt(t, wb);
  const BigReal k = (BigReal(d - 1, wb) - cc * 2) / (2L * d);  // (d-2c-1)/(2d)
  OscillationTable tab;
  tab.A1 = {BigReal(mm, bits), BigReal(mm * k, bits)};
  if (reg == Regime::MultiComponent) {
    const BigReal L = detail::log_sqrt_d_t(d, tt);
    tab.A2 = {BigReal(bits), BigReal(-mm * k + mm * k * 2 * L, bits)};
    tab.A3 = {BigReal(-mm, bits), BigReal(mm * (cc * 2 + (m + 1 - 2 * d)) / d * L, bits)};
  } else {
    tab.A2 = {BigReal(bits), BigReal(-mm * k, bits)};
    tab.A3 = {BigReal(-mm, bits), BigReal(bits)};
  }
  tab.total = {tab.A1.block_coefficient + tab.A2.block_coefficient + tab.A3.block_coefficient,
               tab.A1.constant + tab.A2.constant + tab.A3.constant};
  return tab;
}

/// Closed form of the total oscillatory part: m(m-d)/d log(√d t) above t_c, 0 below.
inline BigReal oscillation_total_closed(int d, double t, int m, mpfr_prec_t bits = kDefaultBits) {
  const LemniscateParams p{d, t, 0.0};
  if (detail::require_regime(p, "oscillation_total_closed") != Regime::MultiComponent) return BigReal(bits);
  const BigReal tt(t, bits + 16);
  return BigReal(BigReal(static_cast<long>(m) * (m - d), bits + 16) / d * detail::log_sqrt_d_t(d, tt), bits);
}

inline double kappa_d(int d) { return static_cast<double>((d - 1) * (2 * d - 1)) / (6.0 * d); }

/// log c_{N,d} = log((Nd)!/(N!)^d) - N(dN+2d+1)/2 · log d.
inline BigReal log_c_Nd(long N, int d, mpfr_prec_t bits = kDefaultBits) {
  const mpfr_prec_t wb = bits + 16;
  BigReal r = log_factorial(static_cast<unsigned long>(N * d), wb) -
              log_factorial(static_cast<unsigned long>(N), wb) * d -
              BigReal(N * (d * N + 2L * d + 1), wb) / 2L * log(BigReal(d, wb));
  return BigReal(r, bits);
}

/// Large-n expansion of log Z_n for Ṽ_d(z) = |z|^{2/d} through O(1).
inline BigReal log_Z_dual_potential_asymptotic(long n, int d, mpfr_prec_t bits = kDefaultBits) {
  if (n < 1 || d < 1) throw DomainError("log_Z_dual_potential_asymptotic: need n, d >= 1");
  const mpfr_prec_t wb = bits + 16;
  const BigReal nn(n, wb), dd(d, wb);
  const BigReal ld = log(dd), ln = log(nn), l2p = log_two_pi(wb);
  BigReal r = (dd * ld / 2L - dd * 3L / 4L) * square(nn) + nn * ln / 2L +
              (l2p / 2L - 1L + (dd + 1L) / 2L * ld - (dd - 1L) / 2L) * nn +
              (BigReal(5L, wb) / 12L + square(dd - 1L) / (dd * 12L)) * ln + dd * zeta_prime_minus_one(wb) +
              (dd + 1L) / 4L * l2p;
  for (int l = 1; l < d; ++l) r -= log_barnes_g(BigReal(1L, wb) + BigReal(l, wb) / d);
  return BigReal(r, bits);
}

/// log of (Z_N^{Lem_1}(t√d))^d c_{N,d} (t/t_c)^{∓N(d-1)} (1 - (t_c/t)²)^{-κ_d}.
/// `corrected` selects the exponent -N(d-1); false gives +N(d-1).
inline BigReal deano_simm_rhs(long N, int d, double t, bool corrected = true, mpfr_prec_t bits = kDefaultBits) {
  const LemniscateParams p{d, t, 0.0};
  if (detail::require_regime(p, "deano_simm_rhs") != Regime::MultiComponent)
    throw UnsupportedParameterError("deano_simm_rhs: requires t > 1/sqrt(d)");
  if (N < 1) throw DomainError("deano_simm_rhs: N must be >= 1");
  const mpfr_prec_t wb = bits + 16;
  const BigReal tt(t, wb), dd(d, wb);
  const BigReal lem1 = BigReal(N * N, wb) * square(tt) * d + log_Z_ginibre(N, wb);
  const BigReal L = detail::log_sqrt_d_t(d, tt);
  BigReal r = lem1 * d + log_c_Nd(N, d, wb) - BigReal(kappa_d(d), wb) * log(1L - 1L / (square(tt) * d));
  const BigReal power = BigReal(N * (d - 1), wb) * L;
  r += corrected ? -power : power;
  return BigReal(r, bits);
}

// ---------------------------------------------------------------------------
// Least-squares extraction of C1..C5 from samples f(n) on the basis
// {n², n log n, n, log n, 1}.

struct CoefficientFit {
  std::array<BigReal, 5> coefficients{BigReal(kDefaultBits), BigReal(kDefaultBits), BigReal(kDefaultBits),
                                      BigReal(kDefaultBits), BigReal(kDefaultBits)};
  double condition_number = 0;  // 2-norm condition of the column-scaled design matrix
  double max_residual = 0;
};

namespace detail {

// Eigenvalues of a small symmetric matrix by cyclic Jacobi.
inline std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-300) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double tt = (theta >= 0 ? 1 : -1) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double cs = 1 / std::sqrt(tt * tt + 1), sn = tt * cs;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = cs * akp - sn * akq;
          a[k][q] = sn * akp + cs * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = cs * apk - sn * aqk;
          a[q][k] = sn * apk + cs * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  return ev;
}

}  // namespace detail

inline CoefficientFit fit_expansion(const std::vector<long>& ns, const std::vector<BigReal>& values,
                                    mpfr_prec_t bits = kDefaultBits) {
  if (ns.size() != values.size() || ns.size() < 5) throw DomainError("fit_expansion: need >= 5 samples");
  const mpfr_prec_t wb = 2 * bits + 64;
  const std::size_t rows = ns.size();
  std::vector<std::array<BigReal, 5>> x;
  for (long n : ns) {
    const BigReal nn(n, wb), ln = log(nn);
    x.push_back({square(nn), nn * ln, nn, ln, BigReal(1L, wb)});
  }
  // Column scaling by the largest entry.
  std::array<BigReal, 5> scale{BigReal(wb), BigReal(wb), BigReal(wb), BigReal(wb), BigReal(wb)};
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t i = 0; i < rows; ++i) scale[j] = max(scale[j], abs(x[i][j]));
  for (auto& row : x)
    for (std::size_t j = 0; j < 5; ++j) row[j] /= scale[j];
  // Normal equations in high precision; the extra bits cover the squared condition.
  std::vector<std::vector<BigReal>> g(5, std::vector<BigReal>(6, BigReal(wb)));
  for (std::size_t i = 0; i < rows; ++i) {
    const BigReal y(values[i], wb);
    for (std::size_t j = 0; j < 5; ++j) {
      for (std::size_t k = 0; k < 5; ++k) g[j][k] += x[i][j] * x[i][k];
      g[j][5] += x[i][j] * y;
    }
  }
  std::vector<std::vector<double>> gd(5, std::vector<double>(5));
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t k = 0; k < 5; ++k) gd[j][k] = g[j][k].to_double();
  const auto ev = detail::symmetric_eigenvalues(gd);
  double lo = INFINITY, hi = 0;
  for (double e : ev) {
    lo = std::min(lo, std::abs(e));
    hi = std::max(hi, std::abs(e));
  }
  CoefficientFit fit;
  fit.condition_number = std::sqrt(hi / lo);
  for (std::size_t col = 0; col < 5; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < 5; ++r)
      if (abs(g[r][col]) > abs(g[piv][col])) piv = r;
    std::swap(g[col], g[piv]);
    for (std::size_t r = col + 1; r < 5; ++r) {
      const BigReal f = g[r][col] / g[col][col];
      for (std::size_t k = col; k < 6; ++k) g[r][k] -= f * g[col][k];
    }
  }
  std::array<BigReal, 5> sol{BigReal(wb), BigReal(wb), BigReal(wb), BigReal(wb), BigReal(wb)};
  for (int r = 4; r >= 0; --r) {
    BigReal s = g[static_cast<std::size_t>(r)][5];
    for (std::size_t k = static_cast<std::size_t>(r) + 1; k < 5; ++k) s -= g[static_cast<std::size_t>(r)][k] * sol[k];
    sol[static_cast<std::size_t>(r)] = s / g[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
  }
  for (std::size_t i = 0; i < rows; ++i) {
    BigReal pred(wb);
    for (std::size_t j = 0; j < 5; ++j) pred += x[i][j] * sol[j];
    fit.max_residual = std::max(fit.max_residual, std::abs((pred - values[i]).to_double()));
  }
  for (std::size_t j = 0; j < 5; ++j) fit.coefficients[j] = BigReal(sol[j] / scale[j], bits);
  return fit;
}

/// Geometric grid from 64 to 4096 restricted to n ≡ m (mod d).
inline std::vector<long> extraction_grid(int d, int m, int points = 13) {
  std::vector<long> ns;
  for (int k = 0; k < points; ++k) {
    const double target = 64.0 * std::pow(64.0, static_cast<double>(k) / (points - 1));
    long n = static_cast<long>(std::llround(target / d)) * d + m;
    if (ns.empty() || n > ns.back()) ns.push_back(n);
  }
  return ns;
}

/// Fits the basis to a1 + a2 + a3 on the extraction grid for n ≡ m (mod d).
inline CoefficientFit sum_rule_fit(const LemniscateParams& p, int m, mpfr_prec_t bits = kDefaultBits) {
  detail::require_regime(p, "sum_rule_fit");
  std::vector<long> ns = extraction_grid(p.d, m);
  std::vector<BigReal> vals;
  for (long n : ns) {
    const long N = n / p.d;
    vals.push_back(a1_asymptotic(N, p.d, m, p.c, p.t, bits) + a2_asymptotic(N, p.d, m, p.c, p.t, bits) +
                   a3_asymptotic(N, p.d, m, p.c, p.t, bits));
  }
  return fit_expansion(ns, vals, bits);
}

}  // namespace lemlab
