#pragma once

// LDL^T factorization of real symmetric positive definite Gram matrices in
// BigReal arithmetic, with automatic precision escalation.
//
// For a Gram matrix of monomials the pivots D_j are the squared norms of
// the monic orthogonal polynomials and -L_{j,j-1} is the subleading
// coefficient of the degree-j polynomial in that basis.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "lemlab/bigreal.hpp"
#include "lemlab/errors.hpp"

namespace lemlab {

using Matrix = std::vector<std::vector<BigReal>>;  // lower triangle used

struct LdlFactor {
  std::vector<BigReal> pivots;  // D_j
  Matrix lower;                 // unit lower-triangular L (strict part)
  mpfr_prec_t working_bits = 0;
  double loss_bits = 0;  // max_j log2(A_jj / D_j)
  long failed_degree = -1;
};

inline LdlFactor ldl_factor(const Matrix& a, mpfr_prec_t bits) {
  const std::size_t n = a.size();
  LdlFactor f;
  f.working_bits = bits;
  f.pivots.reserve(n);
  f.lower.assign(n, {});
  // E_ij = L_ij D_j, kept alongside L to save one multiply per update.
  Matrix e(n);
  BigReal acc(bits), prod(bits);
  for (std::size_t j = 0; j < n; ++j) {
    mpfr_set(acc.get(), a[j][j].get(), MPFR_RNDN);
    for (std::size_t k = 0; k < j; ++k) {
      mpfr_mul(prod.get(), e[j][k].get(), f.lower[j][k].get(), MPFR_RNDN);
      mpfr_sub(acc.get(), acc.get(), prod.get(), MPFR_RNDN);
    }
    if (acc.sign() <= 0) {
      f.failed_degree = static_cast<long>(j);
      return f;
    }
    f.pivots.emplace_back(acc, bits);
    const double loss = (log(a[j][j]) - log(acc)).to_double() / std::log(2.0);
    f.loss_bits = std::max(f.loss_bits, loss);
    for (std::size_t i = j + 1; i < n; ++i) {
      if (e[i].empty()) {
        e[i].reserve(i);
        f.lower[i].reserve(i);
      }
      mpfr_set(acc.get(), a[i][j].get(), MPFR_RNDN);
      for (std::size_t k = 0; k < j; ++k) {
        mpfr_mul(prod.get(), e[i][k].get(), f.lower[j][k].get(), MPFR_RNDN);
        mpfr_sub(acc.get(), acc.get(), prod.get(), MPFR_RNDN);
      }
      e[i].emplace_back(acc, bits);
      f.lower[i].push_back(acc / f.pivots[j]);
    }
  }
  return f;
}

struct EscalationPolicy {
  double initial_loss_estimate = 0;  // bits expected to be lost
  double margin = 32;
  mpfr_prec_t cap = 0;  // 0: max(1024, 4 * bits)
};

/// Builds the matrix at increasing working precision until the factorization
/// is positive definite and keeps at least bits + 16 significant bits.
inline LdlFactor ldl_escalating(const std::function<Matrix(mpfr_prec_t)>& build, mpfr_prec_t bits,
                                const EscalationPolicy& policy = {}) {
  const mpfr_prec_t cap = policy.cap > 0 ? policy.cap : std::max<mpfr_prec_t>(1024, 4 * bits);
  mpfr_prec_t w = bits + static_cast<mpfr_prec_t>(std::ceil(std::max(0.0, policy.initial_loss_estimate) + policy.margin));
  w = std::min(w, cap);
  long last_failed = -1;
  for (;;) {
    LdlFactor f = ldl_factor(build(w), w);
    const bool ok = f.failed_degree < 0 && static_cast<double>(w) - f.loss_bits >= static_cast<double>(bits + 16);
    if (ok) return f;
    last_failed = f.failed_degree >= 0 ? f.failed_degree : static_cast<long>(f.pivots.size()) - 1;
    if (w >= cap) break;
    mpfr_prec_t next = 2 * w;
    if (f.failed_degree < 0)
      next = std::max(next, bits + 16 + static_cast<mpfr_prec_t>(std::ceil(f.loss_bits + policy.margin)));
    w = std::min(next, cap);
  }
  throw PrecisionError("Gram factorization lost positive definiteness at degree " + std::to_string(last_failed) +
                           " with " + std::to_string(cap) + " working bits",
                       last_failed, cap);
}

}  // namespace lemlab
