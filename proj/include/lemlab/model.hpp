#pragma once

// The lemniscate potential V_{d,t}(z) = |z|^{2d} - t(z^d + conj(z)^d), its
// droplet, equilibrium measure and the energy/entropy functionals.
//
// Droplet integrals are done in double precision. Smooth integrands use a
// polar grid in z (Gauss-Legendre in r, trapezoid or Gauss-Legendre in the
// angle); the log-singular pieces are reduced to the image disk
// |w - t| <= 1/sqrt(d) under w = z^d.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lemlab/errors.hpp"
#include "lemlab/quadrature.hpp"

namespace lemlab {

using Complex = std::complex<double>;

struct LemniscateParams {
  int d = 1;
  double t = 0.0;
  double c = 0.0;

  void validate() const {
    if (d < 1) throw DomainError("LemniscateParams: d must be >= 1");
    if (!(t >= 0.0)) throw DomainError("LemniscateParams: t must be >= 0");
    if (!(c > -1.0)) throw DomainError("LemniscateParams: c must be > -1");
  }
};

enum class Regime { MultiComponent, ConformalSingularity, Critical };

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::MultiComponent: return "multi-component";
    case Regime::ConformalSingularity: return "conformal-singularity";
    case Regime::Critical: return "critical";
  }
  return "unknown";
}

enum class Method { ClosedForm, Quadrature };

inline std::string to_string(Method m) { return m == Method::ClosedForm ? "closed-form" : "quadrature"; }

struct EnergyReport {
  double energy = 0;          // I_V[σ_V]
  double robin_constant = 0;  // F_V
  double entropy = 0;         // ∫ log(ΔV) dσ_V
  double potential_mean = 0;  // ∫ V dσ_V
  Method method = Method::ClosedForm;
};

inline double critical_t(int d) {
  if (d < 1) throw DomainError("critical_t: d must be >= 1");
  return 1.0 / std::sqrt(static_cast<double>(d));
}

inline constexpr double kCriticalRelTol = 1e-9;

inline Regime regime(const LemniscateParams& p, double tol) {
  if (tol < 0) throw DomainError("regime: tol must be >= 0");
  const double tc = critical_t(p.d);
  if (p.t > tc + tol) return Regime::MultiComponent;
  if (p.t < tc - tol) return Regime::ConformalSingularity;
  return Regime::Critical;
}

inline Regime regime(const LemniscateParams& p) { return regime(p, kCriticalRelTol * critical_t(p.d)); }

inline void require_noncritical(const LemniscateParams& p, const char* who) {
  if (regime(p) == Regime::Critical)
    throw UnsupportedParameterError(std::string(who) + ": t is at the critical value 1/sqrt(d)");
}

/// V_{d,t}(z), or V^{(c)}_{d,t}(z) = V_{d,t}(z) - (2c/n) log|z| when n is given.
inline double potential_value(const LemniscateParams& p, std::optional<long> n, Complex z) {
  const Complex zd = std::pow(z, p.d);
  double v = std::pow(std::abs(z), 2 * p.d) - 2.0 * p.t * zd.real();
  if (n) {
    if (*n < 1) throw DomainError("potential_value: n must be positive");
    if (p.c != 0.0) {
      if (z == Complex(0, 0)) throw DomainError("potential_value: log singularity at z = 0");
      v -= 2.0 * p.c / static_cast<double>(*n) * std::log(std::abs(z));
    }
  }
  return v;
}

inline double droplet_radius(int d) { return 1.0 / std::sqrt(static_cast<double>(d)); }

/// (Re z^d - t)^2 + (Im z^d)^2 - 1/d; nonpositive on the droplet.
inline double droplet_residual(const LemniscateParams& p, Complex z) {
  const Complex w = std::pow(z, p.d) - p.t;
  return std::norm(w) - 1.0 / p.d;
}

inline bool droplet_contains(const LemniscateParams& p, Complex z) { return droplet_residual(p, z) <= 0.0; }

/// Points z with z^d = t + e^{iθ}/sqrt(d), `samples` per branch spaced
/// evenly in arc length of the z-curve, all d branches.
inline std::vector<Complex> droplet_boundary(const LemniscateParams& p, int samples) {
  if (samples < 3) throw DomainError("droplet_boundary: need at least 3 samples");
  p.validate();
  const double R = droplet_radius(p.d);
  // Fine θ grid with the argument of w unwrapped, so each branch is continuous.
  const int fine = 16 * samples;
  std::vector<double> theta(fine + 1), len(fine + 1, 0.0);
  std::vector<Complex> z0(fine + 1);
  double prev_arg = 0;
  for (int i = 0; i <= fine; ++i) {
    theta[i] = 2 * M_PI * i / fine;
    const Complex w = p.t + R * std::polar(1.0, theta[i]);
    double a = std::arg(w);
    if (i > 0) a = prev_arg + std::remainder(a - prev_arg, 2 * M_PI);
    prev_arg = a;
    z0[i] = std::polar(std::pow(std::abs(w), 1.0 / p.d), a / p.d);
    if (i > 0) len[i] = len[i - 1] + std::abs(z0[i] - z0[i - 1]);
  }
  std::vector<Complex> branch;
  branch.reserve(static_cast<std::size_t>(samples));
  int j = 0;
  for (int i = 0; i < samples; ++i) {
    const double target = len[fine] * i / samples;
    while (j < fine - 1 && len[j + 1] < target) ++j;
    const double span = len[j + 1] - len[j];
    const double f = span > 0 ? (target - len[j]) / span : 0.0;
    const double th = theta[j] + f * (theta[j + 1] - theta[j]);
    const Complex w = p.t + R * std::polar(1.0, th);
    // The root of w closest to the interpolated point on the branch.
    const Complex guess = z0[j] + f * (z0[j + 1] - z0[j]);
    const double r = std::pow(std::abs(w), 1.0 / p.d);
    Complex best = std::polar(r, std::arg(w) / p.d);
    for (int k = 1; k < p.d; ++k) {
      const Complex c = std::polar(r, (std::arg(w) + 2 * M_PI * k) / p.d);
      if (std::abs(c - guess) < std::abs(best - guess)) best = c;
    }
    branch.push_back(best);
  }
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(samples) * static_cast<std::size_t>(p.d));
  for (int k = 0; k < p.d; ++k) {
    const Complex rot = std::polar(1.0, 2 * M_PI * k / p.d);
    for (const Complex& z : branch) out.push_back(z * rot);
  }
  return out;
}

/// Number of clusters of `pts` when points closer than `tol_factor` times
/// the typical nearest-neighbour spacing are joined.
inline int count_components(const std::vector<Complex>& pts, double tol_factor = 10.0) {
  const std::size_t n = pts.size();
  if (n == 0) return 0;
  std::vector<double> nn(n, INFINITY);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) nn[i] = std::min(nn[i], std::abs(pts[i] - pts[j]));
  std::vector<double> sorted = nn;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(n / 2), sorted.end());
  const double tol = tol_factor * sorted[n / 2];
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(pts[i] - pts[j]) <= tol) parent[find(i)] = find(j);
  int count = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (find(i) == i) ++count;
  return count;
}

/// Density of σ_V with respect to area measure: d²|z|^{2d-2}/π on S_V.
inline double equilibrium_density(const LemniscateParams& p, Complex z) {
  if (!droplet_contains(p, z)) return 0.0;
  return static_cast<double>(p.d) * p.d * std::pow(std::abs(z), 2 * p.d - 2) / M_PI;
}

inline int euler_characteristic(const LemniscateParams& p) {
  switch (regime(p)) {
    case Regime::MultiComponent: return p.d;
    case Regime::ConformalSingularity: return 1;
    case Regime::Critical: break;
  }
  throw UnsupportedParameterError("euler_characteristic: droplet topology undefined at t = 1/sqrt(d)");
}

/// ∫_{S_V} f(z) d²z by a polar tensor rule in z.
template <class F>
double integrate_droplet(const LemniscateParams& p, F&& f, int radial = 48) {
  const int d = p.d;
  const double R = droplet_radius(d);
  const double t = p.t;
  const quad::Rule& rr = quad::gauss_legendre(radial);
  double total = 0;
  if (t <= R) {
    // Star-shaped around 0: r ∈ [0, r_+(θ)], smooth and 2π/d periodic.
    const int angular = std::max(4 * radial, 64) * d;
    const double h = 2 * M_PI / angular;
    for (int i = 0; i < angular; ++i) {
      const double th = h * i;
      const double phi = d * th;
      const double s = std::sin(phi);
      const double rho = t * std::cos(phi) + std::sqrt(std::max(0.0, R * R - t * t * s * s));
      const double rmax = std::pow(rho, 1.0 / d);
      double inner = 0;
      for (std::size_t k = 0; k < rr.nodes.size(); ++k) {
        const double r = 0.5 * rmax * (rr.nodes[k] + 1);
        inner += rr.weights[k] * f(std::polar(r, th)) * r;
      }
      total += inner * 0.5 * rmax * h;
    }
  } else {
    // d components; φ = arcsin((R/t) sin ψ) straightens the angular extent.
    const int angular = 4 * radial;
    const quad::Rule& ra = quad::gauss_legendre(angular);
    const double q = R / t;
    for (int comp = 0; comp < d; ++comp) {
      for (std::size_t ia = 0; ia < ra.nodes.size(); ++ia) {
        const double psi = 0.5 * M_PI * ra.nodes[ia];
        const double sphi = q * std::sin(psi);
        const double cphi = std::sqrt(1 - sphi * sphi);
        const double phi = std::asin(sphi);
        const double th = (phi + 2 * M_PI * comp) / d;
        const double dth_dpsi = q * std::cos(psi) / (cphi * d);
        const double rho_lo = t * cphi - R * std::cos(psi);
        const double rho_hi = t * cphi + R * std::cos(psi);
        const double r0 = std::pow(rho_lo, 1.0 / d), r1 = std::pow(rho_hi, 1.0 / d);
        double inner = 0;
        for (std::size_t k = 0; k < rr.nodes.size(); ++k) {
          const double r = r0 + 0.5 * (r1 - r0) * (rr.nodes[k] + 1);
          inner += rr.weights[k] * f(std::polar(r, th)) * r;
        }
        total += ra.weights[ia] * 0.5 * M_PI * dth_dpsi * inner * 0.5 * (r1 - r0);
      }
    }
  }
  return total;
}

namespace detail {

// ∫_{|w-center|<R} log|w - w0| d²w/π in closed form.
inline double disk_log_potential_jensen(Complex center, double R, Complex w0) {
  const double dist = std::abs(w0 - center);
  if (dist > R) return R * R * std::log(dist);
  return R * R * std::log(R) - 0.5 * R * R + 0.5 * dist * dist;
}

// Same integral by quadrature. Inside the disk the grid is polar around w0
// so the log singularity sits at the origin of the radial variable and the
// radial integral is done exactly.
inline double disk_log_potential_quadrature(Complex center, double R, Complex w0, int nodes = 512) {
  const Complex q = w0 - center;
  const double dist = std::abs(q);
  if (dist < R) {
    auto g = [](double rho) { return rho > 0 ? 0.5 * rho * rho * std::log(rho) - 0.25 * rho * rho : 0.0; };
    return quad::integrate_periodic(
               [&](double th) {
                 const double proj = (q * std::polar(1.0, -th)).real();
                 const double rho = -proj + std::sqrt(proj * proj + R * R - dist * dist);
                 return g(rho);
               },
               nodes) /
           M_PI;
  }
  const int radial = std::max(32, nodes / 8);
  const int angular = std::max(4 * radial, nodes);
  return quad::integrate(
             [&](double rho) {
               return quad::integrate_periodic(
                          [&](double th) { return std::log(std::abs(center + std::polar(rho, th) - w0)); }, angular) *
                      rho;
             },
             0.0, R, radial) /
         M_PI;
}

}  // namespace detail

/// Logarithmic potential U(z) = ∫ log(1/|z - ζ|) dσ_V(ζ).
inline double log_potential(const LemniscateParams& p, Complex z, Method method = Method::ClosedForm) {
  const Complex w0 = std::pow(z, p.d);
  const double R = droplet_radius(p.d);
  const Complex center(p.t, 0);
  return method == Method::ClosedForm ? -detail::disk_log_potential_jensen(center, R, w0)
                                      : -detail::disk_log_potential_quadrature(center, R, w0);
}

inline double energy_closed_form(const LemniscateParams& p) {
  const double d = p.d;
  return 3.0 / (4.0 * d) + std::log(d) / (2.0 * d) - p.t * p.t;
}

inline double entropy_closed_form(const LemniscateParams& p) {
  const double d = p.d;
  switch (regime(p)) {
    case Regime::MultiComponent: return 2 * std::log(d) + 2 * (d - 1) / d * std::log(p.t);
    case Regime::ConformalSingularity: return (d - 1) / d * (d * p.t * p.t - 1) + (1 + d) / d * std::log(d);
    case Regime::Critical: break;
  }
  throw UnsupportedParameterError("entropy_integral: undefined at t = 1/sqrt(d)");
}

/// ∫_{S_V} log(ΔV) dσ_V.
inline double entropy_integral(const LemniscateParams& p, Method method = Method::ClosedForm) {
  require_noncritical(p, "entropy_integral");
  if (method == Method::ClosedForm) return entropy_closed_form(p);
  // Pushforward to the disk D = {|w - t| < R}: 2 log d + 2(d-1) ∫_D log|w| d²w/π.
  const double d = p.d;
  const double R = droplet_radius(p.d);
  const double k = detail::disk_log_potential_quadrature(Complex(p.t, 0), R, Complex(0, 0), 2048);
  return 2 * std::log(d) + 2 * (d - 1) * k;
}

inline EnergyReport equilibrium_energy(const LemniscateParams& p, Method method = Method::ClosedForm) {
  const double d = p.d;
  EnergyReport rep;
  rep.method = method;
  if (method == Method::ClosedForm) {
    require_noncritical(p, "equilibrium_energy");
    rep.energy = energy_closed_form(p);
    rep.robin_constant = std::log(d) / (2 * d) + 1 / (2 * d) - 0.5 * p.t * p.t;
    rep.potential_mean = 1 / (2 * d) - p.t * p.t;
    rep.entropy = entropy_closed_form(p);
    return rep;
  }
  require_noncritical(p, "equilibrium_energy");
  auto density = [&](Complex z) { return d * d * std::pow(std::abs(z), 2 * p.d - 2) / M_PI; };
  const double v_mean = integrate_droplet(p, [&](Complex z) { return potential_value(p, std::nullopt, z) * density(z); });
  // Inner integral of the double log integral reduced by Jensen's formula.
  const double u_mean = integrate_droplet(p, [&](Complex z) { return log_potential(p, z, Method::ClosedForm) * density(z); });
  rep.potential_mean = v_mean;
  rep.energy = u_mean + v_mean;
  // Robin constant from the variational equality at an off-center interior point.
  const double R = droplet_radius(p.d);
  const Complex w0 = Complex(p.t + 0.5 * R, 0.25 * R);
  const Complex z0 = std::pow(w0, 1.0 / d);
  rep.robin_constant = log_potential(p, z0, Method::Quadrature) + 0.5 * potential_value(p, std::nullopt, z0);
  rep.entropy = entropy_integral(p, Method::Quadrature);
  const double check = rep.robin_constant + 0.5 * v_mean;
  if (!(std::abs(check - rep.energy) < 1e-6))
    throw AccuracyError("equilibrium_energy: quadrature did not converge", std::abs(check - rep.energy));
  return rep;
}

struct RegularizedConformalIntegral {
  double value = 0;
  double fitted_log_coefficient = 0;
  std::vector<std::pair<long, double>> grid;  // (n, value)
};

namespace detail {

// (1/12) ∫_{S_V, |z|>eps} |∇φ|² d²z/π with |∇φ| = (d-1)/|z|.
inline double conformal_integral_value(const LemniscateParams& p, double eps) {
  const int d = p.d;
  if (d == 1) return 0.0;
  const double R = droplet_radius(d);
  const double t = p.t;
  const double k2 = static_cast<double>((d - 1) * (d - 1));
  double integral;
  if (t < R) {
    integral = quad::integrate_periodic(
        [&](double th) {
          const double phi = d * th, s = std::sin(phi);
          const double rho = t * std::cos(phi) + std::sqrt(R * R - t * t * s * s);
          return std::max(0.0, std::log(rho) / d - std::log(eps));
        },
        4096 * d);
  } else {
    const double q = R / t;
    integral = 0;
    const quad::Rule& ra = quad::gauss_legendre(256);
    for (std::size_t ia = 0; ia < ra.nodes.size(); ++ia) {
      const double psi = 0.5 * M_PI * ra.nodes[ia];
      const double sphi = q * std::sin(psi), cphi = std::sqrt(1 - sphi * sphi);
      const double dth_dpsi = q * std::cos(psi) / (cphi * d);
      const double lo = std::max(std::pow(t * cphi - R * std::cos(psi), 1.0 / d), eps);
      const double hi = std::pow(t * cphi + R * std::cos(psi), 1.0 / d);
      if (hi > lo) integral += ra.weights[ia] * 0.5 * M_PI * dth_dpsi * std::log(hi / lo);
    }
    integral *= d;
  }
  return k2 * integral / M_PI / 12.0;
}

}  // namespace detail

/// Cut-off conformal-metric integral with cutoff cutoff_const·n^{-1/(2d)},
/// plus the log n coefficient fitted over n, 2n, ..., 32n. Above the
/// critical t the origin is outside the droplet and the plain integral
/// is returned.
inline RegularizedConformalIntegral regularized_conformal_integral(const LemniscateParams& p, long n,
                                                                   double cutoff_const) {
  require_noncritical(p, "regularized_conformal_integral");
  if (n < 2) throw DomainError("regularized_conformal_integral: n must be >= 2");
  if (!(cutoff_const > 0)) throw DomainError("regularized_conformal_integral: cutoff must be positive");
  RegularizedConformalIntegral out;
  const bool multi = regime(p) == Regime::MultiComponent;
  auto eval = [&](long nn) {
    const double eps = multi ? 0.0 : cutoff_const * std::pow(static_cast<double>(nn), -1.0 / (2.0 * p.d));
    return detail::conformal_integral_value(p, eps);
  };
  out.value = eval(n);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < 6; ++k) {
    const long nn = n << k;
    const double v = eval(nn);
    out.grid.emplace_back(nn, v);
    const double x = std::log(static_cast<double>(nn));
    sx += x;
    sy += v;
    sxx += x * x;
    sxy += x * v;
  }
  const double m = 6;
  out.fitted_log_coefficient = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return out;
}

/// Euclidean distance from z to S_V (0 inside), using a dense boundary sample.
class DropletDistance {
 public:
  explicit DropletDistance(const LemniscateParams& p, int samples = 4096) : p_(p), boundary_(droplet_boundary(p, samples)) {}
  double operator()(Complex z) const {
    if (droplet_contains(p_, z)) return 0.0;
    double best = INFINITY;
    for (const Complex& b : boundary_) best = std::min(best, std::abs(z - b));
    return best;
  }

 private:
  LemniscateParams p_;
  std::vector<Complex> boundary_;
};

/// CSV with columns re, im, density for the droplet boundary.
inline void write_boundary_csv(std::ostream& os, const LemniscateParams& p, int samples) {
  os << "re,im,density\n";
  os.precision(17);
  for (const Complex& z : droplet_boundary(p, samples))
    os << z.real() << ',' << z.imag() << ',' << static_cast<double>(p.d) * p.d * std::pow(std::abs(z), 2 * p.d - 2) / M_PI
       << '\n';
}

}  // namespace lemlab
