#pragma once

// Convergence studies of the free energy expansion, residue-class
// oscillation extraction, Metropolis sampling of the Coulomb gas and
// JSON/CSV reports.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "lemlab/asympt.hpp"
#include "lemlab/exact_z.hpp"
#include "lemlab/model.hpp"

namespace lemlab {

inline constexpr const char* kReportSchema = "lemniscate-lab/1";

struct ConvergenceRow {
  long n = 0;
  double exact = 0;
  double asymptotic = 0;
  double remainder = 0;
};

struct ConvergenceReport {
  LemniscateParams params;
  std::vector<ConvergenceRow> rows;
  double fitted_exponent = 0;  // |remainder| ≈ K n^p
  double fitted_constant = 0;  // K
  mpfr_prec_t bits = kDefaultBits;
};

struct PowerLawFit {
  double exponent = 0;
  double constant = 0;
  std::size_t used = 0;
};

/// Least squares of log|y| against log x over entries with |y| > floor.
inline PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y, double floor = 0.0) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(std::abs(y[i]) > floor)) continue;
    const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++k;
  }
  PowerLawFit f;
  f.used = k;
  if (k < 2) return f;
  const double den = k * sxx - sx * sx;
  f.exponent = (k * sxy - sx * sy) / den;
  f.constant = std::exp((sy - f.exponent * sx) / k);
  return f;
}

inline void refit(ConvergenceReport& rep) {
  std::sort(rep.rows.begin(), rep.rows.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
  std::vector<double> x, y;
  for (const auto& r : rep.rows) {
    x.push_back(static_cast<double>(r.n));
    y.push_back(r.remainder);
  }
  const PowerLawFit f = fit_power_law(x, y, std::ldexp(1.0, -static_cast<int>(rep.bits / 2)));
  rep.fitted_exponent = f.exponent;
  rep.fitted_constant = f.constant;
}

/// exact - asymptotic over n_grid, with the power-law fit of the remainder.
inline ConvergenceReport run_convergence(const LemniscateParams& p, std::vector<long> n_grid,
                                         mpfr_prec_t bits = kDefaultBits) {
  detail::require_regime(p, "run_convergence");
  if (n_grid.empty()) throw DomainError("run_convergence: empty grid");
  std::sort(n_grid.begin(), n_grid.end());
  n_grid.erase(std::unique(n_grid.begin(), n_grid.end()), n_grid.end());
  if (n_grid.front() < p.d) throw DomainError("run_convergence: grid points must be >= d");
  if (n_grid.back() / p.d > kDegreeCap) throw UnsupportedParameterError("run_convergence: n exceeds the degree cap");
  ConvergenceReport rep;
  rep.params = p;
  rep.bits = bits;
  for (long n : n_grid) {
    const BigReal ex = log_Z_lemniscate(n, p, bits);
    const BigReal as = expansion_value(p, n, bits);
    rep.rows.push_back({n, ex.to_double(), as.to_double(), (ex - as).to_double()});
  }
  refit(rep);
  return rep;
}

struct OscillationClass {
  int m = 0;
  double x = 0;          // {n/d}
  std::size_t count = 0;
  double mean_residual = 0;   // mean of the O(1) residual over the class
  double extrapolated = 0;    // A in the fit residual ≈ A + B/n
  double slope = 0;           // B
  double predicted = 0;       // d x(x-1) log(√d t) above t_c, 0 below
};

struct OscillationReport {
  LemniscateParams params;
  std::vector<OscillationClass> classes;
};

/// Per residue class of n mod d: the O(1) residual
/// log Z_n - (C1 n² + C2 n log n + C3 n + C4 log n + C5 without its oscillatory part).
inline OscillationReport extract_oscillation(const LemniscateParams& p, std::vector<long> n_grid,
                                             mpfr_prec_t bits = kDefaultBits) {
  const Regime reg = detail::require_regime(p, "extract_oscillation");
  std::sort(n_grid.begin(), n_grid.end());
  n_grid.erase(std::unique(n_grid.begin(), n_grid.end()), n_grid.end());
  std::map<int, std::vector<std::pair<long, double>>> by_class;
  for (long n : n_grid) {
    if (n < p.d) throw DomainError("extract_oscillation: grid points must be >= d");
    const ExpansionCoefficients k = coefficients(p, n, bits);
    const BigReal smooth = expansion_value(k, n) - k.C5_oscillatory;
    by_class[static_cast<int>(n % p.d)].emplace_back(n, (log_Z_lemniscate(n, p, bits) - smooth).to_double());
  }
  OscillationReport rep;
  rep.params = p;
  for (const auto& [m, pts] : by_class) {
    OscillationClass cl;
    cl.m = m;
    cl.x = static_cast<double>(m) / p.d;
    cl.count = pts.size();
    cl.predicted = reg == Regime::MultiComponent ? p.d * cl.x * (cl.x - 1) * std::log(std::sqrt(p.d) * p.t) : 0.0;
    double s = 0, su = 0, suu = 0, sy = 0, suy = 0;
    for (const auto& [n, r] : pts) {
      const double u = 1.0 / static_cast<double>(n);
      s += 1;
      su += u;
      suu += u * u;
      sy += r;
      suy += u * r;
    }
    cl.mean_residual = sy / s;
    if (pts.size() >= 2) {
      const double den = s * suu - su * su;
      cl.slope = (s * suy - su * sy) / den;
      cl.extrapolated = (sy - cl.slope * su) / s;
    } else {
      cl.extrapolated = cl.mean_residual;
    }
    rep.classes.push_back(cl);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Sampling.

struct SampleCloud {
  LemniscateParams params;
  long n = 0;
  std::uint64_t seed = 0;
  std::vector<Complex> points;
  double acceptance_rate = 0;
  long sweeps = 0;
  double step = 0;  // proposal scale after tuning
  bool tuning_failed = false;
  std::vector<Complex> snapshots;  // configurations recorded after tuning
};

/// Independent draws from σ_V: uniform w in the disk |w - t| ≤ 1/√d, then a
/// uniformly chosen d-th root.
inline std::vector<Complex> sample_equilibrium(const LemniscateParams& p, long count, std::uint64_t seed) {
  p.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double R = droplet_radius(p.d);
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    const double rho = R * std::sqrt(u01(rng));
    const double th = 2 * M_PI * u01(rng);
    const Complex w = p.t + std::polar(rho, th);
    const int k = static_cast<int>(std::min<double>(p.d - 1, std::floor(u01(rng) * p.d)));
    out.push_back(std::polar(std::pow(std::abs(w), 1.0 / p.d), std::arg(w) / p.d + 2 * M_PI * k / p.d));
  }
  return out;
}

/// Metropolis chain for the β = 2 gas with weight e^{-E},
/// E = -2 Σ_{j<k} log|z_j - z_k| + n Σ_j V^{(c)}(z_j).
/// The first 20% of sweeps tune the step towards 30-50% acceptance.
inline SampleCloud sample_gas(const LemniscateParams& p, long n, long sweeps, double step, std::uint64_t seed,
                              long snapshot_every = 0) {
  p.validate();
  if (n < 2) throw DomainError("sample_gas: n must be >= 2");
  if (!(step > 0)) throw DomainError("sample_gas: step must be positive");
  if (sweeps < 1) throw DomainError("sample_gas: sweeps must be >= 1");
  SampleCloud cl;
  cl.params = p;
  cl.n = n;
  cl.seed = seed;
  cl.sweeps = sweeps;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  cl.points = sample_equilibrium(p, n, rng());
  auto& z = cl.points;
  const std::optional<long> nopt = n;
  auto v = [&](Complex w) { return potential_value(p, p.c != 0.0 ? nopt : std::nullopt, w); };
  auto local = [&](std::size_t j, Complex w) {
    double e = static_cast<double>(n) * v(w);
    for (std::size_t k = 0; k < z.size(); ++k)
      if (k != j) e -= std::log(std::norm(w - z[k]));
    return e;
  };
  const long tune_sweeps = sweeps / 5;
  const long batch = std::max<long>(1, std::min<long>(10, tune_sweeps / 10));
  long acc = 0, tried = 0, batch_acc = 0, batch_tried = 0;
  for (long s = 0; s < sweeps; ++s) {
    for (std::size_t j = 0; j < z.size(); ++j) {
      const Complex prop = z[j] + Complex(step * gauss(rng), step * gauss(rng));
      if (p.c != 0.0 && prop == Complex(0, 0)) continue;
      const double de = local(j, prop) - local(j, z[j]);
      const bool accept = de <= 0 || u01(rng) < std::exp(-de);
      if (accept) z[j] = prop;
      if (s >= tune_sweeps) {
        ++tried;
        acc += accept;
      } else {
        ++batch_tried;
        batch_acc += accept;
      }
    }
    if (s < tune_sweeps && (s + 1) % batch == 0) {
      const double rate = static_cast<double>(batch_acc) / static_cast<double>(batch_tried);
      if (rate > 0.5) step *= 2;
      else if (rate < 0.3) step /= 2;
      batch_acc = batch_tried = 0;
    }
    if (snapshot_every > 0 && s >= tune_sweeps && (s - tune_sweeps) % snapshot_every == 0)
      cl.snapshots.insert(cl.snapshots.end(), z.begin(), z.end());
  }
  cl.step = step;
  cl.acceptance_rate = tried > 0 ? static_cast<double>(acc) / static_cast<double>(tried) : 0.0;
  cl.tuning_failed = !(cl.acceptance_rate > 0.05 && cl.acceptance_rate < 0.95);
  return cl;
}

/// Area of {|w| ≤ ρ} ∩ {|w - t| ≤ R} divided by πR².
inline double disk_radial_cdf(double rho, double t, double R) {
  if (rho <= 0) return 0.0;
  if (rho + R <= t) return 0.0;
  if (t + rho <= R) return rho * rho / (R * R);
  if (t + R <= rho) return 1.0;
  const double a1 = std::acos(std::clamp((t * t + rho * rho - R * R) / (2 * t * rho), -1.0, 1.0));
  const double a2 = std::acos(std::clamp((t * t + R * R - rho * rho) / (2 * t * R), -1.0, 1.0));
  const double k = (-t + rho + R) * (t + rho - R) * (t - rho + R) * (t + rho + R);
  const double area = rho * rho * a1 + R * R * a2 - 0.5 * std::sqrt(std::max(0.0, k));
  return area / (M_PI * R * R);
}

struct EmpiricalStats {
  double in_droplet_fraction = 0;
  double within_distance_fraction = 0;  // fraction within `distance` of S_V
  double distance = 0.05;
  std::vector<double> bin_edges;      // in |z|^d
  std::vector<double> empirical_cdf;  // at bin_edges[1..]
  std::vector<double> equilibrium_cdf;
  double sup_distance = 0;
};

/// Compares points with σ_V through the law of |z|^d.
inline EmpiricalStats empirical_vs_equilibrium(const std::vector<Complex>& pts, const LemniscateParams& p,
                                               int radial_bins, double distance = 0.05) {
  if (pts.empty()) throw DomainError("empirical_vs_equilibrium: empty cloud");
  if (radial_bins < 1) throw DomainError("empirical_vs_equilibrium: need at least one bin");
  const double R = droplet_radius(p.d);
  EmpiricalStats st;
  st.distance = distance;
  const DropletDistance dist(p);
  std::vector<double> radii;
  std::size_t inside = 0, near = 0;
  for (const Complex& z : pts) {
    if (droplet_contains(p, z)) ++inside;
    if (dist(z) <= distance) ++near;
    radii.push_back(std::pow(std::abs(z), p.d));
  }
  const double total = static_cast<double>(pts.size());
  st.in_droplet_fraction = static_cast<double>(inside) / total;
  st.within_distance_fraction = static_cast<double>(near) / total;
  const double lo = std::max(0.0, p.t - R), hi = p.t + R;
  std::sort(radii.begin(), radii.end());
  for (int b = 0; b <= radial_bins; ++b) st.bin_edges.push_back(lo + (hi - lo) * b / radial_bins);
  for (int b = 1; b <= radial_bins; ++b) {
    const double e = st.bin_edges[static_cast<std::size_t>(b)];
    const double emp = static_cast<double>(std::upper_bound(radii.begin(), radii.end(), e) - radii.begin()) / total;
    const double eq = disk_radial_cdf(e, p.t, R);
    st.empirical_cdf.push_back(emp);
    st.equilibrium_cdf.push_back(eq);
    st.sup_distance = std::max(st.sup_distance, std::abs(emp - eq));
  }
  return st;
}

inline EmpiricalStats empirical_vs_equilibrium(const SampleCloud& cloud, const LemniscateParams& p, int radial_bins) {
  return empirical_vs_equilibrium(cloud.points, p, radial_bins);
}

// ---------------------------------------------------------------------------
// Reports.

using Json = nlohmann::ordered_json;

inline Json to_json(const LemniscateParams& p) { return Json{{"d", p.d}, {"t", p.t}, {"c", p.c}}; }

inline Json report_envelope(const std::string& kind) { return Json{{"schema", kReportSchema}, {"kind", kind}}; }

inline Json to_json(const ExpansionCoefficients& k, int digits = 20) {
  return Json{{"regime", to_string(k.regime)},
              {"n_dependent", k.n_dependent},
              {"C1", k.C1.to_string(digits)},
              {"C2", k.C2.to_string(digits)},
              {"C3", k.C3.to_string(digits)},
              {"C4", k.C4.to_string(digits)},
              {"C5", k.C5.to_string(digits)},
              {"C5_oscillatory", k.C5_oscillatory.to_string(digits)}};
}

inline Json to_json(const FunctionalSet& f, int digits = 20) {
  return Json{{"F", f.F.to_string(digits)}, {"G_n", f.G_n.to_string(digits)}, {"H_n", f.H_n.to_string(digits)},
              {"chi", f.chi}};
}

inline Json to_json(const ConvergenceReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"n", row.n}, {"exact", row.exact}, {"asymptotic", row.asymptotic}, {"remainder", row.remainder}});
  Json j = report_envelope("convergence");
  j["params"] = to_json(r.params);
  j["bits"] = r.bits;
  j["rows"] = rows;
  j["fitted_exponent"] = r.fitted_exponent;
  j["fitted_constant"] = r.fitted_constant;
  return j;
}

inline Json to_json(const OscillationReport& r) {
  Json cls = Json::array();
  for (const auto& c : r.classes)
    cls.push_back({{"m", c.m},
                   {"x", c.x},
                   {"count", c.count},
                   {"mean_residual", c.mean_residual},
                   {"extrapolated", c.extrapolated},
                   {"slope", c.slope},
                   {"predicted", c.predicted}});
  Json j = report_envelope("oscillation");
  j["params"] = to_json(r.params);
  j["classes"] = cls;
  return j;
}

inline Json to_json(const SampleCloud& c, const EmpiricalStats& st) {
  Json j = report_envelope("sample");
  j["params"] = to_json(c.params);
  j["n"] = c.n;
  j["seed"] = c.seed;
  j["sweeps"] = c.sweeps;
  j["acceptance_rate"] = c.acceptance_rate;
  j["step"] = c.step;
  j["tuning_failed"] = c.tuning_failed;
  j["in_droplet_fraction"] = st.in_droplet_fraction;
  j["within_distance_fraction"] = st.within_distance_fraction;
  j["sup_distance"] = st.sup_distance;
  return j;
}

inline void write_convergence_csv(std::ostream& os, const ConvergenceReport& r) {
  os.precision(17);
  os << "n,exact,asymptotic,remainder\n";
  for (const auto& row : r.rows) os << row.n << ',' << row.exact << ',' << row.asymptotic << ',' << row.remainder << '\n';
}

inline void write_points_csv(std::ostream& os, const std::vector<Complex>& pts) {
  os.precision(17);
  os << "re,im\n";
  for (const Complex& z : pts) os << z.real() << ',' << z.imag() << '\n';
}

}  // namespace lemlab
