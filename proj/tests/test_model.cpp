#include <gtest/gtest.h>

#include <random>

#include "lemlab/model.hpp"

using namespace lemlab;

namespace {

Complex rotate(Complex z, int d) { return z * std::polar(1.0, 2 * M_PI / d); }

std::vector<Complex> random_points(int count, double radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<Complex> out;
  for (int i = 0; i < count; ++i) out.emplace_back(u(rng), u(rng));
  return out;
}

// Midpoint rule for ∫_{S_V} f dσ_V over the w = z^d disk, each w carrying
// mass 1/(πR²); f is evaluated at one root of w (f must be d-fold symmetric).
template <class F>
double brute_force_sigma_mean(const LemniscateParams& p, F f, int grid = 800) {
  const double R = droplet_radius(p.d);
  const double h = 2 * R / grid;
  double total = 0;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const Complex w(p.t - R + (i + 0.5) * h, -R + (j + 0.5) * h);
      if (std::abs(w - p.t) >= R) continue;
      total += f(std::pow(w, 1.0 / p.d)) * h * h;
    }
  return total / (M_PI * R * R);
}

// ∫ log(1/|z - ζ|) dσ_V(ζ) by a midpoint grid in the z-plane.
double brute_force_log_potential(const LemniscateParams& p, Complex z, int grid = 1200) {
  const double extent = std::pow(p.t + droplet_radius(p.d), 1.0 / p.d);
  const double h = 2 * extent / grid;
  double total = 0;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const Complex w(-extent + (i + 0.5) * h, -extent + (j + 0.5) * h);
      if (!droplet_contains(p, w)) continue;
      const double r = std::abs(z - w);
      if (r < 1e-12) continue;
      total -= std::log(r) * equilibrium_density(p, w) * h * h;
    }
  return total;
}

}  // namespace

TEST(Params, Validation) {
  EXPECT_THROW((LemniscateParams{0, 0.5, 0}.validate()), DomainError);
  EXPECT_THROW((LemniscateParams{2, -0.1, 0}.validate()), DomainError);
  EXPECT_THROW((LemniscateParams{2, 0.5, -1.0}.validate()), DomainError);
  EXPECT_NO_THROW((LemniscateParams{2, 0.5, -0.5}.validate()));
}

TEST(Potential, Values) {
  EXPECT_DOUBLE_EQ(potential_value({1, 0, 0}, std::nullopt, Complex(2, 0)), 4.0);
  EXPECT_DOUBLE_EQ(potential_value({2, 1, 0}, std::nullopt, Complex(1, 0)), -1.0);
}

TEST(Potential, ChargeTermScalesWithN) {
  const LemniscateParams p{2, 0.5, 0.7};
  const Complex z(0.3, 0.4);
  const double base = potential_value({2, 0.5, 0}, std::nullopt, z);
  EXPECT_NEAR(potential_value(p, 10L, z), base - 2 * 0.7 / 10 * std::log(0.5), 1e-14);
}

TEST(Potential, DiscreteRotationSymmetry) {
  const LemniscateParams p{3, 0.7, 0.4};
  for (const Complex& z : random_points(100, 1.2, 3)) {
    EXPECT_NEAR(potential_value(p, 50L, z), potential_value(p, 50L, rotate(z, 3)), 1e-13);
    EXPECT_NEAR(equilibrium_density(p, z), equilibrium_density(p, rotate(z, 3)), 1e-13);
  }
}

TEST(Critical, Values) {
  EXPECT_DOUBLE_EQ(critical_t(4), 0.5);
  EXPECT_DOUBLE_EQ(critical_t(1), 1.0);
  EXPECT_NEAR(critical_t(2), 0.70710678118654752, 2e-16);
}

TEST(Regime, Classification) {
  EXPECT_EQ(regime({2, 0.75, 0}), Regime::MultiComponent);
  EXPECT_EQ(regime({3, 0.55, 0}), Regime::ConformalSingularity);
  EXPECT_EQ(regime({1, 1.0, 0}, 1e-12), Regime::Critical);
  EXPECT_EQ(regime({2, critical_t(2) * (1 + 1e-12), 0}), Regime::Critical);
  EXPECT_THROW(require_noncritical({1, 1.0, 0}, "test"), UnsupportedParameterError);
}

TEST(Droplet, Membership) {
  EXPECT_TRUE(droplet_contains({1, 0, 0}, Complex(0.5, 0)));
  EXPECT_FALSE(droplet_contains({2, 0.75, 0}, Complex(0, 0)));
  EXPECT_TRUE(droplet_contains({2, 0.65, 0}, Complex(0, 0)));
  EXPECT_FALSE(droplet_contains({1, 0, 0}, Complex(1.01, 0)));
}

TEST(Droplet, BoundaryOnUnitCircle) {
  for (const Complex& z : droplet_boundary({1, 0, 0}, 4)) EXPECT_NEAR(std::abs(z), 1.0, 1e-14);
}

TEST(Droplet, BoundaryResidual) {
  for (const LemniscateParams p : {LemniscateParams{2, 0.75, 0}, LemniscateParams{3, 0.4, 0}, LemniscateParams{4, 0.9, 0}})
    for (const Complex& z : droplet_boundary(p, 600)) EXPECT_LT(std::abs(droplet_residual(p, z)), 1e-12);
}

TEST(Droplet, ComponentsMatchEulerCharacteristic) {
  EXPECT_EQ(count_components(droplet_boundary({2, 0.75, 0}, 2000)), 2);
  for (const LemniscateParams p : {LemniscateParams{3, 0.6, 0}, LemniscateParams{3, 0.55, 0}, LemniscateParams{1, 0.4, 0},
                                   LemniscateParams{4, 0.8, 0}, LemniscateParams{2, 0.65, 0}})
    EXPECT_EQ(count_components(droplet_boundary(p, 1500)), euler_characteristic(p)) << p.d << ' ' << p.t;
}

TEST(EulerCharacteristic, Values) {
  EXPECT_EQ(euler_characteristic({3, 0.6, 0}), 3);
  EXPECT_EQ(euler_characteristic({3, 0.55, 0}), 1);
  EXPECT_EQ(euler_characteristic({1, 0.3, 0}), 1);
  EXPECT_EQ(euler_characteristic({1, 2.0, 0}), 1);
  EXPECT_THROW(euler_characteristic({2, critical_t(2), 0}), UnsupportedParameterError);
}

TEST(Density, Values) {
  EXPECT_NEAR(equilibrium_density({1, 0, 0}, Complex(0.3, 0)), 1 / M_PI, 1e-15);
  EXPECT_EQ(equilibrium_density({2, 0.65, 0}, Complex(0, 0)), 0.0);
  EXPECT_EQ(equilibrium_density({2, 0.75, 0}, Complex(0, 0)), 0.0);
}

TEST(Density, MassNormalization) {
  for (const LemniscateParams p : {LemniscateParams{1, 0, 0}, LemniscateParams{1, 2.5, 0}, LemniscateParams{2, 0.5, 0},
                                   LemniscateParams{2, 1.0, 0}, LemniscateParams{3, 0.8, 0}, LemniscateParams{3, 0.3, 0},
                                   LemniscateParams{5, 0.2, 0}})
    EXPECT_NEAR(integrate_droplet(p, [&](Complex z) { return equilibrium_density(p, z); }), 1.0, 1e-8)
        << p.d << ' ' << p.t;
}

TEST(Density, MassByIndependentGrid) {
  const LemniscateParams p{2, 0.75, 0};
  const double extent = std::pow(p.t + droplet_radius(p.d), 0.5);
  const int grid = 1500;
  const double h = 2 * extent / grid;
  double mass = 0;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const Complex z(-extent + (i + 0.5) * h, -extent + (j + 0.5) * h);
      if (droplet_contains(p, z)) mass += equilibrium_density(p, z) * h * h;
    }
  EXPECT_NEAR(mass, 1.0, 2e-3);
}

TEST(Energy, ClosedFormValues) {
  EXPECT_NEAR(equilibrium_energy({1, 0, 0}).energy, 0.75, 1e-15);
  EXPECT_NEAR(equilibrium_energy({2, 0, 0}).energy, 3.0 / 8 + std::log(2.0) / 4, 1e-15);
}

TEST(Energy, QuadratureMatchesClosedForm) {
  for (const LemniscateParams p : {LemniscateParams{2, 1.0, 0}, LemniscateParams{3, 0.5, 0}, LemniscateParams{1, 0.4, 0}}) {
    const EnergyReport q = equilibrium_energy(p, Method::Quadrature);
    const EnergyReport c = equilibrium_energy(p, Method::ClosedForm);
    EXPECT_NEAR(q.energy, c.energy, 1e-8);
    EXPECT_NEAR(q.robin_constant, c.robin_constant, 1e-8);
    EXPECT_NEAR(q.energy, q.robin_constant + 0.5 * q.potential_mean, 1e-8);
  }
}

TEST(Energy, IndependentGridOracle) {
  // σ-mean of V by a midpoint grid in the w-disk.
  const LemniscateParams p{2, 1.0, 0};
  const double vmean = brute_force_sigma_mean(p, [&](Complex z) { return potential_value(p, std::nullopt, z); });
  EXPECT_NEAR(vmean, equilibrium_energy(p).potential_mean, 2e-4);
}

TEST(Variational, ConstantInsideLargerOutside) {
  for (const LemniscateParams p : {LemniscateParams{2, 1.0, 0}, LemniscateParams{3, 0.4, 0}}) {
    const double robin = equilibrium_energy(p).robin_constant;
    int inside = 0, outside = 0;
    for (const Complex& z : random_points(4000, 1.5, 17)) {
      const double v = log_potential(p, z, Method::Quadrature) + 0.5 * potential_value(p, std::nullopt, z);
      if (droplet_residual(p, z) < -1e-3 && inside < 20) {
        EXPECT_NEAR(v, robin, 1e-8);
        ++inside;
      } else if (droplet_residual(p, z) > 1e-3 && outside < 20) {
        EXPECT_GE(v, robin - 1e-8);
        ++outside;
      }
    }
    EXPECT_EQ(inside, 20);
    EXPECT_EQ(outside, 20);
  }
}

TEST(Variational, LogPotentialByBruteForce) {
  const LemniscateParams p{2, 1.0, 0};
  for (const Complex z : {Complex(1.0, 0.1), Complex(0.2, 0.9), Complex(1.6, -0.3)})
    EXPECT_NEAR(log_potential(p, z), brute_force_log_potential(p, z), 2e-3);
}

TEST(Entropy, Values) {
  EXPECT_EQ(entropy_integral({1, 0.3, 0}), 0.0);
  EXPECT_NEAR(entropy_integral({1, 1.8, 0}), 0.0, 1e-15);
  EXPECT_NEAR(entropy_integral({2, 1.0, 0}), 2 * std::log(2.0), 1e-15);
  EXPECT_NEAR(entropy_integral({3, 0.5, 0}, Method::Quadrature), entropy_integral({3, 0.5, 0}), 1e-6);
  EXPECT_NEAR(entropy_integral({2, 0.9, 0}, Method::Quadrature), entropy_integral({2, 0.9, 0}), 1e-6);
}

TEST(Entropy, IndependentGridOracle) {
  // ΔV = d²|z|^{2d-2}, so ∫ log(ΔV) dσ = 2 log d + 2(d-1) ∫ log|z| dσ.
  for (const LemniscateParams p : {LemniscateParams{3, 0.8, 0}, LemniscateParams{2, 0.4, 0}}) {
    const double d = p.d;
    const double k = brute_force_sigma_mean(p, [&](Complex z) { return std::log(std::abs(z)); }, 1200);
    EXPECT_NEAR(2 * std::log(d) + 2 * (d - 1) * k, entropy_integral(p), 2e-3);
  }
}

TEST(ConformalIntegral, TrivialForDiskPotential) {
  for (long n : {10L, 100L}) EXPECT_NEAR(regularized_conformal_integral({1, 0.3, 0}, n, 1.0).value, 0.0, 1e-12);
}

TEST(ConformalIntegral, LogCoefficient) {
  const auto r2 = regularized_conformal_integral({2, 0.5, 0}, 100, 1.0);
  EXPECT_NEAR(r2.fitted_log_coefficient, 1.0 / 24, 0.05 / 24);
  const auto r3 = regularized_conformal_integral({3, 0.3, 0}, 100, 1.0);
  EXPECT_NEAR(r3.fitted_log_coefficient, 4.0 / 36, 0.05 * 4 / 36);
}

TEST(ConformalIntegral, CutoffShiftIsConstant) {
  const LemniscateParams p{2, 0.5, 0};
  std::vector<double> shifts;
  // Once the cutoff disk lies well inside the droplet.
  for (long n : {10000L, 1000000L, 100000000L})
    shifts.push_back(regularized_conformal_integral(p, n, 2.0).value - regularized_conformal_integral(p, n, 1.0).value);
  EXPECT_NEAR(shifts[0], shifts[1], 1e-5);
  EXPECT_NEAR(shifts[1], shifts[2], 1e-5);
}

TEST(DropletDistance, ZeroInsidePositiveOutside) {
  const LemniscateParams p{2, 0.75, 0};
  const DropletDistance dist(p);
  EXPECT_EQ(dist(Complex(std::sqrt(0.75), 0)), 0.0);
  EXPECT_NEAR(dist(Complex(0, 0)), std::pow(0.75 - droplet_radius(2), 0.5), 1e-3);
}

TEST(Csv, BoundaryColumns) {
  std::ostringstream os;
  write_boundary_csv(os, {2, 0.75, 0}, 8);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "re,im,density");
}
