#pragma once

// Double-precision quadrature rules used for droplet integrals.

#include <cmath>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace lemlab::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

inline Rule compute_gauss_legendre(int n) {
  Rule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    long double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    long double dp = 0;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (x * p1 - p0) / (x * x - 1);
      long double dx = p1 / dp;
      x -= dx;
      if (std::fabs(static_cast<double>(dx)) < 1e-19) break;
    }
    {
      long double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
    }
    const double w = static_cast<double>(2 / ((1 - x * x) * dp * dp));
    r.nodes[static_cast<std::size_t>(i)] = -static_cast<double>(x);
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = static_cast<double>(x);
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return r;
}

}  // namespace detail

// Gauss-Legendre rule on [-1, 1], cached per order.
inline const Rule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
  return it->second;
}

// ∫_a^b f(x) dx with an n-point Gauss-Legendre rule.
template <class F>
double integrate(F&& f, double a, double b, int n) {
  const Rule& r = gauss_legendre(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double s = 0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * half;
}

// ∫_0^{2π} f(θ) dθ for periodic f, n-point trapezoid rule.
template <class F>
double integrate_periodic(F&& f, int n) {
  const double h = 2 * M_PI / n;
  double s = 0;
  for (int i = 0; i < n; ++i) s += f(h * i);
  return s * h;
}

// Composite Gauss-Legendre on [a, b] split into `panels` equal pieces.
template <class F>
double integrate_composite(F&& f, double a, double b, int n, int panels) {
  const double w = (b - a) / panels;
  double s = 0;
  for (int p = 0; p < panels; ++p) s += integrate(f, a + p * w, a + (p + 1) * w, n);
  return s;
}

}  // namespace lemlab::quad
