#pragma once

// Independent reference implementations used only by tests. None of them
// calls the library routine it checks.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kquant/potential.hpp"

namespace oracle {

using kquant::Index;
using kquant::Vector;

/// I(u) through the Dirichlet form: (1/V) [sum w u rho - (1/2) sum (du)^2 / h].
/// Equal to the library's <u, L u> form by summation by parts.
inline double energy_I(const kquant::ReducedPotential& u) {
  const auto& g = u.grid();
  double lin = 0.0;
  for (Index k = 0; k < g.size(); ++k) lin += g.weights()[k] * u[k] * g.density()[k];
  double dir = 0.0;
  for (Index k = 0; k + 1 < g.size(); ++k) {
    const double d = u[k + 1] - u[k];
    dir += d * d;
  }
  return (lin - 0.5 * dir / g.spacing()) / g.volume();
}

/// Largest function with slopes in [0, 1], convex, below f on the nodes:
/// g(x_i) = sup_{m in [0,1]} min_j (f_j + m (x_i - x_j)), by golden section
/// on the concave inner function of m.
inline Vector clipped_hull(const Vector& x, const Vector& f) {
  const Index n = x.size();
  Vector out(n);
  for (Index i = 0; i < n; ++i) {
    auto inner = [&](double m) {
      double v = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < n; ++j) v = std::min(v, f[j] + m * (x[i] - x[j]));
      return v;
    };
    double a = 0.0;
    double b = 1.0;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 90; ++it) {
      const double c = b - r * (b - a);
      const double d = a + r * (b - a);
      if (inner(c) < inner(d)) a = c; else b = d;
    }
    out[i] = std::max({inner(0.0), inner(1.0), inner(0.5 * (a + b))});
  }
  return out;
}

/// Rooftop envelope by the clipped-hull oracle.
inline Vector envelope(const kquant::ReducedPotential& u, const kquant::ReducedPotential& v) {
  const auto& g = u.grid();
  const Vector f = g.psi0() + u.values().cwiseMin(v.values());
  return clipped_hull(g.abscissae(), f) - g.psi0();
}

inline double d1(const kquant::ReducedPotential& u, const kquant::ReducedPotential& v) {
  const kquant::ReducedPotential p(u.grid_ptr(), envelope(u, v));
  return oracle::energy_I(u) + oracle::energy_I(v) - 2.0 * oracle::energy_I(p);
}

/// sup_s (s x - profile(s)) over the grid nodes.
inline double brute_legendre(const Vector& s, const Vector& profile, double x) {
  double best = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < s.size(); ++k) best = std::max(best, s[k] * x - profile[k]);
  return best;
}

/// (1/V) sum w log(mu / rho) mu, directly from second differences of psi.
inline double entropy(const kquant::ReducedPotential& u) {
  const auto& g = u.grid();
  const double h2 = g.spacing() * g.spacing();
  double sum = 0.0;
  for (Index k = 0; k < g.size(); ++k) {
    const double left = k > 0 ? u[k - 1] : u[1];
    const double right = k + 1 < g.size() ? u[k + 1] : u[g.size() - 2];
    const double mu = g.density()[k] + (left - 2.0 * u[k] + right) / h2;
    if (mu > 0.0) sum += g.weights()[k] * mu * std::log(mu / g.density()[k]);
  }
  return sum / g.volume();
}

}  // namespace oracle
