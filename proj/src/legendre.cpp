#include "kquant/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kquant {

double SymplecticProfile::operator()(double x) const {
  const Index n = x_nodes.size();
  if (n == 0 || x < x_nodes[0] || x > x_nodes[n - 1]) return kPlusInfinity;
  if (n == 1) return values[0];
  const double* begin = x_nodes.data();
  const double* it = std::upper_bound(begin, begin + n, x);
  Index j = static_cast<Index>(it - begin);
  if (j >= n) return values[n - 1];
  if (j == 0) return values[0];
  const double x0 = x_nodes[j - 1];
  const double x1 = x_nodes[j];
  const double lambda = (x - x0) / (x1 - x0);
  return (1.0 - lambda) * values[j - 1] + lambda * values[j];
}

double psi0_star(double x) {
  const auto xlogx = [](double y) { return y > 0.0 ? y * std::log(y) : 0.0; };
  return xlogx(x) + xlogx(1.0 - x);
}

std::vector<Index> lower_hull(const Vector& xs, const Vector& ys) {
  std::vector<Index> hull;
  hull.reserve(static_cast<std::size_t>(xs.size()));
  for (Index k = 0; k < xs.size(); ++k) {
    while (hull.size() >= 2) {
      const Index a = hull[hull.size() - 2];
      const Index b = hull.back();
      // Drop b unless it lies strictly below the chord from a to k.
      const double cross = (xs[b] - xs[a]) * (ys[k] - ys[a]) - (ys[b] - ys[a]) * (xs[k] - xs[a]);
      if (cross <= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(k);
  }
  return hull;
}

SymplecticProfile legendre(const SGrid& grid, const Vector& profile, double tol_convex) {
  const Index n = grid.size();
  if (profile.size() != n) throw Error(ErrorCode::GridMismatch, "profile size differs from grid");
  if (!profile.allFinite()) throw Error(ErrorCode::NonFinite, "profile has non-finite samples");
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  for (Index k = 1; k + 1 < n; ++k) {
    const double d2 = (profile[k + 1] - 2.0 * profile[k] + profile[k - 1]) * inv_h2;
    if (d2 < -tol_convex) {
      std::ostringstream msg;
      msg << "second difference " << d2 << " at s = " << grid[k];
      throw Error(ErrorCode::NonConvexInput, msg.str());
    }
  }
  const Vector& s = grid.abscissae();
  const std::vector<Index> hull = lower_hull(s, profile);
  SymplecticProfile out;
  out.x_nodes.resize(static_cast<Index>(hull.size()) - 1);
  out.values.resize(out.x_nodes.size());
  Index m = 0;
  for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
    const Index a = hull[e];
    const Index b = hull[e + 1];
    const double slope = (profile[b] - profile[a]) / (s[b] - s[a]);
    if (m > 0 && slope <= out.x_nodes[m - 1]) continue;
    out.x_nodes[m] = slope;
    out.values[m] = slope * s[a] - profile[a];
    ++m;
  }
  out.x_nodes.conservativeResize(m);
  out.values.conservativeResize(m);
  return out;
}

Vector legendre_inverse(const SymplecticProfile& phi, const SGrid& grid) {
  if (phi.size() == 0) throw Error(ErrorCode::LegendreFailure, "empty symplectic profile");
  const std::vector<Index> hull = lower_hull(phi.x_nodes, phi.values);
  const Index n = grid.size();
  Vector out(n);
  std::size_t j = 0;
  for (Index k = 0; k < n; ++k) {
    const double s = grid[k];
    auto line = [&](std::size_t i) { return s * phi.x_nodes[hull[i]] - phi.values[hull[i]]; };
    while (j + 1 < hull.size() && line(j + 1) >= line(j)) ++j;
    out[k] = line(j);
  }
  return out;
}

ReducedPotential geodesic_point(const ReducedPotential& u0, const ReducedPotential& u1, double t) {
  require_same_grid(u0, u1);
  const SGrid& grid = u0.grid();
  const SymplecticProfile p0 = legendre(grid, u0.profile());
  const SymplecticProfile p1 = legendre(grid, u1.profile());
  const double lo = std::max(p0.x_nodes[0], p1.x_nodes[0]);
  const double hi = std::min(p0.x_nodes[p0.size() - 1], p1.x_nodes[p1.size() - 1]);
  if (lo > hi) throw Error(ErrorCode::LegendreFailure, "symplectic profiles have disjoint domains");

  std::vector<double> nodes;
  nodes.reserve(static_cast<std::size_t>(p0.size() + p1.size()));
  for (const SymplecticProfile* p : {&p0, &p1}) {
    for (Index j = 0; j < p->size(); ++j) {
      if (p->x_nodes[j] >= lo && p->x_nodes[j] <= hi) nodes.push_back(p->x_nodes[j]);
    }
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  SymplecticProfile pt;
  pt.x_nodes.resize(static_cast<Index>(nodes.size()));
  pt.values.resize(pt.x_nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    pt.x_nodes[static_cast<Index>(j)] = nodes[j];
    pt.values[static_cast<Index>(j)] = (1.0 - t) * p0(nodes[j]) + t * p1(nodes[j]);
  }
  Vector psi = legendre_inverse(pt, grid);
  return ReducedPotential(u0.grid_ptr(), psi - grid.psi0());
}

ReducedPotential rooftop_envelope(const ReducedPotential& u, const ReducedPotential& v) {
  require_same_grid(u, v);
  const SGrid& grid = u.grid();
  const Index n = grid.size();
  const Vector& s = grid.abscissae();
  const Vector& psi0 = grid.psi0();
  Vector f(n);
  for (Index k = 0; k < n; ++k) f[k] = psi0[k] + std::min(u[k], v[k]);

  const std::vector<Index> hull = lower_hull(s, f);
  Vector g(n);
  for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
    const Index a = hull[e];
    const Index b = hull[e + 1];
    const double slope = (f[b] - f[a]) / (s[b] - s[a]);
    for (Index k = a; k < b; ++k) g[k] = f[a] + slope * (s[k] - s[a]);
  }
  g[n - 1] = f[n - 1];

  // Slopes below 0 become a flat floor, slopes above 1 a unit-slope ceiling.
  Index left = 0;
  for (Index k = 1; k < n; ++k) {
    if (g[k] < g[left]) left = k;
  }
  Index right = left;
  for (Index k = left; k < n; ++k) {
    if (g[k] - s[k] < g[right] - s[right]) right = k;
  }
  for (Index k = 0; k < left; ++k) g[k] = g[left];
  for (Index k = right + 1; k < n; ++k) g[k] = g[right] + (s[k] - s[right]);

  return ReducedPotential(u.grid_ptr(), g - psi0);
}

}  // namespace kquant
