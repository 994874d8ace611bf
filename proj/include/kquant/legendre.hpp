#pragma once

#include <limits>
#include <vector>

#include "kquant/potential.hpp"

namespace kquant {

/// Convex function on the moment interval, stored as a piecewise linear
/// interpolant through (x_nodes, values). Outside [x_nodes.front(),
/// x_nodes.back()] the function is +infinity.
struct SymplecticProfile {
  Vector x_nodes;
  Vector values;

  double operator()(double x) const;
  Index size() const { return x_nodes.size(); }
};

inline constexpr double kPlusInfinity = std::numeric_limits<double>::infinity();

/// x log x + (1 - x) log(1 - x), the Legendre transform of psi0.
double psi0_star(double x);

/// Indices of the lower convex hull of (xs[k], ys[k]); xs strictly increasing.
/// Collinear interior points are dropped.
std::vector<Index> lower_hull(const Vector& xs, const Vector& ys);

/// Legendre transform of a convex profile sampled on the grid.
///
/// Nodes are the chord slopes of the profile's lower hull, where the transform
/// of the sampled profile is exact; between them it is linear. Throws
/// NonConvexInput when a second difference falls below -tol_convex.
SymplecticProfile legendre(const SGrid& grid, const Vector& profile, double tol_convex = 1e-10);

/// sup_x (s x - phi(x)) on the grid, by a monotone sweep over the hull of phi.
Vector legendre_inverse(const SymplecticProfile& phi, const SGrid& grid);

/// Geodesic between two potentials: the symplectic profiles are interpolated
/// linearly in t and transformed back.
ReducedPotential geodesic_point(const ReducedPotential& u0, const ReducedPotential& u1, double t);

/// Largest admissible potential below min(u, v): lower hull of
/// min(psi0 + u, psi0 + v) with slopes clipped to [0, 1], minus psi0.
ReducedPotential rooftop_envelope(const ReducedPotential& u, const ReducedPotential& v);

}  // namespace kquant
