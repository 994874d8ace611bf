#pragma once

#include <utility>

#include "kquant/grid.hpp"

namespace kquant {

/// S^1-invariant Kahler potential u, sampled on an SGrid.
///
/// The full convex profile is psi0 + u. Values are immutable; arithmetic
/// returns new potentials on the same grid.
class ReducedPotential {
 public:
  ReducedPotential(GridPtr grid, Vector values);

  static ReducedPotential zero(GridPtr grid);
  static ReducedPotential constant(GridPtr grid, double c);

  const SGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Vector& values() const { return values_; }
  Index size() const { return values_.size(); }
  double operator[](Index k) const { return values_[k]; }

  /// One-sided slopes of u at the two grid ends (0 for bounded potentials).
  std::pair<double, double> boundary_slopes() const;

  /// psi0 + u.
  Vector profile() const { return grid_->psi0() + values_; }

  double sup() const { return values_.maxCoeff(); }
  double inf() const { return values_.minCoeff(); }

  ReducedPotential operator+(double c) const;
  ReducedPotential operator-(double c) const { return *this + (-c); }
  /// Convex combination / scaling; admissibility is the caller's concern.
  ReducedPotential scaled(double factor) const;

 private:
  GridPtr grid_;
  Vector values_;
};

/// Throws GridMismatch unless both live on the same grid.
void require_same_grid(const ReducedPotential& u, const ReducedPotential& v);

/// Monge-Ampere density rho + L u of omega_u against ds.
Vector ma_density(const ReducedPotential& u);
Measure1D ma_measure(const ReducedPotential& u);

struct AdmissibilityReport {
  double min_density = 0.0;      // min_k (rho + L u)_k
  double min_slope = 0.0;        // min chord slope of psi0 + u
  double max_slope = 0.0;        // max chord slope of psi0 + u
  double max_boundary_slope = 0.0;  // |u'| at the grid ends
  bool finite = true;

  bool admissible(double tol) const {
    return finite && min_density >= -tol && min_slope >= -tol && max_slope <= 1.0 + tol;
  }
};

AdmissibilityReport check_admissible(const ReducedPotential& u);

struct AdmissibilityOptions {
  double tol_convex = 1e-10;
  /// Largest tolerated |u'| at the grid ends; larger means the potential is not
  /// flat there and the truncation is invalid.
  double boundary_slope_bound = 1e-6;
};

/// Throws InadmissibleInput when u fails the checks above.
void require_admissible(const ReducedPotential& u, const AdmissibilityOptions& options = {});

}  // namespace kquant
