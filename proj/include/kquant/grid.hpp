#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>

#include "kquant/error.hpp"

namespace kquant {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Uniform grid on the fiber coordinate s = log|z|^2 of the Riemann sphere.
///
/// The grid carries everything the reduced model needs from the ambient
/// (X, omega): the Fubini-Study profile psi0(s) = log(1 + e^s), its discrete
/// second difference rho (the background density omega against ds), the
/// trapezoid weights and the total volume V = sum_k w_k rho_k.
///
/// Second differences use ghost nodes: psi0 is extended analytically, offsets
/// are extended by reflection (zero Neumann data). With these conventions the
/// weighted sum of the discrete Laplacian of any offset vanishes exactly, so
/// every Monge-Ampere measure has total mass V.
class SGrid {
 public:
  SGrid(double s_min, double s_max, Index n_points);

  /// [-half_width, half_width] with n_points nodes (odd n puts s = 0 on a node).
  static std::shared_ptr<const SGrid> symmetric(double half_width = 40.0, Index n_points = 2001);
  static std::shared_ptr<const SGrid> make(double s_min, double s_max, Index n_points);

  double s_min() const { return s_min_; }
  double s_max() const { return s_max_; }
  Index size() const { return abscissae_.size(); }
  double spacing() const { return h_; }
  double volume() const { return volume_; }

  double operator[](Index k) const { return abscissae_[k]; }
  const Vector& abscissae() const { return abscissae_; }
  const Vector& weights() const { return weights_; }
  /// psi0(s_k).
  const Vector& psi0() const { return psi0_; }
  /// psi0'(s_k), the background moment map.
  const Vector& moment() const { return moment_; }
  /// Discrete second difference of psi0 (background density).
  const Vector& density() const { return density_; }
  const Vector& log_density() const { return log_density_; }

  bool same_as(const SGrid& other) const {
    return s_min_ == other.s_min_ && s_max_ == other.s_max_ && size() == other.size();
  }

 private:
  double s_min_;
  double s_max_;
  double h_;
  double volume_ = 0.0;
  Vector abscissae_;
  Vector weights_;
  Vector psi0_;
  Vector moment_;
  Vector density_;
  Vector log_density_;
};

using GridPtr = std::shared_ptr<const SGrid>;

/// log(1 + e^s) without overflow.
double softplus(double s);
/// 1 / (1 + e^-s).
double logistic(double s);

/// Samples of the full background profile psi0(s) = log(1 + e^s).
Vector background_psi0(const SGrid& grid);

/// Neumann discrete Laplacian of an offset vector.
template <typename Derived>
Vector laplacian(const SGrid& grid, const Eigen::MatrixBase<Derived>& u) {
  const Index n = grid.size();
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  Vector out(n);
  out[0] = 2.0 * (u[1] - u[0]) * inv_h2;
  for (Index k = 1; k + 1 < n; ++k) out[k] = (u[k + 1] - 2.0 * u[k] + u[k - 1]) * inv_h2;
  out[n - 1] = 2.0 * (u[n - 2] - u[n - 1]) * inv_h2;
  return out;
}

/// A nonnegative density against ds on a grid.
class Measure1D {
 public:
  Measure1D(GridPtr grid, Vector density);

  const SGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Vector& density() const { return density_; }
  double mass() const;

 private:
  GridPtr grid_;
  Vector density_;
};

/// omega on the grid.
Measure1D background_measure(GridPtr grid);

/// Trapezoid quadrature of f * density, summed left to right.
template <typename Derived>
double integrate(const Eigen::MatrixBase<Derived>& f, const Measure1D& mu) {
  const SGrid& grid = mu.grid();
  if (f.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "sample count differs from grid");
  const Vector& w = grid.weights();
  const Vector& d = mu.density();
  double sum = 0.0;
  for (Index k = 0; k < grid.size(); ++k) {
    const double term = w[k] * f[k] * d[k];
    if (!std::isfinite(f[k]) || !std::isfinite(d[k])) throw Error(ErrorCode::NonFinite, "non-finite sample in quadrature");
    sum += term;
  }
  return sum;
}

}  // namespace kquant
