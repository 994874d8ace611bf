#include "kquant/grid.hpp"

#include <string>

namespace kquant {

double softplus(double s) { return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s)); }

double logistic(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

namespace {

// (psi0(s+h) - 2 psi0(s) + psi0(s-h)) / h^2 together with its logarithm.
//
// For |s| >= h the linear part of psi0 cancels and the remaining
// log1p(e^-|s|) terms are expanded in y = e^-|s|, which keeps full relative
// precision in the exponentially small tails.
std::pair<double, double> background_second_difference(double s, double h) {
  const double a = std::abs(s);
  if (a < 1.0 || a < 2.0 * h) {
    const double d = (softplus(s + h) - 2.0 * softplus(s) + softplus(s - h)) / (h * h);
    return {d, std::log(d)};
  }
  const double y = std::exp(-a);
  // sum_n (-1)^(n+1) y^(n-1)/n * 4 sinh^2(n h / 2) / h^2
  double series = 0.0;
  double y_pow = 1.0;
  for (int n = 1; n < 400; ++n) {
    const double sh = std::sinh(0.5 * n * h);
    const double term = y_pow / n * 4.0 * sh * sh / (h * h);
    series += (n % 2 == 1) ? term : -term;
    if (term < 1e-18 * std::abs(series)) break;
    y_pow *= y;
  }
  return {y * series, -a + std::log(series)};
}

}  // namespace

SGrid::SGrid(double s_min, double s_max, Index n_points) : s_min_(s_min), s_max_(s_max) {
  if (!(s_min < 0.0 && 0.0 < s_max)) throw Error(ErrorCode::GridMismatch, "grid must satisfy s_min < 0 < s_max");
  if (n_points < 3) throw Error(ErrorCode::GridMismatch, "grid needs at least 3 points");
  h_ = (s_max - s_min) / static_cast<double>(n_points - 1);
  abscissae_.resize(n_points);
  weights_.setConstant(n_points, h_);
  weights_[0] = weights_[n_points - 1] = 0.5 * h_;
  psi0_.resize(n_points);
  moment_.resize(n_points);
  density_.resize(n_points);
  log_density_.resize(n_points);
  for (Index k = 0; k < n_points; ++k) {
    const double s = (k + 1 == n_points) ? s_max : s_min + h_ * static_cast<double>(k);
    abscissae_[k] = s;
    psi0_[k] = softplus(s);
    moment_[k] = logistic(s);
    const auto [d, log_d] = background_second_difference(s, h_);
    density_[k] = d;
    log_density_[k] = log_d;
  }
  double v = 0.0;
  for (Index k = 0; k < n_points; ++k) v += weights_[k] * density_[k];
  volume_ = v;
}

std::shared_ptr<const SGrid> SGrid::symmetric(double half_width, Index n_points) {
  return std::make_shared<const SGrid>(-half_width, half_width, n_points);
}

std::shared_ptr<const SGrid> SGrid::make(double s_min, double s_max, Index n_points) {
  return std::make_shared<const SGrid>(s_min, s_max, n_points);
}

Vector background_psi0(const SGrid& grid) { return grid.psi0(); }

Measure1D::Measure1D(GridPtr grid, Vector density) : grid_(std::move(grid)), density_(std::move(density)) {
  if (density_.size() != grid_->size()) throw Error(ErrorCode::GridMismatch, "density size differs from grid");
  for (Index k = 0; k < density_.size(); ++k) {
    if (!std::isfinite(density_[k])) throw Error(ErrorCode::NonFinite, "density sample " + std::to_string(k));
  }
}

double Measure1D::mass() const { return integrate(Vector::Ones(grid_->size()), *this); }

Measure1D background_measure(GridPtr grid) {
  Vector d = grid->density();
  return Measure1D(std::move(grid), std::move(d));
}

}  // namespace kquant
