#include "kquant/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kquant {

ReducedPotential::ReducedPotential(GridPtr grid, Vector values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw Error(ErrorCode::GridMismatch, "potential without grid");
  if (values_.size() != grid_->size()) throw Error(ErrorCode::GridMismatch, "potential size differs from grid");
}

ReducedPotential ReducedPotential::zero(GridPtr grid) {
  const Index n = grid->size();
  return ReducedPotential(std::move(grid), Vector::Zero(n));
}

ReducedPotential ReducedPotential::constant(GridPtr grid, double c) {
  const Index n = grid->size();
  return ReducedPotential(std::move(grid), Vector::Constant(n, c));
}

std::pair<double, double> ReducedPotential::boundary_slopes() const {
  const Index n = size();
  const double h = grid_->spacing();
  return {(values_[1] - values_[0]) / h, (values_[n - 1] - values_[n - 2]) / h};
}

ReducedPotential ReducedPotential::operator+(double c) const {
  return ReducedPotential(grid_, (values_.array() + c).matrix());
}

ReducedPotential ReducedPotential::scaled(double factor) const { return ReducedPotential(grid_, values_ * factor); }

void require_same_grid(const ReducedPotential& u, const ReducedPotential& v) {
  if (u.grid_ptr() != v.grid_ptr() && !u.grid().same_as(v.grid())) {
    throw Error(ErrorCode::GridMismatch, "potentials live on different grids");
  }
}

Vector ma_density(const ReducedPotential& u) { return u.grid().density() + laplacian(u.grid(), u.values()); }

Measure1D ma_measure(const ReducedPotential& u) { return Measure1D(u.grid_ptr(), ma_density(u)); }

AdmissibilityReport check_admissible(const ReducedPotential& u) {
  AdmissibilityReport report;
  const Vector& v = u.values();
  report.finite = v.allFinite();
  if (!report.finite) return report;
  report.min_density = ma_density(u).minCoeff();
  const Vector psi = u.profile();
  const double h = u.grid().spacing();
  double lo = 1.0;
  double hi = 0.0;
  for (Index k = 0; k + 1 < psi.size(); ++k) {
    const double slope = (psi[k + 1] - psi[k]) / h;
    lo = std::min(lo, slope);
    hi = std::max(hi, slope);
  }
  report.min_slope = lo;
  report.max_slope = hi;
  const auto [left, right] = u.boundary_slopes();
  report.max_boundary_slope = std::max(std::abs(left), std::abs(right));
  return report;
}

void require_admissible(const ReducedPotential& u, const AdmissibilityOptions& options) {
  const AdmissibilityReport r = check_admissible(u);
  if (!r.finite) throw Error(ErrorCode::InadmissibleInput, "potential has non-finite samples");
  if (!r.admissible(options.tol_convex)) {
    std::ostringstream msg;
    msg << "potential is not omega-psh on the grid (min density " << r.min_density << ", slope range [" << r.min_slope
        << ", " << r.max_slope << "])";
    throw Error(ErrorCode::InadmissibleInput, msg.str());
  }
  if (r.max_boundary_slope > options.boundary_slope_bound) {
    std::ostringstream msg;
    msg << "potential is not flat at the grid ends (|u'| = " << r.max_boundary_slope << "); widen the grid";
    throw Error(ErrorCode::InadmissibleInput, msg.str());
  }
}

}  // namespace kquant
