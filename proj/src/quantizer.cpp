#include "kquant/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kquant {

namespace {

// rho_k exp(beta (v_k - u_k)), evaluated as exp(beta (v - u) + log rho).
Vector gibbs_density(const SGrid& grid, const Vector& v, const Vector& u, double beta) {
  return (beta * (v - u) + grid.log_density()).array().exp().matrix();
}

double sup_norm(const Vector& x) { return x.lpNorm<Eigen::Infinity>(); }

// Convex energy whose gradient (in the w-weighted pairing) is minus the residual.
double newton_energy(const SGrid& grid, const Vector& v, const Vector& gibbs, double beta) {
  const Vector& w = grid.weights();
  const Vector lv = laplacian(grid, v);
  double sum = 0.0;
  for (Index k = 0; k < v.size(); ++k) {
    sum += w[k] * (gibbs[k] / beta - v[k] * (grid.density()[k] + 0.5 * lv[k]));
  }
  return sum;
}

// Solves (L - diag(d)) x = rhs; the matrix is strictly diagonally dominant.
Vector solve_jacobian(const SGrid& grid, const Vector& d, const Vector& rhs) {
  const Index n = grid.size();
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  Vector c_prime(n);
  Vector x(n);
  auto sub = [&](Index k) { return (k == n - 1 ? 2.0 : 1.0) * inv_h2; };
  auto super = [&](Index k) { return (k == 0 ? 2.0 : 1.0) * inv_h2; };
  double denom = -2.0 * inv_h2 - d[0];
  c_prime[0] = super(0) / denom;
  x[0] = rhs[0] / denom;
  for (Index k = 1; k < n; ++k) {
    denom = -2.0 * inv_h2 - d[k] - sub(k) * c_prime[k - 1];
    c_prime[k] = (k + 1 < n) ? super(k) / denom : 0.0;
    x[k] = (rhs[k] - sub(k) * x[k - 1]) / denom;
  }
  for (Index k = n - 2; k >= 0; --k) x[k] -= c_prime[k] * x[k + 1];
  return x;
}

}  // namespace

Vector quantization_residual(const ReducedPotential& v, const ReducedPotential& u, double beta) {
  require_same_grid(v, u);
  const SGrid& grid = u.grid();
  return grid.density() + laplacian(grid, v.values()) - gibbs_density(grid, v.values(), u.values(), beta);
}

QuantizationResult quantize(const ReducedPotential& u, double beta, const NewtonOptions& options) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ErrorCode::PreconditionViolated, "beta must be positive");
  require_admissible(u, options.admissibility);
  const SGrid& grid = u.grid();
  const Vector& uu = u.values();
  const Vector& w = grid.weights();

  Vector v = uu;
  Vector gibbs = gibbs_density(grid, v, uu, beta);
  Vector residual = grid.density() + laplacian(grid, v) - gibbs;
  double res_sup = sup_norm(residual);
  double energy = newton_energy(grid, v, gibbs, beta);

  int iter = 0;
  int polished = 0;
  while (true) {
    if (res_sup <= options.tol) {
      if (polished >= options.polish_steps) break;
    }
    if (iter >= options.max_iters) {
      std::ostringstream msg;
      msg << "no convergence after " << iter << " iterations (residual " << res_sup << ", beta " << beta << ")";
      throw Error(ErrorCode::NewtonDiverged, msg.str());
    }
    ++iter;
    const Vector step = solve_jacobian(grid, beta * gibbs, -residual);
    const double step_sup = sup_norm(step);
    if (res_sup <= options.tol) {
      ++polished;
      if (step_sup <= options.polish_step) polished = options.polish_steps;
    }
    // Directional derivative of the energy along the step.
    const double slope = -(w.array() * residual.array() * step.array()).sum();

    double alpha = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving) {
      const Vector trial = v + alpha * step;
      const Vector trial_gibbs = gibbs_density(grid, trial, uu, beta);
      if (trial_gibbs.allFinite()) {
        const Vector trial_residual = grid.density() + laplacian(grid, trial) - trial_gibbs;
        const double trial_sup = sup_norm(trial_residual);
        const double trial_energy = newton_energy(grid, trial, trial_gibbs, beta);
        // Armijo on the energy; near convergence the energy decrease drowns in
        // rounding, and a residual decrease is accepted instead.
        const bool armijo = trial_energy <= energy + 1e-4 * alpha * slope;
        if (armijo || (alpha == 1.0 && trial_sup < res_sup) || (res_sup <= options.tol && alpha == 1.0)) {
          v = trial;
          gibbs = trial_gibbs;
          residual = trial_residual;
          res_sup = trial_sup;
          energy = trial_energy;
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (res_sup <= options.tol) break;
      std::ostringstream msg;
      msg << "line search exhausted at iteration " << iter << " (residual " << res_sup << ", beta " << beta << ")";
      throw Error(ErrorCode::NewtonDiverged, msg.str());
    }
  }

  QuantizationResult result{ReducedPotential(u.grid_ptr(), v), beta, res_sup, iter, res_sup <= options.tol};
  return result;
}

double JointConvexity::min_value() const { return std::min({min_d_ss, min_d_tt, min_det}); }

JointConvexity joint_convexity(const std::vector<ReducedPotential>& family, double dt) {
  if (family.size() < 3) throw Error(ErrorCode::PreconditionViolated, "joint convexity needs at least 3 slices");
  if (!(dt > 0.0)) throw Error(ErrorCode::PreconditionViolated, "time step must be positive");
  for (const auto& u : family) require_same_grid(family.front(), u);
  const SGrid& grid = family.front().grid();
  const Index n = grid.size();
  const double h = grid.spacing();
  const Vector& psi0 = grid.psi0();

  JointConvexity out;
  out.min_d_ss = out.min_d_tt = out.min_det = std::numeric_limits<double>::infinity();
  auto phi = [&](std::size_t j, Index k) { return psi0[k] + family[j][k]; };
  for (std::size_t j = 1; j + 1 < family.size(); ++j) {
    for (Index k = 1; k + 1 < n; ++k) {
      const double d_ss = (phi(j, k + 1) - 2.0 * phi(j, k) + phi(j, k - 1)) / (h * h);
      const double d_tt = (family[j + 1][k] - 2.0 * family[j][k] + family[j - 1][k]) / (dt * dt);
      const double d_st = (family[j + 1][k + 1] - family[j + 1][k - 1] - family[j - 1][k + 1] + family[j - 1][k - 1]) /
                          (4.0 * h * dt);
      out.min_d_ss = std::min(out.min_d_ss, d_ss);
      out.min_d_tt = std::min(out.min_d_tt, d_tt);
      out.min_det = std::min(out.min_det, d_ss * d_tt - d_st * d_st);
    }
  }
  return out;
}

QuantizedFamily quantized_family(const std::vector<ReducedPotential>& segment, double dt, double beta,
                                 const FamilyOptions& options) {
  QuantizedFamily out;
  out.input_check = joint_convexity(segment, dt);
  if (out.input_check.min_value() < -options.tol_input) {
    std::ostringstream msg;
    msg << "input family is not subgeodesic (min Hessian entry or determinant " << out.input_check.min_value() << ")";
    throw Error(ErrorCode::PreconditionViolated, msg.str());
  }
  std::vector<ReducedPotential> quantized;
  out.slices.reserve(segment.size());
  quantized.reserve(segment.size());
  for (const auto& u : segment) {
    out.slices.push_back(quantize(u, beta, options.newton));
    quantized.push_back(out.slices.back().u_beta);
  }
  out.output_check = joint_convexity(quantized, dt);
  return out;
}

}  // namespace kquant
