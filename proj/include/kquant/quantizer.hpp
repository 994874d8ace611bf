#pragma once

#include <vector>

#include "kquant/potential.hpp"

namespace kquant {

struct NewtonOptions {
  double tol = 1e-10;  // sup-norm of the discrete residual
  int max_iters = 100;
  int max_halvings = 30;
  /// Extra Newton steps after reaching tol, stopped once the update is below
  /// polish_step. Keeps translated inputs bitwise-close.
  int polish_steps = 4;
  double polish_step = 1e-13;
  AdmissibilityOptions admissibility{};
};

struct QuantizationResult {
  ReducedPotential u_beta;
  double beta = 0.0;
  double residual_sup = 0.0;
  int newton_iters = 0;
  bool converged = false;
};

/// Solves rho + L v = rho exp(beta (v - u)) for v = u^beta by damped Newton.
///
/// The step is the exact Newton direction; the damping is an Armijo backtracking
/// on the strictly convex energy whose gradient is minus the residual. Throws
/// InadmissibleInput and NewtonDiverged.
QuantizationResult quantize(const ReducedPotential& u, double beta, const NewtonOptions& options = {});

/// Residual rho + L v - rho exp(beta (v - u)) on the grid.
Vector quantization_residual(const ReducedPotential& v, const ReducedPotential& u, double beta);

/// Minimum over the interior (s, t) lattice of the discrete Hessian entries and
/// determinant of (s, t) -> psi0(s) + u_t(s). t is uniformly spaced with step dt.
struct JointConvexity {
  double min_d_ss = 0.0;
  double min_d_tt = 0.0;
  double min_det = 0.0;
  /// min(min_d_ss, min_d_tt, min_det); the value compared against -tol_psh.
  double min_value() const;
};

JointConvexity joint_convexity(const std::vector<ReducedPotential>& family, double dt);

struct FamilyOptions {
  /// Bound for the output check.
  double tol_psh = 1e-6;
  /// Bound for the input precondition. Looser than tol_psh because sampled
  /// geodesics carry rounding of order h^2 in their (s, t) determinant.
  double tol_input = 1e-4;
  NewtonOptions newton{};
};

struct QuantizedFamily {
  std::vector<QuantizationResult> slices;
  JointConvexity input_check;
  JointConvexity output_check;
};

/// Quantizes each slice of a subgeodesic segment. Throws PreconditionViolated
/// when the input family fails the joint convexity check.
QuantizedFamily quantized_family(const std::vector<ReducedPotential>& segment, double dt, double beta,
                                 const FamilyOptions& options = {});

}  // namespace kquant
