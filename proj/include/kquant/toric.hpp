#pragma once

#include <string>
#include <vector>

#include "kquant/potential.hpp"
#include "kquant/rational.hpp"

namespace kquant {

/// Piecewise linear convex function g on [0, 1] with rational data.
///
/// Piece j covers [breakpoints[j-1], breakpoints[j]] (with 0 and 1 at the
/// ends) and has slope slopes[j]; g(0) = g0. Text form:
///   breakpoints = [1/2]; slopes = [0, 1]; g0 = 0
/// Without g0 the constant is chosen so that min g = 0.
class ToricTestConfig {
 public:
  ToricTestConfig(std::vector<Rational> breakpoints, std::vector<Rational> slopes, Rational g0);
  /// Same, with g0 chosen so that min g = 0.
  ToricTestConfig(std::vector<Rational> breakpoints, std::vector<Rational> slopes);

  static ToricTestConfig parse(const std::string& text);
  static ToricTestConfig trivial();
  /// g(x) = slope x + g0.
  static ToricTestConfig affine(const Rational& slope, const Rational& g0 = 0);
  /// max(0, x - (1 - lambda)), the deformation to the normal cone of a point
  /// with parameter lambda in (0, 1).
  static ToricTestConfig normal_cone(const Rational& lambda);

  const std::vector<Rational>& breakpoints() const { return breakpoints_; }
  const std::vector<Rational>& slopes() const { return slopes_; }
  const Rational& g0() const { return g0_; }

  Rational value(const Rational& x) const;
  /// Values at 0, the breakpoints and 1.
  std::vector<Rational> vertex_values() const;
  Rational integral() const;
  Rational minimum() const;
  bool is_affine() const { return slopes_.size() == 1; }
  bool normalized() const { return minimum() == 0; }

  std::string to_string() const;

 private:
  std::vector<Rational> breakpoints_;
  std::vector<Rational> slopes_;
  Rational g0_;
};

/// Throws NonConvex unless slopes increase strictly across breakpoints, and
/// PreconditionViolated on malformed breakpoints.
void validate_toric(const std::vector<Rational>& breakpoints, const std::vector<Rational>& slopes);

/// Floating-point direction g = PL + p on [0, 1], with p a polynomial.
///
/// This covers toric test configurations (p = 0) as well as smooth symplectic
/// perturbations used for seed potentials and ray perturbations.
struct RayDirection {
  std::vector<double> breakpoints;
  std::vector<double> slopes{0.0};
  double g0 = 0.0;
  /// Monomial coefficients c_0 + c_1 x + ...
  std::vector<double> poly;

  static RayDirection from(const ToricTestConfig& cfg);
  static RayDirection polynomial(std::vector<double> coefficients);

  double operator()(double x) const;
  double derivative(double x) const;
  /// Smallest and largest value of g' on [0, 1].
  double min_slope() const;
  double max_slope() const;
  /// Smallest value of g'' of the polynomial part on [0, 1].
  double min_poly_curvature() const;
  double integral() const;
  double minimum() const;

  RayDirection scaled(double factor) const;
  RayDirection shifted(double c) const;
  /// Adds a polynomial perturbation.
  RayDirection plus_poly(const std::vector<double>& coefficients) const;
};

/// u(s) = sup_x (s x - psi0*(x) - t g(x)) - psi0(s), the offset of the
/// potential whose symplectic profile is psi0* + t g.
///
/// Evaluated as -min_x [KL(x | sigma(s)) + t g(x)] piece by piece, which keeps
/// full precision in the tails. Throws LegendreFailure if psi0* + t g is not
/// strictly convex.
ReducedPotential symplectic_potential(const RayDirection& g, double t, GridPtr grid);

}  // namespace kquant
