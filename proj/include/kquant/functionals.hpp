#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "kquant/quantizer.hpp"

namespace kquant {

/// Model constants: dimension, scalar curvature average, and the average of
/// chi = Ric(omega) = 2 omega.
inline constexpr int kDimension = 1;
inline constexpr double kScalarCurvature = 2.0;
inline constexpr double kChiBar = 2.0;

/// Monge-Ampere energy (1/V) [<u, rho> + 1/2 <u, L u>].
double energy_I(const ReducedPotential& u);

/// (1/V) int u omega.
double mean_value(const ReducedPotential& u);

/// J(u) = (1/V) int u omega - I(u).
double energy_J(const ReducedPotential& u);

/// Twisted energies for chi = Ric(omega) = 2 omega: (I_chi, J_chi) with
/// J_chi = n I_chi - chi_bar I.
std::pair<double, double> twisted_energy(const ReducedPotential& u);

/// Infinite-entropy sentinel; compares greater than every finite value.
inline constexpr double kInfiniteEntropy = std::numeric_limits<double>::infinity();

struct EntropyOptions {
  /// A single cell carrying more omega_u-mass than this is treated as a point
  /// mass, and the entropy is reported as infinite.
  double concentration_threshold = 0.05;
};

struct EntropyDiagnostics {
  double value = 0.0;
  double max_cell_mass = 0.0;
  Index max_cell = 0;
  bool concentrated = false;
};

EntropyDiagnostics entropy_diagnostics(const ReducedPotential& u, const EntropyOptions& options = {});

/// Relative entropy (1/V) int log(omega_u / omega) omega_u, or kInfiniteEntropy.
double entropy(const ReducedPotential& u, const EntropyOptions& options = {});

/// beta (I(u^beta) - I(u)) from an already computed quantization.
double ent_beta_from(const ReducedPotential& u, const QuantizationResult& q);
double ent_beta(const ReducedPotential& u, double beta, const NewtonOptions& options = {});

/// -log (1/V) int exp(beta (v - u)) omega + beta (I(v) - I(u)) for each trial v.
std::vector<double> ent_beta_sup_probe(const ReducedPotential& u, double beta, const std::vector<ReducedPotential>& trial_vs);

/// Ent(u) - J_chi(u).
double k_energy(const ReducedPotential& u, const EntropyOptions& options = {});
double k_beta_from(const ReducedPotential& u, const QuantizationResult& q);
double k_beta(const ReducedPotential& u, double beta, const NewtonOptions& options = {});

/// d1(u, v) = I(u) + I(v) - 2 I(P(u, v)).
double d1(const ReducedPotential& u, const ReducedPotential& v);

struct FunctionalReport {
  double beta = 0.0;
  double i_energy = 0.0;
  double j_energy = 0.0;
  double i_twisted = 0.0;
  double j_twisted = 0.0;
  double entropy = 0.0;
  double ent_beta = 0.0;
  double k_energy = 0.0;
  double k_beta = 0.0;
  double residual_sup = 0.0;
  int newton_iters = 0;
  bool converged = false;
};

FunctionalReport functional_report(const ReducedPotential& u, double beta, const NewtonOptions& options = {},
                                   const EntropyOptions& entropy_options = {});

/// One flat JSON object with fixed key order.
std::string to_json(const FunctionalReport& report);

}  // namespace kquant
