#include "kquant/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "json.hpp"

#include "kquant/legendre.hpp"

namespace kquant {

namespace {

double weighted_dot(const SGrid& grid, const Vector& a, const Vector& b) {
  const Vector& w = grid.weights();
  double sum = 0.0;
  for (Index k = 0; k < grid.size(); ++k) sum += w[k] * a[k] * b[k];
  return sum;
}

void require_finite(const ReducedPotential& u) {
  if (!u.values().allFinite()) throw Error(ErrorCode::NonFinite, "potential has non-finite samples");
}

}  // namespace

double energy_I(const ReducedPotential& u) {
  require_finite(u);
  const SGrid& grid = u.grid();
  const Vector& v = u.values();
  return (weighted_dot(grid, v, grid.density()) + 0.5 * weighted_dot(grid, v, laplacian(grid, v))) / grid.volume();
}

double mean_value(const ReducedPotential& u) {
  require_finite(u);
  return integrate(u.values(), background_measure(u.grid_ptr())) / u.grid().volume();
}

double energy_J(const ReducedPotential& u) { return mean_value(u) - energy_I(u); }

std::pair<double, double> twisted_energy(const ReducedPotential& u) {
  const double i_chi = kChiBar * mean_value(u);
  return {i_chi, kDimension * i_chi - kChiBar * energy_I(u)};
}

EntropyDiagnostics entropy_diagnostics(const ReducedPotential& u, const EntropyOptions& options) {
  require_finite(u);
  const SGrid& grid = u.grid();
  const Vector mu = ma_density(u);
  const Vector& w = grid.weights();
  const Vector& log_rho = grid.log_density();
  EntropyDiagnostics out;
  double sum = 0.0;
  for (Index k = 0; k < grid.size(); ++k) {
    const double m = std::max(mu[k], 0.0);
    const double cell = w[k] * m;
    if (cell > out.max_cell_mass) {
      out.max_cell_mass = cell;
      out.max_cell = k;
    }
    if (m > 0.0) sum += cell * (std::log(m) - log_rho[k]);
  }
  out.concentrated = out.max_cell_mass > options.concentration_threshold;
  out.value = out.concentrated ? kInfiniteEntropy : sum / grid.volume();
  return out;
}

double entropy(const ReducedPotential& u, const EntropyOptions& options) { return entropy_diagnostics(u, options).value; }

double ent_beta_from(const ReducedPotential& u, const QuantizationResult& q) {
  return q.beta * (energy_I(q.u_beta) - energy_I(u));
}

double ent_beta(const ReducedPotential& u, double beta, const NewtonOptions& options) {
  return ent_beta_from(u, quantize(u, beta, options));
}

std::vector<double> ent_beta_sup_probe(const ReducedPotential& u, double beta, const std::vector<ReducedPotential>& trial_vs) {
  if (!(beta > 0.0)) throw Error(ErrorCode::PreconditionViolated, "beta must be positive");
  const double i_u = energy_I(u);
  const SGrid& grid = u.grid();
  const Vector& w = grid.weights();
  std::vector<double> out;
  out.reserve(trial_vs.size());
  for (const auto& v : trial_vs) {
    require_same_grid(u, v);
    require_finite(v);
    const Vector diff = v.values() - u.values();
    const double shift = diff.maxCoeff();
    double sum = 0.0;
    for (Index k = 0; k < grid.size(); ++k) sum += w[k] * grid.density()[k] * std::exp(beta * (diff[k] - shift));
    const double log_mean = std::log(sum / grid.volume()) + beta * shift;
    if (!std::isfinite(log_mean)) throw Error(ErrorCode::NonFinite, "exponential moment is not finite");
    out.push_back(-log_mean + beta * (energy_I(v) - i_u));
  }
  return out;
}

double k_energy(const ReducedPotential& u, const EntropyOptions& options) {
  return entropy(u, options) - twisted_energy(u).second;
}

double k_beta_from(const ReducedPotential& u, const QuantizationResult& q) {
  return ent_beta_from(u, q) - twisted_energy(u).second;
}

double k_beta(const ReducedPotential& u, double beta, const NewtonOptions& options) {
  return k_beta_from(u, quantize(u, beta, options));
}

double d1(const ReducedPotential& u, const ReducedPotential& v) {
  require_same_grid(u, v);
  const ReducedPotential p = rooftop_envelope(u, v);
  return energy_I(u) + energy_I(v) - 2.0 * energy_I(p);
}

FunctionalReport functional_report(const ReducedPotential& u, double beta, const NewtonOptions& options,
                                   const EntropyOptions& entropy_options) {
  const QuantizationResult q = quantize(u, beta, options);
  FunctionalReport r;
  r.beta = beta;
  r.i_energy = energy_I(u);
  r.j_energy = energy_J(u);
  std::tie(r.i_twisted, r.j_twisted) = twisted_energy(u);
  r.entropy = entropy(u, entropy_options);
  r.ent_beta = ent_beta_from(u, q);
  r.k_energy = r.entropy - r.j_twisted;
  r.k_beta = r.ent_beta - r.j_twisted;
  r.residual_sup = q.residual_sup;
  r.newton_iters = q.newton_iters;
  r.converged = q.converged;
  return r;
}

std::string to_json(const FunctionalReport& r) {
  nlohmann::ordered_json j;
  auto number = [](double x) -> nlohmann::ordered_json {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
  };
  j["beta"] = r.beta;
  j["i_energy"] = number(r.i_energy);
  j["j_energy"] = number(r.j_energy);
  j["i_twisted"] = number(r.i_twisted);
  j["j_twisted"] = number(r.j_twisted);
  j["entropy"] = number(r.entropy);
  j["ent_beta"] = number(r.ent_beta);
  j["k_energy"] = number(r.k_energy);
  j["k_beta"] = number(r.k_beta);
  j["residual_sup"] = r.residual_sup;
  j["newton_iters"] = r.newton_iters;
  j["converged"] = r.converged;
  return j.dump();
}

}  // namespace kquant
