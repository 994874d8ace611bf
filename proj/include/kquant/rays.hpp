#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kquant/functionals.hpp"
#include "kquant/toric.hpp"

namespace kquant {

/// Grid wide enough for every direction up to time t_max: the potentials stay
/// flat within `margin` of each end.
GridPtr ray_grid(const std::vector<RayDirection>& directions, double t_max, double margin = 40.0, double spacing = 0.04);

/// Geodesic ray t -> u_t with symplectic profile psi0* + t g.
///
/// Potentials and quantizations are cached per t and (t, beta). The cache is
/// not synchronized; use one ray object per thread.
class GeodesicRay {
 public:
  GeodesicRay(RayDirection direction, GridPtr grid, NewtonOptions newton = {});

  const RayDirection& direction() const { return direction_; }
  const GridPtr& grid() const { return grid_; }
  const NewtonOptions& newton_options() const { return newton_; }

  const ReducedPotential& potential(double t);
  /// Quantization of u_t - sup u_t.
  const QuantizationResult& quantized(double t, double beta);
  /// u_t - sup u_t, the sup-normalized representative.
  ReducedPotential normalized(double t);

 private:
  RayDirection direction_;
  GridPtr grid_;
  NewtonOptions newton_;
  std::map<double, ReducedPotential> potentials_;
  std::map<std::pair<double, double>, QuantizationResult> quantized_;
};

/// u_t for a toric test configuration on a grid from ray_grid.
ReducedPotential ray_potential(const ToricTestConfig& cfg, double t, GridPtr grid);

enum class RadialFunctional { I, Mean, J, IChi, JChi, Sup, Entropy, EntBeta, K, KBeta };

RadialFunctional parse_radial_functional(const std::string& name);
std::string to_string(RadialFunctional f);

struct SlopeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
  std::pair<double, double> t_window{0.0, 0.0};
  int samples = 0;
  /// Root mean square of the fit residuals.
  double residual = 0.0;
  bool stable = true;
  /// Slope over the window [t_max/4, t_max/2] minus the slope over
  /// [t_max/2, t_max]; a systematic tail-bias indicator that the LS stderr
  /// does not see. Zero when not estimated.
  double drift = 0.0;

  /// hypot(std_error, drift): the uncertainty used in comparisons.
  double uncertainty() const;
};

struct SlopeOptions {
  double t_max = 50.0;
  int n_samples = 9;
  /// Largest tolerated rms fit residual. Beyond it the estimate is marked
  /// unstable, and in strict mode SlopeUnstable is thrown.
  double max_residual = 2e-2;
  bool strict = true;
  /// Also fit the preceding window to fill SlopeEstimate::drift.
  bool estimate_drift = true;
};

/// Sample times geometrically spaced over [t_max/2, t_max].
std::vector<double> tail_times(double t_max, int n_samples);

/// Least-squares line through (t_i, f_i), checked against options.max_residual.
SlopeEstimate fit_slope(const std::vector<double>& t, const std::vector<double>& f, const SlopeOptions& options);

/// Value of a functional at u_t (beta only used by the quantized ones).
double functional_along(RadialFunctional f, GeodesicRay& ray, double t, double beta);

SlopeEstimate radial_slope(RadialFunctional f, GeodesicRay& ray, const SlopeOptions& options, double beta = 0.0);

/// -log (1/V) int exp(beta (v_t - u_t)) omega.
double l_beta_integrand(const ReducedPotential& v, const ReducedPotential& u, double beta);

struct LBetaEstimate {
  SlopeEstimate slope;
  /// Largest tau with int_0^infty e^{tau t} int e^{beta (v_t - u_t)} omega dt
  /// finite, read off the same tail fit.
  double integral_threshold = 0.0;
};

LBetaEstimate l_beta_numeric(GeodesicRay& v_ray, GeodesicRay& u_ray, double beta, const SlopeOptions& options);

struct ChordalEstimate {
  double value = 0.0;
  /// value(t_probe) - value(t_probe / 2); nonnegative for rays.
  double increment = 0.0;
};

ChordalEstimate chordal_d1(GeodesicRay& a, GeodesicRay& b, double t_probe);

struct ProbeValue {
  double value = 0.0;
  double std_error = 0.0;
};

/// L^beta(v, u) + beta (I-slope(v) - I-slope(u)) for each trial ray v.
std::vector<ProbeValue> radial_ent_beta_lower_probe(GeodesicRay& u_ray, double beta, std::vector<GeodesicRay*> trial_rays,
                                                    const SlopeOptions& options);

struct StabilityEntry {
  std::string config;
  SlopeEstimate k_beta;
  SlopeEstimate j;
  bool satisfied = false;
  /// Combined stderr used in the comparison K^beta >= gamma J.
  double std_error = 0.0;
};

struct StabilityReport {
  double beta = 0.0;
  double gamma = 0.0;
  std::vector<StabilityEntry> entries;
};

StabilityReport stability_probe(const std::vector<ToricTestConfig>& configs, double beta, double gamma,
                                const SlopeOptions& options, double spacing = 0.04);

}  // namespace kquant
