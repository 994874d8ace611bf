#include "kquant/rays.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kquant {

GridPtr ray_grid(const std::vector<RayDirection>& directions, double t_max, double margin, double spacing) {
  if (!(spacing > 0.0) || !(margin > 0.0) || !(t_max >= 0.0)) {
    throw Error(ErrorCode::PreconditionViolated, "ray grid needs positive spacing and margin, t_max >= 0");
  }
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& d : directions) {
    lo = std::min(lo, d.min_slope());
    hi = std::max(hi, d.max_slope());
  }
  const double s_min = -margin + t_max * lo;
  const double s_max = margin + t_max * hi;
  const auto n = static_cast<Index>(std::ceil((s_max - s_min) / spacing)) + 1;
  return SGrid::make(s_min, s_max, n);
}

GeodesicRay::GeodesicRay(RayDirection direction, GridPtr grid, NewtonOptions newton)
    : direction_(std::move(direction)), grid_(std::move(grid)), newton_(newton) {}

const ReducedPotential& GeodesicRay::potential(double t) {
  auto it = potentials_.find(t);
  if (it == potentials_.end()) it = potentials_.emplace(t, symplectic_potential(direction_, t, grid_)).first;
  return it->second;
}

ReducedPotential GeodesicRay::normalized(double t) {
  const ReducedPotential& u = potential(t);
  return u - u.sup();
}

const QuantizationResult& GeodesicRay::quantized(double t, double beta) {
  const auto key = std::make_pair(t, beta);
  auto it = quantized_.find(key);
  if (it == quantized_.end()) it = quantized_.emplace(key, quantize(normalized(t), beta, newton_)).first;
  return it->second;
}

ReducedPotential ray_potential(const ToricTestConfig& cfg, double t, GridPtr grid) {
  return symplectic_potential(RayDirection::from(cfg), t, std::move(grid));
}

RadialFunctional parse_radial_functional(const std::string& name) {
  static const std::map<std::string, RadialFunctional> names{
      {"I", RadialFunctional::I},       {"mean", RadialFunctional::Mean},       {"J", RadialFunctional::J},
      {"I_chi", RadialFunctional::IChi}, {"J_chi", RadialFunctional::JChi},     {"sup", RadialFunctional::Sup},
      {"Ent", RadialFunctional::Entropy}, {"Ent_beta", RadialFunctional::EntBeta}, {"K", RadialFunctional::K},
      {"K_beta", RadialFunctional::KBeta}};
  const auto it = names.find(name);
  if (it == names.end()) throw Error(ErrorCode::ParseError, "unknown functional '" + name + "'");
  return it->second;
}

std::string to_string(RadialFunctional f) {
  switch (f) {
    case RadialFunctional::I: return "I";
    case RadialFunctional::Mean: return "mean";
    case RadialFunctional::J: return "J";
    case RadialFunctional::IChi: return "I_chi";
    case RadialFunctional::JChi: return "J_chi";
    case RadialFunctional::Sup: return "sup";
    case RadialFunctional::Entropy: return "Ent";
    case RadialFunctional::EntBeta: return "Ent_beta";
    case RadialFunctional::K: return "K";
    case RadialFunctional::KBeta: return "K_beta";
  }
  return "?";
}

std::vector<double> tail_times(double t_max, int n_samples) {
  if (!(t_max > 0.0) || n_samples < 2) throw Error(ErrorCode::PreconditionViolated, "need t_max > 0 and >= 2 samples");
  std::vector<double> t(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    t[static_cast<std::size_t>(i)] = 0.5 * t_max * std::pow(2.0, static_cast<double>(i) / (n_samples - 1));
  }
  t.back() = t_max;
  return t;
}

SlopeEstimate fit_slope(const std::vector<double>& t, const std::vector<double>& f, const SlopeOptions& options) {
  const std::size_t n = t.size();
  if (n < 3 || f.size() != n) throw Error(ErrorCode::PreconditionViolated, "slope fit needs >= 3 matching samples");
  double t_mean = 0.0;
  double f_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(f[i])) throw Error(ErrorCode::NonFinite, "non-finite functional value in slope fit");
    t_mean += t[i];
    f_mean += f[i];
  }
  t_mean /= static_cast<double>(n);
  f_mean /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (t[i] - t_mean) * (t[i] - t_mean);
    sxy += (t[i] - t_mean) * (f[i] - f_mean);
  }
  SlopeEstimate est;
  est.value = sxy / sxx;
  est.intercept = f_mean - est.value * t_mean;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = f[i] - est.intercept - est.value * t[i];
    ssr += r * r;
  }
  est.std_error = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  est.residual = std::sqrt(ssr / static_cast<double>(n));
  est.t_window = {*std::min_element(t.begin(), t.end()), *std::max_element(t.begin(), t.end())};
  est.samples = static_cast<int>(n);
  est.stable = est.residual <= options.max_residual;
  if (!est.stable && options.strict) {
    std::ostringstream msg;
    msg << "fit residual " << est.residual << " exceeds " << options.max_residual;
    throw Error(ErrorCode::SlopeUnstable, msg.str());
  }
  return est;
}

double functional_along(RadialFunctional f, GeodesicRay& ray, double t, double beta) {
  const bool quantized = f == RadialFunctional::EntBeta || f == RadialFunctional::KBeta;
  if (quantized && !(beta > 0.0)) throw Error(ErrorCode::PreconditionViolated, "quantized functional needs beta > 0");
  const ReducedPotential& u = ray.potential(t);
  switch (f) {
    case RadialFunctional::I: return energy_I(u);
    case RadialFunctional::Mean: return mean_value(u);
    case RadialFunctional::J: return energy_J(u);
    case RadialFunctional::IChi: return twisted_energy(u).first;
    case RadialFunctional::JChi: return twisted_energy(u).second;
    case RadialFunctional::Sup: return u.sup();
    case RadialFunctional::Entropy: return entropy(u);
    case RadialFunctional::K: return k_energy(u);
    case RadialFunctional::EntBeta: return ent_beta_from(ray.normalized(t), ray.quantized(t, beta));
    case RadialFunctional::KBeta: return k_beta_from(ray.normalized(t), ray.quantized(t, beta));
  }
  return 0.0;
}

namespace {

template <typename F>
SlopeEstimate tail_fit(F&& sample, const SlopeOptions& options) {
  auto fit_window = [&](double t_max, const SlopeOptions& opts) {
    const std::vector<double> times = tail_times(t_max, opts.n_samples);
    std::vector<double> values;
    values.reserve(times.size());
    for (double t : times) values.push_back(sample(t));
    return fit_slope(times, values, opts);
  };
  SlopeEstimate est = fit_window(options.t_max, options);
  if (options.estimate_drift) {
    SlopeOptions early = options;
    early.strict = false;
    est.drift = fit_window(0.5 * options.t_max, early).value - est.value;
  }
  return est;
}

}  // namespace

double SlopeEstimate::uncertainty() const { return std::hypot(std_error, drift); }

SlopeEstimate radial_slope(RadialFunctional f, GeodesicRay& ray, const SlopeOptions& options, double beta) {
  return tail_fit([&](double t) { return functional_along(f, ray, t, beta); }, options);
}

double l_beta_integrand(const ReducedPotential& v, const ReducedPotential& u, double beta) {
  require_same_grid(v, u);
  const SGrid& grid = u.grid();
  const Vector diff = v.values() - u.values();
  const double shift = diff.maxCoeff();
  const Vector& w = grid.weights();
  double sum = 0.0;
  for (Index k = 0; k < grid.size(); ++k) sum += w[k] * std::exp(beta * (diff[k] - shift) + grid.log_density()[k]);
  return -(std::log(sum / grid.volume()) + beta * shift);
}

LBetaEstimate l_beta_numeric(GeodesicRay& v_ray, GeodesicRay& u_ray, double beta, const SlopeOptions& options) {
  if (!(beta > 0.0)) throw Error(ErrorCode::PreconditionViolated, "beta must be positive");
  LBetaEstimate out;
  out.slope = tail_fit([&](double t) { return l_beta_integrand(v_ray.potential(t), u_ray.potential(t), beta); }, options);
  out.integral_threshold = out.slope.value;
  return out;
}

ChordalEstimate chordal_d1(GeodesicRay& a, GeodesicRay& b, double t_probe) {
  if (!(t_probe > 0.0)) throw Error(ErrorCode::PreconditionViolated, "t_probe must be positive");
  ChordalEstimate out;
  out.value = d1(a.potential(t_probe), b.potential(t_probe)) / t_probe;
  const double half = d1(a.potential(0.5 * t_probe), b.potential(0.5 * t_probe)) / (0.5 * t_probe);
  out.increment = out.value - half;
  return out;
}

std::vector<ProbeValue> radial_ent_beta_lower_probe(GeodesicRay& u_ray, double beta, std::vector<GeodesicRay*> trial_rays,
                                                    const SlopeOptions& options) {
  const SlopeEstimate i_u = radial_slope(RadialFunctional::I, u_ray, options);
  std::vector<ProbeValue> out;
  out.reserve(trial_rays.size());
  for (GeodesicRay* v : trial_rays) {
    const LBetaEstimate l = l_beta_numeric(*v, u_ray, beta, options);
    const SlopeEstimate i_v = radial_slope(RadialFunctional::I, *v, options);
    ProbeValue p;
    p.value = l.slope.value + beta * (i_v.value - i_u.value);
    const double su = i_u.uncertainty();
    const double sv = i_v.uncertainty();
    const double sl = l.slope.uncertainty();
    p.std_error = std::sqrt(sl * sl + beta * beta * (sv * sv + su * su));
    out.push_back(p);
  }
  return out;
}

StabilityReport stability_probe(const std::vector<ToricTestConfig>& configs, double beta, double gamma,
                                const SlopeOptions& options, double spacing) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::PreconditionViolated, "gamma must be positive");
  StabilityReport report;
  report.beta = beta;
  report.gamma = gamma;
  for (const auto& cfg : configs) {
    const RayDirection dir = RayDirection::from(cfg);
    GeodesicRay ray(dir, ray_grid({dir}, options.t_max, 40.0, spacing));
    StabilityEntry e;
    e.config = cfg.to_string();
    e.k_beta = radial_slope(RadialFunctional::KBeta, ray, options, beta);
    e.j = radial_slope(RadialFunctional::J, ray, options);
    e.std_error = std::hypot(e.k_beta.uncertainty(), gamma * e.j.uncertainty());
    e.satisfied = e.k_beta.value >= gamma * e.j.value - e.std_error;
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace kquant
