#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "kquant/corpus.hpp"
#include "kquant/divisorial.hpp"
#include "kquant/functionals.hpp"
#include "kquant/io.hpp"
#include "kquant/rays.hpp"

namespace kquant::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kDefaultSeed = 20240611;

Json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

Json exact(const Rational& r) {
  Json j;
  j["fraction"] = to_string(r);
  j["decimal"] = to_double(r);
  return j;
}

Json slope_json(const SlopeEstimate& s) {
  Json j;
  j["value"] = num(s.value);
  j["std_error"] = num(s.std_error);
  j["drift"] = num(s.drift);
  j["uncertainty"] = num(s.uncertainty());
  j["residual"] = num(s.residual);
  j["t_window"] = {s.t_window.first, s.t_window.second};
  j["samples"] = s.samples;
  j["stable"] = s.stable;
  return j;
}

std::string fmt(double x, int digits = 6) {
  std::ostringstream out;
  out << std::setprecision(digits) << x;
  return out.str();
}

struct Invariant {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct CaseResult {
  Json inputs = Json::object();
  Json outputs = Json::object();
  std::vector<Invariant> invariants;
  std::vector<std::string> files;
};

/// Shared, read-only state handed to each case.
struct CaseContext {
  fs::path output_dir;
  bool strict = false;
  std::uint64_t seed = kDefaultSeed;
};

struct Case {
  std::string name;
  std::function<CaseResult(const CaseContext&)> body;
};

using SeriesPoints = std::vector<std::pair<double, double>>;

std::string write_dat(const CaseContext& ctx, const std::string& name, const std::string& x, const std::string& y,
                      const SeriesPoints& pts) {
  write_series((ctx.output_dir / name).string(), x, y, pts);
  return name;
}

void check(CaseResult& r, const std::string& name, bool passed, const std::string& detail) {
  r.invariants.push_back({name, passed, detail});
}

// ---------------------------------------------------------------- specs

struct GridSpec {
  double half_width = 40.0;
  int n_points = 2001;
  GridPtr make() const { return SGrid::symmetric(half_width, n_points); }
};

GridSpec grid_spec(const ExperimentConfig& c) {
  GridSpec g;
  g.half_width = c.get_positive("grid.half_width", g.half_width);
  g.n_points = c.get_int("grid.n_points", g.n_points, 3);
  return g;
}

NewtonOptions newton_options(const ExperimentConfig& c) {
  NewtonOptions o;
  o.tol = c.get_positive("newton.tol", o.tol);
  o.max_iters = c.get_int("newton.max_iters", o.max_iters, 1);
  return o;
}

struct PotentialSpec {
  std::string source = "seed";
  double value = 0.0;
  std::string path;
  int count = 20;
};

PotentialSpec potential_spec(const ExperimentConfig& c, const std::string& fallback_source) {
  PotentialSpec p;
  p.source = c.get_string("potential.source", fallback_source);
  static const std::set<std::string> sources{"seed", "zero", "constant", "file", "corpus"};
  if (!sources.count(p.source)) {
    throw ConfigInvalid("potential.source", "unknown source '" + p.source + "' (seed, zero, constant, file, corpus)");
  }
  p.value = c.get_double("potential.value", 0.0);
  p.count = c.get_int("potential.count", p.count, 1);
  if (p.source == "file") {
    if (!c.has("potential.path")) throw ConfigInvalid("potential.path", "required when source = file");
    p.path = c.resolve_path(c.get_string("potential.path", ""));
    if (!fs::is_regular_file(p.path)) throw ConfigInvalid("potential.path", "file not found: " + p.path);
  }
  return p;
}

/// Named potentials for a spec; the corpus draws from `seed`.
std::vector<std::pair<std::string, std::function<ReducedPotential(GridPtr)>>> potential_sources(const PotentialSpec& p,
                                                                                                 std::uint64_t seed) {
  std::vector<std::pair<std::string, std::function<ReducedPotential(GridPtr)>>> out;
  if (p.source == "seed") {
    out.emplace_back("seed", [](GridPtr g) { return seed_bump(std::move(g)); });
  } else if (p.source == "zero") {
    out.emplace_back("zero", [](GridPtr g) { return ReducedPotential::zero(std::move(g)); });
  } else if (p.source == "constant") {
    const double c = p.value;
    out.emplace_back("constant", [c](GridPtr g) { return ReducedPotential::constant(std::move(g), c); });
  } else if (p.source == "file") {
    const std::string path = p.path;
    out.emplace_back("file", [path](GridPtr g) { return read_potential(path, std::move(g)); });
  } else {
    const int count = p.count;
    for (int i = 0; i < count; ++i) {
      std::ostringstream name;
      name << "corpus_" << std::setw(3) << std::setfill('0') << i;
      out.emplace_back(name.str(), [i, count, seed](GridPtr g) {
        CorpusOptions opts;
        opts.seed = seed;
        return seed_corpus(std::move(g), count, opts)[static_cast<std::size_t>(i)];
      });
    }
  }
  return out;
}

SlopeOptions slope_options(const ExperimentConfig& c) {
  SlopeOptions o;
  o.t_max = c.get_positive("slope.t_max", o.t_max);
  if (o.t_max < 10.0) throw ConfigInvalid("slope.t_max", "must be >= 10");
  o.n_samples = c.get_int("slope.n_samples", o.n_samples, 4);
  o.max_residual = c.get_positive("slope.max_residual", o.max_residual);
  return o;
}

struct RayGridSpec {
  double spacing = 0.04;
  double margin = 40.0;
};

RayGridSpec ray_grid_spec(const ExperimentConfig& c) {
  RayGridSpec r;
  r.spacing = c.get_positive("ray_grid.spacing", r.spacing);
  r.margin = c.get_positive("ray_grid.margin", r.margin);
  return r;
}

/// [rays] entries: name = toric text, or name = file:path.
std::vector<std::pair<std::string, ToricTestConfig>> ray_specs(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, ToricTestConfig>> out;
  for (const auto& name : c.section_keys("rays")) {
    const std::string key = "rays." + name;
    std::string text = c.get_string(key, "");
    if (text.rfind("file:", 0) == 0) {
      const std::string path = c.resolve_path(text.substr(5));
      std::ifstream in(path);
      if (!in) throw ConfigInvalid(key, "ray file not found: " + path);
      std::stringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    try {
      out.emplace_back(name, ToricTestConfig::parse(text));
    } catch (const Error& e) {
      throw ConfigInvalid(key, e.what());
    }
  }
  if (out.empty()) throw ConfigInvalid("rays", "at least one ray is required");
  return out;
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

double check_tol(const ExperimentConfig& c) { return c.get_positive("check.tol", 1e-6); }

// ---------------------------------------------------------------- plans

struct Plan {
  std::set<std::string> allowed_keys;
  std::set<std::string> open_sections;  // sections whose keys are free-form
  std::vector<Case> cases;
};

const std::set<std::string> kCommonKeys{"experiment", "output", "grid.half_width", "grid.n_points", "newton.tol",
                                        "newton.max_iters"};
const std::set<std::string> kPotentialKeys{"potential.source", "potential.value", "potential.path", "potential.count"};
const std::set<std::string> kSlopeKeys{"slope.t_max", "slope.n_samples", "slope.max_residual", "ray_grid.spacing",
                                       "ray_grid.margin"};

Plan plan_quantize_sweep(const ExperimentConfig& c, std::uint64_t seed) {
  Plan plan;
  plan.allowed_keys = kPotentialKeys;
  plan.allowed_keys.insert({"quantize.betas", "check.tol"});
  const GridSpec grid = grid_spec(c);
  const NewtonOptions newton = newton_options(c);
  const auto betas = sorted(c.get_positive_list("quantize.betas", {8, 32, 128, 512}));
  const double tol = check_tol(c);
  for (auto& [name, make] : potential_sources(potential_spec(c, "seed"), seed)) {
    plan.cases.push_back({name, [=, name = name, make = make](const CaseContext& ctx) {
      CaseResult r;
      const ReducedPotential u = make(grid.make());
      const double ent = entropy(u);
      r.inputs["potential"] = name;
      r.inputs["betas"] = betas;
      r.outputs["entropy"] = num(ent);
      Json per_beta = Json::array();
      SeriesPoints ent_curve;
      SeriesPoints d1_curve;
      std::vector<double> eb;
      std::vector<double> dist;
      bool sandwich = true;
      std::string sandwich_detail;
      for (double beta : betas) {
        const QuantizationResult q = quantize(u, beta, newton);
        const double e = ent_beta_from(u, q);
        const double lower = entropy(q.u_beta);
        const double d = d1(q.u_beta, u);
        eb.push_back(e);
        dist.push_back(d);
        ent_curve.emplace_back(beta, e);
        d1_curve.emplace_back(beta, d);
        if (!(lower - tol <= e && e <= ent + tol)) {
          sandwich = false;
          sandwich_detail = "beta=" + fmt(beta);
        }
        Json row;
        row["beta"] = beta;
        row["ent_beta"] = num(e);
        row["entropy_of_u_beta"] = num(lower);
        row["d1_u_beta_u"] = num(d);
        row["residual_sup"] = num(q.residual_sup);
        row["newton_iters"] = q.newton_iters;
        per_beta.push_back(row);
      }
      r.outputs["per_beta"] = per_beta;
      bool mono = true;
      bool ratio = true;
      bool d1_dec = true;
      for (std::size_t i = 1; i < betas.size(); ++i) {
        mono = mono && eb[i - 1] <= eb[i] + tol;
        ratio = ratio && eb[i] / betas[i] <= eb[i - 1] / betas[i - 1] + tol;
        d1_dec = d1_dec && dist[i] <= dist[i - 1] + tol;
      }
      check(r, "sandwich", sandwich, sandwich ? "Ent(u^b) <= Ent^b(u) <= Ent(u)" : "violated at " + sandwich_detail);
      check(r, "ent_beta_nondecreasing", mono, "beta -> Ent^beta(u)");
      check(r, "ent_beta_over_beta_nonincreasing", ratio, "beta -> Ent^beta(u)/beta");
      check(r, "d1_decreasing", d1_dec, "beta -> d1(u^beta, u)");
      // Translation equivariance at the first beta.
      const double shift = 0.75;
      const QuantizationResult a = quantize(u, betas.front(), newton);
      const QuantizationResult b = quantize(u + shift, betas.front(), newton);
      const double gap = ((b.u_beta.values().array() - a.u_beta.values().array()) - shift).abs().maxCoeff();
      r.outputs["translation_gap"] = num(gap);
      check(r, "translation_equivariance", gap <= 2.0 * newton.tol, "max |(u+c)^b - u^b - c| = " + fmt(gap, 3));
      r.files.push_back(write_dat(ctx, name + "_ent_beta.dat", "beta", "ent_beta", ent_curve));
      r.files.push_back(write_dat(ctx, name + "_d1.dat", "beta", "d1_u_beta_u", d1_curve));
      return r;
    }});
  }
  return plan;
}

Plan plan_functional_report(const ExperimentConfig& c, std::uint64_t seed) {
  Plan plan;
  plan.allowed_keys = kPotentialKeys;
  plan.allowed_keys.insert({"quantize.beta", "check.tol"});
  const GridSpec grid = grid_spec(c);
  const NewtonOptions newton = newton_options(c);
  const double beta = c.get_positive("quantize.beta", 32.0);
  const double tol = check_tol(c);
  for (auto& [name, make] : potential_sources(potential_spec(c, "zero"), seed)) {
    plan.cases.push_back({name, [=, name = name, make = make](const CaseContext&) {
      CaseResult r;
      const ReducedPotential u = make(grid.make());
      const FunctionalReport rep = functional_report(u, beta, newton);
      r.inputs["potential"] = name;
      r.inputs["beta"] = beta;
      r.outputs = Json::parse(to_json(rep));
      check(r, "entropy_nonnegative", rep.entropy >= -tol, "Ent = " + fmt(rep.entropy));
      check(r, "ent_beta_nonnegative", rep.ent_beta >= -tol, "Ent^b = " + fmt(rep.ent_beta));
      check(r, "ent_beta_below_entropy", rep.ent_beta <= rep.entropy + tol, "Ent^b <= Ent");
      check(r, "k_beta_below_k", rep.k_beta <= rep.k_energy + tol, "K^b <= K");
      check(r, "converged", rep.converged, "residual " + fmt(rep.residual_sup, 3));
      return r;
    }});
  }
  return plan;
}

Plan plan_ray_slope(const ExperimentConfig& c, std::uint64_t) {
  Plan plan;
  plan.allowed_keys = kSlopeKeys;
  plan.allowed_keys.insert({"slope.functionals", "slope.betas", "check.df_tolerance"});
  plan.open_sections.insert("rays");
  const auto rays = ray_specs(c);
  const SlopeOptions base = slope_options(c);
  const RayGridSpec rg = ray_grid_spec(c);
  const NewtonOptions newton = newton_options(c);
  std::vector<RadialFunctional> functionals;
  for (const auto& name : c.get_list("slope.functionals", {"I", "J", "Ent", "K", "K_beta"})) {
    try {
      functionals.push_back(parse_radial_functional(name));
    } catch (const Error& e) {
      throw ConfigInvalid("slope.functionals", e.what());
    }
  }
  const auto betas = sorted(c.get_positive_list("slope.betas", {8, 32, 128}));
  const double df_tol = c.get_positive("check.df_tolerance", 0.05);
  for (const auto& [name, cfg] : rays) {
    plan.cases.push_back({name, [=, name = name, cfg = cfg](const CaseContext& ctx) {
      CaseResult r;
      SlopeOptions opts = base;
      opts.strict = ctx.strict;
      const RayDirection dir = RayDirection::from(cfg);
      GeodesicRay ray(dir, ray_grid({dir}, opts.t_max, rg.margin, rg.spacing), newton);
      r.inputs["ray"] = cfg.to_string();
      r.inputs["t_max"] = opts.t_max;
      const Rational df = df_toric(cfg);
      r.outputs["df_toric"] = exact(df);
      r.outputs["integral_g"] = exact(cfg.integral());
      Json slopes = Json::object();
      const auto times = tail_times(opts.t_max, opts.n_samples);
      for (RadialFunctional f : functionals) {
        const bool quantized = f == RadialFunctional::EntBeta || f == RadialFunctional::KBeta;
        const std::vector<double> bs = quantized ? betas : std::vector<double>{0.0};
        for (double beta : bs) {
          const std::string label = to_string(f) + (quantized ? "_" + fmt(beta) : "");
          const SlopeEstimate s = radial_slope(f, ray, opts, beta);
          slopes[label] = slope_json(s);
          SeriesPoints curve;
          for (double t : times) curve.emplace_back(t, functional_along(f, ray, t, beta) / t);
          r.files.push_back(write_dat(ctx, name + "_" + label + ".dat", "t", label + "_over_t", curve));
          if (f == RadialFunctional::I) {
            const double expected = -to_double(cfg.integral());
            check(r, "I_slope_equals_minus_integral", std::abs(s.value - expected) <= 1e-4,
                  "slope " + fmt(s.value) + " vs " + fmt(expected));
          }
          if (f == RadialFunctional::K) {
            const double d = to_double(df);
            const double bound = d != 0.0 ? df_tol * std::abs(d) : s.uncertainty() + 1e-3;
            check(r, "K_slope_matches_df", std::abs(s.value - d) <= bound,
                  "slope " + fmt(s.value) + " vs DF " + to_string(df));
          }
          if (!s.stable) check(r, "fit_stable_" + label, !ctx.strict, "rms residual " + fmt(s.residual, 3));
        }
      }
      r.outputs["slopes"] = slopes;
      return r;
    }});
  }
  return plan;
}

Plan plan_l_beta_compare(const ExperimentConfig& c, std::uint64_t) {
  Plan plan;
  plan.allowed_keys = kSlopeKeys;
  plan.allowed_keys.insert({"l_beta.lambda", "l_beta.betas", "check.rel_tolerance", "check.abs_tolerance"});
  const Rational lambda = c.get_rational("l_beta.lambda", Rational(1, 2));
  if (!(lambda > 0 && lambda < 1)) throw ConfigInvalid("l_beta.lambda", "must lie in (0, 1)");
  const auto betas = c.get_positive_rational_list("l_beta.betas", {Rational(2), Rational(4)});
  const SlopeOptions base = slope_options(c);
  const RayGridSpec rg = ray_grid_spec(c);
  const double rel = c.get_positive("check.rel_tolerance", 0.05);
  const double abs_tol = c.get_positive("check.abs_tolerance", 0.05);
  struct Pair {
    std::string name;
    ToricTestConfig u;
    SncModelData snc;
  };
  const std::vector<Pair> pairs{
      {"trivial", ToricTestConfig::trivial(), SncModelData{{1}, {0}, {0}, {0}}},
      {"normal_cone", ToricTestConfig::normal_cone(lambda), normal_cone_snc(lambda, 0)},
  };
  for (const auto& pair : pairs) {
    for (const Rational& beta : betas) {
      const std::string name = pair.name + "_beta_" + to_string(beta);
      std::string file_name = name;
      std::replace(file_name.begin(), file_name.end(), '/', '_');
      plan.cases.push_back({name, [=](const CaseContext& ctx) {
        CaseResult r;
        SlopeOptions opts = base;
        opts.strict = ctx.strict;
        const double b = to_double(beta);
        const RayDirection du = RayDirection::from(pair.u);
        const RayDirection dv = RayDirection::from(ToricTestConfig::trivial());
        const GridPtr grid = ray_grid({du, dv}, opts.t_max, rg.margin, rg.spacing);
        GeodesicRay u_ray(du, grid);
        GeodesicRay v_ray(dv, grid);
        const LBetaEstimate est = l_beta_numeric(v_ray, u_ray, b, opts);
        const LBetaSnc snc = l_beta_snc(pair.snc, beta);
        const double exact_value = to_double(snc.value);
        r.inputs["u_ray"] = pair.u.to_string();
        r.inputs["v_ray"] = ToricTestConfig::trivial().to_string();
        r.inputs["beta"] = to_string(beta);
        r.outputs["l_beta_numeric"] = slope_json(est.slope);
        r.outputs["integral_threshold"] = num(est.integral_threshold);
        r.outputs["l_beta_snc"] = exact(snc.value);
        r.outputs["argmin"] = snc.argmin;
        const double err = std::abs(est.slope.value - exact_value);
        const bool ok = exact_value == 0.0 ? err <= abs_tol : err <= rel * std::abs(exact_value);
        check(r, "numeric_matches_snc", ok, "numeric " + fmt(est.slope.value) + " vs exact " + to_string(snc.value));
        if (!est.slope.stable) check(r, "fit_stable", !ctx.strict, "rms residual " + fmt(est.slope.residual, 3));
        SeriesPoints curve;
        for (double t : tail_times(opts.t_max, opts.n_samples)) {
          curve.emplace_back(t, l_beta_integrand(v_ray.potential(t), u_ray.potential(t), b) / t);
        }
        r.files.push_back(write_dat(ctx, file_name + "_l_beta.dat", "t", "l_beta_integrand_over_t", curve));
        return r;
      }});
    }
  }
  return plan;
}

Plan plan_stability_scan(const ExperimentConfig& c, std::uint64_t) {
  Plan plan;
  plan.allowed_keys = kSlopeKeys;
  plan.allowed_keys.insert({"stability.beta", "stability.gamma"});
  plan.open_sections.insert("rays");
  const auto rays = ray_specs(c);
  const SlopeOptions base = slope_options(c);
  const RayGridSpec rg = ray_grid_spec(c);
  const double beta = c.get_positive("stability.beta", 8.0);
  const double gamma = c.get_positive("stability.gamma", 0.05);
  for (const auto& [name, cfg] : rays) {
    plan.cases.push_back({name, [=, name = name, cfg = cfg](const CaseContext& ctx) {
      CaseResult r;
      SlopeOptions opts = base;
      opts.strict = ctx.strict;
      const StabilityReport rep = stability_probe({cfg}, beta, gamma, opts, rg.spacing);
      const StabilityEntry& e = rep.entries.front();
      r.inputs["ray"] = e.config;
      r.inputs["beta"] = beta;
      r.inputs["gamma"] = gamma;
      r.outputs["k_beta_slope"] = slope_json(e.k_beta);
      r.outputs["j_slope"] = slope_json(e.j);
      r.outputs["combined_uncertainty"] = num(e.std_error);
      r.outputs["satisfied"] = e.satisfied;
      const bool trivial = cfg.is_affine() && cfg.slopes().front() == 0;
      if (cfg.is_affine() && !trivial) {
        check(r, "product_violates", !e.satisfied && e.j.value > 0.01,
              "K^b " + fmt(e.k_beta.value) + ", J " + fmt(e.j.value));
      } else if (trivial) {
        check(r, "trivial_satisfied", e.satisfied, "K^b " + fmt(e.k_beta.value) + ", J " + fmt(e.j.value));
      }
      return r;
    }});
  }
  return plan;
}

SncModelData snc_spec(const ExperimentConfig& c) {
  SncModelData d;
  auto list = [&](const char* k) {
    const std::string key = std::string("snc.") + k;
    if (!c.has(key)) throw ConfigInvalid(key, "required");
    try {
      return parse_rational_list(c.get_string(key, ""));
    } catch (const Error& e) {
      throw ConfigInvalid(key, e.what());
    }
  };
  d.a = list("a");
  d.b = list("b");
  d.c = list("c");
  d.d = list("d");
  try {
    d.validate();
  } catch (const Error& e) {
    throw ConfigInvalid("snc", e.what());
  }
  return d;
}

Plan plan_snc_eval(const ExperimentConfig& c, std::uint64_t) {
  Plan plan;
  plan.allowed_keys = {"snc.a", "snc.b", "snc.c", "snc.d", "snc.betas"};
  for (const char* k : {"lbar_pow", "lbar_prime_pow", "kx_dot_lbar", "sbar", "v", "n"}) {
    plan.allowed_keys.insert(std::string("intersections.") + k);
  }
  const SncModelData snc = snc_spec(c);
  const auto betas = c.get_positive_rational_list("snc.betas", {Rational(4)});
  std::optional<IntersectionData> inter;
  if (!c.section_keys("intersections").empty()) {
    IntersectionData d;
    d.lbar_pow = c.get_rational("intersections.lbar_pow", d.lbar_pow);
    d.lbar_prime_pow = c.get_rational("intersections.lbar_prime_pow", d.lbar_prime_pow);
    d.kx_dot_lbar = c.get_rational("intersections.kx_dot_lbar", d.kx_dot_lbar);
    d.sbar = c.get_rational("intersections.sbar", d.sbar);
    d.v = c.get_rational("intersections.v", d.v);
    if (!(d.v > 0)) throw ConfigInvalid("intersections.v", "must be positive");
    d.n = c.get_int("intersections.n", d.n, 1);
    inter = d;
  }
  plan.cases.push_back({"snc", [=](const CaseContext&) {
    CaseResult r;
    auto fractions = [](const std::vector<Rational>& v) {
      Json j = Json::array();
      for (const auto& x : v) j.push_back(to_string(x));
      return j;
    };
    r.inputs["a"] = fractions(snc.a);
    r.inputs["b"] = fractions(snc.b);
    r.inputs["c"] = fractions(snc.c);
    r.inputs["d"] = fractions(snc.d);
    Json rows = Json::array();
    std::vector<Rational> values;
    for (const Rational& beta : betas) {
      const LBetaSnc l = l_beta_snc(snc, beta);
      const Rational lct = lct_shift(snc, beta);
      values.push_back(l.value);
      Json row;
      row["beta"] = to_string(beta);
      row["l_beta"] = exact(l.value);
      row["argmin"] = l.argmin;
      row["lct_shift"] = exact(lct);
      if (inter) {
        row["i_slope_difference"] = exact(i_slope_from_intersections(*inter));
        row["j_ric_slope"] = exact(j_ric_slope_from_intersections(*inter));
        row["k_beta_candidate"] = exact(k_beta_tc_candidate(snc, *inter, beta));
      }
      rows.push_back(row);
      check(r, "lct_equals_min_formula_beta_" + to_string(beta), lct == l.value,
            "L^beta = " + to_string(l.value) + ", lct - 1 = " + to_string(lct));
    }
    r.outputs["per_beta"] = rows;
    bool concave = true;
    for (std::size_t i = 0; i < betas.size(); ++i) {
      for (std::size_t j = i + 1; j < betas.size(); ++j) {
        const Rational mid = l_beta_snc(snc, (betas[i] + betas[j]) / 2).value;
        concave = concave && mid * 2 >= values[i] + values[j];
      }
    }
    check(r, "concave_in_beta", concave, "exact midpoint test");
    return r;
  }});
  return plan;
}

SncModelData random_snc(std::mt19937_64& rng) {
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
  SncModelData d;
  const int m = pick(1, 6);
  for (int i = 0; i < m; ++i) {
    d.a.emplace_back(pick(1, 5));
    d.b.emplace_back(pick(-8, 8), pick(1, 6));
    d.c.emplace_back(pick(-8, 8), pick(1, 6));
    d.d.emplace_back(pick(0, 9), pick(1, 4));
  }
  return d;
}

Plan plan_invariant_suite(const ExperimentConfig& c, std::uint64_t seed) {
  Plan plan;
  plan.allowed_keys = {"potential.count", "quantize.betas", "fuzz.cases", "check.tol"};
  const GridSpec grid = grid_spec(c);
  const NewtonOptions newton = newton_options(c);
  const int count = c.get_int("potential.count", 20, 1);
  const auto betas = sorted(c.get_positive_list("quantize.betas", {1, 8, 32, 128, 512}));
  const int fuzz_cases = c.get_int("fuzz.cases", 100, 1);
  const double tol = check_tol(c);
  PotentialSpec ps;
  ps.source = "corpus";
  ps.count = count;
  for (auto& [name, make] : potential_sources(ps, seed)) {
    plan.cases.push_back({name, [=, make = make](const CaseContext&) {
      CaseResult r;
      const ReducedPotential u = make(grid.make());
      // A lower competitor u - 0.1 sigma, admissible by the corpus density margin.
      Vector dip = u.values();
      for (Index k = 0; k < dip.size(); ++k) dip[k] -= 0.1 * logistic(u.grid()[k]);
      const ReducedPotential v(u.grid_ptr(), dip);
      const double ent = entropy(u);
      const double norm = d1(ReducedPotential::zero(u.grid_ptr()), u);
      r.inputs["sup"] = num(u.sup());
      r.outputs["entropy"] = num(ent);
      double prev = -1.0;
      double prev_ratio = 0.0;
      bool all_sandwich = true;
      bool all_mono = true;
      bool all_ratio = true;
      bool all_pc0 = true;
      bool all_norm = true;
      double worst_translation = 0.0;
      double worst_comparison = 0.0;
      Json rows = Json::array();
      for (double beta : betas) {
        const QuantizationResult q = quantize(u, beta, newton);
        const QuantizationResult qs = quantize(u - 0.5, beta, newton);
        const QuantizationResult qv = quantize(v, beta, newton);
        worst_translation = std::max(
            worst_translation, ((qs.u_beta.values().array() - q.u_beta.values().array()) + 0.5).abs().maxCoeff());
        worst_comparison = std::max(worst_comparison, (qv.u_beta.values() - q.u_beta.values()).maxCoeff());
        const double e = ent_beta_from(u, q);
        const double d = d1(q.u_beta, u);
        all_sandwich = all_sandwich && entropy(q.u_beta) - tol <= e && e <= ent + tol;
        if (prev >= 0.0) {
          all_mono = all_mono && prev <= e + 1e-8;
          all_ratio = all_ratio && e / beta <= prev_ratio + 1e-8;
        }
        prev = e;
        prev_ratio = e / beta;
        all_pc0 = all_pc0 && e / beta <= d + 1e-8;
        all_norm = all_norm && d1(ReducedPotential::zero(u.grid_ptr()), q.u_beta) <= norm + tol;
        Json row;
        row["beta"] = beta;
        row["ent_beta"] = num(e);
        row["d1_u_beta_u"] = num(d);
        rows.push_back(row);
      }
      r.outputs["per_beta"] = rows;
      check(r, "translation_equivariance", worst_translation <= 2.0 * newton.tol, fmt(worst_translation, 3));
      check(r, "comparison_principle", worst_comparison <= 2.0 * newton.tol, fmt(worst_comparison, 3));
      check(r, "sandwich", all_sandwich, "Ent(u^b) <= Ent^b(u) <= Ent(u)");
      check(r, "ent_beta_nondecreasing", all_mono, "within 1e-8");
      check(r, "ent_beta_over_beta_nonincreasing", all_ratio, "within 1e-8");
      check(r, "pc0_lower", all_pc0, "Ent^b/b <= d1(u^b, u)");
      check(r, "norm_contraction", all_norm, "d1(0, u^b) <= d1(0, u)");
      return r;
    }});
  }
  plan.cases.push_back({"exact_fuzz", [=](const CaseContext&) {
    CaseResult r;
    std::mt19937_64 rng(seed);
    int lct_equal = 0;
    int concave = 0;
    for (int i = 0; i < fuzz_cases; ++i) {
      const SncModelData d = random_snc(rng);
      const Rational beta(static_cast<long long>(1 + rng() % 16), static_cast<long long>(1 + rng() % 4));
      if (l_beta_snc(d, beta).value == lct_shift(d, beta)) ++lct_equal;
      const Rational b1 = beta / 2;
      const Rational b2 = beta * 2;
      if (2 * l_beta_snc(d, (b1 + b2) / 2).value >= l_beta_snc(d, b1).value + l_beta_snc(d, b2).value) ++concave;
    }
    r.inputs["cases"] = fuzz_cases;
    r.inputs["seed"] = seed;
    r.outputs["lct_equal"] = lct_equal;
    r.outputs["concave"] = concave;
    check(r, "lct_equals_min_formula", lct_equal == fuzz_cases, std::to_string(lct_equal) + "/" + std::to_string(fuzz_cases));
    check(r, "concave_in_beta", concave == fuzz_cases, std::to_string(concave) + "/" + std::to_string(fuzz_cases));
    return r;
  }});
  return plan;
}

using Planner = Plan (*)(const ExperimentConfig&, std::uint64_t);

const std::vector<std::pair<std::string, Planner>>& planners() {
  static const std::vector<std::pair<std::string, Planner>> p{
      {"quantize-sweep", plan_quantize_sweep}, {"functional-report", plan_functional_report},
      {"ray-slope", plan_ray_slope},           {"l-beta-compare", plan_l_beta_compare},
      {"stability-scan", plan_stability_scan}, {"snc-eval", plan_snc_eval},
      {"invariant-suite", plan_invariant_suite}};
  return p;
}

std::uint64_t config_seed(const ExperimentConfig& c, const std::optional<std::uint64_t>& override_seed) {
  if (override_seed) return *override_seed;
  const double s = c.get_double("seed", static_cast<double>(kDefaultSeed));
  if (s < 0 || s != std::floor(s) || s > 9e15) throw ConfigInvalid("seed", "must be a nonnegative integer");
  return static_cast<std::uint64_t>(s);
}

Plan make_plan(const ExperimentConfig& c, std::uint64_t seed) {
  for (const auto& [name, planner] : planners()) {
    if (name != c.experiment()) continue;
    Plan plan = planner(c, seed);
    for (const auto& [key, value] : c.parameters()) {
      if (kCommonKeys.count(key) || plan.allowed_keys.count(key) || key == "seed") continue;
      const auto dot = key.find('.');
      if (dot != std::string::npos && plan.open_sections.count(key.substr(0, dot))) continue;
      throw ConfigInvalid(key, "unknown key for experiment '" + c.experiment() + "'");
    }
    return plan;
  }
  throw ConfigInvalid("experiment", "unknown experiment '" + c.experiment() + "'");
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, planner] : planners()) out.push_back(name);
    return out;
  }();
  return names;
}

void validate(const ExperimentConfig& config) { make_plan(config, config_seed(config, std::nullopt)); }

RunSummary run(const ExperimentConfig& config, const RunOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const std::uint64_t seed = config_seed(config, options.seed);
  const Plan plan = make_plan(config, seed);
  RunSummary summary;
  summary.output_dir = !options.output_dir.empty() ? options.output_dir
                       : !config.output_dir().empty() ? config.output_dir()
                                                      : std::string("kquant-results");
  std::error_code ec;
  fs::create_directories(summary.output_dir, ec);
  if (ec || !fs::is_directory(summary.output_dir)) {
    throw ConfigInvalid("output", "cannot create output directory '" + summary.output_dir + "'");
  }
  CaseContext ctx;
  ctx.output_dir = summary.output_dir;
  ctx.strict = options.strict;
  ctx.seed = seed;

  const std::size_t n = plan.cases.size();
  std::vector<CaseResult> results(n);
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = plan.cases[i].body(ctx);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Deterministic merge in plan order.
  Json doc;
  doc["experiment"] = config.experiment();
  Json params = Json::object();
  for (const auto& [key, value] : config.parameters()) {
    if (key != "output") params[key] = value;
  }
  doc["parameters"] = params;
  doc["seed"] = seed;
  doc["strict"] = options.strict;
  Json cases = Json::array();
  std::ostringstream text;
  text << "experiment " << config.experiment() << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    Json jc;
    jc["name"] = plan.cases[i].name;
    if (!errors[i].empty()) {
      jc["error"] = errors[i];
      jc["passed"] = false;
      summary.numerical_failures.push_back(plan.cases[i].name + ": " + errors[i]);
      text << "[ERROR] " << plan.cases[i].name << ": " << errors[i] << '\n';
      cases.push_back(jc);
      continue;
    }
    const CaseResult& r = results[i];
    jc["inputs"] = r.inputs;
    jc["outputs"] = r.outputs;
    Json inv = Json::array();
    bool passed = true;
    for (const auto& v : r.invariants) {
      inv.push_back({{"name", v.name}, {"passed", v.passed}, {"detail", v.detail}});
      passed = passed && v.passed;
      if (!v.passed) ++summary.failed_invariants;
      text << (v.passed ? "[PASS] " : "[FAIL] ") << plan.cases[i].name << " " << v.name << ": " << v.detail << '\n';
    }
    jc["invariants"] = inv;
    jc["files"] = r.files;
    jc["passed"] = passed;
    cases.push_back(jc);
  }
  summary.cases = static_cast<int>(n);
  summary.exit_code = !summary.numerical_failures.empty() ? kNumericalFailure
                      : summary.failed_invariants > 0     ? kInvariantViolation
                                                          : kOk;
  doc["cases"] = cases;
  doc["passed"] = summary.exit_code == kOk;
  doc["exit_code"] = summary.exit_code;
  text << n << " cases, " << summary.failed_invariants << " failed invariants, " << summary.numerical_failures.size()
       << " numerical failures; exit " << summary.exit_code << '\n';

  const fs::path dir(summary.output_dir);
  std::ofstream(dir / "results.json") << doc.dump(2) << '\n';
  std::ofstream(dir / "summary.txt") << text.str();
  Json meta;
  meta["config"] = options.config_path;
  meta["finished_utc"] = timestamp();
  meta["elapsed_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  meta["jobs"] = jobs;
  std::ofstream(dir / "metadata.json") << meta.dump(2) << '\n';
  return summary;
}

}  // namespace kquant::cli
