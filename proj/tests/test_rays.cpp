#include "doctest.h"
#include "kquant/divisorial.hpp"
#include "kquant/legendre.hpp"
#include "kquant/rays.hpp"

using namespace kquant;

namespace {

ToricTestConfig cfg(const char* text) { return ToricTestConfig::parse(text); }

GeodesicRay make_ray(const ToricTestConfig& c, double t_max = 50.0) {
  const RayDirection d = RayDirection::from(c);
  return GeodesicRay(d, ray_grid({d}, t_max));
}

}  // namespace

TEST_CASE("toric config parsing and exact queries") {
  const ToricTestConfig g = cfg("breakpoints = [1/2]; slopes = [0, 1]");
  CHECK(g.normalized());
  CHECK(g.integral() == Rational(1, 8));
  CHECK(g.value(Rational(3, 4)) == Rational(1, 4));
  CHECK(ToricTestConfig::parse(g.to_string()).integral() == g.integral());
  CHECK(cfg("breakpoints = []; slopes = [2]; g0 = 1").is_affine());
  CHECK_THROWS_WITH_AS(cfg("breakpoints = [1/2]; slopes = [1, 0]"), doctest::Contains("NonConvex"), Error);
  CHECK_THROWS_WITH_AS(cfg("breakpoints = [1/2]; slopes = [0]"), doctest::Contains("ParseError"), Error);
  CHECK_THROWS_WITH_AS(cfg("breakpoints = [3/2]; slopes = [0, 1]"), doctest::Contains("PreconditionViolated"), Error);
  CHECK_THROWS_WITH_AS(cfg("slopes = [0, 1]; color = red"), doctest::Contains("ParseError"), Error);
}

TEST_CASE("ray potential examples") {
  const ToricTestConfig kink = cfg("breakpoints = [1/2]; slopes = [0, 1]");
  const RayDirection d = RayDirection::from(kink);
  const GridPtr grid = ray_grid({d}, 10.0);
  CHECK(ray_potential(kink, 0.0, grid).values().cwiseAbs().maxCoeff() == 0.0);

  SUBCASE("profile equals psi0* + t g at the legendre nodes") {
    const ReducedPotential u = ray_potential(kink, 10.0, grid);
    CHECK(check_admissible(u).admissible(1e-10));
    const SymplecticProfile phi = legendre(*grid, u.profile());
    double worst = 0.0;
    for (Index k = 0; k < phi.size(); ++k) {
      const double x = phi.x_nodes[k];
      if (x < 0.02 || x > 0.98) continue;
      worst = std::max(worst, std::abs(phi.values[k] - psi0_star(x) - 10.0 * d(x)));
    }
    CHECK(worst < 1e-3);
  }

  SUBCASE("affine g: I affine and d1(0, u_t) linear in t") {
    const ToricTestConfig aff = ToricTestConfig::affine(Rational(1, 2), Rational(1, 4));
    const RayDirection da = RayDirection::from(aff);
    const GridPtr ga = ray_grid({da}, 4.0);
    const ReducedPotential zero = ReducedPotential::zero(ga);
    std::vector<double> dist;
    for (double t : {1.0, 2.0, 4.0}) dist.push_back(d1(zero, ray_potential(aff, t, ga)));
    CHECK(dist[1] == doctest::Approx(2.0 * dist[0]).epsilon(1e-6));
    CHECK(dist[2] == doctest::Approx(4.0 * dist[0]).epsilon(1e-6));
    CHECK(energy_I(ray_potential(aff, 2.0, ga)) == doctest::Approx(-2.0 * to_double(aff.integral())).epsilon(1e-8));
  }
}

TEST_CASE("sup u_t grows like -t min g") {
  const ToricTestConfig tent = cfg("breakpoints = [1/2]; slopes = [-1, 1]; g0 = 1/2");
  GeodesicRay ray = make_ray(tent);
  // min g = 0 here, so sup u_t stays bounded.
  CHECK(std::abs(ray.potential(50.0).sup()) < 1.0);
  const ToricTestConfig shifted = cfg("breakpoints = [1/2]; slopes = [-1, 1]; g0 = 1");
  GeodesicRay ray2 = make_ray(shifted);
  CHECK((ray2.potential(50.0).sup() - ray2.potential(25.0).sup()) / 25.0 == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("radial slope examples") {
  SlopeOptions opts;
  SUBCASE("I along g = x") {
    GeodesicRay ray = make_ray(ToricTestConfig::affine(1));
    const SlopeEstimate s = radial_slope(RadialFunctional::I, ray, opts);
    CHECK(s.value == doctest::Approx(-0.5).epsilon(1e-6));
    CHECK(s.residual < 1e-6);
  }
  SUBCASE("K along an affine g vanishes") {
    GeodesicRay ray = make_ray(ToricTestConfig::affine(1));
    const SlopeEstimate s = radial_slope(RadialFunctional::K, ray, opts);
    CHECK(std::abs(s.value) <= s.uncertainty() + 1e-4);
  }
  SUBCASE("Ent^beta along the trivial ray") {
    GeodesicRay ray = make_ray(ToricTestConfig::trivial());
    CHECK(std::abs(radial_slope(RadialFunctional::EntBeta, ray, opts, 8.0).value) < 1e-12);
  }
  SUBCASE("I slope is -int g for a kinked g") {
    const ToricTestConfig g = cfg("breakpoints = [1/3, 2/3]; slopes = [-1, 0, 2]");
    GeodesicRay ray = make_ray(g);
    CHECK(radial_slope(RadialFunctional::I, ray, opts).value == doctest::Approx(-to_double(g.integral())).epsilon(1e-6));
  }
  SUBCASE("J_chi slope of the normal cone ray matches the intersection formula") {
    GeodesicRay ray = make_ray(ToricTestConfig::normal_cone(Rational(1, 2)));
    const double expected = to_double(j_ric_slope_from_intersections(normal_cone_intersections(Rational(1, 2), 0)));
    CHECK(radial_slope(RadialFunctional::JChi, ray, opts).value == doctest::Approx(expected).epsilon(0.02));
  }
}

TEST_CASE("slope fit diagnostics") {
  SlopeOptions opts;
  const std::vector<double> t{1, 2, 3, 4};
  const SlopeEstimate s = fit_slope(t, {2, 4, 6, 8}, opts);
  CHECK(s.value == doctest::Approx(2.0));
  CHECK(s.std_error == doctest::Approx(0.0));
  CHECK_THROWS_WITH_AS(fit_slope(t, {0, 5, 0, 5}, opts), doctest::Contains("SlopeUnstable"), Error);
  opts.strict = false;
  CHECK_FALSE(fit_slope(t, {0, 5, 0, 5}, opts).stable);
  CHECK_THROWS_AS(tail_times(50.0, 1), Error);
  const auto times = tail_times(50.0, 9);
  CHECK(times.front() == 25.0);
  CHECK(times.back() == 50.0);
}

TEST_CASE("l_beta examples") {
  SlopeOptions opts;
  const ToricTestConfig g = cfg("breakpoints = [1/2]; slopes = [0, 1]");
  const RayDirection d = RayDirection::from(g);
  const GridPtr grid = ray_grid({d, RayDirection::from(ToricTestConfig::trivial())}, opts.t_max);
  GeodesicRay u(d, grid);
  GeodesicRay same(d, grid);
  CHECK(std::abs(l_beta_numeric(same, u, 4.0, opts).slope.value) < 1e-10);

  SUBCASE("constant offset has zero slope") {
    std::vector<double> vals;
    const auto times = tail_times(opts.t_max, opts.n_samples);
    for (double t : times) vals.push_back(l_beta_integrand(u.potential(t) + 0.3, u.potential(t), 4.0));
    CHECK(std::abs(fit_slope(times, vals, opts).value) < 1e-12);
  }
  SUBCASE("normal cone against the trivial ray") {
    GeodesicRay v(RayDirection::from(ToricTestConfig::trivial()), grid);
    const double exact = to_double(l_beta_snc(normal_cone_snc(Rational(1, 2), 0), 4).value);
    CHECK(exact == -1.0);
    CHECK(l_beta_numeric(v, u, 4.0, opts).slope.value == doctest::Approx(exact).epsilon(0.05));
  }
}

TEST_CASE("chordal distance examples") {
  const ToricTestConfig g = cfg("breakpoints = [1/2]; slopes = [0, 1]");
  const RayDirection d = RayDirection::from(g);
  const double t = 40.0;
  const GridPtr grid = ray_grid({d, d.shifted(0.3)}, t);
  GeodesicRay a(d, grid);
  GeodesicRay b(d, grid);
  CHECK(std::abs(chordal_d1(a, b, t).value) < 1e-12);
  GeodesicRay c(d.shifted(0.3), grid);
  CHECK(chordal_d1(a, c, t).value == doctest::Approx(0.3).epsilon(0.02));

  // Smooth perturbation eps x (1 - x); one fitted C over eps in {0.04, 0.01}.
  double c_fit = 0.0;
  for (double eps : {0.04, 0.01}) {
    GeodesicRay e(d.plus_poly({0.0, eps, -eps}), grid);
    const ChordalEstimate est = chordal_d1(a, e, t);
    CHECK(est.increment >= -1e-6);
    c_fit = std::max(c_fit, est.value / eps);
  }
  MESSAGE("fitted chordal constant " << c_fit);
  CHECK(c_fit < 1.0);
}

TEST_CASE("chordal distance is nondecreasing in t") {
  const RayDirection a = RayDirection::from(cfg("breakpoints = [1/2]; slopes = [0, 1]"));
  const RayDirection b = RayDirection::from(cfg("breakpoints = [1/4]; slopes = [0, 1]"));
  const GridPtr grid = ray_grid({a, b}, 40.0);
  GeodesicRay ra(a, grid);
  GeodesicRay rb(b, grid);
  double prev = 0.0;
  for (double t : {5.0, 10.0, 20.0, 40.0}) {
    const double v = chordal_d1(ra, rb, t).value;
    CHECK(v >= prev - 1e-6);
    prev = v;
  }
}

TEST_CASE("radial Ent^beta lower probe") {
  SlopeOptions opts;
  const ToricTestConfig g = cfg("breakpoints = [1/2]; slopes = [0, 1]");
  const RayDirection d = RayDirection::from(g);
  const double beta = 8.0;
  const GridPtr grid = ray_grid({d}, opts.t_max);
  GeodesicRay u(d, grid);
  GeodesicRay self(d, grid);
  GeodesicRay trivial(RayDirection::from(ToricTestConfig::trivial()), grid);
  GeodesicRay scaled(d.scaled(1.0 - 1.0 / beta), grid);
  const SlopeEstimate ent = radial_slope(RadialFunctional::EntBeta, u, opts, beta);
  const auto probes = radial_ent_beta_lower_probe(u, beta, {&self, &trivial, &scaled}, opts);
  CHECK(std::abs(probes[0].value) < 1e-8);
  for (const auto& p : probes) CHECK(p.value <= ent.value + std::hypot(ent.uncertainty(), p.std_error));
  MESSAGE("Ent^beta slope " << ent.value << ", scaled-ray probe " << probes[2].value);
}

TEST_CASE("stability probe examples") {
  SlopeOptions opts;
  const auto product = ToricTestConfig::affine(1);
  const auto trivial = ToricTestConfig::trivial();
  const auto kink = cfg("breakpoints = [1/2]; slopes = [0, 1]");
  const StabilityReport r = stability_probe({product, trivial}, 8.0, 0.05, opts);
  CHECK_FALSE(r.entries[0].satisfied);
  CHECK(r.entries[0].j.value > 0.01);
  CHECK(r.entries[1].satisfied);
  CHECK(std::abs(r.entries[1].k_beta.value) < 1e-12);
  CHECK(std::abs(r.entries[1].j.value) < 1e-12);
  const StabilityReport k = stability_probe({kink}, 128.0, 0.05, opts);
  CHECK(k.entries[0].k_beta.value == doctest::Approx(to_double(df_toric(kink))).epsilon(0.05));
  CHECK(k.entries[0].satisfied);
  CHECK_THROWS_AS(stability_probe({kink}, 8.0, 0.0, opts), Error);
}
