#include <random>

#include "doctest.h"
#include "kquant/corpus.hpp"
#include "kquant/legendre.hpp"
#include "oracles.hpp"

using namespace kquant;

namespace {

ReducedPotential offset(GridPtr g, double (*f)(double)) {
  Vector v(g->size());
  for (Index k = 0; k < g->size(); ++k) v[k] = f((*g)[k]);
  return ReducedPotential(g, v);
}

}  // namespace

TEST_CASE("background profile") {
  auto g = SGrid::symmetric();
  CHECK(g->size() == 2001);
  CHECK(g->psi0()[1000] == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  // Telescoping: the background mass is 1 up to e^-40 tails.
  CHECK(std::abs(g->volume() - 1.0) < 1e-12);
  CHECK(background_measure(g).mass() == doctest::Approx(1.0).epsilon(1e-12));
  for (Index k = 1; k + 1 < g->size(); ++k) REQUIRE(g->density()[k] > 0.0);
}

TEST_CASE("grid invariants are enforced") {
  CHECK_THROWS_AS(SGrid(1.0, 2.0, 11), Error);
  CHECK_THROWS_AS(SGrid(-1.0, 1.0, 2), Error);
  auto g = SGrid::make(-30.0, 50.0, 801);
  CHECK(g->spacing() == doctest::Approx(0.1));
}

TEST_CASE("legendre of psi0") {
  auto g = SGrid::symmetric();
  const SymplecticProfile phi = legendre(*g, g->psi0());
  // Brute-force sup over the grid as the oracle.
  CHECK(phi(0.5) == doctest::Approx(oracle::brute_legendre(g->abscissae(), g->psi0(), 0.5)).epsilon(1e-12));
  CHECK(phi(0.5) == doctest::Approx(-std::log(2.0)).epsilon(1e-9));
  for (double x : {0.05, 0.2, 0.37, 0.81, 0.95}) {
    CHECK(phi(x) == doctest::Approx(psi0_star(x)).epsilon(1e-4));
    CHECK(phi(x) >= oracle::brute_legendre(g->abscissae(), g->psi0(), x) - 1e-12);
  }
  // Involution on interior nodes.
  const Vector back = legendre_inverse(phi, *g);
  CHECK((back - g->psi0()).segment(100, 1801).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("legendre of an affine profile is a point mass") {
  auto g = SGrid::symmetric();
  const double a = 0.3;
  const double x0 = 0.25;
  const Vector profile = Vector::Constant(g->size(), a) + x0 * g->abscissae();
  const SymplecticProfile phi = legendre(*g, profile);
  CHECK(phi(x0) == doctest::Approx(-a).epsilon(1e-12));
  CHECK(std::isinf(phi(0.5)));
  CHECK(std::isinf(phi(0.1)));
  CHECK((legendre_inverse(phi, *g) - profile).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("legendre rejects nonconvex input") {
  auto g = SGrid::symmetric(10.0, 201);
  Vector profile = g->psi0();
  profile[100] += 0.1;
  CHECK_THROWS_WITH_AS(legendre(*g, profile), doctest::Contains("NonConvexInput"), Error);
}

TEST_CASE("legendre involution on the corpus") {
  auto g = SGrid::symmetric();
  for (const auto& u : seed_corpus(g, 8)) {
    const Vector prof = u.profile();
    const Vector back = legendre_inverse(legendre(*g, prof), *g);
    CHECK((back - prof).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("rooftop envelope examples") {
  auto g = SGrid::symmetric(10.0, 201);
  const ReducedPotential u = offset(g, [](double s) { return 0.3 * (logistic(s) - 0.5); });
  SUBCASE("idempotent") { CHECK((rooftop_envelope(u, u).values() - u.values()).cwiseAbs().maxCoeff() < 1e-13); }
  SUBCASE("P(u, u + c) = u") {
    CHECK((rooftop_envelope(u, u + 0.4).values() - u.values()).cwiseAbs().maxCoeff() < 1e-13);
  }
  SUBCASE("tent against zero, hull oracle") {
    const ReducedPotential tent = offset(g, [](double s) { return std::min(0.3, 0.1 + 0.2 * std::abs(s)); });
    const ReducedPotential zero = ReducedPotential::zero(g);
    const Vector p = rooftop_envelope(zero, tent).values();
    CHECK((p - oracle::envelope(zero, tent)).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("crossing pair, hull oracle") {
    const ReducedPotential v = offset(g, [](double s) { return -0.3 * (logistic(s) - 0.5) - 0.05; });
    const Vector p = rooftop_envelope(u, v).values();
    CHECK((p - oracle::envelope(u, v)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("rooftop envelope properties on random pairs") {
  auto g = SGrid::symmetric(12.0, 241);
  std::mt19937_64 rng(7);
  CorpusOptions opts;
  for (int trial = 0; trial < 6; ++trial) {
    opts.seed = rng();
    const auto pool = seed_corpus(g, 2, opts);
    const ReducedPotential& u = pool[0];
    const ReducedPotential v = pool[1] + 0.05 * static_cast<double>(trial % 3);
    const ReducedPotential p = rooftop_envelope(u, v);
    const ReducedPotential q = rooftop_envelope(v, u);
    CHECK((p.values() - q.values()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((p.values() - u.values().cwiseMin(v.values())).maxCoeff() <= 1e-14);
    CHECK(check_admissible(p).admissible(1e-9));
    CHECK((p.values() - oracle::envelope(u, v)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("rooftop envelope grid mismatch") {
  auto a = SGrid::symmetric(10.0, 201);
  auto b = SGrid::symmetric(10.0, 401);
  CHECK_THROWS_WITH_AS(rooftop_envelope(ReducedPotential::zero(a), ReducedPotential::zero(b)),
                       doctest::Contains("GridMismatch"), Error);
}

TEST_CASE("integrate examples") {
  auto g = SGrid::symmetric();
  const Measure1D bg = background_measure(g);
  CHECK(integrate(Vector::Ones(g->size()), bg) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(integrate(g->moment(), bg) - 0.5) < 1e-10);
  CHECK(integrate(Vector::Zero(g->size()), bg) == 0.0);
  Vector bad = Vector::Ones(g->size());
  bad[5] = std::nan("");
  CHECK_THROWS_WITH_AS(integrate(bad, bg), doctest::Contains("NonFinite"), Error);
  auto other = SGrid::symmetric(40.0, 101);
  CHECK_THROWS_WITH_AS(integrate(Vector::Ones(101), bg), doctest::Contains("GridMismatch"), Error);
  (void)other;
}

TEST_CASE("quadrature converges at second order") {
  // f = cos(s) against omega: the density is itself a second difference, so
  // both sources of error are O(h^2).
  auto value = [](Index n) {
    auto g = SGrid::symmetric(40.0, n);
    Vector f(g->size());
    for (Index k = 0; k < g->size(); ++k) f[k] = std::cos((*g)[k]);
    return integrate(f, background_measure(g));
  };
  const double a = value(201);
  const double b = value(401);
  const double c = value(801);
  const double order = std::log2(std::abs(a - b) / std::abs(b - c));
  MESSAGE("observed order " << order);
  CHECK(order >= 1.9);
}

TEST_CASE("admissibility checks") {
  auto g = SGrid::symmetric();
  CHECK_NOTHROW(require_admissible(ReducedPotential::zero(g)));
  Vector v = Vector::Zero(g->size());
  v[1000] = 0.5;
  CHECK_THROWS_WITH_AS(require_admissible(ReducedPotential(g, v)), doctest::Contains("InadmissibleInput"), Error);
  const ReducedPotential u = seed_bump(g);
  CHECK(u.sup() == 0.0);
  CHECK(check_admissible(u).admissible(1e-10));
}
