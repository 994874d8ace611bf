#include "doctest.h"
#include "json.hpp"
#include "kquant/corpus.hpp"
#include "kquant/functionals.hpp"
#include "kquant/legendre.hpp"
#include "kquant/toric.hpp"
#include "oracles.hpp"

using namespace kquant;

TEST_CASE("energy I examples") {
  auto g = SGrid::symmetric();
  CHECK(energy_I(ReducedPotential::zero(g)) == 0.0);
  CHECK(energy_I(ReducedPotential::constant(g, 0.37)) == doctest::Approx(0.37).epsilon(1e-12));
  // psi* = psi0* + eps x (1 - x): I = -eps int x (1 - x) = -eps / 6.
  const ReducedPotential u = symplectic_potential(RayDirection::polynomial({0.0, 0.1, -0.1}), 1.0, g);
  CHECK(std::abs(energy_I(u) + 1.0 / 60.0) < 1e-5);
  CHECK(std::abs(oracle::energy_I(u) + 1.0 / 60.0) < 1e-5);
}

TEST_CASE("energy I matches the Dirichlet-form oracle and translates") {
  auto g = SGrid::symmetric();
  for (const auto& u : seed_corpus(g, 10)) {
    CHECK(energy_I(u) == doctest::Approx(oracle::energy_I(u)).epsilon(1e-12));
    CHECK(std::abs(energy_I(u + 3.0) - energy_I(u) - 3.0) < 1e-10);
  }
}

TEST_CASE("entropy examples") {
  auto g = SGrid::symmetric();
  CHECK(std::abs(entropy(ReducedPotential::zero(g))) < 1e-15);
  CHECK(std::abs(entropy(ReducedPotential::constant(g, -2.0))) < 1e-14);
  const double e = entropy(seed_bump(g));
  CHECK(e > 0.0);
  CHECK(e == doctest::Approx(oracle::entropy(seed_bump(g))).epsilon(1e-12));
  // Refined-grid quadrature (4x resolution).
  const double fine = entropy(seed_bump(SGrid::symmetric(40.0, 8001)));
  CHECK(std::abs(e - fine) <= 0.005 * fine);
}

TEST_CASE("entropy of a cornered potential is infinite") {
  auto g = SGrid::symmetric();
  Vector corner(g->size());
  Vector tent(g->size());
  for (Index k = 0; k < g->size(); ++k) {
    // Convex corner at s = 0: slope jump 0.4 sigma'(0) = 0.1 puts a point mass there.
    corner[k] = 0.4 * std::max(0.0, logistic((*g)[k]) - 0.5);
    tent[k] = -0.45 * std::abs(logistic((*g)[k]) - 0.5);
  }
  const ReducedPotential p = rooftop_envelope(ReducedPotential(g, corner), ReducedPotential(g, corner));
  const EntropyDiagnostics d = entropy_diagnostics(p);
  CHECK(d.concentrated);
  CHECK(d.max_cell == 1000);
  CHECK(entropy(p) == kInfiniteEntropy);
  // A concave corner is flattened by the envelope: omega_u vanishes near s = 0, entropy stays finite.
  const ReducedPotential flat = rooftop_envelope(ReducedPotential(g, tent), ReducedPotential(g, tent));
  CHECK_FALSE(entropy_diagnostics(flat).concentrated);
  CHECK(std::isfinite(entropy(flat)));
}

TEST_CASE("ent_beta examples") {
  auto g = SGrid::symmetric();
  for (double beta : {1.0, 8.0, 512.0}) CHECK(std::abs(ent_beta(ReducedPotential::zero(g), beta)) < 1e-14);
  const ReducedPotential u = seed_bump(g);
  CHECK(std::abs(ent_beta(u + 1.3, 32.0) - ent_beta(u, 32.0)) < 1e-8);
  const double ent = entropy(u);
  double prev = 0.0;
  for (double beta : {8.0, 32.0, 128.0, 512.0}) {
    const double e = ent_beta(u, beta);
    CHECK(e > prev);
    CHECK(e <= ent + 1e-6);
    prev = e;
  }
  CHECK((ent - prev) / ent <= 0.01);
}

TEST_CASE("ent_beta sup probe") {
  auto g = SGrid::symmetric();
  const ReducedPotential u = seed_bump(g);
  const double beta = 16.0;
  const QuantizationResult q = quantize(u, beta);
  const double eb = ent_beta_from(u, q);
  std::vector<ReducedPotential> trials{u, u + 0.7, q.u_beta, q.u_beta - 0.2};
  for (const auto& v : seed_corpus(g, 6)) trials.push_back(v);
  const std::vector<double> vals = ent_beta_sup_probe(u, beta, trials);
  CHECK(std::abs(vals[0]) < 1e-12);
  CHECK(std::abs(vals[1]) < 1e-12);
  CHECK(vals[2] == doctest::Approx(eb).epsilon(1e-6));
  CHECK(vals[3] == doctest::Approx(eb).epsilon(1e-6));
  for (double v : vals) CHECK(v <= eb + 1e-6);
}

TEST_CASE("twisted energy equals 2 J on this model") {
  auto g = SGrid::symmetric();
  const auto zero = twisted_energy(ReducedPotential::zero(g));
  CHECK(zero.first == 0.0);
  CHECK(zero.second == 0.0);
  CHECK(std::abs(twisted_energy(ReducedPotential::constant(g, 0.8)).second) < 1e-10);
  const ReducedPotential u = seed_bump(g);
  // Oracle: 2 (mean - I) with the Dirichlet-form I.
  double mean = 0.0;
  for (Index k = 0; k < g->size(); ++k) mean += g->weights()[k] * u[k] * g->density()[k];
  mean /= g->volume();
  CHECK(twisted_energy(u).second == doctest::Approx(2.0 * (mean - oracle::energy_I(u))).epsilon(1e-10));
  CHECK(std::abs(twisted_energy(u + 4.0).second - twisted_energy(u).second) < 1e-10);
}

TEST_CASE("K and K^beta") {
  auto g = SGrid::symmetric();
  CHECK(std::abs(k_energy(ReducedPotential::zero(g))) < 1e-15);
  CHECK(std::abs(k_beta(ReducedPotential::zero(g), 8.0)) < 1e-14);
  const ReducedPotential u = seed_bump(g);
  CHECK(std::abs(k_energy(u + 5.0) - k_energy(u)) < 1e-8);
  CHECK(std::abs(k_beta(u + 5.0, 32.0) - k_beta(u, 32.0)) < 1e-8);
  const double k = k_energy(u);
  double prev = -std::numeric_limits<double>::infinity();
  for (double beta : {8.0, 32.0, 128.0}) {
    const double kb = k_beta(u, beta);
    CHECK(kb >= prev - 1e-10);
    CHECK(kb <= k + 1e-6);
    prev = kb;
  }
}

TEST_CASE("d1 examples") {
  auto g = SGrid::symmetric();
  const ReducedPotential u = seed_bump(g);
  const ReducedPotential zero = ReducedPotential::zero(g);
  CHECK(d1(u, u) == doctest::Approx(0.0));
  CHECK(std::abs(d1(u, u)) < 1e-14);
  CHECK(d1(zero, ReducedPotential::constant(g, -0.6)) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(d1(zero, ReducedPotential::constant(g, 0.6)) == doctest::Approx(0.6).epsilon(1e-12));
  // d1(0, u) = -I(u) for u <= 0.
  CHECK(d1(zero, u) == doctest::Approx(-energy_I(u)).epsilon(1e-12));
}

TEST_CASE("d1 metric properties on the corpus") {
  auto g = SGrid::symmetric(15.0, 301);
  const auto c = seed_corpus(g, 6);
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double dij = d1(c[i], c[j]);
      CHECK(dij >= -1e-14);
      CHECK(dij == doctest::Approx(d1(c[j], c[i])).epsilon(1e-12));
      CHECK(dij == doctest::Approx(oracle::d1(c[i], c[j])).epsilon(1e-6));
      if (i != j) CHECK(dij > 0.0);
      for (std::size_t k = 0; k < c.size(); ++k) CHECK(dij <= d1(c[i], c[k]) + d1(c[k], c[j]) + 1e-8);
    }
  }
}

TEST_CASE("corpus invariants: sandwich, monotonicity, concavity, PC0, contraction") {
  auto g = SGrid::symmetric();
  const ReducedPotential zero = ReducedPotential::zero(g);
  for (const auto& u : seed_corpus(g, 12, CorpusOptions{99})) {
    const double ent = entropy(u);
    const double norm = d1(zero, u);
    double prev = 0.0;
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (double beta : {1.0, 8.0, 32.0, 128.0, 512.0}) {
      const QuantizationResult q = quantize(u, beta);
      const double e = ent_beta_from(u, q);
      CHECK(e >= -1e-10);
      CHECK(entropy(q.u_beta) - 1e-6 <= e);
      CHECK(e <= ent + 1e-6);
      CHECK(prev <= e + 1e-8);
      CHECK(e / beta <= prev_ratio + 1e-8);
      CHECK(e / beta <= d1(q.u_beta, u) + 1e-8);
      CHECK(d1(zero, q.u_beta) <= norm + 1e-6);
      prev = e;
      prev_ratio = e / beta;
    }
  }
}

TEST_CASE("Ent^beta is d1-continuous along a convergent sequence") {
  auto g = SGrid::symmetric();
  const ReducedPotential u = seed_bump(g);
  const double limit = ent_beta(u, 32.0);
  double prev_gap = std::numeric_limits<double>::infinity();
  for (double eps : {0.1, 0.03, 0.01, 0.003}) {
    SeedParams p;
    p.tilt = 0.4;
    p.dip = 0.06;
    p.bump = 0.02 + eps;
    const ReducedPotential v = seed_potential(g, p);
    const double gap = std::abs(ent_beta(v, 32.0) - limit);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 1e-3);
}

TEST_CASE("functional report serializes with fixed keys") {
  auto g = SGrid::symmetric();
  const FunctionalReport r = functional_report(ReducedPotential::zero(g), 32.0);
  for (double v : {r.i_energy, r.j_energy, r.i_twisted, r.j_twisted, r.entropy, r.ent_beta, r.k_energy, r.k_beta}) {
    CHECK(std::abs(v) < 1e-14);
  }
  const auto j = nlohmann::json::parse(to_json(r));
  for (const char* key : {"beta", "i_energy", "j_energy", "i_twisted", "j_twisted", "entropy", "ent_beta", "k_energy",
                          "k_beta", "residual_sup", "newton_iters", "converged"}) {
    CHECK(j.contains(key));
  }
}
