#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kquant/potential.hpp"

namespace kquant {

/// The documented seed profile:
///   u(s) = 0.4 (sigma(s) - 1/2) - 0.06 sigma(s) (1 - sigma(s)) - 0.02 exp(-s^2 / 2),
/// shifted so that sup u = 0. sigma is the logistic function, so sigma - 1/2
/// is the moment map recentered, the lowest nonconstant mode on the sphere.
ReducedPotential seed_bump(GridPtr grid);

/// Parameters of one corpus member, all offsets added on the s side:
///   tilt (sigma - 1/2) + [psi0(s + shift) - psi0(s) - shift/2]
///   - dip sigma (1 - sigma) - bump exp(-(s - center)^2 / (2 width^2)),
/// then translated to sup u = 0.
struct SeedParams {
  double tilt = 0.0;
  double shift = 0.0;
  double dip = 0.0;
  double bump = 0.0;
  double center = 0.0;
  double width = 1.0;
};

ReducedPotential seed_potential(GridPtr grid, const SeedParams& p);

struct CorpusOptions {
  std::uint64_t seed = 20240611;
  /// Interior lower bound on omega_u / omega; draws below it are rejected.
  double min_density_ratio = 0.3;
  /// Nodes with background density below this are ignored by the ratio test.
  double interior_density = 1e-6;
  int max_attempts = 10000;
};

/// Deterministic random draw of SeedParams. Low spherical modes dominate:
/// dip and bump are drawn as fractions (up to 1/4 and 1/20) of the first
/// order degree-1 amplitude |tilt + shift|. The same seed gives the same
/// corpus on every platform.
std::vector<SeedParams> draw_seed_params(int count, const CorpusOptions& options);

/// Admissible, sup-normalized (u <= 0) potentials from draw_seed_params,
/// skipping draws that fail the density-ratio margin.
std::vector<ReducedPotential> seed_corpus(GridPtr grid, int count, const CorpusOptions& options = {});

/// Interior minimum of omega_u / omega over nodes with background density above
/// the given floor.
double min_density_ratio(const ReducedPotential& u, double interior_density = 1e-6);

}  // namespace kquant
