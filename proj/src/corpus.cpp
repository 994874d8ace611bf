#include "kquant/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace kquant {

ReducedPotential seed_potential(GridPtr grid, const SeedParams& p) {
  const SGrid& g = *grid;
  Vector v(g.size());
  const double w2 = 2.0 * p.width * p.width;
  for (Index k = 0; k < g.size(); ++k) {
    const double s = g[k];
    const double x = logistic(s);
    const double shift = softplus(s + p.shift) - softplus(s) - 0.5 * p.shift;
    const double d = s - p.center;
    v[k] = p.tilt * (x - 0.5) + shift - p.dip * x * (1.0 - x) - p.bump * std::exp(-d * d / w2);
  }
  ReducedPotential u(std::move(grid), std::move(v));
  return u - u.sup();
}

ReducedPotential seed_bump(GridPtr grid) {
  SeedParams p;
  p.tilt = 0.4;
  p.dip = 0.06;
  p.bump = 0.02;
  return seed_potential(std::move(grid), p);
}

std::vector<SeedParams> draw_seed_params(int count, const CorpusOptions& options) {
  // Uniform draws by hand from the raw engine output: the std distributions
  // are implementation defined and would break cross-platform determinism.
  std::mt19937_64 rng(options.seed);
  auto uniform = [&](double lo, double hi) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
  };
  std::vector<SeedParams> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    SeedParams p;
    p.tilt = uniform(-0.4, 0.4);
    p.shift = uniform(-1.0, 1.0);
    // Higher modes scaled by the first-order degree-1 amplitude tilt + shift.
    const double low = std::abs(p.tilt + p.shift);
    p.dip = uniform(0.0, 0.25) * low;
    p.bump = uniform(0.0, 0.05) * low;
    p.center = uniform(-2.0, 2.0);
    p.width = uniform(1.0, 2.0);
    out.push_back(p);
  }
  return out;
}

double min_density_ratio(const ReducedPotential& u, double interior_density) {
  const Vector mu = ma_density(u);
  const Vector& rho = u.grid().density();
  double out = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < rho.size(); ++k) {
    if (rho[k] > interior_density) out = std::min(out, mu[k] / rho[k]);
  }
  return out;
}

std::vector<ReducedPotential> seed_corpus(GridPtr grid, int count, const CorpusOptions& options) {
  if (count < 0) throw Error(ErrorCode::PreconditionViolated, "corpus size must be nonnegative");
  std::vector<ReducedPotential> out;
  out.reserve(static_cast<std::size_t>(count));
  CorpusOptions opts = options;
  int attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    // Redraw in blocks so rejections do not shift earlier members.
    for (const SeedParams& p : draw_seed_params(count, opts)) {
      if (static_cast<int>(out.size()) == count) break;
      if (++attempts > options.max_attempts) throw Error(ErrorCode::PreconditionViolated, "corpus rejection limit reached");
      ReducedPotential u = seed_potential(grid, p);
      if (!check_admissible(u).admissible(AdmissibilityOptions{}.tol_convex)) continue;
      if (min_density_ratio(u, options.interior_density) < options.min_density_ratio) continue;
      out.push_back(std::move(u));
    }
    ++opts.seed;
  }
  return out;
}

}  // namespace kquant
