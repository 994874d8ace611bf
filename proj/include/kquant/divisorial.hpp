#pragma once

#include <string>
#include <vector>

#include "kquant/rational.hpp"
#include "kquant/toric.hpp"

namespace kquant {

/// Coefficients on the components E_i of a common snc model: central fiber
/// multiplicities a_i, the divisors F = sum b_i E_i and G = sum c_i E_i, and the
/// relative canonical divisor sum d_i E_i.
struct SncModelData {
  std::vector<Rational> a;
  std::vector<Rational> b;
  std::vector<Rational> c;
  std::vector<Rational> d;

  /// Text form "a = [1,1]; b = [0, 1/2]; c = [0,0]; d = [0,1]".
  static SncModelData parse(const std::string& text);
  /// Throws EmptyData or PreconditionViolated.
  void validate() const;
  std::size_t size() const { return a.size(); }
};

struct IntersectionData {
  Rational lbar_pow;        // Lbar^{n+1}
  Rational lbar_prime_pow;  // (Lbar')^{n+1}
  Rational kx_dot_lbar;     // K_X . Lbar^n
  Rational sbar = 2;
  Rational v = 1;
  int n = 1;

  /// Keys lbar_pow, lbar_prime_pow, kx_dot_lbar, sbar, v, n.
  static IntersectionData parse(const std::string& text);
};

struct LBetaSnc {
  Rational value;
  /// Every index attaining the minimum, ascending.
  std::vector<std::size_t> argmin;
};

/// min_i ((d_i + 1 - a_i) + beta (c_i - b_i)) / a_i.
LBetaSnc l_beta_snc(const SncModelData& data, const Rational& beta);

/// lct of Z_0 for the pair with boundary beta (F - G) - K_{Z/X x C}, minus 1:
/// the largest tau keeping every coefficient of that boundary plus
/// (1 + tau) Z_0 at most 1.
Rational lct_shift(const SncModelData& data, const Rational& beta);

/// ((Lbar')^{n+1} - Lbar^{n+1}) / ((n + 1) V).
Rational i_slope_from_intersections(const IntersectionData& data);
/// -Sbar Lbar^{n+1} / ((n + 1) V) - K_X . Lbar^n / V.
Rational j_ric_slope_from_intersections(const IntersectionData& data);

/// g(0) + g(1) - 2 int_0^1 g.
Rational df_toric(const ToricTestConfig& g);

/// L^beta from the snc data plus beta times the I-slope difference plus the
/// two fixed terms: a lower bound for K^beta of the test configuration.
Rational k_beta_tc_candidate(const SncModelData& snc, const IntersectionData& intersections, const Rational& beta);

/// Snc and intersection data for the deformation to the normal cone of a
/// point, g = max(0, x - (1 - lambda)), with candidate G = c' E.
SncModelData normal_cone_snc(const Rational& lambda, const Rational& c_prime);
IntersectionData normal_cone_intersections(const Rational& lambda, const Rational& c_prime);

}  // namespace kquant
