#include "kquant/divisorial.hpp"

#include "kquant/error.hpp"

namespace kquant {

SncModelData SncModelData::parse(const std::string& text) {
  const auto fields = parse_assignments(text);
  for (const auto& [key, value] : fields) {
    if (key != "a" && key != "b" && key != "c" && key != "d") throw Error(ErrorCode::ParseError, "unknown snc key '" + key + "'");
  }
  SncModelData data;
  auto get = [&](const char* key) {
    if (!fields.count(key)) throw Error(ErrorCode::ParseError, std::string("snc data needs '") + key + "'");
    return parse_rational_list(fields.at(key));
  };
  data.a = get("a");
  data.b = get("b");
  data.c = get("c");
  data.d = get("d");
  data.validate();
  return data;
}

void SncModelData::validate() const {
  if (a.empty()) throw Error(ErrorCode::EmptyData, "snc data has no components");
  if (b.size() != a.size() || c.size() != a.size() || d.size() != a.size()) {
    throw Error(ErrorCode::PreconditionViolated, "snc vectors a, b, c, d must have equal length");
  }
  for (const auto& ai : a) {
    if (ai < 1 || boost::multiprecision::denominator(ai) != 1) {
      throw Error(ErrorCode::PreconditionViolated, "multiplicities a_i must be integers >= 1");
    }
  }
}

IntersectionData IntersectionData::parse(const std::string& text) {
  const auto fields = parse_assignments(text);
  IntersectionData data;
  for (const auto& [key, value] : fields) {
    if (key == "lbar_pow") {
      data.lbar_pow = parse_rational(value);
    } else if (key == "lbar_prime_pow") {
      data.lbar_prime_pow = parse_rational(value);
    } else if (key == "kx_dot_lbar") {
      data.kx_dot_lbar = parse_rational(value);
    } else if (key == "sbar") {
      data.sbar = parse_rational(value);
    } else if (key == "v") {
      data.v = parse_rational(value);
    } else if (key == "n") {
      const Rational n = parse_rational(value);
      if (boost::multiprecision::denominator(n) != 1 || n < 1) throw Error(ErrorCode::ParseError, "n must be an integer >= 1");
      data.n = static_cast<int>(boost::multiprecision::numerator(n));
    } else {
      throw Error(ErrorCode::ParseError, "unknown intersection key '" + key + "'");
    }
  }
  return data;
}

LBetaSnc l_beta_snc(const SncModelData& data, const Rational& beta) {
  data.validate();
  if (!(beta > 0)) throw Error(ErrorCode::PreconditionViolated, "beta must be positive");
  LBetaSnc out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Rational value = ((data.d[i] + 1 - data.a[i]) + beta * (data.c[i] - data.b[i])) / data.a[i];
    if (out.argmin.empty() || value < out.value) {
      out.value = value;
      out.argmin.assign(1, i);
    } else if (value == out.value) {
      out.argmin.push_back(i);
    }
  }
  return out;
}

Rational lct_shift(const SncModelData& data, const Rational& beta) {
  data.validate();
  if (!(beta > 0)) throw Error(ErrorCode::PreconditionViolated, "beta must be positive");
  // Coefficient of the boundary beta (F - G) - K_{Z/X x C} on E_i.
  Rational lct;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Rational boundary = beta * (data.b[i] - data.c[i]) - data.d[i];
    const Rational threshold = (1 - boundary) / data.a[i];
    if (i == 0 || threshold < lct) lct = threshold;
  }
  return lct - 1;
}

namespace {

void require_volume(const IntersectionData& data) {
  if (!(data.v > 0)) throw Error(ErrorCode::ZeroVolume, "volume must be positive");
  if (data.n < 1) throw Error(ErrorCode::PreconditionViolated, "dimension must be >= 1");
}

}  // namespace

Rational i_slope_from_intersections(const IntersectionData& data) {
  require_volume(data);
  return (data.lbar_prime_pow - data.lbar_pow) / ((data.n + 1) * data.v);
}

Rational j_ric_slope_from_intersections(const IntersectionData& data) {
  require_volume(data);
  return -data.sbar * data.lbar_pow / ((data.n + 1) * data.v) - data.kx_dot_lbar / data.v;
}

Rational df_toric(const ToricTestConfig& g) {
  validate_toric(g.breakpoints(), g.slopes());
  return g.value(0) + g.value(1) - 2 * g.integral();
}

Rational k_beta_tc_candidate(const SncModelData& snc, const IntersectionData& intersections, const Rational& beta) {
  require_volume(intersections);
  return l_beta_snc(snc, beta).value + beta * i_slope_from_intersections(intersections) +
         intersections.sbar * intersections.lbar_pow / ((intersections.n + 1) * intersections.v) +
         intersections.kx_dot_lbar / intersections.v;
}

SncModelData normal_cone_snc(const Rational& lambda, const Rational& c_prime) {
  // E_0: strict transform of X x {0}; E_1: exceptional divisor over (p, 0).
  SncModelData data;
  data.a = {1, 1};
  data.b = {0, lambda};
  data.c = {0, c_prime};
  data.d = {0, 1};
  return data;
}

IntersectionData normal_cone_intersections(const Rational& lambda, const Rational& c_prime) {
  IntersectionData data;
  data.lbar_pow = -lambda * lambda;
  data.lbar_prime_pow = -c_prime * c_prime;
  data.kx_dot_lbar = 0;
  return data;
}

}  // namespace kquant
