#include "kquant/toric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kquant {

void validate_toric(const std::vector<Rational>& breakpoints, const std::vector<Rational>& slopes) {
  if (slopes.size() != breakpoints.size() + 1) {
    throw Error(ErrorCode::PreconditionViolated, "need exactly one more slope than breakpoints");
  }
  Rational prev = 0;
  for (const auto& b : breakpoints) {
    if (!(b > prev) || !(b < 1)) {
      throw Error(ErrorCode::PreconditionViolated, "breakpoints must increase strictly inside (0, 1)");
    }
    prev = b;
  }
  for (std::size_t j = 1; j < slopes.size(); ++j) {
    if (!(slopes[j] > slopes[j - 1])) {
      throw Error(ErrorCode::NonConvex, "slopes must increase strictly across breakpoints (piece " + std::to_string(j) + ")");
    }
  }
}

ToricTestConfig::ToricTestConfig(std::vector<Rational> breakpoints, std::vector<Rational> slopes, Rational g0)
    : breakpoints_(std::move(breakpoints)), slopes_(std::move(slopes)), g0_(std::move(g0)) {
  validate_toric(breakpoints_, slopes_);
}

ToricTestConfig::ToricTestConfig(std::vector<Rational> breakpoints, std::vector<Rational> slopes)
    : ToricTestConfig(std::move(breakpoints), std::move(slopes), Rational(0)) {
  g0_ = -minimum();
}

ToricTestConfig ToricTestConfig::parse(const std::string& text) {
  const auto fields = parse_assignments(text);
  for (const auto& [key, value] : fields) {
    if (key != "breakpoints" && key != "slopes" && key != "g0") {
      throw Error(ErrorCode::ParseError, "unknown toric key '" + key + "'");
    }
  }
  if (!fields.count("slopes")) throw Error(ErrorCode::ParseError, "toric config needs 'slopes'");
  std::vector<Rational> breakpoints;
  if (fields.count("breakpoints")) breakpoints = parse_rational_list(fields.at("breakpoints"));
  std::vector<Rational> slopes = parse_rational_list(fields.at("slopes"));
  if (slopes.size() != breakpoints.size() + 1) {
    throw Error(ErrorCode::ParseError, "toric config needs one more slope than breakpoints");
  }
  if (fields.count("g0")) return ToricTestConfig(std::move(breakpoints), std::move(slopes), parse_rational(fields.at("g0")));
  return ToricTestConfig(std::move(breakpoints), std::move(slopes));
}

ToricTestConfig ToricTestConfig::trivial() { return ToricTestConfig({}, {Rational(0)}, Rational(0)); }

ToricTestConfig ToricTestConfig::affine(const Rational& slope, const Rational& g0) {
  return ToricTestConfig({}, {slope}, g0);
}

ToricTestConfig ToricTestConfig::normal_cone(const Rational& lambda) {
  if (!(lambda > 0) || !(lambda < 1)) throw Error(ErrorCode::PreconditionViolated, "lambda must lie in (0, 1)");
  return ToricTestConfig({1 - lambda}, {Rational(0), Rational(1)}, Rational(0));
}

std::vector<Rational> ToricTestConfig::vertex_values() const {
  std::vector<Rational> out{g0_};
  Rational left = 0;
  for (std::size_t j = 0; j < slopes_.size(); ++j) {
    const Rational right = j < breakpoints_.size() ? breakpoints_[j] : Rational(1);
    out.push_back(out.back() + slopes_[j] * (right - left));
    left = right;
  }
  return out;
}

Rational ToricTestConfig::value(const Rational& x) const {
  if (x < 0 || x > 1) throw Error(ErrorCode::PreconditionViolated, "g is defined on [0, 1]");
  Rational v = g0_;
  Rational left = 0;
  for (std::size_t j = 0; j < slopes_.size(); ++j) {
    const Rational right = j < breakpoints_.size() ? breakpoints_[j] : Rational(1);
    if (x <= right) return v + slopes_[j] * (x - left);
    v += slopes_[j] * (right - left);
    left = right;
  }
  return v;
}

Rational ToricTestConfig::integral() const {
  const auto values = vertex_values();
  Rational sum = 0;
  Rational left = 0;
  for (std::size_t j = 0; j < slopes_.size(); ++j) {
    const Rational right = j < breakpoints_.size() ? breakpoints_[j] : Rational(1);
    sum += (values[j] + values[j + 1]) * (right - left) / 2;
    left = right;
  }
  return sum;
}

Rational ToricTestConfig::minimum() const {
  const auto values = vertex_values();
  return *std::min_element(values.begin(), values.end());
}

std::string ToricTestConfig::to_string() const {
  std::ostringstream out;
  auto list = [&](const std::vector<Rational>& v) {
    out << '[';
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << kquant::to_string(v[i]);
    out << ']';
  };
  out << "breakpoints = ";
  list(breakpoints_);
  out << "; slopes = ";
  list(slopes_);
  out << "; g0 = " << kquant::to_string(g0_);
  return out.str();
}

namespace {

double poly_eval(const std::vector<double>& c, double x, int order) {
  double sum = 0.0;
  for (std::size_t j = c.size(); j-- > static_cast<std::size_t>(order);) {
    double coeff = c[j];
    for (int d = 0; d < order; ++d) coeff *= static_cast<double>(j - static_cast<std::size_t>(d));
    sum = sum * x + coeff;
  }
  return sum;
}

template <typename F>
double sampled_min(F f) {
  constexpr int kSamples = 4096;
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kSamples; ++i) m = std::min(m, f(static_cast<double>(i) / kSamples));
  return m;
}

double logit(double x) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  if (x >= 1.0) return std::numeric_limits<double>::infinity();
  return std::log(x) - std::log1p(-x);
}

}  // namespace

RayDirection RayDirection::from(const ToricTestConfig& cfg) {
  RayDirection d;
  d.breakpoints.clear();
  for (const auto& b : cfg.breakpoints()) d.breakpoints.push_back(to_double(b));
  d.slopes.clear();
  for (const auto& m : cfg.slopes()) d.slopes.push_back(to_double(m));
  d.g0 = to_double(cfg.g0());
  return d;
}

RayDirection RayDirection::polynomial(std::vector<double> coefficients) {
  RayDirection d;
  d.poly = std::move(coefficients);
  return d;
}

double RayDirection::operator()(double x) const {
  double v = g0;
  double left = 0.0;
  for (std::size_t j = 0; j < slopes.size(); ++j) {
    const double right = j < breakpoints.size() ? breakpoints[j] : 1.0;
    if (x <= right || j + 1 == slopes.size()) {
      v += slopes[j] * (x - left);
      break;
    }
    v += slopes[j] * (right - left);
    left = right;
  }
  return v + poly_eval(poly, x, 0);
}

double RayDirection::derivative(double x) const {
  std::size_t j = 0;
  while (j < breakpoints.size() && x >= breakpoints[j]) ++j;
  return slopes[j] + poly_eval(poly, x, 1);
}

double RayDirection::min_slope() const {
  if (poly.size() < 2) return slopes.front();
  return slopes.front() + sampled_min([&](double x) { return poly_eval(poly, x, 1); });
}

double RayDirection::max_slope() const {
  if (poly.size() < 2) return slopes.back();
  return slopes.back() - sampled_min([&](double x) { return -poly_eval(poly, x, 1); });
}

double RayDirection::min_poly_curvature() const {
  if (poly.size() < 3) return 0.0;
  return sampled_min([&](double x) { return poly_eval(poly, x, 2); });
}

double RayDirection::integral() const {
  double sum = 0.0;
  double left = 0.0;
  double v_left = g0;
  for (std::size_t j = 0; j < slopes.size(); ++j) {
    const double right = j < breakpoints.size() ? breakpoints[j] : 1.0;
    const double v_right = v_left + slopes[j] * (right - left);
    sum += 0.5 * (v_left + v_right) * (right - left);
    left = right;
    v_left = v_right;
  }
  for (std::size_t j = 0; j < poly.size(); ++j) sum += poly[j] / static_cast<double>(j + 1);
  return sum;
}

double RayDirection::minimum() const {
  double m = sampled_min([&](double x) { return (*this)(x); });
  for (double b : breakpoints) m = std::min(m, (*this)(b));
  return m;
}

RayDirection RayDirection::scaled(double factor) const {
  RayDirection d = *this;
  for (double& m : d.slopes) m *= factor;
  d.g0 *= factor;
  for (double& c : d.poly) c *= factor;
  return d;
}

RayDirection RayDirection::shifted(double c) const {
  RayDirection d = *this;
  d.g0 += c;
  return d;
}

RayDirection RayDirection::plus_poly(const std::vector<double>& coefficients) const {
  RayDirection d = *this;
  if (d.poly.size() < coefficients.size()) d.poly.resize(coefficients.size(), 0.0);
  for (std::size_t j = 0; j < coefficients.size(); ++j) d.poly[j] += coefficients[j];
  return d;
}

ReducedPotential symplectic_potential(const RayDirection& g, double t, GridPtr grid) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorCode::PreconditionViolated, "ray time must be finite and >= 0");
  if (t * g.min_poly_curvature() <= -4.0) {
    throw Error(ErrorCode::LegendreFailure, "psi0* + t g is not strictly convex");
  }
  const std::size_t pieces = g.slopes.size();
  std::vector<double> left(pieces);
  std::vector<double> right(pieces);
  std::vector<double> g_left(pieces);
  for (std::size_t j = 0; j < pieces; ++j) {
    left[j] = j == 0 ? 0.0 : g.breakpoints[j - 1];
    right[j] = j < g.breakpoints.size() ? g.breakpoints[j] : 1.0;
    g_left[j] = (j == 0 ? g.g0 : g_left[j - 1] + g.slopes[j - 1] * (right[j - 1] - left[j - 1]));
  }
  const bool smooth = g.poly.size() >= 2;
  const double dp_min = smooth ? g.min_slope() - g.slopes.front() : 0.0;
  const double dp_max = smooth ? g.max_slope() - g.slopes.back() : 0.0;
  const double inf = std::numeric_limits<double>::infinity();

  const Index n = grid->size();
  Vector out(n);
  for (Index k = 0; k < n; ++k) {
    const double s = (*grid)[k];
    double best = inf;
    for (std::size_t j = 0; j < pieces; ++j) {
      const double m = g.slopes[j];
      const double y_lo = logit(left[j]);
      const double y_hi = logit(right[j]);
      double y = s - t * m;
      if (smooth) {
        // Root of y + t (m + p'(sigma(y))) = s, increasing in y.
        auto phi = [&](double yy) { return yy + t * (m + poly_eval(g.poly, logistic(yy), 1)) - s; };
        double a = std::max(y_lo, s - t * m - t * dp_max);
        double b = std::min(y_hi, s - t * m - t * dp_min);
        if (a >= b) {
          y = a > y_lo ? a : b;
        } else if (phi(a) >= 0.0) {
          y = a;
        } else if (phi(b) <= 0.0) {
          y = b;
        } else {
          for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
            const double mid = 0.5 * (a + b);
            (phi(mid) < 0.0 ? a : b) = mid;
          }
          y = 0.5 * (a + b);
        }
      }
      y = std::clamp(y, y_lo, y_hi);
      double kl;
      double x;
      if (y == -inf) {
        x = 0.0;
        kl = softplus(s);
      } else if (y == inf) {
        x = 1.0;
        kl = softplus(-s);
      } else {
        x = logistic(y);
        const double one_minus_x = logistic(-y);
        kl = x * (softplus(-s) - softplus(-y)) + one_minus_x * (softplus(s) - softplus(y));
      }
      const double gx = g_left[j] + m * (x - left[j]) + poly_eval(g.poly, x, 0);
      best = std::min(best, kl + t * gx);
    }
    out[k] = -best;
  }
  return ReducedPotential(std::move(grid), std::move(out));
}

}  // namespace kquant
