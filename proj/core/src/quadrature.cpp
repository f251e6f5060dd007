#include "maxstable/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace maxstable {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below u = -6 the Gumbel density carries mass exp(-e^6) < 1e-170.
constexpr double kGumbelFloor = -6.0;
constexpr std::size_t kTanhSinhLevels = 15;
constexpr std::size_t kHalfLineLevels = 12;
constexpr double kPilotTolerance = 1e-5;
// Finite pieces narrower than this, relative to their position, go to Gauss-Legendre:
// tanh-sinh error estimates break down when the piece spans few doubles.
constexpr double kNarrowPiece = 1e-2;
constexpr double kEndpointGuard = 64.0 * std::numeric_limits<double>::epsilon();

boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(kTanhSinhLevels);
  return rule;
}

boost::math::quadrature::exp_sinh<double>& exp_sinh_rule() {
  thread_local boost::math::quadrature::exp_sinh<double> rule(kHalfLineLevels);
  return rule;
}

boost::math::quadrature::sinh_sinh<double>& sinh_sinh_rule() {
  thread_local boost::math::quadrature::sinh_sinh<double> rule(kHalfLineLevels);
  return rule;
}

[[noreturn]] void fail(const char* where, double a, double b, double value, double error, double tol) {
  std::ostringstream msg;
  msg.precision(6);
  msg << where << ": tolerance " << tol << " not reached on [" << a << ", " << b << "] (estimate " << value
      << ", error " << error << ")";
  throw QuadratureError(msg.str(), value, error);
}

std::vector<double> cut_points(double a, double b, std::span<const double> breaks) {
  std::vector<double> cuts{a};
  std::vector<double> inner;
  for (double x : breaks) {
    if (x > a && x < b && std::isfinite(x)) inner.push_back(x);
  }
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
  cuts.insert(cuts.end(), inner.begin(), inner.end());
  cuts.push_back(b);
  return cuts;
}

QuadratureResult double_exponential_piece(const Integrand& g, double a, double b, double tol, double floor) {
  // Nodes within a few ulps of a finite end are clamped to the guard: a jump
  // sitting at a break may land on the wrong side of it after rounding.
  const double lo = std::isfinite(a) ? a + kEndpointGuard * std::max(std::abs(a), 1.0) : a;
  const double hi = std::isfinite(b) ? b - kEndpointGuard * std::max(std::abs(b), 1.0) : b;
  auto f = [&g, lo, hi](double x) {
    if (lo < hi) x = std::clamp(x, lo, hi);
    const double v = g(x);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "integrand is not finite at " << x;
      throw QuadratureError(msg.str(), v, kInf);
    }
    return v;
  };
  auto run = [&](double request, double& err, double& l1, std::size_t& levels) {
    if (std::isfinite(a) && std::isfinite(b)) return tanh_sinh_rule().integrate(f, a, b, request, &err, &l1, &levels);
    if (std::isfinite(a) || std::isfinite(b)) return exp_sinh_rule().integrate(f, a, b, request, &err, &l1, &levels);
    return sinh_sinh_rule().integrate(f, request, &err, &l1, &levels);
  };
  const std::size_t max_levels = std::isfinite(a) && std::isfinite(b) ? kTanhSinhLevels : kHalfLineLevels;
  double err = 0.0, l1 = 0.0;
  std::size_t levels = 0;
  // A coarse pilot sizes the integral; below `floor / l1` the relative request is
  // rounding noise and would only drive the refinement to its last level.
  double value = run(kPilotTolerance, err, l1, levels);
  if (err <= tol * l1 || err <= floor) return {value, err};
  double request = l1 > 0.0 ? std::max(tol, floor / l1) : tol;
  // Boost may stop one level before its reported error meets the request; a
  // tighter request forces the extra level.
  for (int attempt = 0; attempt < 3; ++attempt, request *= 1e-2) {
    value = run(request, err, l1, levels);
    if (err <= tol * l1 || err <= floor) return {value, err};
    if (levels >= max_levels) break;
  }
  fail("double-exponential quadrature", a, b, value, err, tol);
}

double gauss_legendre_sum(const Integrand& g, double a, double b, int n, double& l1) {
  const auto& rule = gauss_legendre_rule(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double s = 0.0;
  l1 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = rule.weights[i] * g(mid + half * rule.nodes[i]);
    s += v;
    l1 += std::abs(v);
  }
  l1 *= std::abs(half);
  return s * half;
}

QuadratureResult gauss_legendre_piece(const Integrand& g, double a, double b, const QuadratureSpec& spec) {
  Integrand mapped = g;
  double lo = a, hi = b;
  if (!std::isfinite(a) && !std::isfinite(b)) {
    const auto left = gauss_legendre_piece(g, -kInf, 0.0, spec);
    const auto right = gauss_legendre_piece(g, 0.0, kInf, spec);
    return {left.value + right.value, left.error + right.error};
  }
  if (!std::isfinite(b)) {
    mapped = [&g, a](double t) {
      const double s = 1.0 - t;
      return g(a + t / s) / (s * s);
    };
    lo = 0.0;
    hi = 1.0;
  } else if (!std::isfinite(a)) {
    mapped = [&g, b](double t) {
      const double s = 1.0 - t;
      return g(b - t / s) / (s * s);
    };
    lo = 0.0;
    hi = 1.0;
  }
  int n = spec.nodes;
  double l1 = 0.0;
  double prev = gauss_legendre_sum(mapped, lo, hi, n, l1);
  double err = kInf;
  for (int k = 0; k < spec.max_doublings; ++k) {
    n *= 2;
    const double cur = gauss_legendre_sum(mapped, lo, hi, n, l1);
    err = std::abs(cur - prev);
    if (err <= spec.tolerance * std::max(std::abs(cur), l1) || err <= spec.absolute_tolerance) return {cur, err};
    prev = cur;
  }
  fail("Gauss-Legendre quadrature", a, b, prev, err, spec.tolerance);
}

QuadratureResult integrate_pieces(const Integrand& g, const std::vector<double>& cuts, const QuadratureSpec& spec) {
  QuadratureResult total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    const double a = cuts[i], b = cuts[i + 1];
    const bool narrow = std::isfinite(a) && std::isfinite(b) && b - a < kNarrowPiece * std::max(std::abs(a), std::abs(b));
    const auto r = spec.scheme == QuadratureScheme::double_exponential && !narrow
                       ? double_exponential_piece(g, a, b, spec.tolerance, spec.absolute_tolerance)
                       : gauss_legendre_piece(g, a, b, spec);
    total.value += r.value;
    total.error += r.error;
  }
  return total;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (nodes < 8) throw std::invalid_argument("quadrature: at least 8 nodes required");
  if (!(tolerance > 0.0) || !(inner_tolerance > 0.0) || !(absolute_tolerance >= 0.0)) throw std::invalid_argument("quadrature: tolerance must be positive");
}

QuadratureSpec QuadratureSpec::inner() const {
  QuadratureSpec s = *this;
  s.tolerance = inner_tolerance;
  return s;
}

QuadratureSpec QuadratureSpec::with_tolerance(double tol) const {
  QuadratureSpec s = *this;
  s.tolerance = tol;
  s.inner_tolerance = std::min(inner_tolerance, tol);
  return s;
}

const GaussLegendreRule& gauss_legendre_rule(int n) {
  thread_local std::map<int, GaussLegendreRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

QuadratureResult integrate(const Integrand& g, double a, double b, const QuadratureSpec& spec,
                           std::span<const double> breaks) {
  spec.validate();
  if (a == b) return {};
  if (a > b) {
    auto r = integrate(g, b, a, spec, breaks);
    return {-r.value, r.error};
  }
  return integrate_pieces(g, cut_points(a, b, breaks), spec);
}

QuadratureResult radial_tail(const Integrand& h, double alpha, double r0, const QuadratureSpec& spec,
                             std::span<const double> breaks) {
  spec.validate();
  if (!(alpha > 0.0) || !(r0 > 0.0)) throw std::domain_error("radial_tail: need alpha > 0 and r0 > 0");
  if (!std::isfinite(r0)) return {};
  const double scale = std::pow(r0, -alpha);
  if (spec.scheme == QuadratureScheme::double_exponential) {
    // r = r0 e^s
    std::vector<double> s_breaks;
    for (double b : breaks) {
      if (b > r0) s_breaks.push_back(std::log(b / r0));
    }
    auto g = [&](double s) {
      const double w = alpha * std::exp(-alpha * s);
      const double r = r0 * std::exp(s);
      if (w == 0.0 || !std::isfinite(r)) return 0.0;
      return w * h(r);
    };
    auto r = integrate_pieces(g, cut_points(0.0, kInf, s_breaks), spec);
    return {scale * r.value, scale * r.error};
  }
  // r = r0 v^{-1/alpha}, v in (0,1]
  std::vector<double> v_breaks;
  for (double b : breaks) {
    if (b > r0) v_breaks.push_back(std::pow(r0 / b, alpha));
  }
  auto g = [&](double v) { return h(r0 * std::pow(v, -1.0 / alpha)); };
  auto r = integrate_pieces(g, cut_points(0.0, 1.0, v_breaks), spec);
  return {scale * r.value, scale * r.error};
}

QuadratureResult frechet_mean(const Integrand& h, double alpha, const QuadratureSpec& spec, double lower,
                              double upper, std::span<const double> breaks) {
  spec.validate();
  if (!(alpha > 0.0)) throw std::domain_error("frechet_mean: alpha must be positive");
  if (!(upper > lower)) return {};
  if (spec.scheme == QuadratureScheme::double_exponential) {
    // u = alpha log z has the standard Gumbel law.
    const double ulo = std::max(lower > 0.0 ? alpha * std::log(lower) : -kInf, kGumbelFloor);
    const double uhi = std::isfinite(upper) ? alpha * std::log(upper) : kInf;
    if (!(uhi > ulo)) return {};
    std::vector<double> u_breaks;
    for (double b : breaks) {
      if (b > 0.0) u_breaks.push_back(alpha * std::log(b));
    }
    if (!std::isfinite(uhi) && ulo < 0.0) u_breaks.push_back(0.0);
    auto g = [&](double u) {
      const double eu = std::exp(-u);
      const double w = eu * std::exp(-eu);
      const double z = std::exp(u / alpha);
      if (w == 0.0 || !std::isfinite(z)) return 0.0;
      return w * h(z);
    };
    return integrate_pieces(g, cut_points(ulo, uhi, u_breaks), spec);
  }
  // v = exp(-z^{-alpha}) is uniform.
  auto cdf = [alpha](double z) { return z <= 0.0 ? 0.0 : std::exp(-std::pow(z, -alpha)); };
  std::vector<double> v_breaks;
  for (double b : breaks) v_breaks.push_back(cdf(b));
  const double vlo = cdf(lower);
  const double vhi = std::isfinite(upper) ? cdf(upper) : 1.0;
  auto g = [&](double v) { return h(std::pow(-std::log(v), -1.0 / alpha)); };
  return integrate_pieces(g, cut_points(vlo, vhi, v_breaks), spec);
}

}  // namespace maxstable
