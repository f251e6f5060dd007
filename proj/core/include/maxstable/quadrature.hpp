#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace maxstable {

enum class QuadratureScheme {
  /// tanh-sinh / exp-sinh in logarithmic coordinates (Boost.Math).
  double_exponential,
  /// Fixed-node Gauss-Legendre on the unit interval after a probability
  /// substitution, doubling the node count until the tolerance is met.
  gauss_legendre,
};

struct QuadratureSpec {
  int nodes = 16;
  QuadratureScheme scheme = QuadratureScheme::double_exponential;
  double tolerance = 1e-9;
  /// Tolerance used for integrals nested inside another integral.
  double inner_tolerance = 1e-11;
  /// Errors below this are accepted whatever the size of the integral.
  double absolute_tolerance = 1e-15;
  int max_doublings = 12;

  void validate() const;
  [[nodiscard]] QuadratureSpec inner() const;
  [[nodiscard]] QuadratureSpec with_tolerance(double tol) const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double value, double error)
      : std::runtime_error(what), value_(value), error_(error) {}
  [[nodiscard]] double value() const noexcept { return value_; }
  [[nodiscard]] double error() const noexcept { return error_; }

 private:
  double value_;
  double error_;
};

using Integrand = std::function<double(double)>;

/// Integral of g over [a,b]; either end may be infinite. The domain is split at
/// `breaks` (points where g is not smooth). Throws QuadratureError when the
/// tolerance is not reached.
QuadratureResult integrate(const Integrand& g, double a, double b, const QuadratureSpec& spec,
                           std::span<const double> breaks = {});

/// int_{r0}^inf h(r) alpha r^{-alpha-1} dr.
QuadratureResult radial_tail(const Integrand& h, double alpha, double r0, const QuadratureSpec& spec,
                             std::span<const double> breaks = {});

/// E[h(Z); lower < Z < upper] for Z ~ Frechet(alpha, 1).
QuadratureResult frechet_mean(const Integrand& h, double alpha, const QuadratureSpec& spec, double lower = 0.0,
                              double upper = std::numeric_limits<double>::infinity(),
                              std::span<const double> breaks = {});

struct GaussLegendreRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;
};

[[nodiscard]] const GaussLegendreRule& gauss_legendre_rule(int n);

}  // namespace maxstable
