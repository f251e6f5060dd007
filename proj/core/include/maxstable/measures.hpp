#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace maxstable {

struct Atom {
  double weight = 0.0;
  std::vector<double> direction;
};

/// Finite atomic measure on the positive part of the sup-norm unit sphere.
/// Construction checks structure only; the moment constraint is checked by
/// validate_moment_constraint and enforced by MaxStableLaw.
class AngularMeasure {
 public:
  AngularMeasure(std::size_t dim, std::vector<Atom> atoms);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  [[nodiscard]] double total_mass() const noexcept;

 private:
  std::size_t dim_;
  std::vector<Atom> atoms_;
};

enum class MeasureKind { independence, dependence, mixture };

/// independence: unit atoms at the basis vectors; dependence: one unit atom at
/// (1,...,1); mixture: theta * dependence + (1 - theta) * independence.
[[nodiscard]] AngularMeasure standard_measure(std::size_t d, MeasureKind kind, double theta = 0.5);

struct MomentValidation {
  bool passed = false;
  std::size_t worst_coordinate = 0;
  double worst_deviation = 0.0;
  std::string message;
};

[[nodiscard]] MomentValidation validate_moment_constraint(const AngularMeasure& nu,
                                                          double tolerance = 1e-12);

enum class Branch { frechet, gumbel, weibull };

/// MS(alpha, nu). Throws std::invalid_argument if nu violates the moment constraint.
class MaxStableLaw {
 public:
  MaxStableLaw(double alpha, AngularMeasure nu);

  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] const AngularMeasure& nu() const noexcept { return nu_; }
  [[nodiscard]] std::size_t dim() const noexcept { return nu_.dim(); }
  [[nodiscard]] Branch branch() const noexcept;

 private:
  double alpha_;
  AngularMeasure nu_;
};

/// mu([0,x]^c); `finite` is false exactly when the value is +infinity.
struct ExponentTail {
  double value = 0.0;
  bool finite = true;
};

/// Requires alpha > 0 and nonnegative coordinates (std::domain_error otherwise).
[[nodiscard]] ExponentTail exponent_tail(const MaxStableLaw& law, std::span<const double> x);

/// exp(-mu([0,x]^c)); non-Frechet branches are mapped to alpha = 1 first.
[[nodiscard]] double cdf(const MaxStableLaw& law, std::span<const double> x);

/// |mu[0, t^{1/alpha} x]^c - mu[0,x]^c / t|, relative to mu[0,x]^c.
[[nodiscard]] double homogeneity_residual(const MaxStableLaw& law, std::span<const double> x, double t);

}  // namespace maxstable
