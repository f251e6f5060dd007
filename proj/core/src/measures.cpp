#include "maxstable/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace maxstable {

AngularMeasure::AngularMeasure(std::size_t dim, std::vector<Atom> atoms)
    : dim_(dim), atoms_(std::move(atoms)) {
  if (dim_ == 0) throw std::invalid_argument("angular measure: dimension must be at least 1");
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    const auto& a = atoms_[k];
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw std::invalid_argument("angular measure: atom " + std::to_string(k) +
                                  " has a non-positive weight");
    }
    if (a.direction.size() != dim_) {
      throw std::invalid_argument("angular measure: atom " + std::to_string(k) +
                                  " has the wrong dimension");
    }
    double top = 0.0;
    for (double u : a.direction) {
      if (!(u >= 0.0 && u <= 1.0)) {
        throw std::invalid_argument("angular measure: atom " + std::to_string(k) +
                                    " has an entry outside [0,1]");
      }
      top = std::max(top, u);
    }
    if (std::abs(top - 1.0) > 1e-12) {
      throw std::invalid_argument("angular measure: atom " + std::to_string(k) +
                                  " is not sup-normalized (largest entry must be 1)");
    }
  }
}

double AngularMeasure::total_mass() const noexcept {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.weight;
  return m;
}

AngularMeasure standard_measure(std::size_t d, MeasureKind kind, double theta) {
  if (d == 0) throw std::invalid_argument("standard_measure: d must be at least 1");
  std::vector<Atom> atoms;
  auto basis = [&](double w) {
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<double> e(d, 0.0);
      e[j] = 1.0;
      atoms.push_back({w, std::move(e)});
    }
  };
  switch (kind) {
    case MeasureKind::independence:
      basis(1.0);
      break;
    case MeasureKind::dependence:
      atoms.push_back({1.0, std::vector<double>(d, 1.0)});
      break;
    case MeasureKind::mixture:
      if (!(theta >= 0.0 && theta <= 1.0)) {
        throw std::invalid_argument("standard_measure: mixture weight must lie in [0,1]");
      }
      if (theta > 0.0) atoms.push_back({theta, std::vector<double>(d, 1.0)});
      if (theta < 1.0) basis(1.0 - theta);
      break;
  }
  AngularMeasure nu(d, std::move(atoms));
  const auto check = validate_moment_constraint(nu);
  if (!check.passed) throw std::logic_error("standard_measure: " + check.message);
  return nu;
}

MomentValidation validate_moment_constraint(const AngularMeasure& nu, double tolerance) {
  MomentValidation out;
  if (nu.atoms().empty()) {
    out.message = "angular measure has no atoms";
    out.worst_deviation = 1.0;
    return out;
  }
  for (std::size_t j = 0; j < nu.dim(); ++j) {
    double s = 0.0;
    for (const auto& a : nu.atoms()) s += a.weight * a.direction[j];
    const double dev = std::abs(s - 1.0);
    if (dev > out.worst_deviation || j == 0) {
      out.worst_deviation = dev;
      out.worst_coordinate = j;
    }
  }
  out.passed = out.worst_deviation <= tolerance;
  std::ostringstream msg;
  msg.precision(17);
  if (out.passed) {
    msg << "moment constraint holds (worst deviation " << out.worst_deviation << " at coordinate "
        << out.worst_coordinate + 1 << ")";
  } else {
    msg << "moment constraint violated at coordinate " << out.worst_coordinate + 1
        << ": sum of w*u deviates from 1 by " << out.worst_deviation;
  }
  out.message = msg.str();
  return out;
}

MaxStableLaw::MaxStableLaw(double alpha, AngularMeasure nu) : alpha_(alpha), nu_(std::move(nu)) {
  if (!std::isfinite(alpha_)) throw std::invalid_argument("max-stable law: alpha must be finite");
  const auto check = validate_moment_constraint(nu_);
  if (!check.passed) throw std::invalid_argument(check.message);
}

Branch MaxStableLaw::branch() const noexcept {
  if (alpha_ > 0.0) return Branch::frechet;
  if (alpha_ == 0.0) return Branch::gumbel;
  return Branch::weibull;
}

namespace {

ExponentTail tail_at(const AngularMeasure& nu, double alpha, std::span<const double> x) {
  if (x.size() != nu.dim()) throw std::invalid_argument("exponent_tail: dimension mismatch");
  for (double xj : x) {
    if (xj < 0.0 || std::isnan(xj)) throw std::domain_error("exponent_tail: negative coordinate");
    if (xj == 0.0) return {std::numeric_limits<double>::infinity(), false};
  }
  double total = 0.0;
  for (const auto& a : nu.atoms()) {
    double worst = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (a.direction[j] > 0.0) worst = std::max(worst, a.direction[j] * std::pow(x[j], -alpha));
    }
    total += a.weight * worst;
  }
  return {total, true};
}

}  // namespace

ExponentTail exponent_tail(const MaxStableLaw& law, std::span<const double> x) {
  if (law.branch() != Branch::frechet) {
    throw std::domain_error("exponent_tail: requires alpha > 0");
  }
  return tail_at(law.nu(), law.alpha(), x);
}

double cdf(const MaxStableLaw& law, std::span<const double> x) {
  if (law.branch() == Branch::frechet) {
    for (double xj : x) {
      if (xj <= 0.0) return 0.0;
    }
    const auto t = exponent_tail(law, x);
    return t.finite ? std::exp(-t.value) : 0.0;
  }
  // Conjugate to the alpha = 1 law: exp for Gumbel, (-x)^alpha for Weibull.
  std::vector<double> y(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (law.branch() == Branch::gumbel) {
      y[j] = std::exp(x[j]);
    } else {
      if (x[j] >= 0.0) {
        y[j] = std::numeric_limits<double>::infinity();
      } else {
        y[j] = std::pow(-x[j], law.alpha());
      }
    }
  }
  const auto t = tail_at(law.nu(), 1.0, y);
  return t.finite ? std::exp(-t.value) : 0.0;
}

double homogeneity_residual(const MaxStableLaw& law, std::span<const double> x, double t) {
  if (!(t > 0.0)) throw std::domain_error("homogeneity_residual: t must be positive");
  std::vector<double> scaled(x.begin(), x.end());
  const double s = std::pow(t, 1.0 / law.alpha());
  for (double& v : scaled) v *= s;
  const auto base = exponent_tail(law, x);
  const auto moved = exponent_tail(law, scaled);
  if (!base.finite || !moved.finite) return (base.finite == moved.finite) ? 0.0 : 1.0;
  const double scale = std::max(base.value, std::numeric_limits<double>::min());
  return std::abs(moved.value - base.value / t) / scale;
}

}  // namespace maxstable
