#include "maxstable/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "maxstable/sampling.hpp"

namespace maxstable {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MaxStableLaw unit_law(const AngularMeasure& nu) { return MaxStableLaw(1.0, nu); }

}  // namespace

void sample_branch(const MaxStableLaw& law, Rng& rng, std::span<double> out) {
  if (law.branch() == Branch::frechet) {
    sample_max_stable(law, rng, out);
    return;
  }
  sample_max_stable(unit_law(law.nu()), rng, out);
  for (double& z : out) {
    z = law.branch() == Branch::gumbel ? std::log(z) : -std::pow(z, 1.0 / law.alpha());
  }
}

McEstimate mehler_mc(const MaxStableLaw& law, const ScalarField& f, double t, std::span<const double> x,
                     std::size_t n, RngSpec rng, const ExecutionPolicy& exec) {
  if (!(t >= 0.0)) throw std::domain_error("mehler_mc: t must be nonnegative");
  if (x.size() != law.dim() || f.dim() != law.dim()) throw std::invalid_argument("mehler_mc: dimension mismatch");
  const double alpha = law.alpha();
  const double c = -std::expm1(-t);
  const std::size_t d = law.dim();
  std::vector<double> start(x.begin(), x.end());
  double shift = 0.0;
  if (law.branch() == Branch::gumbel) {
    for (double& v : start) v -= t;
    shift = std::log(c);
  } else {
    const double a = std::exp(-t / alpha);
    for (double& v : start) v *= a;
    shift = std::pow(c, 1.0 / alpha);
  }
  const bool additive = law.branch() == Branch::gumbel;
  return mc_mean(
      n, rng,
      [&, z = std::vector<double>(d)](Rng& r) mutable {
        sample_branch(law, r, z);
        for (std::size_t j = 0; j < d; ++j) {
          const double moved = additive ? z[j] + shift : (c == 0.0 ? -kInf : shift * z[j]);
          z[j] = std::max(start[j], moved);
        }
        return f(z);
      },
      exec);
}

double frechet_expectation(double alpha, const ScalarField& f, const QuadratureSpec& quad) {
  if (f.dim() != 1) throw std::invalid_argument("frechet_expectation: univariate field required");
  return frechet_mean([&f](double z) { return f(z); }, alpha, quad, 0.0, kInf, f.kinks(0)).value;
}

double semigroup_1d(double alpha, const ScalarField& f, double t, double x, const QuadratureSpec& quad) {
  if (!(alpha > 0.0)) throw std::domain_error("semigroup_1d: alpha must be positive");
  if (!(t >= 0.0)) throw std::domain_error("semigroup_1d: t must be nonnegative");
  if (!(x > 0.0)) throw std::domain_error("semigroup_1d: x must be positive");
  if (f.dim() != 1) throw std::invalid_argument("semigroup_1d: univariate field required");
  if (t == 0.0) return f(x);
  // P_t f(x) = E f(a x (+) b Z): the start survives when b Z <= a x.
  const double a = std::exp(-t / alpha);
  const double b = std::pow(-std::expm1(-t), 1.0 / alpha);
  const double threshold = a * x / b;
  const double stay = threshold > 0.0 ? std::exp(-std::pow(threshold, -alpha)) : 0.0;
  std::vector<double> breaks;
  for (double k : f.kinks(0)) breaks.push_back(k / b);
  const auto jump = frechet_mean([&](double z) { return f(b * z); }, alpha, quad, threshold, kInf, breaks);
  return (stay > 0.0 ? f(a * x) * stay : 0.0) + jump.value;
}

double semigroup_derivative_1d(double alpha, const ScalarField& f, double t, double x) {
  if (!(alpha > 0.0) || !(x > 0.0) || !(t >= 0.0)) {
    throw std::domain_error("semigroup_derivative_1d: need alpha > 0, x > 0, t >= 0");
  }
  if (!f.has_gradient()) throw std::invalid_argument("semigroup_derivative_1d: " + f.name() + " has no gradient");
  const double a = std::exp(-t / alpha);
  const double damping = std::exp(-std::expm1(t) * std::pow(x, -alpha));
  if (damping == 0.0) return 0.0;
  return a * damping * f.derivative(a * x);
}

ScalarField semigroup_field(double alpha, const ScalarField& f, double t, const QuadratureSpec& quad) {
  ScalarField::Univariate value = [alpha, f, t, quad](double x) { return semigroup_1d(alpha, f, t, x, quad); };
  ScalarField out = f.has_gradient()
                        ? ScalarField::univariate("P_t " + f.name(), value,
                                                  [alpha, f, t](double x) {
                                                    return semigroup_derivative_1d(alpha, f, t, x);
                                                  })
                        : with_central_difference("P_t " + f.name(), value);
  std::vector<double> kinks;
  for (double k : f.kinks(0)) kinks.push_back(k * std::exp(t / alpha));
  out.with_kinks(0, kinks);
  if (f.limit_at_infinity()) out.with_limit_at_infinity(*f.limit_at_infinity());
  if (f.log_lipschitz()) out.with_log_lipschitz(*f.log_lipschitz());
  return out;
}

PsiTransform::PsiTransform(PsiKind kind, std::string name, std::function<double(double)> psi,
                           std::function<double(double)> inverse, bool increasing)
    : kind_(kind), name_(std::move(name)), psi_(std::move(psi)), inverse_(std::move(inverse)), increasing_(increasing) {}

PsiTransform PsiTransform::power(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("power transform: alpha must be positive");
  return {PsiKind::power, "power", [alpha](double x) { return std::pow(x, alpha); },
          [alpha](double y) { return std::pow(y, 1.0 / alpha); }, true};
}

PsiTransform PsiTransform::gumbel() {
  return {PsiKind::gumbel, "gumbel", [](double x) { return std::exp(x); }, [](double y) { return std::log(y); }, true};
}

PsiTransform PsiTransform::weibull(double alpha) {
  if (!(alpha < 0.0)) throw std::invalid_argument("weibull transform: alpha must be negative");
  return {PsiKind::weibull, "weibull", [alpha](double x) { return std::pow(-x, alpha); },
          [alpha](double y) { return -std::pow(y, 1.0 / alpha); }, true};
}

PsiTransform PsiTransform::min_stable_exponential() {
  return {PsiKind::min_stable_exponential, "min_stable_exponential", [](double x) { return 1.0 / x; },
          [](double y) { return 1.0 / y; }, false};
}

PsiTransform PsiTransform::max_id_uniform() {
  return {PsiKind::max_id_uniform, "max_id_uniform", [](double x) { return -1.0 / std::log(x); },
          [](double y) { return std::exp(-1.0 / y); }, true};
}

PsiTransform PsiTransform::max_id_logistic() {
  return {PsiKind::max_id_logistic, "max_id_logistic", [](double x) { return 1.0 / std::log1p(std::exp(-x)); },
          [](double y) { return -std::log(std::expm1(1.0 / y)); }, true};
}

PsiTransform PsiTransform::custom(std::string name, std::function<double(double)> psi,
                                  std::function<double(double)> psi_inverse, double lower, double upper) {
  if (!psi || !psi_inverse) throw std::invalid_argument("custom transform: psi and its inverse are required");
  if (!(upper > lower)) throw std::invalid_argument("custom transform: empty domain");
  constexpr int kProbes = 257;
  std::vector<double> xs, ys;
  for (int i = 1; i < kProbes; ++i) {
    const double x = lower + (upper - lower) * i / kProbes;
    xs.push_back(x);
    ys.push_back(psi(x));
  }
  int ups = 0, downs = 0;
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    if (!(ys[i] > 0.0) || !std::isfinite(ys[i])) throw std::invalid_argument("custom transform: psi must map into (0, inf)");
    if (ys[i + 1] > ys[i]) ++ups;
    else if (ys[i + 1] < ys[i]) ++downs;
    else throw std::invalid_argument("custom transform: psi is not strictly monotone");
  }
  if (ups > 0 && downs > 0) throw std::invalid_argument("custom transform: psi is not monotone");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double back = psi_inverse(ys[i]);
    if (!(std::abs(back - xs[i]) <= 1e-8 * std::max(1.0, std::abs(xs[i])))) {
      throw std::invalid_argument("custom transform: psi_inverse does not invert psi");
    }
  }
  return {PsiKind::custom, std::move(name), std::move(psi), std::move(psi_inverse), ups > 0};
}

TransformedSemigroup::TransformedSemigroup(AngularMeasure nu, PsiTransform psi)
    : base_(1.0, std::move(nu)), psi_(std::move(psi)) {
  const auto k = psi_.kind();
  if ((k == PsiKind::min_stable_exponential || k == PsiKind::max_id_uniform || k == PsiKind::max_id_logistic) &&
      base_.dim() != 1) {
    throw std::invalid_argument("transformed semigroup: " + psi_.name() + " is univariate");
  }
}

void TransformedSemigroup::sample_stationary(Rng& rng, std::span<double> out) const {
  switch (psi_.kind()) {
    case PsiKind::min_stable_exponential:
      out[0] = rng.exponential();
      return;
    case PsiKind::max_id_uniform:
      out[0] = rng.uniform();
      return;
    default:
      sample_max_stable(base_, rng, out);
      for (double& z : out) z = psi_.psi_inverse(z);
  }
}

void TransformedSemigroup::sample_transition(double t, std::span<const double> x, Rng& rng,
                                             std::span<double> out) const {
  if (!(t >= 0.0)) throw std::domain_error("transformed semigroup: t must be nonnegative");
  const double c = -std::expm1(-t);
  switch (psi_.kind()) {
    case PsiKind::min_stable_exponential: {
      // e^t x (min) (1 - e^{-t})^{-1} E
      const double e = rng.exponential();
      out[0] = c == 0.0 ? x[0] : std::min(std::exp(t) * x[0], e / c);
      return;
    }
    case PsiKind::max_id_uniform: {
      // x^{e^t} (max) U^{1/(1 - e^{-t})}
      const double u = rng.uniform();
      out[0] = c == 0.0 ? x[0] : std::max(std::pow(x[0], std::exp(t)), std::pow(u, 1.0 / c));
      return;
    }
    default: {
      sample_max_stable(base_, rng, out);
      const double a = std::exp(-t);
      for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = psi_.psi_inverse(std::max(a * psi_.psi(x[j]), c * out[j]));
      }
    }
  }
}

McEstimate TransformedSemigroup::evaluate(const ScalarField& f, double t, std::span<const double> x, std::size_t n,
                                          RngSpec rng, const ExecutionPolicy& exec) const {
  if (x.size() != base_.dim()) throw std::invalid_argument("transformed semigroup: dimension mismatch");
  return mc_mean(
      n, rng,
      [&, y = std::vector<double>(base_.dim())](Rng& r) mutable {
        sample_transition(t, x, r, y);
        return f(y);
      },
      exec);
}

}  // namespace maxstable
