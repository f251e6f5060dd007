#include "maxstable/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "maxstable/sampling.hpp"
#include "maxstable/semigroup.hpp"

namespace maxstable {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// The s = e^{-t/2} integrand is O(s) near 0, so stopping here omits O(1e-12);
// smaller s only sees rounding noise in the gap.
constexpr double kSmallestS = 1e-6;

std::string format_time(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

GeneratorContext inner_context(const GeneratorContext& ctx) { return {ctx.law, ctx.quad.inner()}; }

void require_univariate(const ScalarField& f, const char* where) {
  if (f.dim() != 1) throw std::invalid_argument(std::string(where) + ": univariate field required");
}

void require_gradient(const ScalarField& f, const char* where) {
  if (!f.has_gradient()) throw std::invalid_argument(std::string(where) + ": " + f.name() + " has no gradient");
}

// Sum over atoms of w_k int_{r*_k}^inf jump(y) alpha r^{-alpha-1} dr, y = x (+) r u_k^{1/alpha}.
template <class Jump>
double atom_sum(const GeneratorContext& ctx, const ScalarField& f, std::span<const double> x, Jump&& jump) {
  const double alpha = ctx.alpha();
  const std::size_t d = x.size();
  if (d != ctx.law.dim() || f.dim() != d) throw std::invalid_argument("generator: dimension mismatch");
  for (double v : x) {
    if (!(v > 0.0)) throw std::domain_error("generator: x must be strictly positive");
  }
  double total = 0.0;
  std::vector<double> y(d), scale(d);
  for (const auto& atom : ctx.law.nu().atoms()) {
    double start = kInf;
    std::vector<double> breaks;
    for (std::size_t j = 0; j < d; ++j) {
      scale[j] = std::pow(atom.direction[j], 1.0 / alpha);
      if (scale[j] <= 0.0) continue;
      const double onset = x[j] / scale[j];
      start = std::min(start, onset);
      breaks.push_back(onset);
      for (double k : f.kinks(j)) breaks.push_back(k / scale[j]);
    }
    auto h = [&](double r) {
      for (std::size_t j = 0; j < d; ++j) y[j] = std::max(x[j], r * scale[j]);
      return jump(std::span<const double>(y));
    };
    total += atom.weight * radial_tail(h, alpha, start, ctx.quad, breaks).value;
  }
  return total;
}

double drift(double alpha, const ScalarField& f, std::span<const double> x) {
  std::vector<double> g(x.size());
  f.gradient(x, g);
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += x[j] * g[j];
  return -s / alpha;
}

// E[f(a x (+) b Z) - f(Z)] as one integral, so the difference keeps its relative accuracy.
double semigroup_gap(double alpha, const ScalarField& f, double t, double x, const QuadratureSpec& quad) {
  const double a = std::exp(-t / alpha);
  const double b = std::pow(-std::expm1(-t), 1.0 / alpha);
  const double ax = a * x;
  std::vector<double> breaks;
  if (b > 0.0) breaks.push_back(ax / b);
  for (double k : f.kinks(0)) {
    breaks.push_back(k);
    if (b > 0.0) breaks.push_back(k / b);
  }
  auto g = [&](double z) { return f(std::max(ax, b * z)) - f(z); };
  return frechet_mean(g, alpha, quad, 0.0, kInf, breaks).value;
}

double inverse_generator_unchecked(double alpha, const ScalarField& f, double x, const QuadratureSpec& quad) {
  // t = -2 log s, dt = 2 ds / s
  auto g = [&](double s) { return semigroup_gap(alpha, f, -2.0 * std::log(s), x, quad.inner()) * 2.0 / s; };
  return -integrate(g, kSmallestS, 1.0, quad).value;
}

double measured_mean(double alpha, const ScalarField& f, const QuadratureSpec& quad, double tolerance) {
  const double mean = frechet_expectation(alpha, f, quad);
  if (!(std::abs(mean) <= tolerance)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "inverse_generator: " << f.name() << " is not centered (E f(Z) = " << mean << ")";
    throw std::invalid_argument(msg.str());
  }
  return mean;
}

}  // namespace

GeneratorContext::GeneratorContext(MaxStableLaw l, QuadratureSpec q) : law(std::move(l)), quad(q) {
  if (!(law.alpha() > 0.0)) throw std::invalid_argument("generator: alpha must be positive");
  quad.validate();
}

double D_op(const GeneratorContext& ctx, const ScalarField& f, std::span<const double> x) {
  if (x.size() == 1) return D_op(ctx, f, x[0]);
  const double fx = f(x);
  return atom_sum(ctx, f, x, [&](std::span<const double> y) { return f(y) - fx; });
}

double D_op(const GeneratorContext& ctx, const ScalarField& f, double x) {
  require_univariate(f, "D_op");
  if (ctx.law.dim() != 1) throw std::invalid_argument("D_op: dimension mismatch");
  if (!(x > 0.0)) throw std::domain_error("D_op: x must be positive");
  const double fx = f(x);
  const double mass = ctx.law.nu().total_mass();
  return mass * radial_tail([&](double r) { return f(r) - fx; }, ctx.alpha(), x, ctx.quad, f.kinks(0)).value;
}

double generator(const GeneratorContext& ctx, const ScalarField& f, std::span<const double> x) {
  require_gradient(f, "generator");
  return drift(ctx.alpha(), f, x) + D_op(ctx, f, x);
}

double generator(const GeneratorContext& ctx, const ScalarField& f, double x) {
  require_gradient(f, "generator");
  return -x * f.derivative(x) / ctx.alpha() + D_op(ctx, f, x);
}

double generator_pareto_form_1d(double alpha, const ScalarField& f, double x, ParetoForm form,
                                const QuadratureSpec& quad) {
  require_univariate(f, "generator_pareto_form_1d");
  require_gradient(f, "generator_pareto_form_1d");
  if (!(alpha > 0.0) || !(x > 0.0)) throw std::domain_error("generator_pareto_form_1d: need alpha > 0 and x > 0");
  const double drift_term = -x * f.derivative(x) / alpha;
  if (form == ParetoForm::jump) {
    // Y has density alpha y^{-alpha-1} on [1, inf).
    const double fx = f(x);
    std::vector<double> breaks;
    for (double k : f.kinks(0)) breaks.push_back(k / x);
    auto g = [&](double y) { return (f(x * y) - fx) * alpha * std::pow(y, -alpha - 1.0); };
    return drift_term + std::pow(x, -alpha) * integrate(g, 1.0, kInf, quad, breaks).value;
  }
  // Y = p^{-1/alpha} with p uniform on (0, 1].
  std::vector<double> breaks;
  for (double k : f.kinks(0)) breaks.push_back(std::pow(k / x, -alpha));
  auto g = [&](double p) {
    const double y = std::pow(p, -1.0 / alpha);
    return std::isfinite(y) ? y * f.derivative(x * y) : 0.0;
  };
  return drift_term + std::pow(x, 1.0 - alpha) / alpha * integrate(g, 0.0, 1.0, quad, breaks).value;
}

ScalarField D_field(const GeneratorContext& ctx, const ScalarField& f) {
  auto inner = inner_context(ctx);
  auto out = with_central_difference("D " + f.name(), [inner, f](double x) { return D_op(inner, f, x); });
  out.with_kinks(0, f.kinks(0)).with_limit_at_infinity(0.0);
  return out;
}

ScalarField generator_field(const GeneratorContext& ctx, const ScalarField& f) {
  require_gradient(f, "generator_field");
  auto inner = inner_context(ctx);
  auto out = with_central_difference("L " + f.name(), [inner, f](double x) { return generator(inner, f, x); });
  out.with_kinks(0, f.kinks(0));
  return out;
}

double inverse_generator(const GeneratorContext& ctx, const ScalarField& f, double x, double centering_tolerance) {
  require_univariate(f, "inverse_generator");
  if (ctx.law.dim() != 1) throw std::invalid_argument("inverse_generator: dimension mismatch");
  if (!(x > 0.0)) throw std::domain_error("inverse_generator: x must be positive");
  measured_mean(ctx.alpha(), f, ctx.quad.inner(), centering_tolerance);
  return inverse_generator_unchecked(ctx.alpha(), f, x, ctx.quad);
}

double inverse_generator_derivative(double alpha, const ScalarField& f, double x, const QuadratureSpec& quad) {
  require_univariate(f, "inverse_generator_derivative");
  require_gradient(f, "inverse_generator_derivative");
  if (!(alpha > 0.0) || !(x > 0.0)) throw std::domain_error("inverse_generator_derivative: need alpha > 0, x > 0");
  // v = e^t - 1 = x^alpha w
  const double xa = std::pow(x, alpha);
  auto g = [&](double w) {
    const double decay = std::exp(-w);
    if (decay == 0.0) return 0.0;
    const double k = 1.0 + xa * w;
    return std::pow(k, -1.0 / alpha - 1.0) * decay * f.derivative(std::pow(k, -1.0 / alpha) * x);
  };
  return -xa * integrate(g, 0.0, kInf, quad).value;
}

ScalarField inverse_generator_field(const GeneratorContext& ctx, const ScalarField& f, double centering_tolerance) {
  require_univariate(f, "inverse_generator_field");
  require_gradient(f, "inverse_generator_field");
  measured_mean(ctx.alpha(), f, ctx.quad.inner(), centering_tolerance);
  const double alpha = ctx.alpha();
  const QuadratureSpec quad = ctx.quad.inner();
  return ScalarField::univariate(
      "Linv " + f.name(), [alpha, f, quad](double x) { return inverse_generator_unchecked(alpha, f, x, quad); },
      [alpha, f, quad](double x) { return inverse_generator_derivative(alpha, f, x, quad); });
}

McEstimate inverse_generator_mc(const MaxStableLaw& law, const ScalarField& f, std::span<const double> x,
                                std::size_t n, RngSpec rng, const ExecutionPolicy& exec) {
  if (!(law.alpha() > 0.0)) throw std::invalid_argument("inverse_generator_mc: alpha must be positive");
  if (x.size() != law.dim() || f.dim() != law.dim()) throw std::invalid_argument("inverse_generator_mc: dimension mismatch");
  const double alpha = law.alpha();
  const std::size_t d = law.dim();
  return mc_mean(
      n, rng,
      [&, z = std::vector<double>(d), y = std::vector<double>(d)](Rng& r) mutable {
        const double t = 2.0 * r.exponential();
        sample_max_stable(law, r, z);
        const double a = std::exp(-t / alpha);
        const double b = std::pow(-std::expm1(-t), 1.0 / alpha);
        for (std::size_t j = 0; j < d; ++j) y[j] = std::max(a * x[j], b * z[j]);
        return -2.0 * std::exp(t / 2.0) * (f(y) - f(z));
      },
      exec);
}

double divergence_delta(double alpha, const ScalarField& f, double x) {
  require_gradient(f, "divergence_delta");
  return std::pow(x, alpha) * (x * f.derivative(x)) / alpha + f(x);
}

ScalarField divergence_field(double alpha, const ScalarField& f) {
  require_univariate(f, "divergence_field");
  require_gradient(f, "divergence_field");
  auto out = with_central_difference("delta " + f.name(), [alpha, f](double x) { return divergence_delta(alpha, f, x); });
  out.with_kinks(0, f.kinks(0));
  return out;
}

double carre_du_champ(const GeneratorContext& ctx, const ScalarField& f, const ScalarField& g,
                      std::span<const double> x) {
  if (g.dim() != f.dim()) throw std::invalid_argument("carre_du_champ: dimension mismatch");
  const double fx = f(x), gx = g(x);
  if (x.size() == 1) {
    std::vector<double> breaks = f.kinks(0);
    breaks.insert(breaks.end(), g.kinks(0).begin(), g.kinks(0).end());
    auto h = [&](double r) { return (f(r) - fx) * (g(r) - gx); };
    if (!(x[0] > 0.0)) throw std::domain_error("carre_du_champ: x must be positive");
    return 0.5 * ctx.law.nu().total_mass() * radial_tail(h, ctx.alpha(), x[0], ctx.quad, breaks).value;
  }
  return 0.5 * atom_sum(ctx, f, x, [&](std::span<const double> y) { return (f(y) - fx) * (g(y) - gx); });
}

McEstimate dirichlet_form(const GeneratorContext& ctx, const ScalarField& f, DirichletMethod method, std::size_t n,
                          RngSpec rng, const ExecutionPolicy& exec) {
  auto inner = inner_context(ctx);
  if (method == DirichletMethod::quad_1d) {
    require_univariate(f, "dirichlet_form");
    auto gamma = [&](double z) {
      const double v[1] = {z};
      return carre_du_champ(inner, f, f, v);
    };
    const auto r = frechet_mean(gamma, ctx.alpha(), ctx.quad, 0.0, kInf, f.kinks(0));
    return {r.value, 0.0, 0, rng};
  }
  if (n == 0) throw std::invalid_argument("dirichlet_form: Monte Carlo needs n > 0");
  return mc_mean(
      n, rng,
      [&, z = std::vector<double>(ctx.law.dim())](Rng& r) mutable {
        sample_max_stable(ctx.law, r, z);
        return carre_du_champ(inner, f, f, z);
      },
      exec);
}

ScalarField product(const ScalarField& f, const ScalarField& g) {
  if (f.dim() != g.dim()) throw std::invalid_argument("product: dimension mismatch");
  const std::string name = f.name() + "*" + g.name();
  ScalarField out = [&] {
    if (f.dim() == 1) {
      ScalarField::Univariate df;
      if (f.has_gradient() && g.has_gradient()) {
        df = [f, g](double x) { return f.derivative(x) * g(x) + f(x) * g.derivative(x); };
      }
      return ScalarField::univariate(name, [f, g](double x) { return f(x) * g(x); }, df);
    }
    ScalarField::Gradient grad;
    if (f.has_gradient() && g.has_gradient()) {
      grad = [f, g](std::span<const double> x, std::span<double> out) {
        std::vector<double> gf(x.size()), gg(x.size());
        f.gradient(x, gf);
        g.gradient(x, gg);
        const double fv = f(x), gv = g(x);
        for (std::size_t j = 0; j < x.size(); ++j) out[j] = gf[j] * gv + fv * gg[j];
      };
    }
    return ScalarField(name, f.dim(), [f, g](std::span<const double> x) { return f(x) * g(x); }, grad);
  }();
  for (std::size_t j = 0; j < f.dim(); ++j) {
    auto k = f.kinks(j);
    k.insert(k.end(), g.kinks(j).begin(), g.kinks(j).end());
    out.with_kinks(j, k);
  }
  if (f.limit_at_infinity() && g.limit_at_infinity()) out.with_limit_at_infinity(*f.limit_at_infinity() * *g.limit_at_infinity());
  return out;
}

std::vector<OperatorResidual> commutator_suite(const GeneratorContext& ctx, const CommutatorOptions& options) {
  if (ctx.law.dim() != 1) throw std::invalid_argument("commutator_suite: d = 1 only");
  const double alpha = ctx.alpha();
  const auto inner = inner_context(ctx);
  std::vector<OperatorResidual> out;

  auto record = [&](std::string op, const ScalarField& f, auto&& residual) {
    OperatorResidual r{std::move(op), f.name(), 0.0, options.tolerance, options.probes};
    for (double x : options.probes) r.max_abs = std::max(r.max_abs, std::abs(residual(x)));
    out.push_back(std::move(r));
  };

  // delta f grows like x^alpha (log) or x^alpha / log^2 x (atanlog), so D(delta f)
  // is not computable for those two; delta identities use the decaying members.
  std::vector<ScalarField> centered;
  for (const auto& f : {catalog::inv1p(), catalog::ratio()}) {
    centered.push_back(affine(f, 1.0, -*f.limit_at_infinity()).with_name(f.name() + "-lim"));
  }

  for (const auto& g : centered) {
    const auto Dg = D_field(ctx, g);
    const auto dg = divergence_field(alpha, g);
    record("[delta,D]-Id", g, [&](double x) {
      return divergence_delta(alpha, Dg, x) - D_op(ctx, dg, x) - g(x);
    });
    const auto Lg = generator_field(ctx, g);
    record("[delta,L]-delta", g, [&](double x) {
      return divergence_delta(alpha, Lg, x) - generator(ctx, dg, x) - divergence_delta(alpha, g, x);
    });
    for (double t : options.times) {
      const auto Ptg = semigroup_field(alpha, g, t, inner.quad);
      record("delta P_t-e^t P_t delta (t=" + format_time(t) + ")", g, [&](double x) {
        return divergence_delta(alpha, Ptg, x) - std::exp(t) * semigroup_1d(alpha, dg, t, x, ctx.quad);
      });
    }
  }

  for (const auto& f : catalog::smooth()) {
    const auto Df = D_field(ctx, f);
    const auto Lf = generator_field(ctx, f);
    record("[L,D]-D", f, [&](double x) { return generator(ctx, Df, x) - D_op(ctx, Lf, x) - D_op(ctx, f, x); });
    for (double t : options.times) {
      const auto Ptf = semigroup_field(alpha, f, t, inner.quad);
      record("D P_t-e^-t P_t D (t=" + format_time(t) + ")", f, [&](double x) {
        return D_op(ctx, Ptf, x) - std::exp(-t) * semigroup_1d(alpha, Df, t, x, ctx.quad);
      });
    }
  }
  return out;
}

}  // namespace maxstable
