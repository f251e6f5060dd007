#include <cmath>
#include <vector>

#include "doctest.h"
#include "maxstable/generator.hpp"
#include "maxstable/semigroup.hpp"
#include "oracles.hpp"

using namespace maxstable;

namespace {

GeneratorContext context(double alpha, std::size_t d = 1, MeasureKind kind = MeasureKind::independence) {
  return GeneratorContext(MaxStableLaw(alpha, standard_measure(d, kind, 0.3)));
}

}  // namespace

TEST_CASE("generator of log in closed form") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    const auto ctx = context(alpha);
    for (double x : {0.25, 1.0, 8.0}) {
      CHECK(generator(ctx, catalog::log(), x) == doctest::Approx(oracle::generator_log(alpha, x)).epsilon(1e-10));
      CHECK(D_op(ctx, catalog::log(), x) == doctest::Approx(std::pow(x, -alpha) / alpha).epsilon(1e-10));
    }
  }
}

TEST_CASE("generator annihilates constants and integrates to zero") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    const auto ctx = context(alpha);
    CHECK(generator(ctx, catalog::const1(), 1.3) == 0.0);
    for (const auto& f : catalog::smooth()) {
      const auto lf = generator_field(ctx, f);
      CHECK(std::abs(frechet_expectation(alpha, lf)) < 1e-8);
    }
  }
}

TEST_CASE("three generator forms agree") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    const auto ctx = context(alpha);
    for (const auto& f : catalog::smooth()) {
      for (double x : {0.25, 1.0, 8.0}) {
        const double a = generator(ctx, f, x);
        CHECK(generator_pareto_form_1d(alpha, f, x, ParetoForm::jump) == doctest::Approx(a).epsilon(1e-9));
        CHECK(generator_pareto_form_1d(alpha, f, x, ParetoForm::derivative) == doctest::Approx(a).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("multivariate D reduces to coordinate sums under independence") {
  const auto ctx2 = context(1.0, 2);
  const auto ctx1 = context(1.0);
  const std::vector<double> x{0.6, 1.7};
  const double both = D_op(ctx2, catalog::sum_of_logs(2), x);
  CHECK(both == doctest::Approx(D_op(ctx1, catalog::log(), 0.6) + D_op(ctx1, catalog::log(), 1.7)).epsilon(1e-9));
}

TEST_CASE("divergence of a function in closed form") {
  // delta_alpha inv1p(x) = -x^{alpha+1} / (alpha (1+x)^2) + 1/(1+x)
  for (double alpha : {0.5, 2.0}) {
    for (double x : {0.3, 2.0}) {
      const double expected = -std::pow(x, alpha + 1.0) / (alpha * (1.0 + x) * (1.0 + x)) + 1.0 / (1.0 + x);
      CHECK(divergence_delta(alpha, catalog::inv1p(), x) == doctest::Approx(expected).epsilon(1e-14));
    }
  }
}

TEST_CASE("carre du champ is nonnegative and bilinear") {
  const auto ctx = context(1.0);
  const auto f = catalog::atanlog(), g = catalog::inv1p();
  for (double x : {0.3, 1.0, 3.0}) {
    const std::vector<double> p{x};
    CHECK(carre_du_champ(ctx, f, f, p) >= 0.0);
    const auto sum = affine(f, 2.0, 0.0);
    CHECK(carre_du_champ(ctx, sum, g, p) == doctest::Approx(2.0 * carre_du_champ(ctx, f, g, p)).epsilon(1e-9));
  }
}

TEST_CASE("Dirichlet form by quadrature and by Monte Carlo agree") {
  const auto ctx = context(1.0);
  const auto quad = dirichlet_form(ctx, catalog::atanlog(), DirichletMethod::quad_1d);
  const auto mc = dirichlet_form(ctx, catalog::atanlog(), DirichletMethod::mc, 20000, RngSpec{41, 0});
  CHECK(std::abs(quad.value - mc.value) < 4.0 * mc.std_error);
  // E(f) = -E[f L f]
  const auto lf = generator_field(ctx, catalog::atanlog());
  const double minus_f_lf = -frechet_expectation(1.0, product(catalog::atanlog(), lf));
  CHECK(quad.value == doctest::Approx(minus_f_lf).epsilon(1e-7));
}

TEST_CASE("inverse generator of centered log") {
  // L log = (x^{-alpha} - 1)/alpha, so L^{-1} of (x^{-alpha} - 1)/alpha is log - E log.
  const double alpha = 1.0;
  const auto ctx = context(alpha);
  const auto g = ScalarField::univariate(
      "Llog", [alpha](double x) { return oracle::generator_log(alpha, x); },
      [alpha](double x) { return -std::pow(x, -alpha - 1.0); });
  for (double x : {0.5, 2.0}) {
    CHECK(inverse_generator(ctx, g, x) == doctest::Approx(std::log(x) - oracle::kEulerGamma).epsilon(1e-8));
    CHECK(inverse_generator_derivative(alpha, g, x) == doctest::Approx(1.0 / x).epsilon(1e-8));
  }
  CHECK_THROWS_AS((void)inverse_generator(ctx, catalog::log(), 1.0), std::invalid_argument);
  const std::vector<double> x{2.0};
  const auto mc = inverse_generator_mc(ctx.law, g, x, 100000, RngSpec{42, 0});
  CHECK(std::abs(mc.value - (std::log(2.0) - oracle::kEulerGamma)) < 4.0 * mc.std_error);
}

TEST_CASE("commutator residuals are small at alpha = 1") {
  const auto residuals = commutator_suite(context(1.0));
  CHECK(!residuals.empty());
  for (const auto& r : residuals) {
    INFO(r.operator_name << " " << r.function_name);
    CHECK(r.passed());
  }
}
