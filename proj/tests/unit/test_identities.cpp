#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "maxstable/identities.hpp"
#include "maxstable/sampling.hpp"
#include "maxstable/semigroup.hpp"

using namespace maxstable;

TEST_CASE("report semantics") {
  const auto eq = make_report("eq", ReportKind::equality, 1.0, 1.0 + 1e-9, 1e-8, "test");
  CHECK(eq.passed);
  CHECK(eq.status == ReportStatus::passed);
  CHECK(eq.slack() == doctest::Approx(1e-8 - 1e-9));
  const auto ineq = make_report("ineq", ReportKind::inequality, 2.0, 1.0, 0.5, "test");
  CHECK_FALSE(ineq.passed);
  CHECK(ineq.slack() == doctest::Approx(-1.0));
  auto control = ineq;
  control.expect_failure = true;
  CHECK(control.as_expected());
  CHECK_FALSE(ineq.as_expected());
}

TEST_CASE("suite names round-trip") {
  for (auto s : {Suite::stein, Suite::covariance, Suite::poincare, Suite::logsobolev, Suite::commutators, Suite::chaos,
                 Suite::secondorder, Suite::all}) {
    CHECK(parse_suite(to_string(s)) == s);
  }
  CHECK_THROWS_AS((void)parse_suite("nope"), std::invalid_argument);
}

TEST_CASE("covariance checkpoints") {
  for (const auto& r : covariance_checkpoints()) {
    INFO(r.identity_name);
    CHECK(r.passed);
    CHECK(r.rhs == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-15));
  }
}

TEST_CASE("covariance representation in one dimension") {
  for (double alpha : {0.5, 2.0}) {
    const auto r = verify_covariance_1d(alpha, catalog::log(), catalog::inv1p());
    INFO(r.identity_name << " lhs " << r.lhs << " rhs " << r.rhs);
    CHECK(r.passed);
  }
  // Var log Z = pi^2 / (6 alpha^2)
  const auto v = verify_covariance_1d(2.0, catalog::log(), catalog::log());
  CHECK(v.lhs == doctest::Approx(std::numbers::pi * std::numbers::pi / 24.0).epsilon(1e-9));
}

TEST_CASE("Frechet covariance identities") {
  const auto id1 = verify_frechet_cov(1.0, catalog::inv1p(), catalog::ratio(), FrechetCovariance::generator);
  CHECK(id1.passed);
  const auto centered = affine(catalog::log(), 1.0, -frechet_expectation(1.0, catalog::log()));
  QuadratureSpec q;
  q.tolerance = 1e-8;
  q.inner_tolerance = 1e-10;
  const auto id2 = verify_frechet_cov(1.0, centered, catalog::log(), FrechetCovariance::inverse_generator, q);
  CHECK(id2.passed);
  CHECK_THROWS((void)verify_frechet_cov(1.0, catalog::log(), catalog::log(), FrechetCovariance::inverse_generator));
}

TEST_CASE("Poincare and log-Sobolev have nonnegative slack") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (const auto& f : catalog::smooth()) {
      const auto r = verify_poincare_1d(alpha, f);
      INFO(f.name() << " alpha " << alpha);
      CHECK(r.passed);
      CHECK(r.slack() >= 0.0);
    }
    for (const auto& f : catalog::positive()) {
      const auto r = verify_log_sobolev_1d(alpha, f);
      INFO(f.name() << " alpha " << alpha);
      CHECK(r.passed);
    }
  }
  CHECK_THROWS_AS((void)verify_log_sobolev_1d(1.0, catalog::log()), std::domain_error);
}

TEST_CASE("Stein check separates the law from a rescaled one") {
  const auto nu = standard_measure(2, MeasureKind::mixture, 0.3);
  const MaxStableLaw law(1.0, nu);
  McOptions mc;
  mc.n = 20000;
  mc.rng = RngSpec{51, 0};
  const SampleSource right = [law](Rng& rng, std::span<double> out) { sample_max_stable(law, rng, out); };
  const SampleSource wrong = [law](Rng& rng, std::span<double> out) {
    sample_max_stable(law, rng, out);
    for (double& v : out) v *= 2.0;
  };
  const auto good = verify_stein(right, nu, catalog::sum_of_logs(2), mc);
  CHECK(good.passed);
  const auto bad = verify_stein(wrong, nu, catalog::sum_of_logs(2), mc, "control", true);
  CHECK_FALSE(bad.passed);
  CHECK(bad.as_expected());
  mc.n = 200;
  CHECK(verify_stein(right, nu, catalog::sum_of_logs(2), mc).status == ReportStatus::inconclusive);
}

TEST_CASE("chaos partial sums converge to the target") {
  QuadratureSpec q;
  q.tolerance = 1e-11;
  const auto c = chaos_expansion_1d(1.0, catalog::inv1p(), 1.0, 1.0, 24, q);
  CHECK(c.partial_sums.size() == 25);
  CHECK(c.achieved_error() < 1e-8);
  double weights = 0.0;
  for (double w : c.poisson_weights) weights += w;
  CHECK(weights == doctest::Approx(1.0).epsilon(1e-12));
  // E 1/(1 + max(1, Z)) with 1/Z ~ Exp(1): 1 - e^{-1}/2 - e (E_1(1) - E_1(2)), E_1(x) = -Ei(-x).
  const double e1 = -std::expint(-1.0), e2 = -std::expint(-2.0);
  CHECK(c.target == doctest::Approx(1.0 - 0.5 * std::exp(-1.0) - std::exp(1.0) * (e1 - e2)).epsilon(1e-10));
  for (std::size_t n = 1; n < c.partial_sums.size(); ++n) {
    CHECK(std::abs(c.partial_sums[n] - c.target) <= std::abs(c.partial_sums[n - 1] - c.target) + 1e-15);
  }
}

TEST_CASE("iterated gradients by inclusion-exclusion") {
  const auto f = catalog::atanlog();
  const std::vector<double> r{1.5, 2.0, 4.0};
  const auto g = iterated_gradient_bruteforce(f, 1.0, r);
  CHECK(g.residual() < 1e-14);
  CHECK(g.closed_form == doctest::Approx(f(1.5) - f(1.0)).epsilon(1e-14));
  const std::vector<double> low{0.5, 2.0};
  CHECK(iterated_gradient_bruteforce(f, 1.0, low).bruteforce == doctest::Approx(0.0));
}
