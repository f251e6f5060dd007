#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "maxstable/field.hpp"
#include "maxstable/generator.hpp"
#include "maxstable/measures.hpp"
#include "maxstable/montecarlo.hpp"
#include "maxstable/quadrature.hpp"

namespace maxstable {

enum class ReportKind { equality, inequality };
enum class ReportStatus { passed, failed, inconclusive };

[[nodiscard]] const char* to_string(ReportStatus s) noexcept;
[[nodiscard]] const char* to_string(ReportKind k) noexcept;

struct VerificationReport {
  std::string identity_name;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string method;
  double error_estimate = 0.0;
  ReportKind kind = ReportKind::equality;
  ReportStatus status = ReportStatus::failed;
  /// Negative control: the check is wired to fail.
  bool expect_failure = false;
  std::string note;

  /// rhs - lhs for inequalities, tolerance - |lhs - rhs| for equalities.
  [[nodiscard]] double slack() const noexcept;
  /// |lhs - rhs| / error_estimate (Monte Carlo reports).
  [[nodiscard]] double z_score() const noexcept;
  /// Passed for a positive check, failed for a negative control.
  [[nodiscard]] bool as_expected() const noexcept;
};

/// Sets `passed` and `status` from lhs, rhs and tolerance.
[[nodiscard]] VerificationReport make_report(std::string name, ReportKind kind, double lhs, double rhs,
                                             double tolerance, std::string method, double error_estimate = 0.0);

using SampleSource = std::function<void(Rng&, std::span<double>)>;

struct McOptions {
  std::size_t n = 100000;
  RngSpec rng{};
  ExecutionPolicy exec{};
};

/// Below this sample size a 3-sigma Stein decision is reported as inconclusive.
inline constexpr std::size_t kMinSteinSamples = 1000;

/// E<Z, grad f(Z)> against E[D_{1,nu} f(Z)] with shared draws from `source`;
/// passes when the gap is within 3 standard errors of the paired difference.
[[nodiscard]] VerificationReport verify_stein(const SampleSource& source, const AngularMeasure& nu,
                                              const ScalarField& f, const McOptions& mc, std::string name = {},
                                              bool expect_failure = false);

/// Cov(f(Z), g(Z)) against E_R[(f(R) - m_f(R))(g(R) - m_g(R))], R ~ Frechet(alpha),
/// m_f(r) = E[f(Z) | Z < r]; both by quadrature, tolerance 1e-6.
[[nodiscard]] VerificationReport verify_covariance_1d(double alpha, const ScalarField& f, const ScalarField& g,
                                                      const QuadratureSpec& quad = {}, double tolerance = 1e-6);

enum class FrechetCovariance {
  /// <L f, g> = -alpha^{-2} E[Y Z^2 f'(YZ) g'(Z)]
  generator,
  /// <f, g> = -alpha^{-2} E[Y Z^2 (L^{-1} f)'(YZ) g'(Z)], f centered
  inverse_generator,
};

[[nodiscard]] VerificationReport verify_frechet_cov(double alpha, const ScalarField& f, const ScalarField& g,
                                                    FrechetCovariance form, const QuadratureSpec& quad = {},
                                                    double tolerance = 1e-6);

/// Var(log Z) = pi^2/6 for Z ~ Frechet(1), and int_0^inf log(1+y)/(y(1+y)) dy = pi^2/6.
[[nodiscard]] std::vector<VerificationReport> covariance_checkpoints(const QuadratureSpec& quad = {});

/// Var f(Z) <= E int (f(Z (+) y) - f(Z))^2 dmu(y) for d = 1 by quadrature.
[[nodiscard]] VerificationReport verify_poincare_1d(double alpha, const ScalarField& f,
                                                    const QuadratureSpec& quad = {}, double tolerance = 1e-8);

/// Monte Carlo version for any d with the inner integral by quadrature. The
/// inequality holds when mean((f_i - mean f)^2 - R_i) <= 3 standard errors.
[[nodiscard]] VerificationReport verify_poincare_mc(const MaxStableLaw& law, const ScalarField& f,
                                                    const McOptions& mc, const QuadratureSpec& quad = {});

/// Ent(f(Z)) <= E int B(f(Z (+) y), f(Z)) dmu(y), B the Bregman divergence of
/// x log x. Throws std::domain_error when f is not positive at a node.
[[nodiscard]] VerificationReport verify_log_sobolev_1d(double alpha, const ScalarField& f,
                                                       const QuadratureSpec& quad = {}, double tolerance = 1e-8);

struct ChaosExpansion {
  /// S_0, ..., S_N
  std::vector<double> partial_sums;
  /// e^{-lambda} lambda^n / n!, lambda = sigma x^{-alpha}
  std::vector<double> poisson_weights;
  /// E f(x (+) sigma^{1/alpha} Z)
  double target = 0.0;
  [[nodiscard]] double achieved_error() const;
};

/// Partial sums of the Poisson chaos expansion of E f(x (+) sigma^{1/alpha} Z).
[[nodiscard]] ChaosExpansion chaos_expansion_1d(double alpha, const ScalarField& f, double x, double sigma,
                                                int terms, const QuadratureSpec& quad = {});

struct SecondOrderPoincare {
  VerificationReport report;
  double mean = 0.0;
  double sd = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 0.0;
  double wasserstein = 0.0;
  double mc_error = 0.0;
};

/// Standardizes f (rejecting sd <= 1e-9), computes gamma_1..3 by nested quadrature
/// and d_W(f(Z), N(0,1)) from sorted samples.
[[nodiscard]] SecondOrderPoincare second_order_poincare_1d(double alpha, const ScalarField& f, const McOptions& mc,
                                                           const QuadratureSpec& quad = {});

struct IteratedGradient {
  double bruteforce = 0.0;
  double closed_form = 0.0;
  [[nodiscard]] double residual() const noexcept;
};

/// D_{r_1..r_n} f(x) by inclusion-exclusion over the 2^n subsets, against
/// (-1)^{n-1} (f(x (+) r_min) - f(x)) 1{x <= r_min}; n <= 6.
[[nodiscard]] IteratedGradient iterated_gradient_bruteforce(const ScalarField& f, double x,
                                                            std::span<const double> r);

enum class Suite { stein, covariance, poincare, logsobolev, commutators, chaos, secondorder, all };

[[nodiscard]] Suite parse_suite(const std::string& name);
[[nodiscard]] std::string to_string(Suite s);

struct SuiteOptions {
  bool quick = false;
  std::uint64_t seed = 0;
  ExecutionPolicy exec{};
};

/// Runs a named suite in declaration order, negative controls included.
[[nodiscard]] std::vector<VerificationReport> run_suite(Suite suite, const SuiteOptions& options);

}  // namespace maxstable
