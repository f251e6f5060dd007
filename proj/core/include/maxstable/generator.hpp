#pragma once

#include <span>
#include <string>
#include <vector>

#include "maxstable/field.hpp"
#include "maxstable/measures.hpp"
#include "maxstable/montecarlo.hpp"
#include "maxstable/quadrature.hpp"

namespace maxstable {

struct GeneratorContext {
  MaxStableLaw law;
  QuadratureSpec quad{};

  /// Requires alpha > 0.
  GeneratorContext(MaxStableLaw l, QuadratureSpec q = {});
  [[nodiscard]] double alpha() const noexcept { return law.alpha(); }
};

/// Max-jump operator D f(x) = sum_k w_k int (f(x (+) r u_k^{1/alpha}) - f(x)) alpha r^{-alpha-1} dr.
[[nodiscard]] double D_op(const GeneratorContext& ctx, const ScalarField& f, std::span<const double> x);
[[nodiscard]] double D_op(const GeneratorContext& ctx, const ScalarField& f, double x);

/// L f(x) = -alpha^{-1} <x, grad f(x)> + D f(x).
[[nodiscard]] double generator(const GeneratorContext& ctx, const ScalarField& f, std::span<const double> x);
[[nodiscard]] double generator(const GeneratorContext& ctx, const ScalarField& f, double x);

enum class ParetoForm {
  /// -alpha^{-1} x f'(x) + x^{-alpha} E[f(xY) - f(x)]
  jump,
  /// -alpha^{-1} x f'(x) + alpha^{-1} x^{1-alpha} E[Y f'(xY)]
  derivative,
};

/// Univariate generator with Y ~ Pareto(alpha), integrated in the Pareto variable
/// (jump form) or in its survival probability (derivative form).
[[nodiscard]] double generator_pareto_form_1d(double alpha, const ScalarField& f, double x, ParetoForm form,
                                              const QuadratureSpec& quad = {});

/// x -> D f(x) and x -> L f(x) as univariate fields; derivatives by central differences.
[[nodiscard]] ScalarField D_field(const GeneratorContext& ctx, const ScalarField& f);
[[nodiscard]] ScalarField generator_field(const GeneratorContext& ctx, const ScalarField& f);

/// L^{-1} f(x) = -int_0^inf (P_t f(x) - E f(Z)) dt for d = 1, integrated in s = e^{-t/2}.
/// Throws std::invalid_argument with the measured mean when |E f(Z)| exceeds
/// `centering_tolerance`.
[[nodiscard]] double inverse_generator(const GeneratorContext& ctx, const ScalarField& f, double x,
                                       double centering_tolerance = 1e-8);

/// (L^{-1} f)'(x) = -int_0^inf (P_t f)'(x) dt, from the closed form of (P_t f)'.
[[nodiscard]] double inverse_generator_derivative(double alpha, const ScalarField& f, double x,
                                                  const QuadratureSpec& quad = {});

/// L^{-1} f as a field, with the derivative above. Checks centering once.
[[nodiscard]] ScalarField inverse_generator_field(const GeneratorContext& ctx, const ScalarField& f,
                                                  double centering_tolerance = 1e-8);

/// Monte Carlo L^{-1} f(x) in any dimension: T ~ Exp(1/2) and a shared draw Z give
/// -2 e^{T/2} (f(e^{-T/alpha} x (+) (1-e^{-T})^{1/alpha} Z) - f(Z)).
[[nodiscard]] McEstimate inverse_generator_mc(const MaxStableLaw& law, const ScalarField& f,
                                              std::span<const double> x, std::size_t n, RngSpec rng,
                                              const ExecutionPolicy& exec = {});

/// delta_alpha f(x) = alpha^{-1} x^{alpha+1} f'(x) + f(x).
[[nodiscard]] double divergence_delta(double alpha, const ScalarField& f, double x);
[[nodiscard]] ScalarField divergence_field(double alpha, const ScalarField& f);

/// Gamma(f,g)(x) = 1/2 sum_k w_k int (f(x (+) y) - f(x))(g(x (+) y) - g(x)) dmu_k(y).
[[nodiscard]] double carre_du_champ(const GeneratorContext& ctx, const ScalarField& f, const ScalarField& g,
                                    std::span<const double> x);

enum class DirichletMethod { quad_1d, mc };

/// E(f) = E[Gamma(f,f)(Z)], by nested quadrature (d = 1) or by Monte Carlo over Z
/// with the inner integral by quadrature (any d).
[[nodiscard]] McEstimate dirichlet_form(const GeneratorContext& ctx, const ScalarField& f, DirichletMethod method,
                                        std::size_t n = 0, RngSpec rng = {}, const ExecutionPolicy& exec = {});

/// Pointwise product and difference of fields of equal dimension.
[[nodiscard]] ScalarField product(const ScalarField& f, const ScalarField& g);

struct OperatorResidual {
  std::string operator_name;
  std::string function_name;
  double max_abs = 0.0;
  double tolerance = 0.0;
  std::vector<double> probe_points;
  [[nodiscard]] bool passed() const noexcept { return max_abs <= tolerance; }
};

struct CommutatorOptions {
  std::vector<double> probes{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  std::vector<double> times{0.1, 1.0};
  double tolerance = 1e-7;
};

/// [delta,D] = Id, [L,D] = D, [delta,L] = delta, D P_t = e^{-t} P_t D and
/// delta P_t = e^t P_t delta on the univariate catalog (d = 1). Identities with
/// delta act on f - f(inf) and skip fields whose delta f is not mu-integrable.
[[nodiscard]] std::vector<OperatorResidual> commutator_suite(const GeneratorContext& ctx,
                                                             const CommutatorOptions& options = {});

}  // namespace maxstable
