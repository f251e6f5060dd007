#pragma once

#include <functional>
#include <span>
#include <string>

#include "maxstable/field.hpp"
#include "maxstable/measures.hpp"
#include "maxstable/montecarlo.hpp"
#include "maxstable/quadrature.hpp"

namespace maxstable {

/// Mehler-formula estimate of P_t f(x) = E f(e^{-t/alpha} x (+) (1-e^{-t})^{1/alpha} Z)
/// with the additive form for alpha = 0 and the Weibull form for alpha < 0.
[[nodiscard]] McEstimate mehler_mc(const MaxStableLaw& law, const ScalarField& f, double t,
                                   std::span<const double> x, std::size_t n, RngSpec rng,
                                   const ExecutionPolicy& exec = {});

/// One draw of MS(alpha, nu) on its branch support (alpha <= 0 via the alpha = 1 law).
void sample_branch(const MaxStableLaw& law, Rng& rng, std::span<double> out);

/// E f(Z) for Z ~ Frechet(alpha).
[[nodiscard]] double frechet_expectation(double alpha, const ScalarField& f, const QuadratureSpec& quad = {});

/// P_t f(x) for d = 1 and alpha > 0 by quadrature.
[[nodiscard]] double semigroup_1d(double alpha, const ScalarField& f, double t, double x,
                                  const QuadratureSpec& quad = {});

/// (P_t f)'(x) = e^{-t/alpha} exp(-(e^t - 1)/x^alpha) f'(e^{-t/alpha} x).
[[nodiscard]] double semigroup_derivative_1d(double alpha, const ScalarField& f, double t, double x);

/// x -> P_t f(x) as a field; its derivative uses the closed form when f has a gradient.
[[nodiscard]] ScalarField semigroup_field(double alpha, const ScalarField& f, double t,
                                          const QuadratureSpec& quad = {});

enum class PsiKind {
  power,
  gumbel,
  weibull,
  min_stable_exponential,
  max_id_uniform,
  max_id_logistic,
  custom,
};

/// Monotone bijection Psi from a support onto (0, inf) carrying the target law
/// to Frechet(1) margins.
class PsiTransform {
 public:
  [[nodiscard]] static PsiTransform power(double alpha);
  [[nodiscard]] static PsiTransform gumbel();
  [[nodiscard]] static PsiTransform weibull(double alpha);
  [[nodiscard]] static PsiTransform min_stable_exponential();
  [[nodiscard]] static PsiTransform max_id_uniform();
  [[nodiscard]] static PsiTransform max_id_logistic();
  /// Monotonicity and the inverse are checked on a grid of (lower, upper);
  /// throws std::invalid_argument when either check fails.
  [[nodiscard]] static PsiTransform custom(std::string name, std::function<double(double)> psi,
                                           std::function<double(double)> psi_inverse, double lower, double upper);

  [[nodiscard]] PsiKind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] bool increasing() const noexcept { return increasing_; }
  [[nodiscard]] double psi(double x) const { return psi_(x); }
  [[nodiscard]] double psi_inverse(double y) const { return inverse_(y); }

 private:
  PsiTransform(PsiKind kind, std::string name, std::function<double(double)> psi,
               std::function<double(double)> inverse, bool increasing);

  PsiKind kind_;
  std::string name_;
  std::function<double(double)> psi_;
  std::function<double(double)> inverse_;
  bool increasing_;
};

/// T_Psi P_t T_Psi^{-1} for the alpha = 1 semigroup with angular measure nu.
class TransformedSemigroup {
 public:
  TransformedSemigroup(AngularMeasure nu, PsiTransform psi);

  [[nodiscard]] const PsiTransform& transform() const noexcept { return psi_; }

  /// Monte Carlo estimate of (T_Psi P_t T_Psi^{-1} f)(x).
  [[nodiscard]] McEstimate evaluate(const ScalarField& f, double t, std::span<const double> x, std::size_t n,
                                    RngSpec rng, const ExecutionPolicy& exec = {}) const;

  /// One draw of the stationary law Psi^{-1}(Z), Z ~ MS(1, nu).
  void sample_stationary(Rng& rng, std::span<double> out) const;

  /// One draw of the transition from x over time t.
  void sample_transition(double t, std::span<const double> x, Rng& rng, std::span<double> out) const;

 private:
  MaxStableLaw base_;
  PsiTransform psi_;
};

}  // namespace maxstable
