#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace maxstable {

/// Real function on the state space, with optional gradient, declared
/// log-Lipschitz constant C (x^j |d_j f(x)| <= C), non-smooth points per
/// coordinate, and limit at +infinity (univariate).
class ScalarField {
 public:
  using Value = std::function<double(std::span<const double>)>;
  using Gradient = std::function<void(std::span<const double>, std::span<double>)>;
  using Univariate = std::function<double(double)>;

  ScalarField(std::string name, std::size_t dim, Value value, Gradient gradient = {});

  [[nodiscard]] static ScalarField univariate(std::string name, Univariate f, Univariate df = {});

  ScalarField& with_log_lipschitz(double c);
  ScalarField& with_kinks(std::size_t coordinate, std::vector<double> points);
  ScalarField& with_limit_at_infinity(double limit);
  ScalarField& with_name(std::string name);

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] bool has_gradient() const noexcept;
  [[nodiscard]] std::optional<double> log_lipschitz() const noexcept { return log_lipschitz_; }
  [[nodiscard]] std::optional<double> limit_at_infinity() const noexcept { return limit_; }
  [[nodiscard]] const std::vector<double>& kinks(std::size_t coordinate = 0) const;

  double operator()(std::span<const double> x) const;
  double operator()(double x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;
  /// f'(x) for univariate fields; throws std::logic_error without a gradient.
  [[nodiscard]] double derivative(double x) const;

 private:
  std::string name_;
  std::size_t dim_;
  Value value_;
  Gradient gradient_;
  Univariate f1_;
  Univariate df1_;
  std::optional<double> log_lipschitz_;
  std::optional<double> limit_;
  std::vector<std::vector<double>> kinks_;
};

/// a * f + b, keeping gradient, kinks and limit.
[[nodiscard]] ScalarField affine(const ScalarField& f, double a, double b);

/// Univariate field whose derivative is the central difference with step 1e-5 * x.
[[nodiscard]] ScalarField with_central_difference(std::string name, ScalarField::Univariate f);

/// Largest x^j |d_j f(x)| over the probes (requires a gradient).
[[nodiscard]] double max_log_gradient(const ScalarField& f, std::span<const std::vector<double>> probes);

/// Largest relative gap between the declared gradient and central differences.
[[nodiscard]] double gradient_fd_mismatch(const ScalarField& f, std::span<const std::vector<double>> probes);

namespace catalog {

[[nodiscard]] ScalarField log();
[[nodiscard]] ScalarField inv1p();    // 1/(1+x)
[[nodiscard]] ScalarField atanlog();  // arctan(log x)
[[nodiscard]] ScalarField ratio();    // x/(1+x)
[[nodiscard]] ScalarField const1();
[[nodiscard]] ScalarField one_plus_ratio();  // 1 + x/(1+x)
[[nodiscard]] ScalarField exp_atanlog();     // exp(arctan(log x))
/// Character h_z = 1{x <= z}; no gradient, admitted only for D.
[[nodiscard]] ScalarField indicator(double z);

/// log, inv1p, atanlog, ratio.
[[nodiscard]] std::vector<ScalarField> smooth();
/// Positive members used for entropy inequalities.
[[nodiscard]] std::vector<ScalarField> positive();

[[nodiscard]] std::vector<std::string> names();
/// Resolves log, inv1p, atanlog, ratio, const1, one_plus_ratio, exp_atanlog, h_z:<z>.
/// Throws std::invalid_argument listing the available names.
[[nodiscard]] ScalarField by_name(const std::string& name);

/// Multivariate fields on (0,inf)^d.
[[nodiscard]] ScalarField sum_of_logs(std::size_t d);
[[nodiscard]] ScalarField log_coordinate(std::size_t d, std::size_t j);
[[nodiscard]] ScalarField inv1p_of_sum(std::size_t d);     // 1/(1 + sum x^j)
[[nodiscard]] ScalarField atanlog_of_product(std::size_t d);  // arctan(log prod x^j)

}  // namespace catalog

}  // namespace maxstable
