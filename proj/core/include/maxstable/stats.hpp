#pragma once

#include <functional>
#include <span>
#include <vector>

namespace maxstable {

[[nodiscard]] double normal_cdf(double x) noexcept;
[[nodiscard]] double normal_quantile(double p);

/// sup_t |F_n(t) - F(t)| for an ascending sample.
[[nodiscard]] double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf);
/// sup_t |F_n(t) - G_m(t)| for two ascending samples.
[[nodiscard]] double ks_two_sample(std::span<const double> a, std::span<const double> b);
/// Asymptotic critical value at `level` for samples of sizes n and m (m = 0: one-sample).
[[nodiscard]] double ks_critical(std::size_t n, double level, std::size_t m = 0);

struct FrequencyCheck {
  double observed = 0.0;
  double expected = 0.0;
  double sigma = 0.0;
  [[nodiscard]] double z() const noexcept;
  [[nodiscard]] bool within(double sigmas) const noexcept;
};

/// Fraction of `sample` at or below `x` against probability p.
[[nodiscard]] FrequencyCheck binomial_check(std::span<const double> sample, double x, double p);
[[nodiscard]] FrequencyCheck binomial_check(std::size_t hits, std::size_t n, double p);

/// int |F_n - Phi| dt for an ascending sample, exact between order statistics.
[[nodiscard]] double wasserstein_to_normal(std::span<const double> sorted);
/// n^{-1/2} int sqrt(F_n (1 - F_n)) dt, the usual bound on E d_W(F_n, F).
[[nodiscard]] double empirical_wasserstein_error(std::span<const double> sorted);

}  // namespace maxstable
