#include "maxstable/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace maxstable {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double normal_survival(double x) noexcept { return 0.5 * std::erfc(x * kInvSqrt2); }

// Antiderivative of Phi vanishing at -inf.
double phi_integral(double t) noexcept { return t * normal_cdf(t) + normal_pdf(t); }

// int_a^b |c - Phi(t)| dt
double gap_integral(double c, double a, double b) {
  if (!(b > a)) return 0.0;
  const auto signed_part = [c](double lo, double hi) { return c * (hi - lo) - (phi_integral(hi) - phi_integral(lo)); };
  if (c <= 0.0) return phi_integral(b) - phi_integral(a);
  if (c >= 1.0) return (b - a) - (phi_integral(b) - phi_integral(a));
  const double cross = normal_quantile(c);
  if (cross <= a) return -signed_part(a, b);
  if (cross >= b) return signed_part(a, b);
  return signed_part(a, cross) - signed_part(cross, b);
}

void require_sorted(std::span<const double> s, const char* who) {
  if (s.empty()) throw std::invalid_argument(std::string(who) + ": empty sample");
  if (!std::is_sorted(s.begin(), s.end())) throw std::invalid_argument(std::string(who) + ": sample must be ascending");
}

}  // namespace

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must lie in (0,1)");
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf) {
  require_sorted(sorted, "ks_statistic");
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require_sorted(a, "ks_two_sample");
  require_sorted(b, "ks_two_sample");
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    d = std::max(d, std::abs(i / n - j / m));
  }
  return d;
}

double ks_critical(std::size_t n, double level, std::size_t m) {
  if (n == 0 || !(level > 0.0 && level < 1.0)) throw std::invalid_argument("ks_critical: need n > 0 and level in (0,1)");
  const double c = std::sqrt(-0.5 * std::log(level / 2.0));
  const double nn = static_cast<double>(n);
  if (m == 0) return c / std::sqrt(nn);
  const double mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

double FrequencyCheck::z() const noexcept {
  return sigma > 0.0 ? (observed - expected) / sigma : (observed == expected ? 0.0 : INFINITY);
}

bool FrequencyCheck::within(double sigmas) const noexcept { return std::abs(observed - expected) <= sigmas * sigma; }

FrequencyCheck binomial_check(std::size_t hits, std::size_t n, double p) {
  if (n == 0) throw std::invalid_argument("binomial_check: empty sample");
  const double nn = static_cast<double>(n);
  return {hits / nn, p, std::sqrt(p * (1.0 - p) / nn)};
}

FrequencyCheck binomial_check(std::span<const double> sample, double x, double p) {
  const auto hits = static_cast<std::size_t>(std::count_if(sample.begin(), sample.end(), [x](double v) { return v <= x; }));
  return binomial_check(hits, sample.size(), p);
}

double wasserstein_to_normal(std::span<const double> sorted) {
  require_sorted(sorted, "wasserstein_to_normal");
  const std::size_t n = sorted.size();
  const double nn = static_cast<double>(n);
  double total = phi_integral(sorted.front());
  for (std::size_t i = 1; i < n; ++i) total += gap_integral(i / nn, sorted[i - 1], sorted[i]);
  const double last = sorted.back();
  total += normal_pdf(last) - last * normal_survival(last);
  return total;
}

double empirical_wasserstein_error(std::span<const double> sorted) {
  require_sorted(sorted, "empirical_wasserstein_error");
  const std::size_t n = sorted.size();
  const double nn = static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double p = i / nn;
    total += (sorted[i] - sorted[i - 1]) * std::sqrt(p * (1.0 - p));
  }
  return total / std::sqrt(nn);
}

}  // namespace maxstable
