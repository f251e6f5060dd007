#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "maxstable/measures.hpp"
#include "maxstable/rng.hpp"

namespace maxstable {

class ScalarField;

/// sigma * (-log v)^{-1/alpha}: the Frechet quantile at probability v.
[[nodiscard]] double frechet_quantile(double alpha, double sigma, double v);

[[nodiscard]] double sample_frechet(double alpha, double sigma, Rng& rng);
[[nodiscard]] double sample_gumbel(Rng& rng);
/// Negative Weibull with cdf exp(-(-x)^{-alpha}), alpha < 0.
[[nodiscard]] double sample_weibull(double alpha, Rng& rng);
/// Pareto with density alpha u^{-alpha-1} on [1, inf).
[[nodiscard]] double sample_pareto(double alpha, Rng& rng);

struct LePagePoint {
  double radius = 0.0;
  std::size_t atom = 0;
};

struct LePageRealization {
  std::vector<LePagePoint> points;
  /// Index of the first point that could no longer change the maximum.
  std::size_t truncation_count = 0;
  std::vector<double> max_value;
};

/// Exact sample of MS(alpha, nu), alpha > 0, written to `out`.
void sample_max_stable(const MaxStableLaw& law, Rng& rng, std::span<double> out);

/// Same draw as sample_max_stable, also returning the points. `extra_points`
/// further points past the stopping index are generated and folded into the
/// maximum; they never change it.
[[nodiscard]] LePageRealization sample_max_stable_realization(const MaxStableLaw& law, Rng& rng,
                                                             std::size_t extra_points = 0);

/// Columns index, r, k, u_1..u_d.
void write_realization_csv(std::ostream& os, const LePageRealization& real, const AngularMeasure& nu);

/// Angular law supplied as a sampler of sup-normalized directions with total
/// mass `total_mass`. The moment constraint cannot be checked for it.
struct DirectionSampler {
  std::size_t dim = 1;
  double total_mass = 1.0;
  std::function<void(Rng&, std::span<double>)> draw;
};

void sample_max_stable(double alpha, const DirectionSampler& sampler, Rng& rng, std::span<double> out);

struct ConfigurationMax {
  std::vector<double> value;
  bool empty = true;
};

/// Coordinate-wise maximum of a finite configuration; the empty configuration
/// yields -inf in every coordinate and is flagged.
[[nodiscard]] ConfigurationMax configuration_max(const std::vector<std::vector<double>>& points,
                                                 std::size_t dim);

/// m(phi + delta_y) from m(phi) without revisiting the configuration.
[[nodiscard]] ConfigurationMax add_point(const ConfigurationMax& m, std::span<const double> y);

struct MaxFunctional {
  double value = 0.0;
  bool empty = true;
};

[[nodiscard]] MaxFunctional sample_max_id_functional(const std::vector<std::vector<double>>& points,
                                                     const ScalarField& f);

/// Nonnegative piecewise constant function: values[i] on [breaks[i], breaks[i+1]).
struct StepFunction {
  std::vector<double> breaks;
  std::vector<double> values;

  void validate() const;
  /// (int f^alpha ds)^{1/alpha}
  [[nodiscard]] double scale(double alpha) const;
};

/// Independent values M(A_i) of the alpha-Frechet sup-measure on the cells of `breaks`.
[[nodiscard]] std::vector<double> sample_sup_measure_cells(std::span<const double> breaks, double alpha,
                                                           Rng& rng);

/// max_i f_i M(A_i) for given cell values.
[[nodiscard]] double extremal_integral(const StepFunction& f, std::span<const double> cells);

[[nodiscard]] double sample_extremal_integral(const StepFunction& f, double alpha, Rng& rng);

struct SupPoint {
  double time = 0.0;
  double radius = 0.0;
};

/// Points of the alpha-Frechet sup-measure on [0,T] with radius above a cutoff,
/// generated in decreasing radius order so the cutoff can be lowered later
/// without discarding the points already drawn.
class SupMeasurePoints {
 public:
  SupMeasurePoints(double alpha, double horizon, Rng& rng);

  /// Adds every point with radius in (cutoff, current cutoff].
  void lower_cutoff(double cutoff);

  [[nodiscard]] double cutoff() const noexcept { return cutoff_; }
  [[nodiscard]] double horizon() const noexcept { return horizon_; }
  [[nodiscard]] const std::vector<SupPoint>& points() const noexcept { return points_; }

 private:
  double alpha_;
  double horizon_;
  Rng* rng_;
  double arrival_ = 0.0;
  double pending_radius_ = 0.0;
  double cutoff_ = std::numeric_limits<double>::infinity();
  std::vector<SupPoint> points_;
};

}  // namespace maxstable
