#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "maxstable/field.hpp"
#include "maxstable/quadrature.hpp"
#include "maxstable/rng.hpp"

namespace maxstable {

struct PathSample {
  std::vector<double> times;
  std::vector<double> values;
  double alpha = 1.0;
  double x0 = 0.0;
  RngSpec rng{};
};

/// steps + 1 equally spaced times on [0, T].
[[nodiscard]] std::vector<double> uniform_grid(double T, std::size_t steps);

/// Exact Markov transitions X_{t+h} = e^{-h/alpha} X_t (+) (1 - e^{-h})^{1/alpha} Z on the grid.
/// The grid must be finite and non-decreasing; X_{t_0} = x0.
[[nodiscard]] PathSample simulate_frechet_process(double alpha, double x0, std::span<const double> grid, RngSpec rng);
/// Same, drawing from an existing generator (many paths on one stream).
[[nodiscard]] PathSample simulate_frechet_process(double alpha, double x0, std::span<const double> grid, Rng& rng);

/// P(X_t <= z | X_0 = x) = 1{x <= e^{t/alpha} z} exp(-(1 - e^{-t}) z^{-alpha}).
[[nodiscard]] double frechet_transition_cdf(double alpha, double x, double z, double t);

struct PointwisePath {
  PathSample path;
  /// Cutoff actually used after lowering.
  double cutoff = 0.0;
  /// Expected number of sup-measure points below the cutoff that would raise the path at some grid time.
  double omission_bound = 0.0;
  std::size_t points = 0;
};

/// Largest omission bound accepted before the cutoff is lowered further.
inline constexpr double kOmissionBound = 1e-6;

/// X_t = e^{-t/alpha} x0 (+) max_{s_i <= t} e^{-(t - s_i)/alpha} r_i over the points of the
/// alpha-Frechet sup-measure on [0, T] with radius above the cutoff, T the last grid time.
/// The cutoff is halved until the omission bound is below kOmissionBound; throws
/// std::runtime_error if that takes more than 200 halvings.
[[nodiscard]] PointwisePath simulate_frechet_process_pointwise(double alpha, double x0, std::span<const double> grid,
                                                               double cutoff, RngSpec rng);

/// Z_{t+h} = Z_t (+) h^{1/alpha} Z' on the grid, Z_{t_0} = z0 >= 0.
[[nodiscard]] PathSample simulate_max_stable_motion(double alpha, double z0, std::span<const double> grid,
                                                    RngSpec rng);
[[nodiscard]] PathSample simulate_max_stable_motion(double alpha, double z0, std::span<const double> grid, Rng& rng);

/// E f(x (+) h^{1/alpha} Z) for the motion started at x, by quadrature (d = 1).
[[nodiscard]] double motion_transition_mean(double alpha, const ScalarField& f, double x, double h,
                                            const QuadratureSpec& quad = {});

struct FigureRow {
  double alpha = 0.0;
  double t = 0.0;
  double x = 0.0;
};

/// One Frechet-process path per alpha from x0 on a uniform grid; alpha i draws from stream i of `seed`.
[[nodiscard]] std::vector<FigureRow> figure_paths(std::span<const double> alphas = {}, double x0 = 3.0,
                                                  double T = 10.0, std::size_t steps = 1000, std::uint64_t seed = 0);

/// Header "alpha,t,x" then one row per entry, full precision.
void write_paths_csv(std::ostream& os, std::span<const FigureRow> rows);

}  // namespace maxstable
