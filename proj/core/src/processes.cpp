#include "maxstable/processes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "maxstable/sampling.hpp"

namespace maxstable {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxHalvings = 200;

void validate_grid(std::span<const double> grid, const char* who) {
  if (grid.empty()) throw std::invalid_argument(std::string(who) + ": empty time grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw std::invalid_argument(std::string(who) + ": non-finite grid time");
    if (i > 0 && grid[i] < grid[i - 1]) throw std::invalid_argument(std::string(who) + ": grid must be non-decreasing");
  }
}

// Expected number of points (s, r) with r <= cutoff, s <= t, that exceed level
// x at time t: int_0^t (x^{-alpha} e^{-tau} - cutoff^{-alpha})_+ d tau.
double missed_mass(double alpha, double level, double cutoff, double t) {
  if (!(t > 0.0) || level >= cutoff) return 0.0;
  const double a = std::pow(level, -alpha);
  const double c = std::pow(cutoff, -alpha);
  const double tau = std::min(t, std::log(a / c));
  return a * -std::expm1(-tau) - c * tau;
}

}  // namespace

std::vector<double> uniform_grid(double T, std::size_t steps) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw std::invalid_argument("uniform_grid: T must be finite and nonnegative");
  std::vector<double> g(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) g[i] = steps == 0 ? 0.0 : T * static_cast<double>(i) / steps;
  return g;
}

PathSample simulate_frechet_process(double alpha, double x0, std::span<const double> grid, Rng& rng) {
  if (!(alpha > 0.0) || !(x0 > 0.0)) throw std::domain_error("frechet process: need alpha > 0 and x0 > 0");
  validate_grid(grid, "frechet process");
  PathSample p{{grid.begin(), grid.end()}, std::vector<double>(grid.size()), alpha, x0, rng.spec()};
  p.values[0] = x0;
  // The decayed start is kept apart from the running maximum of the jumps so the
  // atom at x0 e^{-t/alpha} sits exactly where the transition cdf puts it.
  double jumps = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double h = grid[i] - grid[i - 1];
    if (h == 0.0) {
      p.values[i] = p.values[i - 1];
      continue;
    }
    const double scale = std::pow(-std::expm1(-h), 1.0 / alpha);
    jumps = std::max(std::exp(-h / alpha) * jumps, sample_frechet(alpha, scale, rng));
    p.values[i] = std::max(std::exp(-(grid[i] - grid[0]) / alpha) * x0, jumps);
  }
  return p;
}

PathSample simulate_frechet_process(double alpha, double x0, std::span<const double> grid, RngSpec spec) {
  Rng rng(spec);
  return simulate_frechet_process(alpha, x0, grid, rng);
}

double frechet_transition_cdf(double alpha, double x, double z, double t) {
  if (!(alpha > 0.0) || !(x > 0.0) || !(t >= 0.0)) throw std::domain_error("transition cdf: need alpha, x > 0, t >= 0");
  if (!(z > 0.0) || z < std::exp(-t / alpha) * x) return 0.0;
  return std::exp(std::expm1(-t) * std::pow(z, -alpha));
}

PointwisePath simulate_frechet_process_pointwise(double alpha, double x0, std::span<const double> grid, double cutoff,
                                                 RngSpec spec) {
  if (!(alpha > 0.0) || !(x0 > 0.0)) throw std::domain_error("pointwise process: need alpha > 0 and x0 > 0");
  if (!(cutoff > 0.0)) throw std::invalid_argument("pointwise process: cutoff must be positive");
  validate_grid(grid, "pointwise process");
  if (grid.front() != 0.0) throw std::invalid_argument("pointwise process: grid must start at 0");
  Rng rng(spec);
  SupMeasurePoints points(alpha, grid.back(), rng);
  PointwisePath out;
  out.path = PathSample{{grid.begin(), grid.end()}, std::vector<double>(grid.size()), alpha, x0, spec};
  for (int halving = 0; halving <= kMaxHalvings; ++halving) {
    points.lower_cutoff(cutoff);
    double bound = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double t = grid[i];
      double x = std::exp(-t / alpha) * x0;
      for (const auto& pt : points.points()) {
        if (pt.time <= t) x = std::max(x, std::exp(-(t - pt.time) / alpha) * pt.radius);
      }
      out.path.values[i] = x;
      bound += missed_mass(alpha, x, points.cutoff(), t);
    }
    out.cutoff = points.cutoff();
    out.omission_bound = bound;
    out.points = points.points().size();
    if (bound < kOmissionBound) return out;
    cutoff = points.cutoff() / 2.0;
  }
  throw std::runtime_error("pointwise process: omission bound " + std::to_string(out.omission_bound) +
                           " still above the limit at cutoff " + std::to_string(out.cutoff));
}

PathSample simulate_max_stable_motion(double alpha, double z0, std::span<const double> grid, Rng& rng) {
  if (!(alpha > 0.0) || !(z0 >= 0.0)) throw std::domain_error("max-stable motion: need alpha > 0 and z0 >= 0");
  validate_grid(grid, "max-stable motion");
  PathSample p{{grid.begin(), grid.end()}, std::vector<double>(grid.size()), alpha, z0, rng.spec()};
  p.values[0] = z0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double h = grid[i] - grid[i - 1];
    p.values[i] = h == 0.0 ? p.values[i - 1]
                           : std::max(p.values[i - 1], sample_frechet(alpha, std::pow(h, 1.0 / alpha), rng));
  }
  return p;
}

PathSample simulate_max_stable_motion(double alpha, double z0, std::span<const double> grid, RngSpec spec) {
  Rng rng(spec);
  return simulate_max_stable_motion(alpha, z0, grid, rng);
}

double motion_transition_mean(double alpha, const ScalarField& f, double x, double h, const QuadratureSpec& quad) {
  if (!(alpha > 0.0) || !(x > 0.0) || !(h >= 0.0)) throw std::domain_error("motion transition: need alpha, x > 0, h >= 0");
  if (f.dim() != 1) throw std::invalid_argument("motion transition: univariate field required");
  if (h == 0.0) return f(x);
  const double s = std::pow(h, 1.0 / alpha);
  const double threshold = x / s;
  std::vector<double> breaks;
  for (double k : f.kinks(0)) breaks.push_back(k / s);
  const auto jump = frechet_mean([&](double z) { return f(s * z); }, alpha, quad, threshold, kInf, breaks);
  return f(x) * std::exp(-std::pow(threshold, -alpha)) + jump.value;
}

std::vector<FigureRow> figure_paths(std::span<const double> alphas, double x0, double T, std::size_t steps,
                                    std::uint64_t seed) {
  static constexpr double kDefaultAlphas[] = {0.5, 1.0, 2.0, 4.0};
  if (alphas.empty()) alphas = kDefaultAlphas;
  const auto grid = uniform_grid(T, steps);
  std::vector<FigureRow> rows;
  rows.reserve(alphas.size() * grid.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const auto p = simulate_frechet_process(alphas[i], x0, grid, RngSpec{seed, i});
    for (std::size_t k = 0; k < grid.size(); ++k) rows.push_back({alphas[i], grid[k], p.values[k]});
  }
  return rows;
}

void write_paths_csv(std::ostream& os, std::span<const FigureRow> rows) {
  const auto old = os.precision(17);
  os << "alpha,t,x\n";
  for (const auto& r : rows) os << r.alpha << ',' << r.t << ',' << r.x << '\n';
  os.precision(old);
}

}  // namespace maxstable
