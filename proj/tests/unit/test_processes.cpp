#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "maxstable/processes.hpp"
#include "maxstable/stats.hpp"

using namespace maxstable;

TEST_CASE("uniform grid") {
  const auto g = uniform_grid(2.0, 4);
  CHECK(g == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
  CHECK(uniform_grid(3.0, 0) == std::vector<double>{0.0});
  CHECK_THROWS_AS((void)uniform_grid(-1.0, 3), std::invalid_argument);
}

TEST_CASE("transition cdf: atom at the decayed start, stationary limit") {
  const double alpha = 1.5, x = 2.0, t = 0.8;
  const double floor = x * std::exp(-t / alpha);
  CHECK(frechet_transition_cdf(alpha, x, floor * 0.999, t) == 0.0);
  const double atom = std::exp(-(-std::expm1(-t)) * std::pow(floor, -alpha));
  CHECK(frechet_transition_cdf(alpha, x, floor, t) == doctest::Approx(atom).epsilon(1e-14));
  for (double z : {0.5, 1.0, 3.0}) {
    CHECK(frechet_transition_cdf(alpha, x, z, 60.0) == doctest::Approx(std::exp(-std::pow(z, -alpha))).epsilon(1e-12));
  }
}

TEST_CASE("paths start at x0, repeat on zero steps and never fall below the decayed start") {
  const std::vector<double> grid{0.0, 0.3, 0.3, 1.0, 4.0};
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto p = simulate_frechet_process(1.0, 3.0, grid, RngSpec{71, s});
    CHECK(p.values[0] == 3.0);
    CHECK(p.values[2] == p.values[1]);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(p.values[i] >= 3.0 * std::exp(-grid[i]));
  }
  const std::vector<double> bad{0.0, 1.0, 0.5};
  CHECK_THROWS_AS((void)simulate_frechet_process(1.0, 3.0, bad, RngSpec{}), std::invalid_argument);
}

TEST_CASE("transition marginals match the cdf") {
  const double alpha = 0.7, x0 = 3.0;
  const std::vector<double> grid{0.0, 0.4, 1.5};
  Rng rng(RngSpec{72, 0});
  const std::size_t n = 50000;
  std::vector<double> last;
  for (std::size_t i = 0; i < n; ++i) last.push_back(simulate_frechet_process(alpha, x0, grid, rng).values.back());
  const double floor = x0 * std::exp(-1.5 / alpha);
  for (double m : {1.0, 1.3, 2.0, 5.0}) {
    const auto c = binomial_check(last, floor * m, frechet_transition_cdf(alpha, x0, floor * m, 1.5));
    CHECK(c.within(4.0));
  }
}

TEST_CASE("pointwise construction keeps its omission bound and matches the transition law") {
  const double alpha = 1.0, x0 = 3.0;
  const auto grid = uniform_grid(1.0, 2);
  const std::size_t n = 3000;
  std::vector<double> a, b;
  Rng rng(RngSpec{73, 0});
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = simulate_frechet_process_pointwise(alpha, x0, grid, 1.0, RngSpec{74, i});
    CHECK(p.omission_bound < kOmissionBound);
    CHECK(p.path.values[0] == x0);
    b.push_back(p.path.values.back());
    a.push_back(simulate_frechet_process(alpha, x0, grid, rng).values.back());
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(ks_two_sample(a, b) < ks_critical(n, 0.001, n));
  const std::vector<double> late{0.5, 1.0};
  CHECK_THROWS_AS((void)simulate_frechet_process_pointwise(alpha, x0, late, 1.0, RngSpec{}), std::invalid_argument);
}

TEST_CASE("max-stable motion is nondecreasing with Frechet marginals") {
  const double alpha = 1.5;
  const auto grid = uniform_grid(2.0, 8);
  Rng rng(RngSpec{75, 0});
  const std::size_t n = 20000;
  std::vector<double> end;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = simulate_max_stable_motion(alpha, 0.0, grid, rng);
    for (std::size_t k = 1; k < grid.size(); ++k) CHECK(p.values[k] >= p.values[k - 1]);
    end.push_back(p.values.back());
  }
  // Z_T = T^{1/alpha} Z from the origin.
  std::sort(end.begin(), end.end());
  const double scale = std::pow(2.0, 1.0 / alpha);
  CHECK(ks_statistic(end, [&](double x) { return std::exp(-std::pow(x / scale, -alpha)); }) < ks_critical(n, 0.001));
}

TEST_CASE("figure paths: four defaults from x(0) = 3, CSV layout") {
  const auto rows = figure_paths();
  std::set<double> alphas;
  for (const auto& r : rows) alphas.insert(r.alpha);
  CHECK(alphas == std::set<double>{0.5, 1.0, 2.0, 4.0});
  CHECK(rows.size() == 4 * 1001);
  CHECK(rows.front().x == 3.0);
  CHECK(rows[1001].x == 3.0);
  CHECK(rows.back().t == 10.0);
  std::ostringstream os;
  write_paths_csv(os, rows);
  const auto text = os.str();
  CHECK(text.rfind("alpha,t,x\n0.5,0,3\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4 * 1001 + 1);
  CHECK(figure_paths({}, 3.0, 10.0, 1000, 5).back().x == figure_paths({}, 3.0, 10.0, 1000, 5).back().x);
}
