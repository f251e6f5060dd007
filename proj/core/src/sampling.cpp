#include "maxstable/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "maxstable/field.hpp"

namespace maxstable {

double frechet_quantile(double alpha, double sigma, double v) {
  return sigma * std::pow(-std::log(v), -1.0 / alpha);
}

double sample_frechet(double alpha, double sigma, Rng& rng) {
  return frechet_quantile(alpha, sigma, rng.uniform());
}

double sample_gumbel(Rng& rng) { return -std::log(-std::log(rng.uniform())); }

double sample_weibull(double alpha, Rng& rng) {
  if (!(alpha < 0.0)) throw std::invalid_argument("sample_weibull: alpha must be negative");
  return -std::pow(-std::log(rng.uniform()), -1.0 / alpha);
}

double sample_pareto(double alpha, Rng& rng) {
  if (!(alpha > 0.0)) throw std::invalid_argument("sample_pareto: alpha must be positive");
  return std::pow(rng.uniform(), -1.0 / alpha);
}

namespace {

struct LePagePlan {
  double alpha;
  double mass;
  std::vector<double> cumulative;
  std::vector<std::vector<double>> powered;  // u^{1/alpha}
};

LePagePlan plan_for(const MaxStableLaw& law) {
  if (law.branch() != Branch::frechet) {
    throw std::invalid_argument("sample_max_stable: alpha must be positive (use a transform for other branches)");
  }
  LePagePlan p{law.alpha(), law.nu().total_mass(), {}, {}};
  double acc = 0.0;
  for (const auto& a : law.nu().atoms()) {
    acc += a.weight;
    p.cumulative.push_back(acc);
    std::vector<double> u(a.direction.size());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = std::pow(a.direction[j], 1.0 / law.alpha());
    p.powered.push_back(std::move(u));
  }
  return p;
}

std::size_t pick_atom(const LePagePlan& p, Rng& rng) {
  if (p.cumulative.size() == 1) return 0;
  const double target = rng.uniform() * p.mass;
  const auto it = std::upper_bound(p.cumulative.begin(), p.cumulative.end(), target);
  return std::min<std::size_t>(static_cast<std::size_t>(it - p.cumulative.begin()), p.cumulative.size() - 1);
}

double min_of(std::span<const double> z) { return *std::min_element(z.begin(), z.end()); }

void fold(std::span<double> z, double r, std::span<const double> u) {
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = std::max(z[j], r * u[j]);
}

}  // namespace

void sample_max_stable(const MaxStableLaw& law, Rng& rng, std::span<double> out) {
  if (out.size() != law.dim()) throw std::invalid_argument("sample_max_stable: output size mismatch");
  const auto plan = plan_for(law);
  std::fill(out.begin(), out.end(), 0.0);
  double gamma = 0.0;
  for (;;) {
    gamma += rng.exponential();
    const double r = std::pow(gamma / plan.mass, -1.0 / plan.alpha);
    if (r <= min_of(out)) break;
    fold(out, r, plan.powered[pick_atom(plan, rng)]);
  }
}

LePageRealization sample_max_stable_realization(const MaxStableLaw& law, Rng& rng, std::size_t extra_points) {
  const auto plan = plan_for(law);
  LePageRealization real;
  real.max_value.assign(law.dim(), 0.0);
  double gamma = 0.0;
  for (;;) {
    gamma += rng.exponential();
    const double r = std::pow(gamma / plan.mass, -1.0 / plan.alpha);
    if (r <= min_of(real.max_value)) {
      real.truncation_count = real.points.size();
      for (std::size_t e = 0; e < extra_points; ++e) {
        const double re = e == 0 ? r : std::pow((gamma += rng.exponential()) / plan.mass, -1.0 / plan.alpha);
        const std::size_t k = pick_atom(plan, rng);
        real.points.push_back({re, k});
        fold(real.max_value, re, plan.powered[k]);
      }
      return real;
    }
    const std::size_t k = pick_atom(plan, rng);
    real.points.push_back({r, k});
    fold(real.max_value, r, plan.powered[k]);
  }
}

void write_realization_csv(std::ostream& os, const LePageRealization& real, const AngularMeasure& nu) {
  os << "index,r,k";
  for (std::size_t j = 0; j < nu.dim(); ++j) os << ",u_" << j + 1;
  os << '\n';
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < real.points.size(); ++i) {
    const auto& p = real.points[i];
    os << i << ',' << p.radius << ',' << p.atom;
    for (double u : nu.atoms()[p.atom].direction) os << ',' << u;
    os << '\n';
  }
  os.precision(old);
}

void sample_max_stable(double alpha, const DirectionSampler& sampler, Rng& rng, std::span<double> out) {
  if (!(alpha > 0.0)) throw std::invalid_argument("sample_max_stable: alpha must be positive");
  if (out.size() != sampler.dim) throw std::invalid_argument("sample_max_stable: output size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> u(sampler.dim);
  double gamma = 0.0;
  for (;;) {
    gamma += rng.exponential();
    const double r = std::pow(gamma / sampler.total_mass, -1.0 / alpha);
    if (r <= min_of(out)) break;
    sampler.draw(rng, u);
    for (double& v : u) v = std::pow(v, 1.0 / alpha);
    fold(out, r, u);
  }
}

ConfigurationMax configuration_max(const std::vector<std::vector<double>>& points, std::size_t dim) {
  ConfigurationMax m{std::vector<double>(dim, -std::numeric_limits<double>::infinity()), true};
  for (const auto& p : points) m = add_point(m, p);
  return m;
}

ConfigurationMax add_point(const ConfigurationMax& m, std::span<const double> y) {
  if (y.size() != m.value.size()) throw std::invalid_argument("add_point: dimension mismatch");
  ConfigurationMax out{m.value, false};
  for (std::size_t j = 0; j < y.size(); ++j) out.value[j] = std::max(out.value[j], y[j]);
  return out;
}

MaxFunctional sample_max_id_functional(const std::vector<std::vector<double>>& points, const ScalarField& f) {
  const auto m = configuration_max(points, f.dim());
  if (m.empty) return {0.0, true};
  return {f(m.value), false};
}

void StepFunction::validate() const {
  if (breaks.size() != values.size() + 1 || values.empty()) {
    throw std::invalid_argument("step function: need one more break than values");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) throw std::invalid_argument("step function: breaks must increase");
    if (!(values[i] >= 0.0)) throw std::invalid_argument("step function: values must be nonnegative");
  }
}

double StepFunction::scale(double alpha) const {
  validate();
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += std::pow(values[i], alpha) * (breaks[i + 1] - breaks[i]);
  return std::pow(s, 1.0 / alpha);
}

std::vector<double> sample_sup_measure_cells(std::span<const double> breaks, double alpha, Rng& rng) {
  if (breaks.size() < 2) throw std::invalid_argument("sup-measure cells: need at least one cell");
  std::vector<double> cells(breaks.size() - 1);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    cells[i] = sample_frechet(alpha, std::pow(breaks[i + 1] - breaks[i], 1.0 / alpha), rng);
  }
  return cells;
}

double extremal_integral(const StepFunction& f, std::span<const double> cells) {
  f.validate();
  if (cells.size() != f.values.size()) throw std::invalid_argument("extremal integral: cell count mismatch");
  double out = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) out = std::max(out, f.values[i] * cells[i]);
  return out;
}

double sample_extremal_integral(const StepFunction& f, double alpha, Rng& rng) {
  f.validate();
  const auto cells = sample_sup_measure_cells(f.breaks, alpha, rng);
  return extremal_integral(f, cells);
}

SupMeasurePoints::SupMeasurePoints(double alpha, double horizon, Rng& rng)
    : alpha_(alpha), horizon_(horizon), rng_(&rng) {
  if (!(alpha > 0.0) || !(horizon >= 0.0)) {
    throw std::invalid_argument("sup-measure points: need alpha > 0 and T >= 0");
  }
  if (horizon_ > 0.0) {
    arrival_ = rng_->exponential();
    pending_radius_ = std::pow(arrival_ / horizon_, -1.0 / alpha_);
  }
}

void SupMeasurePoints::lower_cutoff(double cutoff) {
  if (!(cutoff > 0.0)) throw std::invalid_argument("sup-measure points: cutoff must be positive");
  if (cutoff >= cutoff_) return;
  cutoff_ = cutoff;
  if (horizon_ == 0.0) return;
  while (pending_radius_ > cutoff_) {
    points_.push_back({rng_->uniform() * horizon_, pending_radius_});
    arrival_ += rng_->exponential();
    pending_radius_ = std::pow(arrival_ / horizon_, -1.0 / alpha_);
  }
}

}  // namespace maxstable
