// Acceptance run: one PASS/FAIL line per criterion. Optional arguments select
// criteria by number, e.g. `acceptance 1 12`.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "maxstable/generator.hpp"
#include "maxstable/identities.hpp"
#include "maxstable/measures.hpp"
#include "maxstable/montecarlo.hpp"
#include "maxstable/processes.hpp"
#include "maxstable/sampling.hpp"
#include "maxstable/semigroup.hpp"
#include "maxstable/stats.hpp"

using namespace maxstable;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v, int digits = 3) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

const std::vector<double> kAlphas{0.5, 1.0, 2.0};
const std::vector<double> kProbes{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};

std::vector<std::pair<std::string, AngularMeasure>> presets(std::size_t d) {
  return {{"independence", standard_measure(d, MeasureKind::independence)},
          {"dependence", standard_measure(d, MeasureKind::dependence)},
          {"mixture(0.3)", standard_measure(d, MeasureKind::mixture, 0.3)}};
}

// Direction of the x-grid; scaled so that P(Z <= s v) hits the target levels.
std::vector<double> direction(std::size_t d) {
  const std::vector<double> v{1.0, 2.0, 0.5};
  return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(d)};
}

std::vector<double> scaled(const std::vector<double>& v, double s) {
  auto out = v;
  for (double& x : out) x *= s;
  return out;
}

double level_scale(const MaxStableLaw& law, const std::vector<double>& v, double p) {
  const double tail = exponent_tail(law, v).value;
  return std::pow(tail / -std::log(p), 1.0 / law.alpha());
}

struct Hits {
  std::vector<std::size_t> count;
  void merge(const Hits& o) {
    if (count.empty()) count.assign(o.count.size(), 0);
    for (std::size_t i = 0; i < o.count.size(); ++i) count[i] += o.count[i];
  }
};

bool below(std::span<const double> z, std::span<const double> x) {
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (z[j] > x[j]) return false;
  }
  return true;
}

// 1. Sampler against the exponent measure.
Outcome exponent_measure() {
  const std::size_t n = 1000000;
  const std::vector<double> levels{0.1, 0.3, 0.5, 0.7, 0.9};
  Outcome o;
  double worst = 0.0;
  std::size_t checks = 0, stream = 0;
  for (std::size_t d = 1; d <= 3; ++d) {
    for (double alpha : kAlphas) {
      for (const auto& [name, nu] : presets(d)) {
        const MaxStableLaw law(alpha, nu);
        const auto v = direction(d);
        std::vector<std::vector<double>> grid;
        for (double p : levels) grid.push_back(scaled(v, level_scale(law, v, p)));
        const auto hits = run_chunked<Hits>(
            n, RngSpec{1, stream++},
            [&](Rng& rng, std::size_t count, Hits& h) {
              h.count.assign(grid.size(), 0);
              std::vector<double> z(d);
              for (std::size_t i = 0; i < count; ++i) {
                sample_max_stable(law, rng, z);
                for (std::size_t k = 0; k < grid.size(); ++k) h.count[k] += below(z, grid[k]);
              }
            });
        for (std::size_t k = 0; k < grid.size(); ++k) {
          const double p = std::exp(-exponent_tail(law, grid[k]).value);
          const auto c = binomial_check(hits.count[k], n, p);
          ++checks;
          worst = std::max(worst, std::abs(c.z()));
          if (!c.within(3.0)) {
            o.pass = false;
            o.detail += "[d=" + std::to_string(d) + " alpha=" + fmt(alpha) + " " + name + " x" + std::to_string(k) +
                        " z=" + fmt(c.z()) + "] ";
          }
        }
      }
    }
  }
  o.detail += std::to_string(checks) + " grid checks at n=1e6, max |z| = " + fmt(worst);
  return o;
}

// 2. aZ (+) bZ' has the law of Z when a^alpha + b^alpha = 1.
Outcome max_stability() {
  const std::size_t n = 100000;
  struct Case {
    double alpha;
    std::size_t d;
    MeasureKind kind;
    double weight;  // a^alpha
  };
  const std::vector<Case> cases{{1.0, 1, MeasureKind::independence, 0.5},
                                {0.5, 2, MeasureKind::mixture, 0.3},
                                {2.0, 3, MeasureKind::dependence, 0.8},
                                {1.0, 3, MeasureKind::independence, 0.5}};
  Outcome o;
  double worst = 0.0;
  std::uint64_t stream = 0;
  for (const auto& c : cases) {
    const MaxStableLaw law(c.alpha, standard_measure(c.d, c.kind, 0.3));
    const double a = std::pow(c.weight, 1.0 / c.alpha), b = std::pow(1.0 - c.weight, 1.0 / c.alpha);
    const auto v = direction(c.d);
    std::vector<std::vector<double>> grid;
    for (int k = 1; k <= 10; ++k) grid.push_back(scaled(v, level_scale(law, v, (k - 0.5) / 10.0)));
    Rng plain(RngSpec{2, stream++}), left(RngSpec{2, stream++}), right(RngSpec{2, stream++});
    std::vector<std::size_t> hz(grid.size()), hm(grid.size());
    std::vector<double> z(c.d), z1(c.d), z2(c.d);
    for (std::size_t i = 0; i < n; ++i) {
      sample_max_stable(law, plain, z);
      sample_max_stable(law, left, z1);
      sample_max_stable(law, right, z2);
      for (std::size_t j = 0; j < c.d; ++j) z1[j] = std::max(a * z1[j], b * z2[j]);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        hz[k] += below(z, grid[k]);
        hm[k] += below(z1, grid[k]);
      }
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double p1 = static_cast<double>(hz[k]) / n, p2 = static_cast<double>(hm[k]) / n;
      const double pooled = 0.5 * (p1 + p2);
      const double z_score = (p1 - p2) / std::sqrt(2.0 * pooled * (1.0 - pooled) / n);
      worst = std::max(worst, std::abs(z_score));
      if (std::abs(z_score) > 3.0) {
        o.pass = false;
        o.detail += "[alpha=" + fmt(c.alpha) + " d=" + std::to_string(c.d) + " k=" + std::to_string(k) +
                    " z=" + fmt(z_score) + "] ";
      }
    }
  }
  o.detail += std::to_string(cases.size() * 10) + " two-sample cdf checks at n=1e5, max |z| = " + fmt(worst);
  return o;
}

// 3. Semigroup law by nested quadrature; L1/L2 contraction by Monte Carlo.
Outcome semigroup_law() {
  Outcome o;
  QuadratureSpec q;
  q.tolerance = 1e-11;
  q.inner_tolerance = 1e-12;
  double worst = 0.0;
  std::size_t checks = 0;
  for (double alpha : kAlphas) {
    for (const auto& name : catalog::names()) {
      const auto f = catalog::by_name(name == "h_z:<z>" ? "h_z:1" : name);
      for (double s : {0.1, 1.0}) {
        const auto ps = semigroup_field(alpha, f, s, q);
        for (double t : {0.1, 1.0}) {
          for (double x : {0.5, 1.0, 2.0}) {
            const double gap = std::abs(semigroup_1d(alpha, ps, t, x, q) - semigroup_1d(alpha, f, t + s, x, q));
            ++checks;
            worst = std::max(worst, gap);
            if (gap > 1e-8) {
              o.pass = false;
              o.detail += "[" + f.name() + " alpha=" + fmt(alpha) + " s=" + fmt(s) + " t=" + fmt(t) +
                          " x=" + fmt(x) + " gap=" + fmt(gap) + "] ";
            }
          }
        }
      }
    }
  }
  o.detail += std::to_string(checks) + " semigroup-law checks, max gap " + fmt(worst) + "; ";

  // ||P_t f||_p <= ||f||_p: d = 1 with P_t f by quadrature at the sampled points (p = 1, 2);
  // d = 2 with (P_t f)^2 as a product of two independent Mehler draws (p = 2).
  double worst_z = -1e300;
  std::size_t contraction = 0;
  const std::size_t n1 = 5000;
  std::uint64_t stream = 0;
  for (double alpha : kAlphas) {
    for (const auto& f : catalog::smooth()) {
      for (double t : {0.1, 1.0}) {
        for (int p : {1, 2}) {
          Moments diff;
          Rng rng(RngSpec{3, stream++});
          for (std::size_t i = 0; i < n1; ++i) {
            const double z = sample_frechet(alpha, 1.0, rng);
            const double pt = semigroup_1d(alpha, f, t, z);
            diff.add(std::pow(std::abs(pt), p) - std::pow(std::abs(f(z)), p));
          }
          const double se = diff.std_error();
          worst_z = std::max(worst_z, diff.mean() / se);
          ++contraction;
          if (diff.mean() > 3.0 * se) {
            o.pass = false;
            o.detail += "[L" + std::to_string(p) + " " + f.name() + " alpha=" + fmt(alpha) + " t=" + fmt(t) + "] ";
          }
        }
      }
    }
  }
  const std::size_t n2 = 100000;
  for (const auto& [name, nu] : presets(2)) {
    const MaxStableLaw law(1.0, nu);
    for (const auto& f : {catalog::inv1p_of_sum(2), catalog::sum_of_logs(2)}) {
      for (double t : {0.1, 1.0}) {
        const double a = std::exp(-t), b = -std::expm1(-t);
        Moments diff;
        Rng rng(RngSpec{3, stream++});
        std::vector<double> z(2), w(2), y1(2), y2(2);
        for (std::size_t i = 0; i < n2; ++i) {
          sample_max_stable(law, rng, z);
          sample_max_stable(law, rng, w);
          for (int j = 0; j < 2; ++j) y1[j] = std::max(a * z[j], b * w[j]);
          sample_max_stable(law, rng, w);
          for (int j = 0; j < 2; ++j) y2[j] = std::max(a * z[j], b * w[j]);
          const double fz = f(z);
          diff.add(f(y1) * f(y2) - fz * fz);
        }
        const double se = diff.std_error();
        worst_z = std::max(worst_z, diff.mean() / se);
        ++contraction;
        if (diff.mean() > 3.0 * se) {
          o.pass = false;
          o.detail += "[L2 d=2 " + name + " " + f.name() + " t=" + fmt(t) + "] ";
        }
      }
    }
  }
  o.detail += std::to_string(contraction) + " contraction checks, max (E|P_t f|^p - E|f|^p)/se = " + fmt(worst_z);
  return o;
}

// 4. Generator forms agree; difference quotients converge linearly.
Outcome generator_consistency() {
  Outcome o;
  double worst = 0.0, worst_abs = 0.0;
  std::size_t checks = 0;
  for (double alpha : kAlphas) {
    const GeneratorContext ctx(MaxStableLaw(alpha, standard_measure(1, MeasureKind::independence)));
    for (const auto& name : catalog::names()) {
      if (name.rfind("h_z", 0) == 0) continue;
      const auto f = catalog::by_name(name);
      for (double x : kProbes) {
        const double drift_d = generator(ctx, f, x);
        for (auto form : {ParetoForm::jump, ParetoForm::derivative}) {
          const double alt = generator_pareto_form_1d(alpha, f, x, form);
          const double gap = std::abs(alt - drift_d);
          const double scale = std::max(std::abs(alt), std::abs(drift_d));
          const double rel = scale > 0.0 ? gap / scale : 0.0;
          ++checks;
          if (gap > 1e-14) worst = std::max(worst, rel);
          worst_abs = std::max(worst_abs, gap);
          // Relative test, except where L f vanishes (const1) and only rounding is left.
          if (gap > 1e-14 && !(rel <= 1e-9)) {
            o.pass = false;
            o.detail += "[" + name + " alpha=" + fmt(alpha) + " x=" + fmt(x) + " rel=" + fmt(rel) + "] ";
          }
        }
      }
    }
  }
  o.detail += std::to_string(checks) +  " form comparisons, max relative gap " + fmt(worst) + " above 1e-14, max absolute gap " + fmt(worst_abs) + "; ";

  QuadratureSpec fine;
  fine.tolerance = 1e-14;
  fine.inner_tolerance = 1e-14;
  double lo = 1e300, hi = -1e300;
  for (double alpha : kAlphas) {
    const GeneratorContext ctx(MaxStableLaw(alpha, standard_measure(1, MeasureKind::independence)));
    for (const auto& f : catalog::smooth()) {
      // Not x = 0.5: L^2 log vanishes there at alpha = 1 and the error turns quadratic.
      for (double x : {0.7, 2.0}) {
        const double lf = generator(ctx, f, x);
        double e[3];
        const double ts[3] = {1e-2, 1e-3, 1e-4};
        for (int k = 0; k < 3; ++k) e[k] = (semigroup_1d(alpha, f, ts[k], x, fine) - f(x)) / ts[k] - lf;
        for (int k = 0; k < 2; ++k) {
          const double ratio = e[k] / e[k + 1];
          lo = std::min(lo, ratio);
          hi = std::max(hi, ratio);
          if (!(std::abs(ratio - 10.0) <= 2.0)) {
            o.pass = false;
            o.detail += "[richardson " + f.name() + " alpha=" + fmt(alpha) + " x=" + fmt(x) + " ratio=" + fmt(ratio) +
                        "] ";
          }
        }
      }
    }
  }
  o.detail += "error ratios across t = 1e-2, 1e-3, 1e-4 in [" + fmt(lo) + ", " + fmt(hi) + "]";
  return o;
}

// 5. L L^{-1} f = f - E f.
Outcome right_inverse() {
  Outcome o;
  QuadratureSpec q;
  q.tolerance = 1e-6;
  q.inner_tolerance = 1e-8;
  q.absolute_tolerance = 1e-12;
  auto functions = catalog::smooth();
  functions.push_back(catalog::by_name("exp_atanlog"));
  double worst = 0.0;
  for (double alpha : kAlphas) {
    const GeneratorContext ctx(MaxStableLaw(alpha, standard_measure(1, MeasureKind::independence)), q);
    for (const auto& f0 : functions) {
      const auto f = affine(f0, 1.0, -frechet_expectation(alpha, f0));
      const auto inv = inverse_generator_field(ctx, f);
      for (double x : kProbes) {
        const double r = std::abs(generator(ctx, inv, x) - f(x));
        worst = std::max(worst, r);
        if (!(r <= 1e-6)) {
          o.pass = false;
          o.detail += "[" + f0.name() + " alpha=" + fmt(alpha) + " x=" + fmt(x) + " r=" + fmt(r) + "] ";
        }
      }
    }
  }
  o.detail += std::to_string(functions.size() * kAlphas.size()) + " centered functions, sup residual " + fmt(worst);
  return o;
}

// 6. Commutator identities.
Outcome commutators() {
  Outcome o;
  double worst = 0.0;
  std::size_t count = 0;
  std::set<std::string> ops;
  for (double alpha : kAlphas) {
    const GeneratorContext ctx(MaxStableLaw(alpha, standard_measure(1, MeasureKind::independence)));
    for (const auto& r : commutator_suite(ctx)) {
      ++count;
      ops.insert(r.operator_name);
      worst = std::max(worst, r.max_abs);
      if (!(r.max_abs <= 1e-7)) {
        o.pass = false;
        o.detail += "[" + r.operator_name + " " + r.function_name + " alpha=" + fmt(alpha) + " " + fmt(r.max_abs) + "] ";
      }
    }
  }
  if (ops.size() < 5) {
    o.pass = false;
    o.detail += "[only " + std::to_string(ops.size()) + " operator identities exercised] ";
  }
  o.detail += std::to_string(count) + " residuals over " + std::to_string(ops.size()) + " identities, max " + fmt(worst);
  return o;
}

struct SuiteSummary {
  std::size_t positives = 0, controls = 0;
  double min_slack = 1e300;
  std::vector<VerificationReport> reports;
};

// Every positive report must pass and every control must fail.
Outcome judge_suite(Suite s, std::uint64_t seed, SuiteSummary& sum, bool quick = false) {
  Outcome o;
  SuiteOptions opt;
  opt.seed = seed;
  opt.quick = quick;
  sum.reports = run_suite(s, opt);
  for (const auto& r : sum.reports) {
    if (r.expect_failure) {
      ++sum.controls;
    } else {
      ++sum.positives;
      if (r.kind == ReportKind::inequality) sum.min_slack = std::min(sum.min_slack, r.slack());
    }
    if (!r.as_expected()) {
      o.pass = false;
      o.detail += "[" + r.identity_name + ": " + to_string(r.status) + (r.note.empty() ? "" : ", " + r.note) + "] ";
    }
  }
  if (sum.positives == 0 || sum.controls == 0) {
    o.pass = false;
    o.detail += "[suite lacks positive checks or controls] ";
  }
  return o;
}

// 7. Covariance identities and analytic checkpoints.
Outcome covariance() {
  SuiteSummary s;
  auto o = judge_suite(Suite::covariance, 7, s);
  std::size_t checkpoints = 0;
  for (const auto& r : s.reports) {
    if (r.identity_name.find("checkpoint") != std::string::npos && r.passed) ++checkpoints;
  }
  if (checkpoints < 2) {
    o.pass = false;
    o.detail += "[analytic checkpoints missing] ";
  }
  o.detail += std::to_string(s.positives) + " identities to 1e-6 (" + std::to_string(checkpoints) +
              " analytic checkpoints), " + std::to_string(s.controls) + " control(s) rejected";
  return o;
}

// 8. Stein characterization with the scaled-Frechet control.
Outcome stein() {
  SuiteSummary s;
  auto o = judge_suite(Suite::stein, 8, s);
  double max_positive_z = 0.0;
  for (const auto& r : s.reports) {
    if (r.expect_failure) {
      if (!(r.z_score() >= 5.0)) {
        o.pass = false;
        o.detail += "[control only " + fmt(r.z_score()) + " sigma] ";
      }
      o.detail += "control lhs " + fmt(r.lhs, 4) + " vs rhs " + fmt(r.rhs, 4) + " at " + fmt(r.z_score()) + " sigma; ";
    } else {
      max_positive_z = std::max(max_positive_z, r.z_score());
    }
  }
  o.detail += std::to_string(s.positives) + " positive checks, max |z| = " + fmt(max_positive_z);
  return o;
}

// 9. Poincare and modified log-Sobolev inequalities.
Outcome functional_inequalities() {
  SuiteSummary p, l;
  auto o = judge_suite(Suite::poincare, 9, p);
  const auto ol = judge_suite(Suite::logsobolev, 9, l);
  o.pass = o.pass && ol.pass;
  o.detail += ol.detail;
  for (const auto* s : {&p, &l}) {
    if (!(s->min_slack >= 0.0)) {
      o.pass = false;
      o.detail += "[negative slack " + fmt(s->min_slack) + "] ";
    }
  }
  o.detail += "Poincare " + std::to_string(p.positives) + " (min slack " + fmt(p.min_slack) + "), log-Sobolev " +
              std::to_string(l.positives) + " (min slack " + fmt(l.min_slack) + "), controls rejected";
  return o;
}

// 10. Second-order Poincare bound on d_W.
Outcome second_order() {
  SuiteSummary s;
  auto o = judge_suite(Suite::secondorder, 10, s);
  double worst = 0.0;
  for (const auto& r : s.reports) {
    if (!r.expect_failure) worst = std::max(worst, r.lhs / r.rhs);
  }
  o.detail += std::to_string(s.positives) + " standardized functions at n=1e6, max d_W / bound = " + fmt(worst);
  return o;
}

// 11. Process simulators.
Outcome processes() {
  Outcome o;
  const double x0 = 3.0;
  const std::vector<double> grid{0.0, 0.5, 1.0, 2.0, 5.0};
  // 1e6 paths: ten times the usual sample, so the same 3-sigma band is tighter.
  const std::size_t n = 1000000;
  double worst = 0.0;
  std::size_t checks = 0;
  std::uint64_t stream = 0;
  for (double alpha : kAlphas) {
    Rng rng(RngSpec{11, stream++});
    std::vector<std::vector<double>> at(grid.size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = simulate_frechet_process(alpha, x0, grid, rng);
      for (std::size_t k = 0; k < grid.size(); ++k) at[k].push_back(p.values[k]);
    }
    for (std::size_t k = 1; k < grid.size(); ++k) {
      const double floor = x0 * std::exp(-grid[k] / alpha);
      for (double m : {1.0, 1.2, 1.5, 2.0, 3.0}) {
        const auto c = binomial_check(at[k], floor * m, frechet_transition_cdf(alpha, x0, floor * m, grid[k]));
        ++checks;
        worst = std::max(worst, std::abs(c.z()));
        if (!c.within(3.0)) {
          o.pass = false;
          o.detail += "[transition alpha=" + fmt(alpha) + " t=" + fmt(grid[k]) + " m=" + fmt(m) + " z=" + fmt(c.z()) +
                      "] ";
        }
      }
    }
  }
  o.detail += std::to_string(checks) + " transition cdf checks, max |z| = " + fmt(worst) + "; ";

  const std::size_t m = 4000;
  const auto short_grid = uniform_grid(2.0, 4);
  double worst_ratio = 0.0;
  for (double alpha : kAlphas) {
    Rng rng(RngSpec{11, stream++});
    std::vector<std::vector<double>> a(short_grid.size()), b(short_grid.size());
    for (std::size_t i = 0; i < m; ++i) {
      const auto p = simulate_frechet_process(alpha, x0, short_grid, rng);
      const auto q = simulate_frechet_process_pointwise(alpha, x0, short_grid, 0.5, RngSpec{11, 1000 + i}.child(stream));
      for (std::size_t k = 0; k < short_grid.size(); ++k) {
        a[k].push_back(p.values[k]);
        b[k].push_back(q.path.values[k]);
      }
    }
    for (std::size_t k = 1; k < short_grid.size(); ++k) {
      std::sort(a[k].begin(), a[k].end());
      std::sort(b[k].begin(), b[k].end());
      const double ks = ks_two_sample(a[k], b[k]);
      const double crit = ks_critical(m, 0.01, m);
      worst_ratio = std::max(worst_ratio, ks / crit);
      if (ks > crit) {
        o.pass = false;
        o.detail += "[pointwise alpha=" + fmt(alpha) + " t=" + fmt(short_grid[k]) + " KS=" + fmt(ks) + "] ";
      }
    }
  }
  o.detail += "pointwise vs transition KS/critical max " + fmt(worst_ratio) + "; ";

  QuadratureSpec fine;
  fine.tolerance = 1e-14;
  fine.inner_tolerance = 1e-14;
  double lo = 1e300, hi = -1e300;
  for (double alpha : kAlphas) {
    const GeneratorContext ctx(MaxStableLaw(alpha, standard_measure(1, MeasureKind::independence)));
    for (const auto& f : catalog::smooth()) {
      for (double x : {0.7, 2.0}) {
        const double df = D_op(ctx, f, x);
        double e[3];
        const double hs[3] = {1e-2, 1e-3, 1e-4};
        for (int k = 0; k < 3; ++k) e[k] = (motion_transition_mean(alpha, f, x, hs[k], fine) - f(x)) / hs[k] - df;
        for (int k = 0; k < 2; ++k) {
          const double ratio = e[k] / e[k + 1];
          lo = std::min(lo, ratio);
          hi = std::max(hi, ratio);
          if (!(std::abs(ratio - 10.0) <= 2.0)) {
            o.pass = false;
            o.detail += "[motion " + f.name() + " alpha=" + fmt(alpha) + " x=" + fmt(x) + " ratio=" + fmt(ratio) + "] ";
          }
        }
      }
    }
  }
  o.detail += "motion generator error ratios in [" + fmt(lo) + ", " + fmt(hi) + "]; ";

  const auto rows = figure_paths();
  std::set<double> alphas;
  std::size_t starts = 0;
  for (const auto& r : rows) {
    alphas.insert(r.alpha);
    if (r.t == 0.0 && r.x == 3.0) ++starts;
  }
  if (alphas.size() != 4 || starts != 4 || rows.size() != 4 * 1001) {
    o.pass = false;
    o.detail += "[figure paths: " + std::to_string(alphas.size()) + " alphas, " + std::to_string(starts) + " starts] ";
  }
  o.detail += "figure paths " + std::to_string(alphas.size()) + " x " + std::to_string(rows.size() / 4) + " rows from x(0)=3";
  return o;
}

// 12. Manifest replay reproduces every randomized command bit-exactly.
Outcome determinism() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "maxstable-acceptance";
  fs::create_directories(dir);
  const auto out = [&](const char* name) { return (dir / name).string(); };
  const std::vector<std::vector<std::string>> commands{
      {"sample", "--alpha", "1", "--nu", "preset:mixture3:0.3", "--n", "20000", "--seed", "12", "--out",
       out("sample.csv")},
      {"sample", "--alpha", "1", "--nu", "preset:mixture3:0.3", "--n", "20000", "--seed", "12", "--threads", "3",
       "--out", out("sample_threads.csv")},
      {"sample", "--alpha", "-1", "--nu", "preset:dependence2", "--n", "5000", "--seed", "12", "--out",
       out("sample_weibull.csv")},
      {"semigroup", "--alpha", "1", "--nu", "preset:independence2", "--f", "sum_of_logs", "--t", "0.5", "--x", "1,2",
       "--method", "mc", "--n", "50000", "--seed", "12", "--out", out("semigroup.json")},
      {"verify", "--suite", "stein", "--quick", "--seed", "12", "--out", out("stein.jsonl")},
      {"path", "--seed", "12", "--out", out("frechet.csv")},
      {"path", "--process", "motion", "--seed", "12", "--out", out("motion.csv")},
  };
  std::ostringstream sink, errs;
  for (const auto& args : commands) {
    if (cli::run(args, sink, errs) != cli::kExitOk) {
      o.pass = false;
      o.detail += "[" + args[0] + " failed: " + errs.str() + "] ";
      continue;
    }
    const std::string manifest = cli::manifest_path(args.back());
    if (cli::run({"replay", manifest}, sink, errs) != cli::kExitOk) {
      o.pass = false;
      o.detail += "[replay differs: " + manifest + "] ";
    }
  }
  if (o.pass && cli::file_digest(out("sample.csv")) != cli::file_digest(out("sample_threads.csv"))) {
    o.pass = false;
    o.detail += "[output depends on thread count] ";
  }
  // The in-process samplers behind the criteria above, run twice.
  const MaxStableLaw law(0.5, standard_measure(3, MeasureKind::mixture, 0.3));
  std::vector<double> first, second, z(3);
  for (auto* dst : {&first, &second}) {
    Rng rng(RngSpec{1, 0});
    for (int i = 0; i < 10000; ++i) {
      sample_max_stable(law, rng, z);
      dst->insert(dst->end(), z.begin(), z.end());
    }
  }
  if (first != second) {
    o.pass = false;
    o.detail += "[in-process sampler not reproducible] ";
  }
  o.detail += std::to_string(commands.size()) + " manifests replayed bit-exactly, thread count invariant";
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"exponent measure", exponent_measure},
      {"max-stability", max_stability},
      {"semigroup law and contraction", semigroup_law},
      {"generator consistency", generator_consistency},
      {"right inverse", right_inverse},
      {"commutators", commutators},
      {"covariance identities", covariance},
      {"Stein characterization", stein},
      {"Poincare and log-Sobolev", functional_inequalities},
      {"second-order Poincare", second_order},
      {"processes", processes},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && o.pass;
    std::cout << "AC" << id << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << criteria[i].first << " (" << fmt(secs, 3)
              << "s): " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
