#include "maxstable/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace maxstable {

ScalarField::ScalarField(std::string name, std::size_t dim, Value value, Gradient gradient)
    : name_(std::move(name)), dim_(dim), value_(std::move(value)), gradient_(std::move(gradient)), kinks_(dim) {
  if (dim_ == 0) throw std::invalid_argument("scalar field: dimension must be at least 1");
  if (!value_) throw std::invalid_argument("scalar field: missing evaluator");
}

ScalarField ScalarField::univariate(std::string name, Univariate f, Univariate df) {
  if (!f) throw std::invalid_argument("scalar field: missing evaluator");
  Value value = [f](std::span<const double> x) { return f(x[0]); };
  Gradient gradient;
  if (df) gradient = [df](std::span<const double> x, std::span<double> g) { g[0] = df(x[0]); };
  ScalarField out(std::move(name), 1, std::move(value), std::move(gradient));
  out.f1_ = std::move(f);
  out.df1_ = std::move(df);
  return out;
}

ScalarField& ScalarField::with_log_lipschitz(double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("scalar field: log-Lipschitz constant must be nonnegative");
  log_lipschitz_ = c;
  return *this;
}

ScalarField& ScalarField::with_kinks(std::size_t coordinate, std::vector<double> points) {
  if (coordinate >= dim_) throw std::out_of_range("scalar field: kink coordinate out of range");
  std::sort(points.begin(), points.end());
  kinks_[coordinate] = std::move(points);
  return *this;
}

ScalarField& ScalarField::with_limit_at_infinity(double limit) {
  limit_ = limit;
  return *this;
}

ScalarField& ScalarField::with_name(std::string name) {
  name_ = std::move(name);
  return *this;
}

bool ScalarField::has_gradient() const noexcept { return static_cast<bool>(gradient_); }

const std::vector<double>& ScalarField::kinks(std::size_t coordinate) const { return kinks_.at(coordinate); }

double ScalarField::operator()(std::span<const double> x) const { return value_(x); }

double ScalarField::operator()(double x) const {
  if (f1_) return f1_(x);
  if (dim_ != 1) throw std::logic_error("scalar field " + name_ + " is not univariate");
  const double v[1] = {x};
  return value_(v);
}

void ScalarField::gradient(std::span<const double> x, std::span<double> out) const {
  if (!gradient_) throw std::logic_error("scalar field " + name_ + " has no gradient");
  gradient_(x, out);
}

double ScalarField::derivative(double x) const {
  if (df1_) return df1_(x);
  if (dim_ != 1) throw std::logic_error("scalar field " + name_ + " is not univariate");
  if (!gradient_) throw std::logic_error("scalar field " + name_ + " has no gradient");
  const double v[1] = {x};
  double g[1];
  gradient_(v, g);
  return g[0];
}

ScalarField affine(const ScalarField& f, double a, double b) {
  ScalarField out = [&] {
    if (f.dim() == 1) {
      ScalarField::Univariate df;
      if (f.has_gradient()) df = [f, a](double x) { return a * f.derivative(x); };
      return ScalarField::univariate(f.name(), [f, a, b](double x) { return a * f(x) + b; }, df);
    }
    ScalarField::Gradient g;
    if (f.has_gradient()) {
      g = [f, a](std::span<const double> x, std::span<double> out) {
        f.gradient(x, out);
        for (double& v : out) v *= a;
      };
    }
    return ScalarField(f.name(), f.dim(), [f, a, b](std::span<const double> x) { return a * f(x) + b; }, g);
  }();
  for (std::size_t j = 0; j < f.dim(); ++j) out.with_kinks(j, f.kinks(j));
  if (f.log_lipschitz()) out.with_log_lipschitz(std::abs(a) * *f.log_lipschitz());
  if (f.limit_at_infinity()) out.with_limit_at_infinity(a * *f.limit_at_infinity() + b);
  return out;
}

ScalarField with_central_difference(std::string name, ScalarField::Univariate f) {
  auto df = [f](double x) {
    const double h = 1e-5 * x;
    return (f(x + h) - f(x - h)) / (2.0 * h);
  };
  return ScalarField::univariate(std::move(name), std::move(f), std::move(df));
}

double max_log_gradient(const ScalarField& f, std::span<const std::vector<double>> probes) {
  double worst = 0.0;
  std::vector<double> g(f.dim());
  for (const auto& x : probes) {
    f.gradient(x, g);
    for (std::size_t j = 0; j < f.dim(); ++j) worst = std::max(worst, x[j] * std::abs(g[j]));
  }
  return worst;
}

double gradient_fd_mismatch(const ScalarField& f, std::span<const std::vector<double>> probes) {
  double worst = 0.0;
  std::vector<double> g(f.dim());
  for (const auto& x : probes) {
    f.gradient(x, g);
    for (std::size_t j = 0; j < f.dim(); ++j) {
      std::vector<double> up = x, down = x;
      const double h = 1e-6 * x[j];
      up[j] += h;
      down[j] -= h;
      const double fd = (f(up) - f(down)) / (2.0 * h);
      const double scale = std::max({std::abs(g[j]), std::abs(fd), 1e-12});
      worst = std::max(worst, std::abs(fd - g[j]) / scale);
    }
  }
  return worst;
}

namespace catalog {

ScalarField log() {
  return ScalarField::univariate(
             "log", [](double x) { return std::log(x); }, [](double x) { return 1.0 / x; })
      .with_log_lipschitz(1.0);
}

ScalarField inv1p() {
  return ScalarField::univariate(
             "inv1p", [](double x) { return 1.0 / (1.0 + x); },
             [](double x) { return -1.0 / ((1.0 + x) * (1.0 + x)); })
      .with_log_lipschitz(0.25)
      .with_limit_at_infinity(0.0);
}

ScalarField atanlog() {
  return ScalarField::univariate(
             "atanlog", [](double x) { return std::atan(std::log(x)); },
             [](double x) {
               const double l = std::log(x);
               return 1.0 / (x * (1.0 + l * l));
             })
      .with_log_lipschitz(1.0)
      .with_limit_at_infinity(std::numbers::pi / 2);
}

ScalarField ratio() {
  return ScalarField::univariate(
             "ratio", [](double x) { return x / (1.0 + x); },
             [](double x) { return 1.0 / ((1.0 + x) * (1.0 + x)); })
      .with_log_lipschitz(0.25)
      .with_limit_at_infinity(1.0);
}

ScalarField const1() {
  return ScalarField::univariate(
             "const1", [](double) { return 1.0; }, [](double) { return 0.0; })
      .with_log_lipschitz(0.0)
      .with_limit_at_infinity(1.0);
}

ScalarField one_plus_ratio() {
  return affine(ratio(), 1.0, 1.0).with_name("one_plus_ratio");
}

ScalarField exp_atanlog() {
  return ScalarField::univariate(
             "exp_atanlog", [](double x) { return std::exp(std::atan(std::log(x))); },
             [](double x) {
               const double l = std::log(x);
               return std::exp(std::atan(l)) / (x * (1.0 + l * l));
             })
      .with_log_lipschitz(std::exp(std::atan(0.5)) / 1.25)
      .with_limit_at_infinity(std::exp(std::numbers::pi / 2));
}

ScalarField indicator(double z) {
  if (!(z > 0.0)) throw std::invalid_argument("indicator: threshold must be positive");
  std::ostringstream name;
  name << "h_z:" << z;
  return ScalarField::univariate(name.str(), [z](double x) { return x <= z ? 1.0 : 0.0; })
      .with_kinks(0, {z})
      .with_limit_at_infinity(0.0);
}

std::vector<ScalarField> smooth() { return {log(), inv1p(), atanlog(), ratio()}; }

std::vector<ScalarField> positive() { return {inv1p(), ratio(), const1(), one_plus_ratio(), exp_atanlog()}; }

std::vector<std::string> names() {
  return {"log", "inv1p", "atanlog", "ratio", "const1", "one_plus_ratio", "exp_atanlog", "h_z:<z>"};
}

ScalarField by_name(const std::string& name) {
  if (name == "log") return log();
  if (name == "inv1p") return inv1p();
  if (name == "atanlog") return atanlog();
  if (name == "ratio") return ratio();
  if (name == "const1") return const1();
  if (name == "one_plus_ratio") return one_plus_ratio();
  if (name == "exp_atanlog") return exp_atanlog();
  if (name.rfind("h_z:", 0) == 0) {
    std::size_t used = 0;
    double z = 0.0;
    try {
      z = std::stod(name.substr(4), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == name.size() - 4 && z > 0.0) return indicator(z);
  }
  std::string list;
  for (const auto& n : names()) list += (list.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown function '" + name + "'; available: " + list);
}

ScalarField sum_of_logs(std::size_t d) {
  return ScalarField(
             "sum_of_logs", d,
             [](std::span<const double> x) {
               double s = 0.0;
               for (double v : x) s += std::log(v);
               return s;
             },
             [](std::span<const double> x, std::span<double> g) {
               for (std::size_t j = 0; j < x.size(); ++j) g[j] = 1.0 / x[j];
             })
      .with_log_lipschitz(1.0);
}

ScalarField log_coordinate(std::size_t d, std::size_t j) {
  if (j >= d) throw std::out_of_range("log_coordinate: coordinate out of range");
  return ScalarField(
             "log_x" + std::to_string(j + 1), d, [j](std::span<const double> x) { return std::log(x[j]); },
             [j](std::span<const double> x, std::span<double> g) {
               std::fill(g.begin(), g.end(), 0.0);
               g[j] = 1.0 / x[j];
             })
      .with_log_lipschitz(1.0);
}

ScalarField inv1p_of_sum(std::size_t d) {
  return ScalarField(
             "inv1p_of_sum", d,
             [](std::span<const double> x) {
               double s = 1.0;
               for (double v : x) s += v;
               return 1.0 / s;
             },
             [](std::span<const double> x, std::span<double> g) {
               double s = 1.0;
               for (double v : x) s += v;
               std::fill(g.begin(), g.end(), -1.0 / (s * s));
             })
      .with_log_lipschitz(0.25);
}

ScalarField atanlog_of_product(std::size_t d) {
  return ScalarField(
             "atanlog_of_product", d,
             [](std::span<const double> x) {
               double l = 0.0;
               for (double v : x) l += std::log(v);
               return std::atan(l);
             },
             [](std::span<const double> x, std::span<double> g) {
               double l = 0.0;
               for (double v : x) l += std::log(v);
               for (std::size_t j = 0; j < x.size(); ++j) g[j] = 1.0 / (x[j] * (1.0 + l * l));
             })
      .with_log_lipschitz(1.0);
}

}  // namespace catalog

}  // namespace maxstable
