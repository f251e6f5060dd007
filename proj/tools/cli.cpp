#include "cli.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "maxstable/identities.hpp"
#include "maxstable/processes.hpp"
#include "maxstable/sampling.hpp"
#include "maxstable/semigroup.hpp"
#include "measure_json.hpp"

#ifndef MAXSTABLE_TOOL_VERSION
#define MAXSTABLE_TOOL_VERSION "0.0.0"
#endif

namespace maxstable::cli {

namespace {

using nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + exact(v[i]);
  return s;
}

// Catalog names for d = 1; summary functions for d > 1.
ScalarField resolve_field(const std::string& name, std::size_t d) {
  if (d == 1) return catalog::by_name(name);
  if (name == "sum_of_logs") return catalog::sum_of_logs(d);
  if (name == "inv1p_of_sum") return catalog::inv1p_of_sum(d);
  if (name == "atanlog_of_product") return catalog::atanlog_of_product(d);
  if (name.rfind("log_coordinate:", 0) == 0) {
    const auto j = std::stoul(name.substr(15));
    if (j < 1 || j > d) throw std::invalid_argument("log_coordinate index must lie in 1.." + std::to_string(d));
    return catalog::log_coordinate(d, j - 1);
  }
  throw std::invalid_argument("unknown function '" + name + "' for d = " + std::to_string(d) +
                              " (available: sum_of_logs, inv1p_of_sum, atanlog_of_product, log_coordinate:<j>)");
}

struct Emission {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::uint64_t seed = 0;
};

// Writes `body` to `path` (or `out` when empty) and the manifest next to it.
void emit(const Emission& e, const std::string& path, const std::string& body, std::ostream& out) {
  if (path.empty()) {
    out << body;
    return;
  }
  {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << body;
  }
  json params = json::object();
  for (const auto& [k, v] : e.parameters) params[k] = v;
  const json manifest{{"command", e.command},
                      {"parameters", params},
                      {"seed", e.seed},
                      {"tool_version", MAXSTABLE_TOOL_VERSION},
                      {"outputs", json::array({{{"path", path}, {"fnv1a64", file_digest(path)}}})}};
  std::ofstream m(manifest_path(path));
  if (!m) throw ConfigError("cannot write manifest for '" + path + "'");
  m << manifest.dump(2) << '\n';
}

struct SampleOptions {
  double alpha = 1.0;
  std::string nu = "preset:independence1";
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = 1;
};

int cmd_sample(const SampleOptions& o, std::ostream& out) {
  const MaxStableLaw law(o.alpha, load_measure(o.nu));
  const std::size_t d = law.dim();
  struct Rows {
    std::vector<double> v;
    void merge(const Rows& r) { v.insert(v.end(), r.v.begin(), r.v.end()); }
  };
  const auto rows = run_chunked<Rows>(
      o.n, RngSpec{o.seed, 0},
      [&](Rng& rng, std::size_t count, Rows& r) {
        std::vector<double> z(d);
        for (std::size_t i = 0; i < count; ++i) {
          sample_branch(law, rng, z);
          r.v.insert(r.v.end(), z.begin(), z.end());
        }
      },
      ExecutionPolicy{o.threads, 4096});
  std::string body;
  for (std::size_t j = 0; j < d; ++j) body += (j ? ",z" : "z") + std::to_string(j + 1);
  body += '\n';
  for (std::size_t i = 0; i < o.n; ++i) {
    for (std::size_t j = 0; j < d; ++j) body += (j ? "," : "") + exact(rows.v[i * d + j]);
    body += '\n';
  }
  emit({"sample",
        {{"alpha", exact(o.alpha)}, {"nu", o.nu}, {"n", std::to_string(o.n)}, {"seed", std::to_string(o.seed)},
         {"threads", std::to_string(o.threads)}},
        o.seed},
       o.out, body, out);
  return kExitOk;
}

struct SemigroupOptions {
  double alpha = 1.0;
  std::string nu = "preset:independence1";
  std::string f;
  double t = 0.0;
  std::string x;
  std::string method = "quad";
  std::size_t n = 100000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double tol = 1e-9;
  std::string out;
  unsigned threads = 1;
};

int cmd_semigroup(const SemigroupOptions& o, std::ostream& out) {
  const auto nu = load_measure(o.nu);
  const MaxStableLaw law(o.alpha, nu);
  const auto f = resolve_field(o.f, law.dim());
  const auto x = parse_list(o.x, "--x");
  if (x.size() != law.dim()) {
    throw ConfigError("--x has " + std::to_string(x.size()) + " coordinates, the law has d = " +
                      std::to_string(law.dim()));
  }
  json result{{"f", f.name()}, {"t", o.t}, {"x", x}, {"alpha", o.alpha}, {"method", o.method}};
  std::vector<std::pair<std::string, std::string>> params{
      {"alpha", exact(o.alpha)}, {"nu", o.nu}, {"f", o.f}, {"t", exact(o.t)}, {"x", join(x)}, {"method", o.method}};
  if (o.method == "quad") {
    if (law.dim() != 1) throw ConfigError("--method quad requires d = 1");
    if (!(o.alpha > 0.0)) throw ConfigError("--method quad requires alpha > 0");
    QuadratureSpec q;
    q.tolerance = o.tol;
    q.inner_tolerance = std::min(o.tol, q.inner_tolerance);
    result["value"] = semigroup_1d(o.alpha, f, o.t, x[0], q);
    result["tolerance"] = o.tol;
    params.emplace_back("tol", exact(o.tol));
  } else if (o.method == "mc") {
    if (!o.seed_given) throw ConfigError("--method mc requires --seed");
    const auto est = mehler_mc(law, f, o.t, x, o.n, RngSpec{o.seed, 0}, ExecutionPolicy{o.threads, 4096});
    result["value"] = est.value;
    result["std_error"] = est.std_error;
    result["n"] = est.n;
    result["seed"] = o.seed;
    params.emplace_back("n", std::to_string(o.n));
    params.emplace_back("seed", std::to_string(o.seed));
    params.emplace_back("threads", std::to_string(o.threads));
  } else {
    throw ConfigError("--method must be mc or quad");
  }
  emit({"semigroup", params, o.seed}, o.out, result.dump() + "\n", out);
  return kExitOk;
}

struct VerifyOptions {
  std::string suite;
  bool quick = false;
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = 1;
};

json report_json(const VerificationReport& r) {
  return {{"identity_name", r.identity_name},
          {"lhs", r.lhs},
          {"rhs", r.rhs},
          {"tolerance", r.tolerance},
          {"passed", r.passed},
          {"method", r.method},
          {"error_estimate", r.error_estimate},
          {"kind", to_string(r.kind)},
          {"status", to_string(r.status)},
          {"expect_failure", r.expect_failure},
          {"as_expected", r.as_expected()},
          {"slack", r.slack()},
          {"note", r.note}};
}

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  Suite suite;
  try {
    suite = parse_suite(o.suite);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  SuiteOptions so;
  so.quick = o.quick;
  so.seed = o.seed;
  so.exec.threads = o.threads;
  const auto reports = run_suite(suite, so);
  std::string body;
  std::size_t unexpected = 0;
  for (const auto& r : reports) {
    body += report_json(r).dump() + "\n";
    if (!r.as_expected()) {
      ++unexpected;
      err << "unexpected: " << r.identity_name << " (" << to_string(r.status) << ")"
          << (r.note.empty() ? "" : ": " + r.note) << '\n';
    }
  }
  emit({"verify",
        {{"suite", o.suite}, {"quick", o.quick ? "true" : "false"}, {"seed", std::to_string(o.seed)},
         {"threads", std::to_string(o.threads)}},
        o.seed},
       o.out, body, out);
  err << reports.size() << " reports, " << unexpected << " unexpected\n";
  return unexpected == 0 ? kExitOk : kExitVerification;
}

struct PathOptions {
  std::string process = "frechet";
  std::string alphas = "0.5,1,2,4";
  double x0 = 3.0;
  double T = 10.0;
  std::size_t steps = 1000;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_path(const PathOptions& o, std::ostream& out) {
  const auto alphas = parse_list(o.alphas, "--alpha");
  for (double a : alphas) {
    if (!(a > 0.0)) throw ConfigError("--alpha entries must be positive");
  }
  std::vector<FigureRow> rows;
  if (o.process == "frechet") {
    if (!(o.x0 > 0.0)) throw ConfigError("--x0 must be positive for the Frechet process");
    rows = figure_paths(alphas, o.x0, o.T, o.steps, o.seed);
  } else if (o.process == "motion") {
    if (!(o.x0 >= 0.0)) throw ConfigError("--x0 must be nonnegative for the max-stable motion");
    const auto grid = uniform_grid(o.T, o.steps);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const auto p = simulate_max_stable_motion(alphas[i], o.x0, grid, RngSpec{o.seed, i});
      for (std::size_t k = 0; k < grid.size(); ++k) rows.push_back({alphas[i], grid[k], p.values[k]});
    }
  } else {
    throw ConfigError("--process must be frechet or motion");
  }
  std::ostringstream body;
  write_paths_csv(body, rows);
  emit({"path",
        {{"process", o.process}, {"alpha", join(alphas)}, {"x0", exact(o.x0)}, {"T", exact(o.T)},
         {"steps", std::to_string(o.steps)}, {"seed", std::to_string(o.seed)}},
        o.seed},
       o.out, body.str(), out);
  return kExitOk;
}

int cmd_replay(const std::string& manifest_file, bool keep, std::ostream& out, std::ostream& err) {
  std::ifstream in(manifest_file);
  if (!in) throw ConfigError("cannot open manifest '" + manifest_file + "'");
  json m;
  try {
    in >> m;
  } catch (const json::exception& e) {
    throw ConfigError("manifest '" + manifest_file + "' is not valid JSON: " + e.what());
  }
  if (!m.contains("command") || !m.contains("parameters") || !m.contains("outputs") || m["outputs"].empty()) {
    throw ConfigError("manifest '" + manifest_file + "' lacks command, parameters or outputs");
  }
  const auto& output = m["outputs"][0];
  const std::string original = output.at("path").get<std::string>();
  const std::string replayed = original + ".replay";
  std::vector<std::string> args{m["command"].get<std::string>()};
  for (const auto& [k, v] : m["parameters"].items()) {
    if (k == "quick") {
      if (v.get<std::string>() == "true") args.push_back("--quick");
      continue;
    }
    args.push_back("--" + k);
    args.push_back(v.get<std::string>());
  }
  args.push_back("--out");
  args.push_back(replayed);
  std::ostringstream sink;
  const int code = run(args, sink, err);
  if (code == kExitConfig) return kExitConfig;
  const std::string expected = output.at("fnv1a64").get<std::string>();
  const std::string actual = file_digest(replayed);
  const bool same = expected == actual;
  out << json{{"manifest", manifest_file}, {"output", original}, {"expected", expected}, {"actual", actual},
              {"identical", same}}
             .dump()
      << '\n';
  if (!keep) {
    std::filesystem::remove(replayed);
    std::filesystem::remove(manifest_path(replayed));
  }
  return same ? kExitOk : kExitVerification;
}

}  // namespace

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016" PRIx64, h);
  return hex;
}

std::string manifest_path(const std::string& output) { return output + ".manifest.json"; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Max-stable laws: sampling, semigroup evaluation, identity checks and process paths", "maxstable"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MAXSTABLE_TOOL_VERSION);

  SampleOptions so;
  auto* sample = app.add_subcommand("sample", "Draw samples of MS(alpha, nu) as CSV");
  sample->add_option("--alpha", so.alpha, "Stability index (<= 0 selects the Gumbel or Weibull branch)")->required();
  sample->add_option("--nu", so.nu, "Angular measure: JSON file or preset:<name>")->capture_default_str();
  sample->add_option("--n", so.n, "Number of samples")->capture_default_str();
  sample->add_option("--seed", so.seed, "Random seed")->required();
  sample->add_option("--out", so.out, "Output CSV (stdout when omitted)");
  sample->add_option("--threads", so.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  SemigroupOptions sg;
  auto* semigroup = app.add_subcommand("semigroup", "Evaluate P_t f(x)");
  semigroup->add_option("--alpha", sg.alpha, "Stability index")->required();
  semigroup->add_option("--nu", sg.nu, "Angular measure: JSON file or preset:<name>")->capture_default_str();
  semigroup->add_option("--f", sg.f, "Catalog function name")->required();
  semigroup->add_option("--t", sg.t, "Time")->required();
  semigroup->add_option("--x", sg.x, "Start point, comma separated")->required();
  semigroup->add_option("--method", sg.method, "mc or quad")->capture_default_str();
  semigroup->add_option("--n", sg.n, "Monte Carlo samples")->capture_default_str();
  auto* sg_seed = semigroup->add_option("--seed", sg.seed, "Random seed (required for mc)");
  semigroup->add_option("--tol", sg.tol, "Quadrature tolerance")->capture_default_str();
  semigroup->add_option("--out", sg.out, "Output file (stdout when omitted)");
  semigroup->add_option("--threads", sg.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "Run an identity suite and print JSON-lines reports");
  verify->add_option("--suite", vo.suite,
                     "stein, covariance, poincare, logsobolev, commutators, chaos, secondorder or all")
      ->required();
  verify->add_flag("--quick", vo.quick, "Reduced sample sizes and parameter grids");
  verify->add_option("--seed", vo.seed, "Random seed")->required();
  verify->add_option("--out", vo.out, "Report file (stdout when omitted)");
  verify->add_option("--threads", vo.threads, "Reports run concurrently")->check(CLI::PositiveNumber);

  PathOptions po;
  auto* path = app.add_subcommand("path", "Simulate process paths as CSV (alpha,t,x)");
  path->add_option("--process", po.process, "frechet or motion")->capture_default_str();
  path->add_option("--alpha", po.alphas, "Comma-separated stability indices")->capture_default_str();
  path->add_option("--x0", po.x0, "Starting value")->capture_default_str();
  path->add_option("--T", po.T, "Time horizon")->capture_default_str();
  path->add_option("--steps", po.steps, "Grid steps")->capture_default_str();
  path->add_option("--seed", po.seed, "Random seed")->required();
  path->add_option("--out", po.out, "Output CSV (stdout when omitted)");

  std::string manifest;
  bool keep = false;
  auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare output digests");
  replay->add_option("manifest", manifest, "Manifest JSON")->required();
  replay->add_flag("--keep", keep, "Keep the replayed output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << MAXSTABLE_TOOL_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*sample) return cmd_sample(so, out);
    if (*semigroup) {
      sg.seed_given = sg_seed->count() > 0;
      return cmd_semigroup(sg, out);
    }
    if (*verify) return cmd_verify(vo, out, err);
    if (*path) return cmd_path(po, out);
    if (*replay) return cmd_replay(manifest, keep, out, err);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerification;
  }
  return kExitConfig;
}

}  // namespace maxstable::cli
