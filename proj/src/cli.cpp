#include "pwc/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <stdexcept>

#include <CLI11.hpp>

#include "pwc/analysis.hpp"
#include "pwc/capacity.hpp"
#include "pwc/dp.hpp"
#include "pwc/io.hpp"
#include "pwc/sampler.hpp"
#include "pwc/verify.hpp"

namespace pwc {

namespace {

using nlohmann::json;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

json jnum(double x) { return std::isfinite(x) ? json(x) : json(format_double(x)); }

ClusteringSpec load_spec(const RunConfig& c) {
  if (!c.preset.empty() && !c.spec_file.empty()) throw UsageError("give either --preset or --spec, not both");
  if (!c.preset.empty()) return preset(c.preset);
  if (!c.spec_file.empty()) return load_spec_file(c.spec_file);
  throw UsageError("a spec is required: --preset NAME or --spec FILE");
}

int single_depth(const RunConfig& c) {
  if (c.depths.size() != 1) throw UsageError(c.subcommand + " takes exactly one depth");
  check_depth(c.depths.front());
  return c.depths.front();
}

// Builds the output stream: the file when a path is given, otherwise the fallback.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      os_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw UsageError("cannot write " + path);
      os_ = file_.get();
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

struct Result {
  Table table;
  json summary = json::object();
  std::vector<std::string> lines;  // raw lines instead of a table (sample dumps)
  int status = kExitOk;
};

double capacity_log_z(const CapacitySpec& s, int n, double j, bool override_guards) {
  return dp_Z_capacity(s, n, j, override_guards ? n : kCapacityGuard).log();
}

Result run_zeta(const RunConfig& c, const ClusteringSpec& spec, bool density) {
  const int n = single_depth(c);
  const auto grid = parse_grid(c.j_grid);
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw UsageError("J-grid must be increasing");
  Result r;
  r.table.columns = {"j", density ? "rho_n" : "zeta_n"};
  const auto* cap = std::get_if<CapacitySpec>(&spec);
  for (double j : grid) {
    double v;
    if (density)
      v = dp_density(spec, n, j);
    else if (cap)
      v = capacity_log_z(*cap, n, j, c.override_guards) / static_cast<double>(leaf_count(n));
    else
      v = dp_zeta(spec, n, j);
    r.table.rows.push_back({format_double(j), format_double(v)});
  }
  return r;
}

Result run_canonical(const RunConfig& c, const ClusteringSpec& spec) {
  const int n = single_depth(c);
  const CanonicalTable t = dp_W(spec, n, c.override_guards);
  Result r;
  r.table.columns = {"a0", "ln_w", "omega_n"};
  for (std::int64_t a0 = 0; a0 <= t.max_size(); ++a0)
    r.table.rows.push_back({std::to_string(a0), format_double(t.w(a0).log()), format_double(t.omega(a0))});
  return r;
}

Result run_threshold(const RunConfig& c, const ClusteringSpec& spec) {
  if (c.depths.empty()) throw UsageError("threshold needs --depths");
  for (std::size_t i = 0; i < c.depths.size(); ++i) {
    check_depth(c.depths[i]);
    if (i > 0 && c.depths[i] <= c.depths[i - 1]) throw UsageError("depths must be increasing");
  }
  if (std::holds_alternative<CapacitySpec>(spec) && !c.override_guards && c.depths.back() > kCapacityGuard)
    throw UsageError("capacity threshold limited to depth <= " + std::to_string(kCapacityGuard));
  const WettingReport rep = estimate_jstar(spec, c.depths, DeltaPolicy{c.delta});
  Result r;
  r.table.columns = {"n", "upper_estimate", "delta", "tail", "slope_estimate"};
  json rows = json::array();
  for (const auto& row : rep.rows) {
    const double slope = row.slope ? *row.slope : std::nan("");
    r.table.rows.push_back({std::to_string(row.depth), format_double(row.upper), format_double(row.delta),
                            format_double(row.tail), format_double(slope)});
    json jr = {{"n", row.depth}, {"upper_estimate", jnum(row.upper)}, {"delta", jnum(row.delta)},
               {"tail", jnum(row.tail)}};
    jr["slope_estimate"] = row.slope ? jnum(*row.slope) : json(nullptr);
    if (!row.error.empty()) jr["error"] = row.error;
    rows.push_back(jr);
  }
  r.summary["report"] = {{"spec", rep.spec_id},
                         {"rows", rows},
                         {"kappa_name", rep.kappa_name},
                         {"kappa", jnum(rep.kappa)},
                         {"kappa_status", to_string(rep.kappa_status)},
                         {"lower_bound", jnum(rep.lower_bound)},
                         {"verdict", to_string(rep.verdict)},
                         {"notes", rep.notes}};
  return r;
}

Result run_sample(const RunConfig& c, const ClusteringSpec& spec) {
  const int n = single_depth(c);
  if (n > kSampleGuard && !c.override_guards)
    throw UsageError("sample limited to depth <= " + std::to_string(kSampleGuard) + " without --override-guards");
  const Sampler sampler(spec, n, c.j);
  Result r;
  double total = 0;
  for (const auto& a : sampler.sample_many(c.samples, c.seed)) {
    r.lines.push_back(format_leaf_set(a));
    total += a.density();
  }
  r.summary["j"] = c.j;
  r.summary["samples"] = c.samples;
  r.summary["seed"] = c.seed;
  r.summary["mean_density"] = c.samples ? jnum(total / static_cast<double>(c.samples)) : json(nullptr);
  return r;
}

Result run_capacity(const RunConfig& c, const ClusteringSpec& spec) {
  const auto* cap = std::get_if<CapacitySpec>(&spec);
  if (!cap) throw UsageError("capacity needs a capacity spec");
  const int n = single_depth(c);
  const ConductanceProfile prof = profile_for(*cap, n);
  std::vector<LeafSet> sets;
  for (const auto& text : c.sets) sets.push_back(parse_leaf_set(n, text));
  if (sets.empty()) sets.push_back(LeafSet::all(n));
  Result r;
  r.table.columns = {"set", "size", "cap"};
  for (const auto& a : sets) {
    const double v = a.empty() ? 0.0 : cap_reduce(a, prof);
    r.table.rows.push_back({format_leaf_set(a), std::to_string(a.size()), format_double(v)});
  }
  return r;
}

Result run_verify(const RunConfig& c) {
  VerifyOptions opt;
  opt.depth = c.depths.empty() ? 3 : single_depth(c);
  opt.draws = c.draws;
  opt.seed = c.seed;
  const VerifyReport rep = run_verification(opt);
  Result r;
  r.table.columns = {"suite", "checks", "failures"};
  json suites = json::array();
  for (const auto& s : rep.suites) {
    r.table.rows.push_back({s.name, std::to_string(s.checks), std::to_string(s.failures.size())});
    suites.push_back({{"suite", s.name}, {"checks", s.checks}, {"ok", s.ok()}, {"witnesses", s.failures}});
  }
  r.summary["suites"] = suites;
  r.summary["ok"] = rep.ok();
  r.status = rep.ok() ? kExitOk : kExitVerificationFailed;
  return r;
}

Result run_diagnose(const RunConfig& c, const ClusteringSpec& spec) {
  if (std::holds_alternative<CapacitySpec>(spec)) throw UsageError("diagnose is defined for branching specs");
  Result r;
  if (c.kind == "laplace") {
    const auto grid = c.s_grid.empty() ? dyadic_s_grid(1, 10) : parse_grid(c.s_grid);
    const DiagCurve curve = std::holds_alternative<SecondOrderSpec>(spec)
                                ? laplace_diag_second(std::get<SecondOrderSpec>(spec).h, grid)
                                : laplace_diag_first(as_first_order(spec).h, grid);
    r.table.columns = {"s", "diag"};
    for (const auto& p : curve.points) r.table.rows.push_back({format_double(p.s), format_double(p.value)});
    r.summary["kind"] = "laplace";
    r.summary["increasing"] = curve.increasing;
  } else if (c.kind == "tauberian") {
    if (std::holds_alternative<SecondOrderSpec>(spec))
      throw UsageError("tauberian diagnose takes a first-order spec");
    const TauberianResult t = tauberian_diag(as_first_order(spec).h, c.k_max);
    r.table.columns = {"k", "diag"};
    for (std::size_t i = 0; i < t.k.size(); ++i)
      r.table.rows.push_back({std::to_string(t.k[i]), format_double(t.value[i])});
    r.summary["kind"] = "tauberian";
    r.summary["verdict"] = to_string(t.verdict);
  } else {
    throw UsageError("diagnose kind must be laplace or tauberian");
  }
  return r;
}

}  // namespace

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config document must be an object");
  RunConfig c;
  const auto fail = [](const std::string& key, const std::string& what) {
    throw std::invalid_argument("config key '" + key + "': " + what);
  };
  for (const auto& [key, v] : doc.items()) {
    try {
      if (key == "subcommand") c.subcommand = v.get<std::string>();
      else if (key == "preset") c.preset = v.get<std::string>();
      else if (key == "spec") c.spec_file = v.get<std::string>();
      else if (key == "depth" || key == "depths") c.depths = v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
      else if (key == "j_grid") c.j_grid = v.get<std::string>();
      else if (key == "s_grid") c.s_grid = v.get<std::string>();
      else if (key == "kind") c.kind = v.get<std::string>();
      else if (key == "k_max") c.k_max = v.get<int>();
      else if (key == "j") c.j = v.get<double>();
      else if (key == "samples") c.samples = v.get<std::size_t>();
      else if (key == "draws") c.draws = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "delta") c.delta = v.get<double>();
      else if (key == "sets") c.sets = v.get<std::vector<std::string>>();
      else if (key == "output") c.output = v.get<std::string>();
      else if (key == "summary") c.summary = v.get<std::string>();
      else if (key == "override_guards") c.override_guards = v.get<bool>();
      else fail(key, "unknown key");
    } catch (const json::exception& e) {
      fail(key, "wrong type");
    }
  }
  return c;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  Result r;
  try {
    if (c.subcommand == "verify") {
      r = run_verify(c);
    } else {
      const ClusteringSpec spec = load_spec(c);
      if (c.subcommand == "zeta") r = run_zeta(c, spec, false);
      else if (c.subcommand == "density") r = run_zeta(c, spec, true);
      else if (c.subcommand == "canonical") r = run_canonical(c, spec);
      else if (c.subcommand == "threshold") r = run_threshold(c, spec);
      else if (c.subcommand == "sample") r = run_sample(c, spec);
      else if (c.subcommand == "capacity") r = run_capacity(c, spec);
      else if (c.subcommand == "diagnose") r = run_diagnose(c, spec);
      else throw UsageError("unknown subcommand '" + c.subcommand + "'");
      r.summary["spec"] = describe(spec);
    }
    Sink table_out(c.output, out);
    if (r.lines.empty())
      write_table(*table_out, r.table);
    else
      for (const auto& line : r.lines) *table_out << line << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  r.summary["subcommand"] = c.subcommand;
  r.summary["depths"] = c.depths;
  r.summary["rows"] = r.lines.empty() ? r.table.rows.size() : r.lines.size();
  r.summary["status"] = r.status;
  try {
    Sink summary_out(c.summary, err);
    *summary_out << r.summary.dump(2) << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return r.status;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Percolation with clustering on binary trees"};
  app.require_subcommand(0, 1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);

  RunConfig given;
  std::string depth_text;
  // Each setter copies one command-line field onto the effective config when the flag was used.
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters;
  const auto add = [&](CLI::App* sub, const std::string& flags, auto& field, std::function<void(RunConfig&)> set,
                       const std::string& help) { setters.emplace_back(sub->add_option(flags, field, help), set); };
  const auto common = [&](CLI::App* sub) {
    add(sub, "--preset", given.preset, [&](RunConfig& c) { c.preset = given.preset; }, "preset spec name");
    add(sub, "--spec", given.spec_file, [&](RunConfig& c) { c.spec_file = given.spec_file; }, "JSON spec file");
    add(sub, "--depth,--depths", depth_text, [&](RunConfig& c) { c.depths = parse_int_list(depth_text); },
        "depth, or comma list of depths");
    add(sub, "--output", given.output, [&](RunConfig& c) { c.output = given.output; }, "table path");
    add(sub, "--summary", given.summary, [&](RunConfig& c) { c.summary = given.summary; }, "summary path");
    setters.emplace_back(sub->add_flag("--override-guards", given.override_guards, "lift depth guards"),
                         [&](RunConfig& c) { c.override_guards = given.override_guards; });
  };
  const auto seed = [&](CLI::App* sub) {
    add(sub, "--seed", given.seed, [&](RunConfig& c) { c.seed = given.seed; }, "random seed");
  };
  const auto j_grid = [&](CLI::App* sub) {
    add(sub, "--j-grid", given.j_grid, [&](RunConfig& c) { c.j_grid = given.j_grid; }, "lo:hi:step or list");
  };

  auto* zeta = app.add_subcommand("zeta", "zeta_n over a J grid");
  common(zeta);
  j_grid(zeta);
  auto* density = app.add_subcommand("density", "rho_n over a J grid");
  common(density);
  j_grid(density);
  auto* canonical = app.add_subcommand("canonical", "canonical partition function and omega_n");
  common(canonical);
  auto* threshold = app.add_subcommand("threshold", "critical pinning force report");
  common(threshold);
  add(threshold, "--delta", given.delta, [&](RunConfig& c) { c.delta = given.delta; }, "fixed delta");
  auto* sample = app.add_subcommand("sample", "exact samples, one leaf set per line");
  common(sample);
  seed(sample);
  add(sample, "--j", given.j, [&](RunConfig& c) { c.j = given.j; }, "pinning force J");
  add(sample, "--samples", given.samples, [&](RunConfig& c) { c.samples = given.samples; }, "sample count");
  auto* capacity = app.add_subcommand("capacity", "capacities of leaf sets");
  common(capacity);
  add(capacity, "--set", given.sets, [&](RunConfig& c) { c.sets = given.sets; }, "leaf set such as [0,3]; repeatable");
  // One value per flag, so "[0,3]" stays a single set instead of a vector literal.
  setters.back().first->allow_extra_args(false);
  auto* verify = app.add_subcommand("verify", "oracle-versus-DP suites");
  common(verify);
  seed(verify);
  add(verify, "--draws", given.draws, [&](RunConfig& c) { c.draws = given.draws; }, "random specs per case");
  auto* diagnose = app.add_subcommand("diagnose", "Laplace or Tauberian diagnostic curves");
  common(diagnose);
  add(diagnose, "--kind", given.kind, [&](RunConfig& c) { c.kind = given.kind; }, "laplace or tauberian");
  add(diagnose, "--s-grid", given.s_grid, [&](RunConfig& c) { c.s_grid = given.s_grid; }, "decreasing s values");
  add(diagnose, "--k-max", given.k_max, [&](RunConfig& c) { c.k_max = given.k_max; }, "tauberian cutoff");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      const auto doc = json::parse(in, nullptr, false);
      if (doc.is_discarded()) throw std::invalid_argument("config file is not valid JSON");
      config = config_from_json(doc);
    }
    if (const auto subs = app.get_subcommands(); !subs.empty()) config.subcommand = subs.front()->get_name();
    for (const auto& [opt, set] : setters)
      if (opt->count() > 0) set(config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (config.subcommand.empty()) {
    err << app.help();
    return kExitUsage;
  }
  return run(config, out, err);
}

}  // namespace pwc
