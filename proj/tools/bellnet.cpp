// Command-line front end: optimize, scan, oracle and verify.
//
// Exit codes: 0 success, 1 invalid input, 2 acceptance failure.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bellnet/acceptance.hpp"
#include "bellnet/config.hpp"

using namespace bellnet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitAcceptance = 2;

// Flag values that override the loaded config when given.
struct Overrides {
  std::string config_path;
  bool dump_config = false;
  std::string network, inequality, prep, meas, noise, placement, method, mode;
  std::vector<double> gammas;
  std::string grid;
  double eta = 0.0, fd_step = 0.0;
  int steps = 0, restarts = 0;
  std::uint64_t seed = 0, shot_seed = 0;
  std::size_t shots = 0;
  bool normalized = false, warm_start = false;
  std::string trace_csv, settings_json, scan_csv, scan_json, behavior_csv;
  std::map<std::string, CLI::Option*> opts;

  bool given(const std::string& name) const {
    const auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

void add_run_options(CLI::App* cmd, Overrides& o, bool scan) {
  cmd->add_option("-c,--config", o.config_path, "JSON run configuration");
  cmd->add_flag("--dump-config", o.dump_config, "print the resolved configuration as JSON and exit");
  auto add = [&](const std::string& flag, auto& target, const std::string& help) {
    o.opts[flag] = cmd->add_option("--" + flag, target, help);
  };
  add("network", o.network, "chsh, bilocal, star:n or chain:n");
  add("inequality", o.inequality, "auto, chsh, bilocal, star:n or chain:n");
  add("prep", o.prep, "preparation ansatz");
  add("meas", o.meas, "measurement ansatz");
  add("noise", o.noise, "noise model, or none");
  add("placement", o.placement, "single, uniform or explicit");
  add("eta", o.eta, "gradient-descent step size");
  add("steps", o.steps, "gradient-descent steps per restart");
  add("restarts", o.restarts, "random restarts");
  add("method", o.method, "parameter_shift or central_difference");
  add("seed", o.seed, "optimizer seed");
  add("fd-step", o.fd_step, "central-difference step");
  add("mode", o.mode, "exact or shots");
  add("shots", o.shots, "shots per network input in shots mode");
  add("shot-seed", o.shot_seed, "sampling seed in shots mode");
  o.opts["normalized"] = cmd->add_flag("--normalized", o.normalized, "report CHSH on the normalized scale");
  if (scan) {
    add("grid", o.grid, "gamma grid start:stop:step");
    o.opts["warm-start"] = cmd->add_flag("--warm-start", o.warm_start, "seed each gamma from the previous best");
    add("scan-csv", o.scan_csv, "scan CSV output path");
    add("scan-json", o.scan_json, "scan JSON output path");
  } else {
    o.opts["gamma"] = cmd->add_option("--gamma", o.gammas, "noise strength(s)");
    add("trace-csv", o.trace_csv, "trace CSV output path");
    add("settings-json", o.settings_json, "best-settings JSON output path");
    add("behavior-csv", o.behavior_csv, "behavior matrix CSV at the best settings");
  }
}

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  double v[3];
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &v[0], &v[1], &v[2], &tail) != 3)
    throw ConfigError("noise.grid", "expected start:stop:step, got '" + text + "'");
  g.start = v[0];
  g.stop = v[1];
  g.step = v[2];
  return g;
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (o.given("network")) c.network = o.network;
  if (o.given("inequality")) c.inequality = o.inequality;
  if (o.given("normalized")) c.normalized = o.normalized;
  if (o.given("prep")) c.prep = o.prep;
  if (o.given("meas")) c.meas = o.meas;
  if (o.given("noise")) c.noise_model = o.noise;
  if (o.given("placement")) c.placement = o.placement;
  if (o.given("gamma")) c.gammas = o.gammas;
  if (o.given("grid")) c.grid = parse_grid(o.grid);
  if (o.given("eta")) c.eta = o.eta;
  if (o.given("steps")) c.steps = o.steps;
  if (o.given("restarts")) c.restarts = o.restarts;
  if (o.given("method")) c.method = o.method;
  if (o.given("seed")) c.seed = o.seed;
  if (o.given("fd-step")) c.fd_step = o.fd_step;
  if (o.given("warm-start")) c.warm_start = o.warm_start;
  if (o.given("mode")) c.mode = o.mode;
  if (o.given("shots")) c.shots = o.shots;
  if (o.given("shot-seed")) c.shot_seed = o.shot_seed;
  if (o.given("trace-csv")) c.trace_csv = o.trace_csv;
  if (o.given("settings-json")) c.settings_json = o.settings_json;
  if (o.given("behavior-csv")) c.behavior_csv = o.behavior_csv;
  if (o.given("scan-csv")) c.scan_csv = o.scan_csv;
  if (o.given("scan-json")) c.scan_json = o.scan_json;
  return c;
}

int cmd_optimize(const Overrides& o) {
  const RunConfig c = resolve(o);
  validate_config(c, false);
  if (o.dump_config) {
    std::cout << dump_config(c);
    return kExitOk;
  }
  const Objective obj = config_objective(c);
  const auto res = optimize(obj, config_optimizer(c, obj.simulator().network()));
  write_text_file(c.trace_csv, trace_to_csv(res, c));
  write_text_file(c.settings_json, best_settings_to_json(res, obj.simulator().layout(), c).dump(2) + "\n");
  if (!c.behavior_csv.empty())
    write_text_file(c.behavior_csv, behavior_to_csv(obj.simulator().behavior_matrix(res.best_settings)));
  std::cout << obj.inequality().id() << " best " << format_score(res.best_score) << " (restart " << res.best_restart
            << ", step " << res.runs[res.best_restart].best_step << ")\n";
  return kExitOk;
}

int cmd_scan(const Overrides& o) {
  const RunConfig c = resolve(o);
  validate_config(c, true);
  if (o.dump_config) {
    std::cout << dump_config(c);
    return kExitOk;
  }
  const ScanResult res = run_scan(c);
  write_text_file(c.scan_csv, scan_to_csv(res, c));
  write_text_file(c.scan_json, scan_to_json(res, c).dump(2) + "\n");
  std::cout << "gamma,best_score,oracle_score" << (res.warm_start ? "  (warm start)" : "") << "\n";
  for (const auto& p : res.points)
    std::cout << format_gamma(p.gamma) << ',' << format_score(p.best_score) << ','
              << (p.oracle ? format_score(*p.oracle) : "") << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// oracle

const char* kOracleUsage =
    "available formulas:\n"
    "  classical-star n=<int> k=<int>\n"
    "  horodecki state=<phi_plus|phi_minus|psi_plus|psi_minus|classical_00> [model=<noise> gamma=<g>]\n"
    "  max-star state=<name> n=<int> [model=<noise> gamma=<g>]\n"
    "  max-chain state=<name> n=<int> [model=<noise> gamma=<g>]\n"
    "  curve <model> <star|chain|chsh|bilocal|star:n|chain:n> <single|uniform|explicit> gamma=<g[,g...]> "
    "[n=<int>] [prep=<phi_plus|psi_plus>]\n"
    "  ad-breaking g1=<g> g2=<g>\n"
    "  maxent-gridsearch model=<qubit noise> gamma=<g> [resolution=<int>] [passes=<int>]\n";

struct OracleArgs {
  std::vector<std::string> positional;
  std::map<std::string, std::string> kv;

  const std::string& need(const std::string& key) const {
    const auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("missing parameter " + key + "=");
    return it->second;
  }
  std::string get(const std::string& key, const std::string& fallback) const {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  }
  double number(const std::string& key) const { return to_double(need(key), key); }
  int integer(const std::string& key, std::optional<int> fallback = std::nullopt) const {
    if (!kv.count(key) && fallback) return *fallback;
    const std::string& s = need(key);
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw std::invalid_argument(key + "= expects an integer, got '" + s + "'");
    return v;
  }
  static double to_double(const std::string& s, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw std::invalid_argument(key + "= expects a number, got '" + s + "'");
    return v;
  }
};

std::vector<cplx> named_state(const std::string& name) {
  if (name == "phi_plus") return bell_basis::phi_plus();
  if (name == "phi_minus") return bell_basis::phi_minus();
  if (name == "psi_plus") return bell_basis::psi_plus();
  if (name == "psi_minus") return bell_basis::psi_minus();
  if (name == "classical_00") return {1.0, 0.0, 0.0, 0.0};
  throw std::invalid_argument("unknown state '" + name + "'");
}

// Named two-qubit state, optionally sent through a source or two-sided qubit channel.
DensityMatrix oracle_state(const OracleArgs& a) {
  DensityMatrix rho = pure_density(named_state(a.need("state")));
  if (!a.kv.count("model")) return rho;
  const ChannelModel m = parse_channel_model(a.need("model"));
  const double g = a.number("gamma");
  switch (scope_of(m)) {
    case ChannelScope::kQubit: return apply_two_sided(rho, kraus_for(m, g), kraus_for(m, g));
    case ChannelScope::kSource: return apply_kraus(rho, kraus_for(m, g), {0, 1});
    default: throw std::invalid_argument(a.need("model") + " acts on detectors, not on states");
  }
}

double oracle_value(const OracleArgs& a) {
  if (a.positional.empty()) throw std::invalid_argument("no formula given");
  const std::string& id = a.positional[0];
  const auto extra_positional = [&](std::size_t expected) {
    if (a.positional.size() != expected)
      throw std::invalid_argument(id + " takes " + std::to_string(expected - 1) + " positional argument(s)");
  };
  if (id == "classical-star") {
    extra_positional(1);
    return classical_source_star_score(a.integer("n"), a.integer("k"));
  }
  if (id == "horodecki") {
    extra_positional(1);
    return horodecki_max_chsh(oracle_state(a));
  }
  if (id == "max-star" || id == "max-chain") {
    extra_positional(1);
    const int n = a.integer("n");
    if (n < 1) throw std::invalid_argument("n= must be positive");
    const std::vector<DensityMatrix> sources(std::size_t(n), oracle_state(a));
    return id == "max-star" ? max_star_score(sources, n) : max_chain_score(sources, n);
  }
  if (id == "ad-breaking") {
    extra_positional(1);
    return amplitude_damping_breaking(a.number("g1"), a.number("g2")) ? 1.0 : 0.0;
  }
  if (id == "maxent-gridsearch") {
    extra_positional(1);
    const ChannelModel m = parse_channel_model(a.need("model"));
    if (scope_of(m) != ChannelScope::kQubit) throw std::invalid_argument("maxent-gridsearch needs a qubit channel");
    const auto k = kraus_for(m, a.number("gamma"));
    return maxent_gridsearch_oracle(k, k, a.integer("resolution", 24), a.integer("passes", 2)).value;
  }
  if (id == "curve") {
    extra_positional(4);
    CurveQuery q;
    q.model = parse_channel_model(a.positional[1]);
    const std::string& net = a.positional[2];
    if (net == "star" || net == "chain") {
      q.kind = net == "star" ? NetworkKind::kStar : NetworkKind::kChain;
      q.n = a.integer("n", 2);
    } else {
      const Network built = build_network(net);
      q.kind = built.kind;
      q.n = built.n;
    }
    q.placement = parse_placement(a.positional[3]);
    q.gammas.clear();
    std::stringstream ss(a.need("gamma"));
    for (std::string item; std::getline(ss, item, ',');) q.gammas.push_back(OracleArgs::to_double(item, "gamma"));
    q.prep = a.get("prep", "phi_plus");
    return curve(q);
  }
  throw std::invalid_argument("unknown formula '" + id + "'");
}

int cmd_oracle(const std::vector<std::string>& args) {
  OracleArgs a;
  for (const auto& s : args) {
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      a.positional.push_back(s);
    else
      a.kv[s.substr(0, eq)] = s.substr(eq + 1);
  }
  try {
    std::printf("%.12g\n", oracle_value(a));
  } catch (const std::invalid_argument& e) {
    std::cerr << "oracle: " << e.what() << "\n" << kOracleUsage;
    return kExitInvalid;
  }
  return kExitOk;
}

int cmd_verify(const std::vector<int>& only, bool inject_fault) {
  AcceptanceOptions opt;
  opt.only = only;
  opt.inject_channel_fault = inject_fault;
  if (inject_fault) std::cout << "test mode: channel fault injected\n";
  double total = 0.0;
  int failed = 0;
  const auto results = run_acceptance(opt, [&](const CriterionResult& r) {
    std::cout << format_result_line(r) << std::endl;
    total += r.seconds;
    if (!r.passed) ++failed;
  });
  std::printf("%zu criteria, %d failed, %.1fs total\n", results.size(), failed, total);
  for (const auto& r : results)
    if (!r.passed) std::printf("failed criterion %d: %s\n", r.id, r.title.c_str());
  return failed == 0 ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational optimization of Bell scores in noisy n-local networks"};
  app.require_subcommand(1);

  Overrides opt_overrides, scan_overrides;
  auto* optimize_cmd = app.add_subcommand("optimize", "optimize settings for one noise setting");
  add_run_options(optimize_cmd, opt_overrides, false);
  auto* scan_cmd = app.add_subcommand("scan", "optimize across a gamma grid");
  add_run_options(scan_cmd, scan_overrides, true);

  std::vector<std::string> oracle_args;
  auto* oracle_cmd = app.add_subcommand("oracle", "print a closed-form value");
  oracle_cmd->add_option("args", oracle_args, "formula id followed by key=value parameters")->required();
  oracle_cmd->footer(kOracleUsage);

  std::vector<int> only;
  bool inject_fault = false;
  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
  verify_cmd->add_option("--only", only, "criterion numbers to run");
  verify_cmd->add_flag("--inject-fault", inject_fault, "test mode: corrupt every noise channel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*optimize_cmd) return cmd_optimize(opt_overrides);
    if (*scan_cmd) return cmd_scan(scan_overrides);
    if (*oracle_cmd) return cmd_oracle(oracle_args);
    if (*verify_cmd) return cmd_verify(only, inject_fault);
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
