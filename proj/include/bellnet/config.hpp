#pragma once

// Run configuration for the command-line front end: JSON (de)serialization,
// validation with field names, and the CSV/JSON writers for traces and scans.
//
// Requires nlohmann/json ("json.hpp") on the include path.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellnet/bellnet.hpp"
#include "json.hpp"

namespace bellnet {

using Json = nlohmann::ordered_json;

// Validation failure tied to a configuration field, e.g. "noise.gamma".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct GridSpec {
  double start = 0.0;
  double stop = 0.5;
  double step = 0.05;
  bool operator==(const GridSpec&) const = default;
};

struct RunConfig {
  std::string network = "chsh";
  std::string inequality = "auto";
  bool normalized = false;
  std::string prep = "phi_plus";
  std::string meas = "local_ry";

  std::string noise_model = "none";
  std::string placement = "uniform";
  std::vector<double> gammas{0.0};
  std::optional<GridSpec> grid;

  std::optional<double> eta;  // empty: per-network default
  int steps = 30;
  int restarts = 10;
  std::string method = "parameter_shift";
  std::uint64_t seed = 1;
  double fd_step = 1e-5;
  bool warm_start = false;

  std::string mode = "exact";
  std::size_t shots = 6000;
  std::uint64_t shot_seed = 0;

  std::string trace_csv = "trace.csv";
  std::string settings_json = "best_settings.json";
  std::string scan_csv = "scan.csv";
  std::string scan_json = "scan.json";
  std::string behavior_csv;  // optional: behavior matrix at the best settings

  bool operator==(const RunConfig&) const = default;
};

inline Json to_json(const RunConfig& c) {
  Json j;
  j["network"] = c.network;
  j["inequality"] = c.inequality;
  j["normalized"] = c.normalized;
  j["ansatz"] = {{"prep", c.prep}, {"meas", c.meas}};
  Json noise = {{"model", c.noise_model}, {"placement", c.placement}, {"gamma", c.gammas}};
  noise["grid"] = c.grid ? Json{{"start", c.grid->start}, {"stop", c.grid->stop}, {"step", c.grid->step}} : Json(nullptr);
  j["noise"] = noise;
  Json opt;
  opt["eta"] = c.eta ? Json(*c.eta) : Json(nullptr);
  opt["steps"] = c.steps;
  opt["restarts"] = c.restarts;
  opt["method"] = c.method;
  opt["seed"] = c.seed;
  opt["fd_step"] = c.fd_step;
  opt["warm_start"] = c.warm_start;
  j["optimizer"] = opt;
  j["mode"] = {{"kind", c.mode}, {"shots", c.shots}, {"seed", c.shot_seed}};
  j["output"] = {{"trace_csv", c.trace_csv},
                 {"settings_json", c.settings_json},
                 {"scan_csv", c.scan_csv},
                 {"scan_json", c.scan_json},
                 {"behavior_csv", c.behavior_csv}};
  return j;
}

namespace detail {

inline void reject_unknown(const Json& obj, const std::string& prefix, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(prefix.empty() ? "config" : prefix, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(prefix.empty() ? it.key() : prefix + "." + it.key(), "unknown field");
  }
}

template <class T>
void read(const Json& obj, const char* key, const std::string& field, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(field, "wrong type");
  }
}

inline void read_number(const Json& obj, const char* key, const std::string& field, double& out) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_number()) throw ConfigError(field, "expected a number");
  out = obj.at(key).get<double>();
}

inline void read_count(const Json& obj, const char* key, const std::string& field, int& out) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_number_integer()) throw ConfigError(field, "expected an integer");
  out = obj.at(key).get<int>();
}

}  // namespace detail

inline RunConfig config_from_json(const Json& j) {
  RunConfig c;
  detail::reject_unknown(j, "", {"network", "inequality", "normalized", "ansatz", "noise", "optimizer", "mode", "output"});
  detail::read(j, "network", "network", c.network);
  detail::read(j, "inequality", "inequality", c.inequality);
  detail::read(j, "normalized", "normalized", c.normalized);
  if (j.contains("ansatz")) {
    const auto& a = j.at("ansatz");
    detail::reject_unknown(a, "ansatz", {"prep", "meas"});
    detail::read(a, "prep", "ansatz.prep", c.prep);
    detail::read(a, "meas", "ansatz.meas", c.meas);
  }
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    detail::reject_unknown(n, "noise", {"model", "placement", "gamma", "grid"});
    detail::read(n, "model", "noise.model", c.noise_model);
    detail::read(n, "placement", "noise.placement", c.placement);
    if (n.contains("gamma")) {
      const auto& g = n.at("gamma");
      if (g.is_number()) {
        c.gammas = {g.get<double>()};
      } else if (g.is_array()) {
        c.gammas.clear();
        for (const auto& v : g) {
          if (!v.is_number()) throw ConfigError("noise.gamma", "expected numbers");
          c.gammas.push_back(v.get<double>());
        }
      } else {
        throw ConfigError("noise.gamma", "expected a number or a list of numbers");
      }
    }
    if (n.contains("grid") && !n.at("grid").is_null()) {
      const auto& g = n.at("grid");
      detail::reject_unknown(g, "noise.grid", {"start", "stop", "step"});
      GridSpec s;
      detail::read_number(g, "start", "noise.grid.start", s.start);
      detail::read_number(g, "stop", "noise.grid.stop", s.stop);
      detail::read_number(g, "step", "noise.grid.step", s.step);
      c.grid = s;
    }
  }
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    detail::reject_unknown(o, "optimizer", {"eta", "steps", "restarts", "method", "seed", "fd_step", "warm_start"});
    if (o.contains("eta") && !o.at("eta").is_null()) {
      double e = 0.0;
      detail::read_number(o, "eta", "optimizer.eta", e);
      c.eta = e;
    }
    detail::read_count(o, "steps", "optimizer.steps", c.steps);
    detail::read_count(o, "restarts", "optimizer.restarts", c.restarts);
    detail::read(o, "method", "optimizer.method", c.method);
    detail::read(o, "seed", "optimizer.seed", c.seed);
    detail::read_number(o, "fd_step", "optimizer.fd_step", c.fd_step);
    detail::read(o, "warm_start", "optimizer.warm_start", c.warm_start);
  }
  if (j.contains("mode")) {
    const auto& m = j.at("mode");
    detail::reject_unknown(m, "mode", {"kind", "shots", "seed"});
    detail::read(m, "kind", "mode.kind", c.mode);
    detail::read(m, "shots", "mode.shots", c.shots);
    detail::read(m, "seed", "mode.seed", c.shot_seed);
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    detail::reject_unknown(o, "output", {"trace_csv", "settings_json", "scan_csv", "scan_json", "behavior_csv"});
    detail::read(o, "trace_csv", "output.trace_csv", c.trace_csv);
    detail::read(o, "settings_json", "output.settings_json", c.settings_json);
    detail::read(o, "scan_csv", "output.scan_csv", c.scan_csv);
    detail::read(o, "scan_json", "output.scan_json", c.scan_json);
    detail::read(o, "behavior_csv", "output.behavior_csv", c.behavior_csv);
  }
  return c;
}

inline RunConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string dump_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

inline bool has_noise(const RunConfig& c) { return c.noise_model != "none"; }

inline Network config_network(const RunConfig& c) {
  try {
    return build_network(c.network);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("network", e.what());
  }
}

inline Inequality config_inequality(const RunConfig& c, const Network& net) {
  Inequality ineq;
  try {
    ineq = c.inequality == "auto" ? Inequality::for_network(net) : Inequality::parse(c.inequality);
    ineq.check_network(net);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("inequality", e.what());
  }
  if (c.normalized) {
    if (ineq.kind != InequalityKind::kChsh) throw ConfigError("normalized", "only applies to the CHSH inequality");
    ineq.normalized = true;
  }
  return ineq;
}

inline NetworkAnsatz config_ansatz(const RunConfig& c, const Network& net) {
  const auto& pn = prep_ansatz_names();
  if (std::find(pn.begin(), pn.end(), c.prep) == pn.end())
    throw ConfigError("ansatz.prep", "unknown preparation ansatz '" + c.prep + "'");
  const auto& mn = meas_ansatz_names();
  if (std::find(mn.begin(), mn.end(), c.meas) == mn.end())
    throw ConfigError("ansatz.meas", "unknown measurement ansatz '" + c.meas + "'");
  return make_ansatz(net, c.prep, c.meas);
}

// Noise spec for one gamma list; unset when the model is "none".
inline std::optional<NoiseSpec> config_noise(const RunConfig& c, const std::vector<double>& gammas) {
  if (!has_noise(c)) return std::nullopt;
  NoiseSpec s;
  try {
    s.model = parse_channel_model(c.noise_model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("noise.model", e.what());
  }
  try {
    s.placement = parse_placement(c.placement);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("noise.placement", e.what());
  }
  s.gammas = gammas;
  return s;
}

inline std::vector<double> config_grid(const RunConfig& c) {
  if (!c.grid) throw ConfigError("noise.grid", "a scan needs a gamma grid");
  try {
    return make_grid(c.grid->start, c.grid->stop, c.grid->step);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("noise.grid", e.what());
  }
}

inline OptimizerConfig config_optimizer(const RunConfig& c, const Network& net) {
  OptimizerConfig o;
  o.eta = c.eta.value_or(default_eta(net));
  o.num_steps = c.steps;
  o.restarts = c.restarts;
  o.seed = c.seed;
  o.fd_step = c.fd_step;
  if (!(o.eta > 0.0)) throw ConfigError("optimizer.eta", "must be positive");
  if (o.num_steps < 1) throw ConfigError("optimizer.steps", "must be at least 1");
  if (o.restarts < 1) throw ConfigError("optimizer.restarts", "must be at least 1");
  if (!(o.fd_step > 0.0)) throw ConfigError("optimizer.fd_step", "must be positive");
  try {
    o.method = parse_gradient_method(c.method);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("optimizer.method", e.what());
  }
  return o;
}

inline EvalMode config_mode(const RunConfig& c) {
  EvalMode m;
  if (c.mode == "exact") return m;
  if (c.mode != "shots") throw ConfigError("mode.kind", "expected exact or shots");
  if (c.shots < 1) throw ConfigError("mode.shots", "must be at least 1");
  m.use_shots = true;
  m.shots = c.shots;
  m.seed = c.shot_seed;
  return m;
}

// Checks every field that can be checked without running anything.
// `for_scan` additionally requires a gamma grid.
inline void validate_config(const RunConfig& c, bool for_scan) {
  const Network net = config_network(c);
  config_inequality(c, net);
  config_ansatz(c, net);
  config_optimizer(c, net);
  config_mode(c);
  for (double g : c.gammas)
    if (!(g >= 0.0 && g <= 1.0)) throw ConfigError("noise.gamma", "values must lie in [0, 1]");
  if (c.gammas.empty()) throw ConfigError("noise.gamma", "at least one value is required");
  if (c.grid) {
    for (double v : {c.grid->start, c.grid->stop})
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("noise.grid", "bounds must lie in [0, 1]");
    config_grid(c);
  }
  if (has_noise(c)) {
    const auto spec = config_noise(c, c.gammas);
    if (for_scan && spec->placement == Placement::kExplicit)
      throw ConfigError("noise.placement", "scans need single or uniform placement");
    if (!for_scan) {
      try {
        build_noise_model(net, *spec);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("noise.gamma", e.what());
      }
    }
  }
  if (for_scan) {
    if (!has_noise(c)) throw ConfigError("noise.model", "a scan needs a noise model");
    config_grid(c);
  }
}

// Same config with the defaulted step size filled in.
inline RunConfig resolve_config(RunConfig c) {
  if (!c.eta) c.eta = default_eta(config_network(c));
  return c;
}

// ---------------------------------------------------------------------------
// Output formatting: '.' decimal point, gamma with 6 decimals, scores with 12
// significant digits.

inline std::string format_gamma(double g) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", g);
  return buf;
}

inline std::string format_score(double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", s);
  return buf;
}

namespace detail {

inline std::string gamma_echo(const RunConfig& c) {
  std::string s;
  for (std::size_t i = 0; i < c.gammas.size(); ++i) s += (i ? ";" : "") + format_gamma(c.gammas[i]);
  return s;
}

inline std::string grid_echo(const RunConfig& c) {
  if (!c.grid) return "";
  return format_gamma(c.grid->start) + ":" + format_gamma(c.grid->stop) + ":" + format_gamma(c.grid->step);
}

}  // namespace detail

inline std::string config_echo_header() {
  return "network,inequality,normalized,prep,meas,noise_model,placement,noise_gamma,noise_grid,eta,steps,restarts,"
         "method,seed,warm_start,mode,shots,shot_seed";
}

inline std::string config_echo_row(const RunConfig& raw) {
  const RunConfig c = resolve_config(raw);
  std::ostringstream os;
  os << c.network << ',' << c.inequality << ',' << (c.normalized ? "true" : "false") << ',' << c.prep << ','
     << c.meas << ',' << c.noise_model << ',' << c.placement << ',' << detail::gamma_echo(c) << ','
     << detail::grid_echo(c) << ',' << format_score(*c.eta) << ',' << c.steps << ',' << c.restarts << ','
     << c.method << ',' << c.seed << ',' << (c.warm_start ? "true" : "false") << ',' << c.mode << ',' << c.shots
     << ',' << c.shot_seed;
  return os.str();
}

inline std::string trace_to_csv(const MultiRestartResult& res, const RunConfig& c) {
  std::ostringstream os;
  os << "restart,step,score,grad_norm," << config_echo_header() << "\n";
  const std::string echo = config_echo_row(c);
  for (std::size_t r = 0; r < res.runs.size(); ++r) {
    const auto& t = res.runs[r];
    for (std::size_t s = 0; s < t.scores.size(); ++s)
      os << r << ',' << s << ',' << format_score(t.scores[s]) << ',' << format_score(t.grad_norms[s]) << ',' << echo
         << "\n";
  }
  return os.str();
}

inline Json layout_to_json(const SettingsLayout& l) {
  Json src = Json::array();
  for (std::size_t i = 0; i < l.num_sources(); ++i) {
    const auto r = l.source_range(i);
    src.push_back({r.offset, r.count});
  }
  Json nodes = Json::array();
  for (std::size_t j = 0; j < l.num_nodes(); ++j) {
    Json per = Json::array();
    for (std::size_t v = 0; v < l.node_arity(j); ++v) {
      const auto r = l.node_range(j, int(v));
      per.push_back({r.offset, r.count});
    }
    nodes.push_back(per);
  }
  return {{"sources", src}, {"nodes", nodes}};
}

inline Json best_settings_to_json(const MultiRestartResult& res, const SettingsLayout& layout, const RunConfig& c) {
  Json j;
  j["config"] = to_json(resolve_config(c));
  j["best_score"] = res.best_score;
  j["best_restart"] = res.best_restart;
  j["best_step"] = res.runs.at(res.best_restart).best_step;
  j["settings"] = res.best_settings;
  j["layout"] = layout_to_json(layout);
  return j;
}

inline std::string scan_to_csv(const ScanResult& scan, const RunConfig& c) {
  std::ostringstream os;
  os << "gamma,best_score,oracle_score,restarts_used," << config_echo_header() << "\n";
  const std::string echo = config_echo_row(c);
  for (const auto& p : scan.points)
    os << format_gamma(p.gamma) << ',' << format_score(p.best_score) << ','
       << (p.oracle ? format_score(*p.oracle) : std::string()) << ',' << p.restarts_used << ',' << echo << "\n";
  return os.str();
}

inline Json scan_to_json(const ScanResult& scan, const RunConfig& c) {
  Json j;
  j["config"] = to_json(resolve_config(c));
  j["warm_start"] = scan.warm_start;
  Json pts = Json::array();
  for (const auto& p : scan.points) {
    Json q;
    q["gamma"] = p.gamma;
    q["best_score"] = p.best_score;
    q["oracle_score"] = p.oracle ? Json(*p.oracle) : Json(nullptr);
    q["restarts_used"] = p.restarts_used;
    q["best_settings"] = p.best_settings;
    pts.push_back(q);
  }
  j["points"] = pts;
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Runs described by a config.

inline Objective config_objective(const RunConfig& c) {
  const Network net = config_network(c);
  const Inequality ineq = config_inequality(c, net);
  NetworkAnsatz ansatz = config_ansatz(c, net);
  NoiseModel noise;
  if (const auto spec = config_noise(c, c.gammas)) noise = build_noise_model(net, *spec);
  return Objective(NetworkSimulator(std::move(ansatz), std::move(noise)), ineq, config_mode(c));
}

inline MultiRestartResult run_optimize(const RunConfig& c) {
  validate_config(c, false);
  const Objective obj = config_objective(c);
  return optimize(obj, config_optimizer(c, obj.simulator().network()));
}

inline ScanResult run_scan(const RunConfig& c) {
  validate_config(c, true);
  const Network net = config_network(c);
  return scan(config_ansatz(c, net), *config_noise(c, {0.0}), config_inequality(c, net), config_grid(c),
              config_optimizer(c, net), c.warm_start, config_mode(c));
}

}  // namespace bellnet
