#pragma once

// Variational optimization: parameter-shift and finite-difference gradients,
// plain gradient descent with random restarts, and noise-parameter scans.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bellnet/behavior.hpp"
#include "bellnet/bell.hpp"
#include "bellnet/channels.hpp"
#include "bellnet/oracle.hpp"

namespace bellnet {

enum class GradientMethod { kParameterShift, kCentralDifference };

inline std::string to_string(GradientMethod m) {
  return m == GradientMethod::kParameterShift ? "parameter_shift" : "central_difference";
}

inline GradientMethod parse_gradient_method(const std::string& s) {
  if (s == "parameter_shift") return GradientMethod::kParameterShift;
  if (s == "central_difference") return GradientMethod::kCentralDifference;
  throw std::invalid_argument("unknown gradient method '" + s + "' (expected parameter_shift, central_difference)");
}

// Exact probabilities, or estimates from a finite number of shots per input.
struct EvalMode {
  bool use_shots = false;
  std::size_t shots = 6000;
  std::uint64_t seed = 0;
};

// Worker count from BELLNET_WORKERS, else the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("BELLNET_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return unsigned(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1U : hw;
}

// Runs fn(i) for i in [0, n); results must be written to per-index slots.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned workers = worker_count()) {
  workers = unsigned(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::vector<double> grad_central_difference(const std::function<double(std::span<const double>)>& f,
                                                   std::span<const double> theta, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grad_central_difference: h must be positive");
  std::vector<double> x(theta.begin(), theta.end());
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double orig = x[k];
    x[k] = orig + h;
    const double fp = f(x);
    x[k] = orig - h;
    const double fm = f(x);
    x[k] = orig;
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Bell score of a network ansatz under noise, with its gradient.
class Objective {
 public:
  Objective(NetworkSimulator sim, Inequality ineq, EvalMode mode = {})
      : sim_(std::move(sim)), ineq_(ineq), mode_(mode) {
    ineq_.check_network(sim_.network());
  }

  const NetworkSimulator& simulator() const { return sim_; }
  const Inequality& inequality() const { return ineq_; }
  const EvalMode& mode() const { return mode_; }
  std::size_t num_parameters() const { return sim_.num_parameters(); }

  std::vector<double> correlators(std::span<const double> values) const {
    if (mode_.use_shots) {
      return bellnet::correlators(sampled_behavior(sim_, values, mode_.shots, settings_seed(values))).values;
    }
    return sim_.fast_correlators(values).values;
  }

  double score(std::span<const double> values) const { return bellnet::score(ineq_, correlators(values)).value; }
  double cost(std::span<const double> values) const { return -score(values); }

  // d Cost / d theta by the +-pi/2 shift rule on correlators, composed with dS/dC.
  std::vector<double> grad_parameter_shift(std::span<const double> values) const {
    return score_and_shift_gradient(values).second;
  }

  std::vector<double> grad_central_difference(std::span<const double> values, double h = 1e-5) const {
    return bellnet::grad_central_difference([this](std::span<const double> v) { return cost(v); }, values, h);
  }

  // Score and d Cost / d theta.
  std::pair<double, std::vector<double>> score_and_gradient(std::span<const double> values, GradientMethod method,
                                                            double h = 1e-5) const {
    if (method == GradientMethod::kParameterShift) return score_and_shift_gradient(values);
    return {score(values), grad_central_difference(values, h)};
  }

 private:
  std::uint64_t settings_seed(std::span<const double> values) const {
    std::uint64_t h = mix_seed(mode_.seed, values.size());
    for (double v : values) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, &v, sizeof bits);
      h = mix_seed(h, bits);
    }
    return h;
  }

  std::pair<double, std::vector<double>> score_and_shift_gradient(std::span<const double> values) const {
    const auto& layout = sim_.layout();
    const double shift = std::numbers::pi / 2;
    std::vector<double> grad(values.size(), 0.0);
    if (mode_.use_shots) {
      const auto base = correlators(values);
      const auto sg = score_with_gradient(ineq_, base);
      std::vector<double> x(values.begin(), values.end());
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double orig = x[k];
        x[k] = orig + shift;
        const auto cp = correlators(x);
        x[k] = orig - shift;
        const auto cm = correlators(x);
        x[k] = orig;
        double d = 0.0;
        for (std::size_t c = 0; c < cp.size(); ++c) d += sg.d_correlators[c] * 0.5 * (cp[c] - cm[c]);
        grad[k] = -d;
      }
      return {sg.value, grad};
    }

    const auto sources = sim_.source_states(values);
    const ComplexMatrix rho = sim_.assemble(sources);
    auto obs = sim_.node_observables(values);
    const auto base = sim_.correlators_from(rho, obs);
    const auto sg = score_with_gradient(ineq_, base);
    auto dscore = [&](const std::vector<double>& cp, const std::vector<double>& cm) {
      double d = 0.0;
      for (std::size_t c = 0; c < cp.size(); ++c) d += sg.d_correlators[c] * 0.5 * (cp[c] - cm[c]);
      return d;
    };

    std::vector<double> p;
    for (std::size_t i = 0; i < layout.num_sources(); ++i) {
      const auto r = layout.source_range(i);
      if (r.count == 0) continue;
      p.assign(values.begin() + std::ptrdiff_t(r.offset), values.begin() + std::ptrdiff_t(r.offset + r.count));
      auto shifted = sources;
      for (std::size_t k = 0; k < r.count; ++k) {
        const double orig = p[k];
        p[k] = orig + shift;
        shifted[i] = sim_.source_state(i, p);
        const auto cp = sim_.correlators_from(sim_.assemble(shifted), obs);
        p[k] = orig - shift;
        shifted[i] = sim_.source_state(i, p);
        const auto cm = sim_.correlators_from(sim_.assemble(shifted), obs);
        p[k] = orig;
        grad[r.offset + k] = -dscore(cp, cm);
      }
    }
    for (std::size_t j = 0; j < layout.num_nodes(); ++j)
      for (std::size_t v = 0; v < layout.node_arity(j); ++v) {
        const auto r = layout.node_range(j, int(v));
        if (r.count == 0) continue;
        p.assign(values.begin() + std::ptrdiff_t(r.offset), values.begin() + std::ptrdiff_t(r.offset + r.count));
        const ComplexMatrix saved = obs[j][v];
        for (std::size_t k = 0; k < r.count; ++k) {
          const double orig = p[k];
          p[k] = orig + shift;
          obs[j][v] = sim_.node_observable(j, p);
          const auto cp = sim_.correlators_from(rho, obs);
          p[k] = orig - shift;
          obs[j][v] = sim_.node_observable(j, p);
          const auto cm = sim_.correlators_from(rho, obs);
          p[k] = orig;
          grad[r.offset + k] = -dscore(cp, cm);
        }
        obs[j][v] = saved;
      }
    return {sg.value, grad};
  }

  NetworkSimulator sim_;
  Inequality ineq_;
  EvalMode mode_;
};

struct OptimizerConfig {
  double eta = 0.1;
  int num_steps = 30;
  int restarts = 10;
  GradientMethod method = GradientMethod::kParameterShift;
  std::uint64_t seed = 0;
  double fd_step = 1e-5;

  void validate() const {
    if (!(eta > 0.0)) throw std::invalid_argument("optimizer.eta must be positive");
    if (num_steps < 1) throw std::invalid_argument("optimizer.steps must be at least 1");
    if (restarts < 1) throw std::invalid_argument("optimizer.restarts must be at least 1");
    if (!(fd_step > 0.0)) throw std::invalid_argument("optimizer.fd_step must be positive");
  }
};

// Default step sizes per network: CHSH 0.12, bilocal 1.4, larger networks 1.6.
inline double default_eta(const Network& net) {
  if (net.kind == NetworkKind::kStar && net.n == 1) return 0.12;
  if (net.n == 2) return 1.4;
  return 1.6;
}

struct OptimizationTrace {
  std::vector<std::vector<double>> settings;  // one entry per evaluated step
  std::vector<double> scores;
  std::vector<double> grad_norms;
  std::vector<double> best_settings;
  double best_score = -1.0;
  std::size_t best_step = 0;
};

inline std::vector<double> random_settings(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = 2.0 * std::numbers::pi * uniform01(rng);
  return v;
}

// Theta <- Theta - eta * grad Cost, `steps` times; records steps + 1 evaluations.
inline OptimizationTrace gradient_descent(const Objective& obj, std::vector<double> theta, double eta, int steps,
                                          GradientMethod method = GradientMethod::kParameterShift,
                                          double fd_step = 1e-5) {
  if (steps < 1) throw std::invalid_argument("gradient_descent: steps must be at least 1");
  if (!(eta > 0.0)) throw std::invalid_argument("gradient_descent: eta must be positive");
  if (theta.size() != obj.num_parameters()) throw std::invalid_argument("gradient_descent: initial settings length");
  OptimizationTrace tr;
  for (int s = 0; s <= steps; ++s) {
    auto [sc, g] = obj.score_and_gradient(theta, method, fd_step);
    double norm = 0.0;
    for (double x : g) norm += x * x;
    tr.settings.push_back(theta);
    tr.scores.push_back(sc);
    tr.grad_norms.push_back(std::sqrt(norm));
    if (sc > tr.best_score || s == 0) {
      tr.best_score = sc;
      tr.best_settings = theta;
      tr.best_step = std::size_t(s);
    }
    if (s == steps) break;
    for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= eta * g[k];
  }
  return tr;
}

struct MultiRestartResult {
  std::vector<OptimizationTrace> runs;
  std::size_t best_restart = 0;
  double best_score = -1.0;
  std::vector<double> best_settings;
};

// Independent restarts from uniform [0, 2pi) initializations; restart r uses
// seed mix_seed(config.seed, r). A warm start replaces restart 0's initialization.
inline MultiRestartResult optimize(const Objective& obj, const OptimizerConfig& config,
                                   const std::optional<std::vector<double>>& warm_start = std::nullopt) {
  config.validate();
  MultiRestartResult res;
  res.runs.resize(std::size_t(config.restarts));
  parallel_for(std::size_t(config.restarts), [&](std::size_t r) {
    std::vector<double> init = (r == 0 && warm_start) ? *warm_start
                                                      : random_settings(obj.num_parameters(), mix_seed(config.seed, r));
    res.runs[r] = gradient_descent(obj, std::move(init), config.eta, config.num_steps, config.method, config.fd_step);
  });
  for (std::size_t r = 0; r < res.runs.size(); ++r)
    if (r == 0 || res.runs[r].best_score > res.best_score) {
      res.best_score = res.runs[r].best_score;
      res.best_restart = r;
    }
  res.best_settings = res.runs[res.best_restart].best_settings;
  return res;
}

struct ScanPoint {
  double gamma = 0.0;
  double best_score = 0.0;
  std::vector<double> best_settings;
  std::optional<double> oracle;
  int restarts_used = 0;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  bool warm_start = false;
};

inline void validate_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("gamma grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    check_gamma(grid[i], "gamma grid");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("gamma grid must be strictly increasing");
  }
}

// start, start + step, ... up to stop (inclusive within 1e-9).
inline std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("gamma grid step must be positive");
  std::vector<double> g;
  for (long k = 0;; ++k) {
    const double v = start + double(k) * step;
    if (v > stop + 1e-9) break;
    g.push_back(v);
    if (k > 1000000) throw std::invalid_argument("gamma grid too large");
  }
  for (auto& v : g) v = std::round(v * 1e12) / 1e12;
  validate_grid(g);
  return g;
}

// Analytic value on the inequality's own scale, if a closed form exists.
inline std::optional<double> oracle_for(const NetworkAnsatz& ansatz, const NoiseSpec& noise, const Inequality& ineq) {
  CurveQuery q;
  q.model = noise.model;
  q.kind = ansatz.network.kind;
  q.n = ansatz.network.n;
  q.placement = noise.placement;
  q.gammas = noise.gammas;
  q.prep = ansatz.preps.empty() ? "phi_plus" : ansatz.preps.front().layer.name;
  if (noise.model == ChannelModel::kColored && q.prep != "phi_plus" && q.prep != "psi_plus") return std::nullopt;
  for (const auto& p : ansatz.preps)
    if (p.layer.name != q.prep) return std::nullopt;
  try {
    const double v = curve(q);
    return (ineq.kind == InequalityKind::kChsh && !ineq.normalized) ? 2.0 * v : v;
  } catch (const UnsupportedCurve&) {
    return std::nullopt;
  }
}

inline ScanResult scan(const NetworkAnsatz& ansatz, const NoiseSpec& noise, const Inequality& ineq,
                       const std::vector<double>& grid, const OptimizerConfig& config, bool warm_start = false,
                       EvalMode mode = {}) {
  validate_grid(grid);
  config.validate();
  if (noise.placement == Placement::kExplicit)
    throw std::invalid_argument("scan needs single or uniform placement; explicit gamma lists are fixed points");
  ScanResult out;
  out.warm_start = warm_start;
  std::optional<std::vector<double>> previous;
  for (double g : grid) {
    NoiseSpec spec = noise;
    spec.gammas = {g};
    Objective obj(NetworkSimulator(ansatz, build_noise_model(ansatz.network, spec)), ineq, mode);
    const auto res = optimize(obj, config, warm_start ? previous : std::nullopt);
    ScanPoint p;
    p.gamma = g;
    p.best_score = res.best_score;
    p.best_settings = res.best_settings;
    p.restarts_used = config.restarts;
    p.oracle = oracle_for(ansatz, spec, ineq);
    out.points.push_back(std::move(p));
    previous = res.best_settings;
  }
  return out;
}

}  // namespace bellnet
