#pragma once

// End-to-end acceptance suite: eleven numbered criteria, each reproducing a
// quantitative claim by running the optimizer against closed-form references.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bellnet/bellnet.hpp"

namespace bellnet {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::vector<int> only;  // empty: all criteria
  // Test mode: every noise channel used by the suite runs at half the
  // requested strength, which the curve comparisons must detect.
  bool inject_channel_fault = false;
};

constexpr int kNumCriteria = 11;

namespace acceptance {

// Running record of the worst margin seen by a criterion.
class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 6) failures_.push_back(what);
    ok_ = ok_ && ok;
  }
  // |got - want| <= tol, tracking the largest deviation.
  void near(double got, double want, double tol, const std::string& label) {
    const double d = std::abs(got - want);
    if (d > worst_) {
      worst_ = d;
      worst_label_ = label;
    }
    require(d <= tol, label + ": got " + fmt(got) + ", want " + fmt(want) + " +- " + fmt(tol));
  }
  bool ok() const { return ok_; }
  std::string summary(const std::string& extra = "") const {
    std::ostringstream os;
    if (!worst_label_.empty()) os << "max deviation " << fmt(worst_) << " (" << worst_label_ << ")";
    if (!extra.empty()) os << (os.tellp() > 0 ? "; " : "") << extra;
    for (const auto& f : failures_) os << "; FAILED " << f;
    return os.str();
  }
  static std::string fmt(double v) {
    char b[64];
    std::snprintf(b, sizeof b, "%.6g", v);
    return b;
  }

 private:
  bool ok_ = true;
  double worst_ = 0.0;
  std::string worst_label_;
  std::vector<std::string> failures_;
};

inline std::string label(const std::string& what, double g) {
  char b[96];
  std::snprintf(b, sizeof b, "%s gamma=%.2f", what.c_str(), g);
  return b;
}

// Noise spec actually simulated; halved strengths under fault injection.
inline NoiseSpec simulated(NoiseSpec spec, const AcceptanceOptions& opt) {
  if (opt.inject_channel_fault)
    for (auto& g : spec.gammas) g *= 0.5;
  return spec;
}

inline OptimizerConfig config(double eta, int steps, int restarts, std::uint64_t seed) {
  OptimizerConfig c;
  c.eta = eta;
  c.num_steps = steps;
  c.restarts = restarts;
  c.seed = seed;
  return c;
}

inline double best_score(const NetworkAnsatz& ansatz, const NoiseModel& noise, const Inequality& ineq,
                         const OptimizerConfig& cfg) {
  Objective obj(NetworkSimulator(ansatz, noise), ineq);
  return optimize(obj, cfg).best_score;
}

// Scan of `spec` over `grid`; oracle values come from the requested (not the
// simulated) strengths.
inline std::vector<ScanPoint> scan_points(const NetworkAnsatz& ansatz, const NoiseSpec& spec, const Inequality& ineq,
                                          const std::vector<double>& grid, const OptimizerConfig& cfg,
                                          const AcceptanceOptions& opt) {
  std::vector<ScanPoint> out;
  for (double g : grid) {
    NoiseSpec requested = spec;
    requested.gammas = {g};
    const NoiseSpec actual = simulated(requested, opt);
    ScanPoint p;
    p.gamma = g;
    p.best_score = best_score(ansatz, build_noise_model(ansatz.network, actual), ineq, cfg);
    p.oracle = oracle_for(ansatz, requested, ineq);
    p.restarts_used = cfg.restarts;
    out.push_back(std::move(p));
  }
  return out;
}

inline void compare_to_oracle(Check& chk, const std::vector<ScanPoint>& pts, double tol, const std::string& what) {
  for (const auto& p : pts) {
    chk.require(p.oracle.has_value(), label(what, p.gamma) + ": no analytic value");
    if (p.oracle) chk.near(p.best_score, *p.oracle, tol, label(what, p.gamma));
  }
}

inline Inequality natural(const Network& net) { return Inequality::for_network(net); }

// Default step size; the 1-star's small step needs more iterations.
inline OptimizerConfig scan_config(const Network& net, std::uint64_t seed) {
  const bool chsh = net.kind == NetworkKind::kStar && net.n == 1;
  return config(default_eta(net), chsh ? 150 : 40, 6, seed);
}

// Global depolarizing channel on k qubits: (1 - g) rho + g Tr_k(rho) (x) I / 2^k.
inline std::vector<ComplexMatrix> global_depolarizing(int k, double g) {
  const double d2 = double(dim_of(2 * k));
  std::vector<ComplexMatrix> out;
  const auto words = all_pauli_words_but_identity(k);
  out.push_back(ComplexMatrix::identity(dim_of(k)) * cplx(std::sqrt(1.0 - g + g / d2), 0.0));
  for (const auto& w : words) out.push_back(pauli_word_matrix(w) * cplx(std::sqrt(g / d2), 0.0));
  return out;
}

inline DensityMatrix random_two_qubit_state(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<cplx> psi(4);
  double norm = 0.0;
  for (auto& a : psi) {
    a = {nd(rng), nd(rng)};
    norm += std::norm(a);
  }
  for (auto& a : psi) a /= std::sqrt(norm);
  ComplexMatrix g(4, 4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) g(r, c) = {nd(rng), nd(rng)};
  ComplexMatrix sigma = g * g.adjoint();
  sigma = sigma * cplx(1.0 / sigma.trace().real(), 0.0);
  const double w = 0.6 + 0.4 * uniform01(rng);
  ComplexMatrix rho = outer(psi, psi) * cplx(w, 0.0) + sigma * cplx(1.0 - w, 0.0);
  return DensityMatrix::from_matrix(rho);
}

inline std::vector<ComplexMatrix> random_pauli_channel(std::mt19937_64& rng) {
  std::array<double, 4> p{};
  double s = 0.0;
  for (auto& x : p) {
    x = -std::log(1.0 - uniform01(rng));  // Dirichlet(1,1,1,1)
    s += x;
  }
  std::vector<ComplexMatrix> k;
  for (int i = 0; i < 4; ++i) k.push_back(pauli::by_index(i) * cplx(std::sqrt(p[std::size_t(i)] / s), 0.0));
  return k;
}

inline NetworkAnsatz with_source(NetworkAnsatz a, std::size_t i, const std::string& prep) {
  a.preps.at(i) = make_prep(prep, int(a.network.topology.sources[i].qubits.size()));
  a.validate();
  return a;
}

// ---------------------------------------------------------------------------

inline CriterionResult noiseless_maxima(const AcceptanceOptions&) {
  Check chk;
  for (const std::string id : {"chsh", "bilocal", "chain:3", "star:3"}) {
    const Network net = build_network(id);
    const Inequality ineq = natural(net);
    const double s = best_score(hardware_ansatz(net), {}, ineq, config(default_eta(net), 60, 10, 11));
    chk.require(s >= ineq.quantum_bound() - 1e-3, id + ": " + Check::fmt(s));
    chk.near(s, ineq.quantum_bound(), 1e-3, id);
  }
  return {1, "noiseless maxima", chk.ok(), chk.summary()};
}

inline CriterionResult horodecki_equivalence(const AcceptanceOptions&) {
  Check chk;
  std::mt19937_64 rng(mix_seed(2024, 2));
  const Network net = build_star(1);
  const Inequality ineq = natural(net);
  int accepted = 0, drawn = 0;
  double worst_gap = 0.0;
  while (accepted < 50) {
    ++drawn;
    const DensityMatrix rho = random_two_qubit_state(rng);
    const double oracle = horodecki_max_chsh(rho);
    if (!(oracle > 2.0)) continue;
    NetworkAnsatz a = make_ansatz(net, "phi_plus", "local_rot");
    a.preps[0] = make_fixed_prep(rho);
    const double s = best_score(a, {}, ineq, config(0.4, 150, 6, mix_seed(7, std::uint64_t(accepted))));
    const std::string lbl = "state " + std::to_string(accepted);
    chk.require(s <= oracle + 1e-6, lbl + " exceeds the oracle: " + Check::fmt(s) + " > " + Check::fmt(oracle));
    chk.require(s >= oracle - 1e-2, lbl + " below the oracle: " + Check::fmt(s) + " < " + Check::fmt(oracle));
    worst_gap = std::max(worst_gap, oracle - s);
    ++accepted;
  }
  return {2, "Horodecki oracle equivalence", chk.ok(),
          chk.summary("50 states from " + std::to_string(drawn) + " draws, largest gap below oracle " +
                      Check::fmt(worst_gap))};
}

inline CriterionResult source_depolarizing(const AcceptanceOptions& opt) {
  Check chk;
  const auto grid = make_grid(0.0, 0.5, 0.05);
  const NoiseSpec spec{ChannelModel::kDepolarizingSource, Placement::kUniform, {0.0}};
  for (const std::string id : {"chsh", "bilocal", "chain:3", "star:3"}) {
    const Network net = build_network(id);
    const auto pts =
        scan_points(hardware_ansatz(net), spec, natural(net), grid, scan_config(net, 3), opt);
    compare_to_oracle(chk, pts, 5e-3, id);
  }
  return {3, "source depolarizing curves", chk.ok(), chk.summary()};
}

inline CriterionResult detector_white_noise(const AcceptanceOptions& opt) {
  Check chk;
  const auto grid = make_grid(0.0, 0.5, 0.05);
  const NoiseSpec spec{ChannelModel::kWhiteNoiseDetector, Placement::kUniform, {0.0}};
  for (const std::string id : {"chsh", "bilocal", "chain:3", "star:3"}) {
    const Network net = build_network(id);
    const auto pts =
        scan_points(hardware_ansatz(net), spec, natural(net), grid, scan_config(net, 4), opt);
    compare_to_oracle(chk, pts, 5e-3, id);
  }

  // Noisy detectors versus depolarizing each node's register before a
  // noiseless measurement, at random settings.
  double worst = 0.0;
  const double g = 0.37;
  for (const std::string id : {"chsh", "bilocal", "chain:3"}) {
    const Network net = build_network(id);
    const NetworkAnsatz a = make_ansatz(net, "arbitrary_state_preparation", "local_rot");
    const NetworkSimulator detectors(a, build_noise_model(net, simulated({ChannelModel::kWhiteNoiseDetector,
                                                                           Placement::kUniform, {g}}, opt)));
    const NetworkSimulator clean(a, {});
    for (std::uint64_t k = 0; k < 3; ++k) {
      const auto theta = random_settings(clean.num_parameters(), mix_seed(41, k));
      DensityMatrix rho = clean.noisy_state(theta);
      for (const auto& node : net.topology.nodes)
        rho = apply_kraus(rho, global_depolarizing(int(node.qubits.size()), g), node.qubits);
      const Behavior bd = detectors.behavior_matrix(theta);
      for (std::size_t xi = 0; xi < net.wiring.num_inputs(); ++xi) {
        const auto col = clean.reduce_to_nodes(clean.probs_given_state(rho, theta, net.wiring.input(xi)));
        for (std::size_t o = 0; o < col.size(); ++o) worst = std::max(worst, std::abs(col[o] - bd.columns[xi][o]));
      }
    }
    // Single-qubit nodes: the library's qubit depolarizing channel at 3g/4.
    if (id == "chsh") {
      NoiseModel dep = build_noise_model(
          net, simulated({ChannelModel::kDepolarizingQubit, Placement::kUniform, {0.75 * g}}, opt));
      const NetworkSimulator viaq(a, dep);
      NetworkSimulator viad(a, build_noise_model(net, {ChannelModel::kWhiteNoiseDetector, Placement::kUniform, {g}}));
      const auto theta = random_settings(viaq.num_parameters(), 99);
      const Behavior b1 = viaq.behavior_matrix(theta), b2 = viad.behavior_matrix(theta);
      for (std::size_t xi = 0; xi < b1.columns.size(); ++xi)
        for (std::size_t o = 0; o < b1.columns[xi].size(); ++o)
          worst = std::max(worst, std::abs(b1.columns[xi][o] - b2.columns[xi][o]));
    }
  }
  chk.require(worst <= 1e-10, "detector/depolarizing behaviors differ by " + Check::fmt(worst));
  return {4, "detector white noise", chk.ok(), chk.summary("detector-vs-depolarizing max diff " + Check::fmt(worst))};
}

inline CriterionResult dephasing_curves(const AcceptanceOptions& opt) {
  Check chk;
  const auto grid = make_grid(0.0, 1.0, 0.05);
  const NoiseSpec uniform{ChannelModel::kDephasing, Placement::kUniform, {0.0}};
  std::vector<ScanPoint> bilocal, chain;
  for (const std::string id : {"chsh", "bilocal", "chain:3", "star:3"}) {
    const Network net = build_network(id);
    auto pts = scan_points(hardware_ansatz(net), uniform, natural(net), grid, scan_config(net, 5), opt);
    compare_to_oracle(chk, pts, 5e-3, id + " uniform");
    if (id == "bilocal") bilocal = pts;
    if (id == "chain:3") chain = pts;
  }
  // The 3-chain follows the bilocal curve.
  for (std::size_t i = 0; i < grid.size(); ++i)
    chk.near(chain[i].best_score, bilocal[i].best_score, 5e-3, label("chain:3 vs bilocal", grid[i]));

  const NoiseSpec single{ChannelModel::kDephasing, Placement::kSingle, {0.0}};
  for (int n : {1, 2, 3}) {
    const Network net = build_star(n);
    const auto pts = scan_points(hardware_ansatz(net), single, natural(net), grid, scan_config(net, 6), opt);
    compare_to_oracle(chk, pts, 5e-3, net.name() + " single");
  }

  // Prediction from the noisy source states alone stays below what the
  // 3-chain achieves once gamma >= 0.5.
  double sep08 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double g = grid[i];
    if (g < 0.5 - 1e-12) continue;
    const DensityMatrix src = apply_two_sided(pure_density(phi_plus_ket()), bellnet::dephasing(g), bellnet::dephasing(g));
    const double naive = max_chain_score({src, src, src}, 3);
    // At gamma = 1 every source is classical and both sides equal 1.
    if (g < 1.0 - 1e-12)
      chk.require(chain[i].best_score > naive, label("chain:3 naive prediction not below achieved", g));
    else
      chk.require(naive <= chain[i].best_score + 1e-9, label("chain:3 naive prediction above achieved", g));
    if (std::abs(g - 0.8) < 1e-9) sep08 = chain[i].best_score - naive;
  }
  chk.require(sep08 > 1e-2, "separation at gamma=0.8 is only " + Check::fmt(sep08));
  return {5, "dephasing", chk.ok(), chk.summary("separation at 0.8: " + Check::fmt(sep08))};
}

inline CriterionResult amplitude_damping_separation(const AcceptanceOptions& opt) {
  Check chk;
  const double g = 0.30;
  const auto k = amplitude_damping(simulated({ChannelModel::kAmplitudeDamping, Placement::kUniform, {g}}, opt).gammas[0]);
  const auto grid = maxent_gridsearch_oracle(k, k);
  chk.require(grid.value <= 2.0 + 1e-6, "maximally entangled grid search reaches " + Check::fmt(grid.value));

  const Network net = build_star(1);
  Inequality ineq = natural(net);
  ineq.normalized = true;
  const NetworkAnsatz a = make_ansatz(net, "nonmax_entangled", "local_rot");
  const auto noise = build_noise_model(net, simulated({ChannelModel::kAmplitudeDamping, Placement::kUniform, {g}}, opt));
  const double s = best_score(a, noise, ineq, config(0.5, 80, 8, 9));
  chk.require(s > 1.0 + 5e-4, "nonmax-entangled ansatz reaches only " + Check::fmt(s));

  const double edge = 1.0 - 1.0 / std::numbers::sqrt2;
  const bool below = amplitude_damping_breaking(edge - 1e-9, edge - 1e-9);
  const bool above = amplitude_damping_breaking(edge + 1e-9, edge + 1e-9);
  chk.require(!below && above, "breaking predicate does not flip at 1 - 1/sqrt2");
  return {6, "amplitude damping separation", chk.ok(),
          chk.summary("grid-search max " + Check::fmt(grid.value) + ", nonmax VQO " + Check::fmt(s))};
}

inline CriterionResult classical_sources(const AcceptanceOptions&) {
  Check chk;
  std::string extra;
  for (int n : {2, 3}) {
    const Network net = build_star(n);
    const NetworkAnsatz a = with_source(make_ansatz(net, "phi_plus", "local_rot"), 0, "classical_00");
    const double s = best_score(a, {}, natural(net), config(default_eta(net), 60, 8, 12));
    const double want = classical_source_star_score(n, 1);
    std::vector<DensityMatrix> srcs{pure_density({1.0, 0.0, 0.0, 0.0})};
    for (int i = 1; i < n; ++i) srcs.push_back(pure_density(phi_plus_ket()));
    const double predicted = max_star_score(srcs, n);
    chk.near(s, want, 5e-3, net.name() + " with |00> source");
    chk.require(s > predicted + 1e-3, net.name() + ": achieved " + Check::fmt(s) + " not above prediction " +
                                          Check::fmt(predicted));
    extra += net.name() + " predicted " + Check::fmt(predicted) + " achieved " + Check::fmt(s) + "; ";
  }
  const Network chain = build_chain(3);
  const NetworkAnsatz a = with_source(make_ansatz(chain, "phi_plus", "local_rot"), 1, "classical_00");
  const double s = best_score(a, {}, natural(chain), config(default_eta(chain), 60, 8, 13));
  chk.near(s, std::numbers::sqrt2, 5e-3, "chain:3 with classical interior source");
  extra += "chain:3 achieved " + Check::fmt(s);
  return {7, "classical-source edge cases", chk.ok(), chk.summary(extra)};
}

inline CriterionResult colored_noise_criterion(const AcceptanceOptions& opt) {
  Check chk;
  const auto grid = make_grid(0.0, 1.0, 0.05);
  const NoiseSpec spec{ChannelModel::kColored, Placement::kSingle, {0.0}};
  std::string extra;
  for (int n : {1, 2, 3}) {
    const Network net = build_star(n);
    Inequality ineq = natural(net);
    ineq.normalized = n == 1;
    const double eta = n == 1 ? 0.5 : default_eta(net);
    const auto cfg = config(eta, 60, 6, 14);
    const auto pts = scan_points(make_ansatz(net, "psi_plus", "local_rot"), spec, ineq, grid, cfg, opt);
    compare_to_oracle(chk, pts, 5e-3, net.name() + " psi_plus");

    NoiseSpec half = spec;
    half.gammas = {0.5};
    const auto noise = build_noise_model(net, simulated(half, opt));
    const double psi = best_score(make_ansatz(net, "psi_plus", "local_rot"), noise, ineq, cfg);
    const double phi = best_score(make_ansatz(net, "phi_plus", "local_rot"), noise, ineq, cfg);
    chk.require(psi - phi > 1e-2, net.name() + ": psi_plus " + Check::fmt(psi) + " vs phi_plus " + Check::fmt(phi));
    extra += net.name() + " psi-phi at 0.5: " + Check::fmt(psi - phi) + "; ";
  }
  return {8, "colored noise", chk.ok(), chk.summary(extra)};
}

// Smallest |I_y| of the score at these settings (0 for CHSH, which has no root).
inline double smallest_root_argument(const Objective& obj, std::span<const double> theta) {
  const Inequality& ineq = obj.inequality();
  if (ineq.kind == InequalityKind::kChsh) return 1.0;
  const auto c = obj.correlators(theta);
  const int k = ineq.exterior_slots();
  return std::min(std::abs(I_ny(c, k, 0)), std::abs(I_ny(c, k, 1)));
}

inline CriterionResult gradient_correctness(const AcceptanceOptions& opt) {
  Check chk;
  double worst_clean = 0.0, worst_noisy = 0.0;
  std::size_t skipped = 0;
  auto disagreement = [](const Objective& obj, const std::vector<double>& theta) {
    const auto ps = obj.grad_parameter_shift(theta);
    const auto fd = obj.grad_central_difference(theta, 1e-5);
    double d = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) d = std::max(d, std::abs(ps[i] - fd[i]));
    return d;
  };
  for (const std::string id : {"chsh", "bilocal", "chain:3", "star:3"}) {
    const Network net = build_network(id);
    const NetworkAnsatz a = make_ansatz(net, "arbitrary_state_preparation", "local_rot");
    const Objective clean(NetworkSimulator(a, {}), natural(net));
    const Objective noisy(NetworkSimulator(a, build_noise_model(net, simulated({ChannelModel::kDepolarizingQubit,
                                                                                Placement::kUniform, {0.3}}, opt))),
                          natural(net));
    int used = 0;
    for (std::uint64_t k = 0; used < 20; ++k) {
      if (k >= 5000) {
        chk.require(false, id + ": too few random settings in the smooth region");
        break;
      }
      const auto theta = random_settings(clean.num_parameters(), mix_seed(500, k));
      // |I|^(1/n) is not smooth at I = 0; a central difference with h = 1e-5
      // is only a trustworthy reference where every I_y stays away from it.
      if (smallest_root_argument(clean, theta) < 0.005) {
        ++skipped;
        continue;
      }
      ++used;
      worst_clean = std::max(worst_clean, disagreement(clean, theta));
      worst_noisy = std::max(worst_noisy, disagreement(noisy, theta));
    }
  }
  chk.require(worst_clean <= 1e-6, "noiseless disagreement " + Check::fmt(worst_clean));
  chk.require(worst_noisy <= 1e-5, "noisy disagreement " + Check::fmt(worst_noisy));
  return {9, "gradient correctness", chk.ok(),
          chk.summary("max |shift - fd| noiseless " + Check::fmt(worst_clean) + ", noisy " + Check::fmt(worst_noisy) +
                      "; " + std::to_string(skipped) + " draws with some noiseless |I_y| < 0.005 skipped")};
}

inline CriterionResult unital_theorem(const AcceptanceOptions&) {
  Check chk;
  std::mt19937_64 rng(mix_seed(77, 10));
  const Network net = build_star(1);
  const Inequality ineq = natural(net);
  const NetworkAnsatz a = make_ansatz(net, "arbitrary_state_preparation", "local_rot");
  double worst = -1e9;
  for (int t = 0; t < 30; ++t) {
    const auto k1 = random_pauli_channel(rng), k2 = random_pauli_channel(rng);
    NoiseModel noise;
    noise.channels.push_back({"pauli@q0", k1, {0}});
    noise.channels.push_back({"pauli@q1", k2, {1}});
    // Best maximally entangled input: (U (x) I)|Phi+> searched over U.
    const double bell = maxent_gridsearch_oracle(k1, k2).value;
    const double s = best_score(a, noise, ineq, config(0.3, 60, 4, mix_seed(78, std::uint64_t(t))));
    chk.require(s <= bell + 1e-3, "channel " + std::to_string(t) + ": " + Check::fmt(s) + " > " + Check::fmt(bell));
    worst = std::max(worst, s - bell);
  }
  return {10, "unital theorem spot-check", chk.ok(), chk.summary("max(VQO - Bell value) " + Check::fmt(worst))};
}

inline CriterionResult shot_sampling(const AcceptanceOptions&) {
  Check chk;
  const Network net = build_star(1);
  const NetworkAnsatz a = hardware_ansatz(net);
  const Objective exact(NetworkSimulator(a, {}), natural(net));
  const auto best = optimize(exact, config(0.12, 60, 10, 15));
  const double target = 2.0 * std::numbers::sqrt2;
  int within = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const Behavior b = sampled_behavior(exact.simulator(), best.best_settings, 6000, mix_seed(1000, t));
    const double s = chsh_score(correlators(b).values).value;
    if (std::abs(s - target) <= 0.1) ++within;
  }
  chk.require(within >= 95, std::to_string(within) + "/100 trials within 0.1");
  return {11, "shot sampling", chk.ok(), chk.summary(std::to_string(within) + "/100 trials within 0.1 of 2*sqrt2")};
}

}  // namespace acceptance

inline std::vector<std::function<CriterionResult(const AcceptanceOptions&)>> acceptance_criteria() {
  using namespace acceptance;
  return {noiseless_maxima,         horodecki_equivalence,  source_depolarizing, detector_white_noise,
          dephasing_curves,         amplitude_damping_separation, classical_sources, colored_noise_criterion,
          gradient_correctness,     unital_theorem,         shot_sampling};
}

inline std::string format_result_line(const CriterionResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "[%s] criterion %2d %-32s (%.1fs)", r.passed ? "PASS" : "FAIL", r.id,
                r.title.c_str(), r.seconds);
  return std::string(head) + (r.detail.empty() ? "" : "  " + r.detail);
}

// Runs the selected criteria in order; `on_result` sees each one as it finishes.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                                   const std::function<void(const CriterionResult&)>& on_result = {}) {
  const auto all = acceptance_criteria();
  for (int id : opt.only)
    if (id < 1 || id > kNumCriteria) throw std::invalid_argument("no acceptance criterion " + std::to_string(id));
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kNumCriteria; ++id) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = all[std::size_t(id - 1)](opt);
    } catch (const std::exception& e) {
      r = {id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what()};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace bellnet
