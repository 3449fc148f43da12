#pragma once

// Network execution: noisy state preparation, outcome distributions, behavior
// matrices, parity correlators and shot sampling.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <locale>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bellnet/ansatz.hpp"
#include "bellnet/channels.hpp"
#include "bellnet/network.hpp"
#include "bellnet/qmath.hpp"

namespace bellnet {

struct Behavior {
  InputWiring wiring;
  std::size_t num_nodes = 0;
  // columns[x][a]: probability of joint node outcome a given network input x.
  // Node 0 is the most significant bit of a; bit 0 means outcome +1.
  std::vector<std::vector<double>> columns;

  std::size_t num_outputs() const { return std::size_t{1} << num_nodes; }
  std::size_t num_inputs() const { return columns.size(); }
  double prob(std::size_t a, std::size_t x) const { return columns.at(x).at(a); }
};

// Correlators indexed by network input index.
struct CorrelatorTable {
  InputWiring wiring;
  std::vector<double> values;

  double at(std::span<const int> x) const { return values.at(wiring.index_of(x)); }
};

inline int parity(std::size_t bits) { return std::popcount(bits) & 1; }

// Observable whose +1/-1 eigenspaces are the even/odd parity outcomes after u.
inline ComplexMatrix parity_observable(const ComplexMatrix& u) {
  const std::size_t d = u.rows();
  ComplexMatrix o(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      cplx acc = 0.0;
      for (std::size_t l = 0; l < d; ++l) {
        const double s = parity(l) ? -1.0 : 1.0;
        acc += std::conj(u(l, r)) * s * u(l, c);
      }
      o(r, c) = acc;
    }
  return o;
}

inline StochasticMatrix2 compose(const StochasticMatrix2& second, const StochasticMatrix2& first) {
  StochasticMatrix2 m{};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m[r][c] = second[r][0] * first[0][c] + second[r][1] * first[1][c];
  return m;
}

// Reported observable when a detector map follows a +-1 measurement of O.
inline ComplexMatrix fold_detector(const ComplexMatrix& o, const StochasticMatrix2& e) {
  const double c_plus = e[0][0] - e[1][0];
  const double c_minus = e[0][1] - e[1][1];
  return ComplexMatrix::identity(o.rows()) * cplx(0.5 * (c_plus + c_minus)) + o * cplx(0.5 * (c_plus - c_minus));
}

// Evaluates Tr[rho (O_1 (x) ... (x) O_m)] for every network input by contracting
// one node at a time, largest node first.
class CorrelatorEngine {
 public:
  CorrelatorEngine() = default;
  explicit CorrelatorEngine(const Network& net) : wiring_(net.wiring) {
    const auto& nodes = net.topology.nodes;
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return nodes[a].qubits.size() > nodes[b].qubits.size(); });
    std::vector<int> remaining(static_cast<std::size_t>(net.topology.num_qubits));
    for (int q = 0; q < net.topology.num_qubits; ++q) remaining[std::size_t(q)] = q;
    for (std::size_t j : order) {
      std::vector<int> pos;
      for (int q : nodes[j].qubits)
        pos.push_back(int(std::find(remaining.begin(), remaining.end(), q) - remaining.begin()));
      Level lv;
      lv.node = j;
      lv.slot = wiring_.node_slot[j];
      lv.dim_in = dim_of(int(remaining.size()));
      auto ti = make_target_index(int(remaining.size()), pos);
      lv.offsets = std::move(ti.offsets);
      lv.bases = std::move(ti.bases);
      levels_.push_back(std::move(lv));
      std::vector<int> next;
      for (int q : remaining)
        if (std::find(nodes[j].qubits.begin(), nodes[j].qubits.end(), q) == nodes[j].qubits.end()) next.push_back(q);
      remaining = std::move(next);
    }
  }

  // observables[j][v]: node j's +-1 observable for input v.
  std::vector<double> evaluate(const ComplexMatrix& rho, const std::vector<std::vector<ComplexMatrix>>& observables) const {
    std::vector<double> out(wiring_.num_inputs(), 0.0);
    std::vector<std::vector<cplx>> buffers(levels_.size() + 1);
    for (std::size_t l = 0; l < levels_.size(); ++l) {
      const std::size_t d = levels_[l].bases.size();
      buffers[l + 1].assign(d * d, 0.0);
    }
    std::vector<int> x(wiring_.slot_arity.size(), 0);
    std::vector<int> assigned(wiring_.slot_arity.size(), 0);
    recurse(0, rho.data().data(), observables, x, assigned, buffers, out);
    return out;
  }

 private:
  struct Level {
    std::size_t node = 0;
    int slot = 0;
    std::size_t dim_in = 0;
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> bases;
  };

  void recurse(std::size_t level, const cplx* r, const std::vector<std::vector<ComplexMatrix>>& obs, std::vector<int>& x,
               std::vector<int>& assigned, std::vector<std::vector<cplx>>& buffers, std::vector<double>& out) const {
    if (level == levels_.size()) {
      out[wiring_.index_of(x)] = r[0].real();
      return;
    }
    const Level& lv = levels_[level];
    const std::size_t slot = std::size_t(lv.slot);
    const bool fixed = assigned[slot] > 0;
    const int lo = fixed ? x[slot] : 0;
    const int hi = fixed ? x[slot] + 1 : wiring_.slot_arity[slot];
    for (int v = lo; v < hi; ++v) {
      x[slot] = v;
      ++assigned[slot];
      contract(lv, r, obs[lv.node][std::size_t(v)], buffers[level + 1].data());
      recurse(level + 1, buffers[level + 1].data(), obs, x, assigned, buffers, out);
      --assigned[slot];
    }
  }

  // out[i][j] = sum_{a,b} A[b][a] r[(base_i + off_a), (base_j + off_b)]
  static void contract(const Level& lv, const cplx* r, const ComplexMatrix& a, cplx* out) {
    const std::size_t t = lv.offsets.size();
    const std::size_t dout = lv.bases.size();
    const std::size_t din = lv.dim_in;
    std::vector<cplx> at(t * t);
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t j = 0; j < t; ++j) at[i * t + j] = a(j, i);
    for (std::size_t i = 0; i < dout; ++i) {
      for (std::size_t j = 0; j < dout; ++j) out[i * dout + j] = 0.0;
      for (std::size_t ai = 0; ai < t; ++ai) {
        const cplx* row = r + (lv.bases[i] + lv.offsets[ai]) * din;
        const cplx* coef = &at[ai * t];
        cplx* orow = out + i * dout;
        for (std::size_t j = 0; j < dout; ++j) {
          const cplx* rj = row + lv.bases[j];
          cplx acc = 0.0;
          for (std::size_t b = 0; b < t; ++b) acc += coef[b] * rj[lv.offsets[b]];
          orow[j] += acc;
        }
      }
    }
  }

  InputWiring wiring_;
  std::vector<Level> levels_;
};

// Executes a network ansatz under a fixed noise model. Immutable after
// construction and safe to share across threads.
class NetworkSimulator {
 public:
  NetworkSimulator(NetworkAnsatz ansatz, NoiseModel noise)
      : ansatz_(std::move(ansatz)), noise_(std::move(noise)), layout_(ansatz_.layout()), engine_(ansatz_.network) {
    ansatz_.validate();
    const auto& t = ansatz_.network.topology;
    source_channels_.resize(t.sources.size());
    for (std::size_t ci = 0; ci < noise_.channels.size(); ++ci) {
      const auto& ch = noise_.channels[ci];
      if (ch.targets.empty()) throw std::invalid_argument("noise channel '" + ch.label + "' has no targets");
      const int src = t.source_of_qubit(ch.targets.front());
      const auto& sq = t.sources[std::size_t(src)].qubits;
      LocalChannel lc{ci, {}};
      for (int q : ch.targets) {
        const auto it = std::find(sq.begin(), sq.end(), q);
        if (it == sq.end())
          throw std::invalid_argument("noise channel '" + ch.label + "' spans more than one source");
        lc.local_targets.push_back(int(it - sq.begin()));
      }
      for (const auto& k : ch.kraus)
        if (k.rows() != dim_of(int(ch.targets.size())))
          throw std::invalid_argument("noise channel '" + ch.label + "' has mismatched Kraus dimension");
      if (!kraus_complete(ch.kraus)) throw std::invalid_argument("noise channel '" + ch.label + "' is not trace preserving");
      source_channels_[std::size_t(src)].push_back(lc);
    }
    node_maps_.assign(t.nodes.size(), StochasticMatrix2{{{1.0, 0.0}, {0.0, 1.0}}});
    has_detector_.assign(t.nodes.size(), false);
    for (const auto& dm : noise_.detectors) {
      if (dm.node >= t.nodes.size()) throw std::invalid_argument("detector map on unknown node");
      if (!column_stochastic(dm.map)) throw std::invalid_argument("detector map is not column-stochastic");
      node_maps_[dm.node] = compose(dm.map, node_maps_[dm.node]);
      has_detector_[dm.node] = true;
    }
    // Local index of every source for each full basis index.
    const std::size_t d = dim_of(t.num_qubits);
    local_index_.assign(d * t.sources.size(), 0);
    for (std::size_t z = 0; z < d; ++z)
      for (std::size_t i = 0; i < t.sources.size(); ++i) {
        std::size_t li = 0;
        for (int q : t.sources[i].qubits) li = (li << 1) | ((z >> (t.num_qubits - 1 - q)) & 1U);
        local_index_[z * t.sources.size() + i] = li;
      }
  }

  const NetworkAnsatz& ansatz() const { return ansatz_; }
  const Network& network() const { return ansatz_.network; }
  const NoiseModel& noise() const { return noise_; }
  const SettingsLayout& layout() const { return layout_; }
  std::size_t num_parameters() const { return layout_.size(); }

  // Source i's state after preparation and its noise channels, on its own qubits.
  DensityMatrix source_state(std::size_t i, std::span<const double> phi) const {
    const auto& prep = ansatz_.preps.at(i);
    const int w = prep.layer.width;
    const ComplexMatrix u = prep.layer.unitary(phi);
    DensityMatrix rho;
    if (prep.initial_state) {
      rho = DensityMatrix::unchecked(w, u * (*prep.initial_state) * u.adjoint());
    } else {
      std::vector<cplx> col(dim_of(w));
      for (std::size_t r = 0; r < col.size(); ++r) col[r] = u(r, 0);
      rho = DensityMatrix::unchecked(w, outer(col, col));
    }
    for (const auto& lc : source_channels_[i]) rho = apply_kraus(rho, noise_.channels[lc.channel].kraus, lc.local_targets);
    return rho;
  }

  std::vector<DensityMatrix> source_states(std::span<const double> values) const {
    check_length(values);
    std::vector<DensityMatrix> out;
    for (std::size_t i = 0; i < layout_.num_sources(); ++i) {
      const auto r = layout_.source_range(i);
      out.push_back(source_state(i, values.subspan(r.offset, r.count)));
    }
    return out;
  }

  // Full network state from per-source states (qubits placed per the topology).
  ComplexMatrix assemble(const std::vector<DensityMatrix>& sources) const {
    const auto& t = ansatz_.network.topology;
    const std::size_t d = dim_of(t.num_qubits);
    const std::size_t ns = t.sources.size();
    ComplexMatrix rho(d, d);
    for (std::size_t z = 0; z < d; ++z) {
      const std::size_t* lz = &local_index_[z * ns];
      for (std::size_t w = 0; w < d; ++w) {
        const std::size_t* lw = &local_index_[w * ns];
        cplx v = 1.0;
        for (std::size_t i = 0; i < ns && v != cplx(0.0); ++i) v *= sources[i](lz[i], lw[i]);
        rho(z, w) = v;
      }
    }
    return rho;
  }

  DensityMatrix noisy_state(std::span<const double> values) const {
    return DensityMatrix::unchecked(ansatz_.network.topology.num_qubits, assemble(source_states(values)));
  }

  // Independent route: build the whole register, then apply every preparation
  // unitary and Kraus channel on global qubit indices.
  DensityMatrix noisy_state_reference(std::span<const double> values) const {
    check_length(values);
    const auto& t = ansatz_.network.topology;
    std::vector<DensityMatrix> initial;
    for (const auto& p : ansatz_.preps) {
      if (p.initial_state)
        initial.push_back(DensityMatrix::unchecked(p.layer.width, *p.initial_state));
      else
        initial.push_back(DensityMatrix::zero_state(p.layer.width));
    }
    DensityMatrix rho = DensityMatrix::unchecked(t.num_qubits, assemble(initial));
    for (std::size_t i = 0; i < t.sources.size(); ++i) {
      const auto r = layout_.source_range(i);
      rho = apply_unitary(rho, ansatz_.preps[i].layer.unitary(values.subspan(r.offset, r.count)), t.sources[i].qubits);
    }
    for (const auto& ch : noise_.channels) rho = apply_kraus(rho, ch.kraus, ch.targets);
    return rho;
  }

  ComplexMatrix node_unitary(std::size_t j, std::span<const double> theta) const {
    return ansatz_.meas.at(j).unitary(theta);
  }

  // Node j's reported +-1 observable for the given parameters, detector noise folded in.
  ComplexMatrix node_observable(std::size_t j, std::span<const double> theta) const {
    ComplexMatrix o = parity_observable(node_unitary(j, theta));
    if (has_detector_[j]) o = fold_detector(o, node_maps_[j]);
    return o;
  }

  std::vector<std::vector<ComplexMatrix>> node_observables(std::span<const double> values) const {
    check_length(values);
    std::vector<std::vector<ComplexMatrix>> out(layout_.num_nodes());
    for (std::size_t j = 0; j < layout_.num_nodes(); ++j)
      for (std::size_t v = 0; v < layout_.node_arity(j); ++v) {
        const auto r = layout_.node_range(j, int(v));
        out[j].push_back(node_observable(j, values.subspan(r.offset, r.count)));
      }
    return out;
  }

  std::vector<double> correlators_from(const ComplexMatrix& rho,
                                       const std::vector<std::vector<ComplexMatrix>>& observables) const {
    return engine_.evaluate(rho, observables);
  }

  // Correlators via observable contraction (the optimizer's path).
  CorrelatorTable fast_correlators(std::span<const double> values) const {
    return {ansatz_.network.wiring, correlators_from(assemble(source_states(values)), node_observables(values))};
  }

  // P(z|x) over all 2^N computational-basis outcomes of the system qubits.
  std::vector<double> simulate_probs(std::span<const double> values, std::span<const int> x) const {
    return probs_given_state(noisy_state(values), values, x);
  }

  std::vector<double> probs_given_state(const DensityMatrix& rho, std::span<const double> values,
                                        std::span<const int> x) const {
    const auto slice = slice_settings(layout_, values, ansatz_.network.wiring, x);
    const auto& nodes = ansatz_.network.topology.nodes;
    DensityMatrix s = rho;
    for (std::size_t j = 0; j < nodes.size(); ++j) s = apply_unitary(s, node_unitary(j, slice.nodes[j]), nodes[j].qubits);
    std::vector<double> p(s.dim());
    for (std::size_t z = 0; z < p.size(); ++z) p[z] = std::max(0.0, s(z, z).real());
    return p;
  }

  // Pure-state route, valid when there are no Kraus channels and no mixed initial states.
  bool pure_path_available() const {
    if (noise_.has_kraus()) return false;
    for (const auto& p : ansatz_.preps)
      if (p.initial_state) return false;
    return true;
  }

  Ket pure_state(std::span<const double> values) const {
    if (!pure_path_available()) throw std::logic_error("pure_state: noise model or fixed states require mixed simulation");
    check_length(values);
    const auto& t = ansatz_.network.topology;
    Ket psi = Ket::zero(t.num_qubits);
    for (std::size_t i = 0; i < t.sources.size(); ++i) {
      const auto r = layout_.source_range(i);
      psi = apply_unitary(psi, ansatz_.preps[i].layer.unitary(values.subspan(r.offset, r.count)), t.sources[i].qubits);
    }
    return psi;
  }

  std::vector<double> simulate_probs_pure(std::span<const double> values, std::span<const int> x) const {
    Ket psi = pure_state(values);
    const auto slice = slice_settings(layout_, values, ansatz_.network.wiring, x);
    const auto& nodes = ansatz_.network.topology.nodes;
    for (std::size_t j = 0; j < nodes.size(); ++j) psi = apply_unitary(psi, node_unitary(j, slice.nodes[j]), nodes[j].qubits);
    std::vector<double> p(psi.amplitudes().size());
    for (std::size_t z = 0; z < p.size(); ++z) p[z] = std::norm(psi.amplitudes()[z]);
    return p;
  }

  // Node-level outcome distribution from raw qubit probabilities: XOR parity
  // per node, then each node's detector map.
  std::vector<double> reduce_to_nodes(const std::vector<double>& pz) const {
    const auto& t = ansatz_.network.topology;
    const std::size_t m = t.nodes.size();
    std::vector<double> pa(std::size_t{1} << m, 0.0);
    for (std::size_t z = 0; z < pz.size(); ++z) {
      if (pz[z] == 0.0) continue;
      std::size_t a = 0;
      for (std::size_t j = 0; j < m; ++j) {
        int bit = 0;
        for (int q : t.nodes[j].qubits) bit ^= int((z >> (t.num_qubits - 1 - q)) & 1U);
        a = (a << 1) | std::size_t(bit);
      }
      pa[a] += pz[z];
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (!has_detector_[j]) continue;
      const auto& e = node_maps_[j];
      const std::size_t bit = std::size_t{1} << (m - 1 - j);
      std::vector<double> next(pa.size(), 0.0);
      for (std::size_t a = 0; a < pa.size(); ++a) {
        const int aj = (a & bit) ? 1 : 0;
        const std::size_t a0 = a & ~bit;
        next[a0] += e[0][aj] * pa[a];
        next[a0 | bit] += e[1][aj] * pa[a];
      }
      pa = std::move(next);
    }
    return pa;
  }

  Behavior behavior_matrix(std::span<const double> values) const {
    check_length(values);
    Behavior b;
    b.wiring = ansatz_.network.wiring;
    b.num_nodes = ansatz_.network.topology.nodes.size();
    const bool pure = pure_path_available();
    DensityMatrix rho;
    if (!pure) rho = noisy_state(values);
    for (std::size_t xi = 0; xi < b.wiring.num_inputs(); ++xi) {
      const auto x = b.wiring.input(xi);
      const auto pz = pure ? simulate_probs_pure(values, x) : probs_given_state(rho, values, x);
      b.columns.push_back(reduce_to_nodes(pz));
    }
    return b;
  }

 private:
  struct LocalChannel {
    std::size_t channel;
    std::vector<int> local_targets;
  };

  void check_length(std::span<const double> values) const {
    if (values.size() != layout_.size())
      throw std::invalid_argument("settings vector has length " + std::to_string(values.size()) + ", layout expects " +
                                  std::to_string(layout_.size()));
  }

  NetworkAnsatz ansatz_;
  NoiseModel noise_;
  SettingsLayout layout_;
  CorrelatorEngine engine_;
  std::vector<std::vector<LocalChannel>> source_channels_;
  std::vector<StochasticMatrix2> node_maps_;
  std::vector<bool> has_detector_;
  std::vector<std::size_t> local_index_;
};

inline CorrelatorTable correlators(const Behavior& b) {
  CorrelatorTable t;
  t.wiring = b.wiring;
  for (const auto& col : b.columns) {
    if (col.size() != b.num_outputs()) throw std::invalid_argument("correlators: behavior column has wrong length");
    double c = 0.0;
    for (std::size_t a = 0; a < col.size(); ++a) c += (parity(a) ? -1.0 : 1.0) * col[a];
    t.values.push_back(c);
  }
  return t;
}

// 53-bit uniform double in [0, 1) from a 64-bit engine, independent of the
// standard library's distribution implementations.
inline double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

inline std::vector<double> sample_shots(const std::vector<double>& probs, std::size_t shots, std::uint64_t seed) {
  if (shots == 0) throw std::invalid_argument("sample_shots: shots must be at least 1");
  if (probs.empty()) throw std::invalid_argument("sample_shots: empty distribution");
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < -kValidationTol) throw std::invalid_argument("sample_shots: negative probability");
    acc += std::max(0.0, probs[i]);
    cdf[i] = acc;
  }
  if (std::abs(acc - 1.0) > 1e-9) throw std::invalid_argument("sample_shots: probabilities do not sum to 1");
  std::mt19937_64 rng(seed);
  std::vector<double> counts(probs.size(), 0.0);
  for (std::size_t s = 0; s < shots; ++s) {
    const double u = uniform01(rng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t k = std::size_t(it - cdf.begin());
    if (k >= probs.size()) k = probs.size() - 1;
    counts[k] += 1.0;
  }
  for (auto& c : counts) c /= double(shots);
  return counts;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Shot-sampled behavior: each input's raw outcome distribution is sampled,
// then parity-reduced and post-processed like the exact behavior.
inline Behavior sampled_behavior(const NetworkSimulator& sim, std::span<const double> values, std::size_t shots,
                                 std::uint64_t seed) {
  Behavior b;
  b.wiring = sim.network().wiring;
  b.num_nodes = sim.network().topology.nodes.size();
  const bool pure = sim.pure_path_available();
  DensityMatrix rho;
  if (!pure) rho = sim.noisy_state(values);
  for (std::size_t xi = 0; xi < b.wiring.num_inputs(); ++xi) {
    const auto x = b.wiring.input(xi);
    const auto pz = pure ? sim.simulate_probs_pure(values, x) : sim.probs_given_state(rho, values, x);
    b.columns.push_back(sim.reduce_to_nodes(sample_shots(pz, shots, mix_seed(seed, xi))));
  }
  return b;
}

inline std::string input_label(const std::vector<int>& x) {
  std::string s;
  for (int v : x) s += std::to_string(v);
  return s;
}

inline std::string output_label(std::size_t a, std::size_t num_nodes) {
  std::string s;
  for (std::size_t j = 0; j < num_nodes; ++j) s += ((a >> (num_nodes - 1 - j)) & 1U) ? '-' : '+';
  return s;
}

inline std::string behavior_to_csv(const Behavior& b) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "output";
  for (std::size_t xi = 0; xi < b.num_inputs(); ++xi) os << ",x=" << input_label(b.wiring.input(xi));
  os << "\n";
  char buf[64];
  for (std::size_t a = 0; a < b.num_outputs(); ++a) {
    os << output_label(a, b.num_nodes);
    for (std::size_t xi = 0; xi < b.num_inputs(); ++xi) {
      std::snprintf(buf, sizeof buf, "%.12g", b.prob(a, xi));
      os << "," << buf;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace bellnet
