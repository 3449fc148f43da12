#pragma once

// Gate library and preparation/measurement layers for network ansatz circuits.

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellnet/network.hpp"
#include "bellnet/qmath.hpp"

namespace bellnet {

enum class GateKind {
  RY,
  RZ,
  ROT3,
  HADAMARD,
  CNOT,
  PAULI_X,
  ARB_STATE_PREP,
  ARB_UNITARY,
  BELL_PHI_PLUS,
  BELL_PSI_PLUS,
  MAX_ENTANGLED,
  NONMAX_ENTANGLED,
  LOCAL_RY,
  LOCAL_ROT,
};

inline const char* gate_kind_name(GateKind k) {
  switch (k) {
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::ROT3: return "ROT3";
    case GateKind::HADAMARD: return "HADAMARD";
    case GateKind::CNOT: return "CNOT";
    case GateKind::PAULI_X: return "PAULI_X";
    case GateKind::ARB_STATE_PREP: return "ARB_STATE_PREP";
    case GateKind::ARB_UNITARY: return "ARB_UNITARY";
    case GateKind::BELL_PHI_PLUS: return "BELL_PHI_PLUS";
    case GateKind::BELL_PSI_PLUS: return "BELL_PSI_PLUS";
    case GateKind::MAX_ENTANGLED: return "MAX_ENTANGLED";
    case GateKind::NONMAX_ENTANGLED: return "NONMAX_ENTANGLED";
    case GateKind::LOCAL_RY: return "LOCAL_RY";
    case GateKind::LOCAL_ROT: return "LOCAL_ROT";
  }
  return "?";
}

// Targets are local indices into the register the gate acts on.
struct GateSpec {
  GateKind kind;
  std::vector<int> targets;

  int width() const { return int(targets.size()); }

  int param_count() const {
    const int m = width();
    switch (kind) {
      case GateKind::RY:
      case GateKind::RZ: return 1;
      case GateKind::ROT3: return 3;
      case GateKind::HADAMARD:
      case GateKind::CNOT:
      case GateKind::PAULI_X:
      case GateKind::BELL_PHI_PLUS:
      case GateKind::BELL_PSI_PLUS: return 0;
      case GateKind::ARB_STATE_PREP: return (1 << (m + 1)) - 2;
      case GateKind::ARB_UNITARY: return (1 << (2 * m)) - 1;
      case GateKind::MAX_ENTANGLED: return 3;
      case GateKind::NONMAX_ENTANGLED: return 2;
      case GateKind::LOCAL_RY: return m;
      case GateKind::LOCAL_ROT: return 3 * m;
    }
    return 0;
  }

  void validate() const {
    const int m = width();
    if (m < 1) throw std::invalid_argument(std::string(gate_kind_name(kind)) + ": no targets");
    auto need = [&](int w) {
      if (m != w)
        throw std::invalid_argument(std::string(gate_kind_name(kind)) + " acts on exactly " + std::to_string(w) +
                                    " qubit(s)");
    };
    switch (kind) {
      case GateKind::RY:
      case GateKind::RZ:
      case GateKind::ROT3:
      case GateKind::HADAMARD:
      case GateKind::PAULI_X: need(1); break;
      case GateKind::CNOT:
      case GateKind::BELL_PHI_PLUS:
      case GateKind::BELL_PSI_PLUS:
      case GateKind::MAX_ENTANGLED:
      case GateKind::NONMAX_ENTANGLED: need(2); break;
      default: break;
    }
  }
};

inline ComplexMatrix ry(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  return {{c, -s}, {s, c}};
}

inline ComplexMatrix rz(double t) {
  return {{std::polar(1.0, -t / 2), 0.0}, {0.0, std::polar(1.0, t / 2)}};
}

// Rz(a) Ry(b) Rz(c) as an operator product.
inline ComplexMatrix rot3(double a, double b, double c) { return rz(a) * ry(b) * rz(c); }

// Tensor product of single-qubit Paulis; word[i] in {0,1,2,3} for I,X,Y,Z, first letter most significant.
inline ComplexMatrix pauli_word_matrix(const std::vector<int>& word) {
  ComplexMatrix m = ComplexMatrix::identity(1);
  for (int p : word) m = kron(m, pauli::by_index(p));
  return m;
}

// exp(-i t P / 2) for a Pauli word P.
inline ComplexMatrix pauli_rotation(double t, const std::vector<int>& word) {
  const ComplexMatrix p = pauli_word_matrix(word);
  return ComplexMatrix::identity(p.rows()) * cplx(std::cos(t / 2), 0.0) + p * cplx(0.0, -std::sin(t / 2));
}

// Pauli words for the arbitrary-state construction; 2^(M+1) - 2 words.
inline std::vector<std::vector<int>> state_prep_pauli_words(int m) {
  if (m < 1) throw std::invalid_argument("state_prep_pauli_words: need at least one qubit");
  if (m == 1) return {{1}, {2}};
  const auto sub = state_prep_pauli_words(m - 1);
  std::vector<std::vector<int>> out;
  std::vector<int> x(std::size_t(m), 0), y(std::size_t(m), 0);
  x[0] = 1;
  y[0] = 2;
  out.push_back(x);
  out.push_back(y);
  for (const auto& w : sub) {
    std::vector<int> iw{0}, xw{1};
    iw.insert(iw.end(), w.begin(), w.end());
    xw.insert(xw.end(), w.begin(), w.end());
    out.push_back(iw);
    out.push_back(xw);
  }
  return out;
}

// All non-identity Pauli words on m qubits, lexicographic in (I, X, Y, Z).
inline std::vector<std::vector<int>> all_pauli_words_but_identity(int m) {
  std::vector<std::vector<int>> out;
  const int total = 1 << (2 * m);
  for (int code = 1; code < total; ++code) {
    std::vector<int> w(static_cast<std::size_t>(m));
    for (int q = 0; q < m; ++q) w[std::size_t(q)] = (code >> (2 * (m - 1 - q))) & 3;
    out.push_back(std::move(w));
  }
  return out;
}

namespace detail {

// u <- (g on local targets) u, for a square u on m qubits.
inline void compose_left(ComplexMatrix& u, int m, const ComplexMatrix& g, std::span<const int> targets) {
  const auto ti = make_target_index(m, targets);
  left_multiply(u.data(), u.rows(), g, ti);
}

inline void compose_left(ComplexMatrix& u, int m, const ComplexMatrix& g, std::initializer_list<int> targets) {
  compose_left(u, m, g, std::span<const int>(targets.begin(), targets.size()));
}

}  // namespace detail

// Unitary of a gate on its own 2^width register (local qubit order = targets order).
inline ComplexMatrix gate_unitary(const GateSpec& g, std::span<const double> p) {
  g.validate();
  if (int(p.size()) != g.param_count())
    throw std::invalid_argument(std::string(gate_kind_name(g.kind)) + ": expected " +
                                std::to_string(g.param_count()) + " parameters, got " + std::to_string(p.size()));
  const int m = g.width();
  ComplexMatrix u = ComplexMatrix::identity(dim_of(m));
  switch (g.kind) {
    case GateKind::RY: return ry(p[0]);
    case GateKind::RZ: return rz(p[0]);
    case GateKind::ROT3: return rot3(p[0], p[1], p[2]);
    case GateKind::HADAMARD: return hadamard();
    case GateKind::PAULI_X: return pauli::X();
    case GateKind::CNOT: return cnot();
    case GateKind::BELL_PHI_PLUS:
      detail::compose_left(u, 2, hadamard(), {0});
      detail::compose_left(u, 2, cnot(), {0, 1});
      return u;
    case GateKind::BELL_PSI_PLUS:
      detail::compose_left(u, 2, hadamard(), {0});
      detail::compose_left(u, 2, pauli::X(), {1});
      detail::compose_left(u, 2, cnot(), {0, 1});
      return u;
    case GateKind::MAX_ENTANGLED:
      detail::compose_left(u, 2, hadamard(), {0});
      detail::compose_left(u, 2, cnot(), {0, 1});
      detail::compose_left(u, 2, rot3(p[0], p[1], p[2]), {0});
      return u;
    case GateKind::NONMAX_ENTANGLED:
      detail::compose_left(u, 2, ry(p[0]), {0});
      detail::compose_left(u, 2, rz(p[1]), {0});
      detail::compose_left(u, 2, cnot(), {0, 1});
      return u;
    case GateKind::LOCAL_RY:
      for (int q = 0; q < m; ++q) detail::compose_left(u, m, ry(p[std::size_t(q)]), {q});
      return u;
    case GateKind::LOCAL_ROT:
      for (int q = 0; q < m; ++q) {
        const std::size_t o = 3 * std::size_t(q);
        detail::compose_left(u, m, rot3(p[o], p[o + 1], p[o + 2]), {q});
      }
      return u;
    case GateKind::ARB_STATE_PREP: {
      const auto words = state_prep_pauli_words(m);
      for (std::size_t k = 0; k < words.size(); ++k) u = pauli_rotation(p[k], words[k]) * u;
      return u;
    }
    case GateKind::ARB_UNITARY: {
      const auto words = all_pauli_words_but_identity(m);
      for (std::size_t k = 0; k < words.size(); ++k) u = pauli_rotation(p[k], words[k]) * u;
      return u;
    }
  }
  throw std::logic_error("gate_unitary: unhandled kind");
}

inline ComplexMatrix arb_state_prep_unitary(int m, std::span<const double> params) {
  std::vector<int> t(static_cast<std::size_t>(m));
  for (int q = 0; q < m; ++q) t[std::size_t(q)] = q;
  return gate_unitary({GateKind::ARB_STATE_PREP, t}, params);
}

// Ordered gate list on a local register of `width` qubits.
struct LayerSpec {
  int width = 0;
  std::vector<GateSpec> gates;
  std::string name;

  int param_count() const {
    int c = 0;
    for (const auto& g : gates) c += g.param_count();
    return c;
  }

  ComplexMatrix unitary(std::span<const double> p) const {
    if (int(p.size()) != param_count())
      throw std::invalid_argument("layer '" + name + "': expected " + std::to_string(param_count()) +
                                  " parameters, got " + std::to_string(p.size()));
    ComplexMatrix u = ComplexMatrix::identity(dim_of(width));
    std::size_t off = 0;
    for (const auto& g : gates) {
      const auto n = std::size_t(g.param_count());
      const ComplexMatrix gu = gate_unitary(g, p.subspan(off, n));
      off += n;
      if (g.width() == width) {
        bool natural = true;
        for (int q = 0; q < width; ++q) natural = natural && g.targets[std::size_t(q)] == q;
        if (natural) {
          u = gu * u;
          continue;
        }
      }
      detail::compose_left(u, width, gu, g.targets);
    }
    return u;
  }
};

// A source emits U(phi) rho0 U(phi)^dagger; rho0 defaults to |0...0>.
struct SourcePrep {
  LayerSpec layer;
  std::optional<ComplexMatrix> initial_state;
};

inline std::vector<int> iota_targets(int m) {
  std::vector<int> t(static_cast<std::size_t>(m));
  for (int q = 0; q < m; ++q) t[std::size_t(q)] = q;
  return t;
}

inline const std::vector<std::string>& prep_ansatz_names() {
  static const std::vector<std::string> names{"arbitrary_state_preparation", "phi_plus", "psi_plus",
                                              "max_entangled", "nonmax_entangled", "classical_00"};
  return names;
}

inline const std::vector<std::string>& meas_ansatz_names() {
  static const std::vector<std::string> names{"arbitrary_measurement", "local_ry", "local_rot"};
  return names;
}

inline SourcePrep make_prep(const std::string& name, int width) {
  SourcePrep s;
  s.layer.width = width;
  s.layer.name = name;
  const auto all = iota_targets(width);
  if (name == "arbitrary_state_preparation") {
    s.layer.gates.push_back({GateKind::ARB_STATE_PREP, all});
  } else if (name == "phi_plus") {
    s.layer.gates.push_back({GateKind::BELL_PHI_PLUS, all});
  } else if (name == "psi_plus") {
    s.layer.gates.push_back({GateKind::BELL_PSI_PLUS, all});
  } else if (name == "max_entangled") {
    s.layer.gates.push_back({GateKind::MAX_ENTANGLED, all});
  } else if (name == "nonmax_entangled") {
    s.layer.gates.push_back({GateKind::NONMAX_ENTANGLED, all});
  } else if (name == "classical_00") {
    // no gates: the source emits |0...0>
  } else {
    throw std::invalid_argument("unknown preparation ansatz '" + name + "'");
  }
  for (const auto& g : s.layer.gates) g.validate();
  return s;
}

// A fixed (parameter-free) source state.
inline SourcePrep make_fixed_prep(const DensityMatrix& rho, const std::string& name = "fixed_state") {
  SourcePrep s;
  s.layer.width = rho.num_qubits();
  s.layer.name = name;
  s.initial_state = rho.matrix();
  return s;
}

inline LayerSpec make_meas(const std::string& name, int width) {
  LayerSpec l;
  l.width = width;
  l.name = name;
  const auto all = iota_targets(width);
  if (name == "arbitrary_measurement") {
    l.gates.push_back({GateKind::ARB_UNITARY, all});
  } else if (name == "local_ry") {
    l.gates.push_back({GateKind::LOCAL_RY, all});
  } else if (name == "local_rot") {
    l.gates.push_back({GateKind::LOCAL_ROT, all});
  } else {
    throw std::invalid_argument("unknown measurement ansatz '" + name + "'");
  }
  return l;
}

// Network plus preparation and measurement layers. Every node uses the same
// layer structure for each of its inputs, with independent parameters.
struct NetworkAnsatz {
  Network network;
  std::vector<SourcePrep> preps;
  std::vector<LayerSpec> meas;

  SettingsLayout layout() const {
    std::vector<int> sc;
    for (const auto& p : preps) sc.push_back(p.layer.param_count());
    std::vector<std::vector<int>> nc;
    for (std::size_t j = 0; j < meas.size(); ++j)
      nc.emplace_back(std::size_t(network.topology.nodes[j].input_arity), meas[j].param_count());
    return SettingsLayout(sc, nc);
  }

  void validate() const {
    const auto& t = network.topology;
    if (preps.size() != t.sources.size()) throw std::invalid_argument("one preparation per source required");
    if (meas.size() != t.nodes.size()) throw std::invalid_argument("one measurement layer per node required");
    for (std::size_t i = 0; i < preps.size(); ++i) {
      if (preps[i].layer.width != int(t.sources[i].qubits.size()))
        throw std::invalid_argument("preparation width does not match source " + t.sources[i].id);
      if (preps[i].initial_state && preps[i].initial_state->rows() != dim_of(preps[i].layer.width))
        throw std::invalid_argument("initial state dimension does not match source " + t.sources[i].id);
    }
    for (std::size_t j = 0; j < meas.size(); ++j)
      if (meas[j].width != int(t.nodes[j].qubits.size()))
        throw std::invalid_argument("measurement width does not match node " + t.nodes[j].id);
  }

  std::string prep_name() const {
    std::string s;
    for (std::size_t i = 0; i < preps.size(); ++i) {
      if (i > 0 && preps[i].layer.name == preps[0].layer.name) continue;
      if (!s.empty()) s += "+";
      s += preps[i].layer.name;
    }
    return s;
  }
};

inline NetworkAnsatz make_ansatz(const Network& net, const std::string& prep, const std::string& meas) {
  NetworkAnsatz a;
  a.network = net;
  for (const auto& s : net.topology.sources) a.preps.push_back(make_prep(prep, int(s.qubits.size())));
  for (const auto& n : net.topology.nodes) a.meas.push_back(make_meas(meas, int(n.qubits.size())));
  a.validate();
  return a;
}

// |Phi+> sources and one RY per measured qubit.
inline NetworkAnsatz hardware_ansatz(const Network& net) { return make_ansatz(net, "phi_plus", "local_ry"); }

}  // namespace bellnet
