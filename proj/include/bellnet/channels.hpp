#pragma once

// Noise channels: Kraus sets for qubit and source noise, classical
// post-processing maps for detector noise, and the placement grammar that
// attaches them to a network.

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellnet/network.hpp"
#include "bellnet/qmath.hpp"

namespace bellnet {

// Column-stochastic map on a node's (+1, -1) outcome vector; column = true outcome.
using StochasticMatrix2 = std::array<std::array<double, 2>, 2>;

inline void check_gamma(double g, const std::string& what) {
  if (!(g >= 0.0 && g <= 1.0))
    throw std::invalid_argument(what + ": gamma " + std::to_string(g) + " outside [0, 1]");
}

inline std::vector<ComplexMatrix> depolarizing_qubit(double g) {
  check_gamma(g, "depolarizing_qubit");
  const double a = std::sqrt(1.0 - g), b = std::sqrt(g / 3.0);
  return {pauli::I() * cplx(a), pauli::X() * cplx(b), pauli::Y() * cplx(b), pauli::Z() * cplx(b)};
}

inline std::vector<ComplexMatrix> depolarizing_source(double g) {
  check_gamma(g, "depolarizing_source");
  std::vector<ComplexMatrix> out;
  out.push_back(ComplexMatrix::identity(4) * cplx(std::sqrt(1.0 - g)));
  const double b = std::sqrt(g / 15.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != 0 || j != 0) out.push_back(kron(pauli::by_index(i), pauli::by_index(j)) * cplx(b));
  return out;
}

inline std::vector<ComplexMatrix> dephasing(double g) {
  check_gamma(g, "dephasing");
  return {ComplexMatrix{{1.0, 0.0}, {0.0, std::sqrt(1.0 - g)}}, ComplexMatrix{{0.0, 0.0}, {0.0, std::sqrt(g)}}};
}

inline std::vector<ComplexMatrix> amplitude_damping(double g) {
  check_gamma(g, "amplitude_damping");
  return {ComplexMatrix{{1.0, 0.0}, {0.0, std::sqrt(1.0 - g)}}, ComplexMatrix{{0.0, std::sqrt(g)}, {0.0, 0.0}}};
}

namespace bell_basis {
inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline std::vector<cplx> phi_plus() { return {kInvSqrt2, 0.0, 0.0, kInvSqrt2}; }
inline std::vector<cplx> phi_minus() { return {kInvSqrt2, 0.0, 0.0, -kInvSqrt2}; }
inline std::vector<cplx> psi_plus() { return {0.0, kInvSqrt2, kInvSqrt2, 0.0}; }
inline std::vector<cplx> psi_minus() { return {0.0, kInvSqrt2, -kInvSqrt2, 0.0}; }
}  // namespace bell_basis

// (1-g) X + (g/2) Tr[X] (|Psi+><Psi+| + |Psi-><Psi-|), as a linear map on 4x4 operators.
inline ComplexMatrix colored_noise_map(const ComplexMatrix& x, double g) {
  ComplexMatrix out = x * cplx(1.0 - g);
  const cplx t = x.trace();
  out(1, 1) += 0.5 * g * t;
  out(2, 2) += 0.5 * g * t;
  return out;
}

// The five operators as commonly printed for this channel. This set is
// not trace preserving for g > 0 (sum K^dag K = (1 - g/2) I), which is why
// colored_noise() derives its Kraus set from the Choi matrix instead.
inline std::vector<ComplexMatrix> colored_noise_printed(double g) {
  check_gamma(g, "colored_noise");
  using namespace bell_basis;
  const cplx s(std::sqrt(g / 2.0));
  return {ComplexMatrix::identity(4) * cplx(std::sqrt(1.0 - g)),
          outer(psi_plus(), phi_plus()) * s,
          outer(psi_minus(), phi_minus()) * s,
          outer(psi_plus(), psi_plus()) * s,
          outer(psi_plus(), psi_minus()) * s};
}

// Choi matrix J = sum_ij |i><j| (x) map(|i><j|).
inline ComplexMatrix choi_matrix(const std::function<ComplexMatrix(const ComplexMatrix&)>& map, std::size_t d) {
  ComplexMatrix j(d * d, d * d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      ComplexMatrix e(d, d);
      e(a, b) = 1.0;
      const ComplexMatrix img = map(e);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) j(a * d + r, b * d + c) = img(r, c);
    }
  return j;
}

// Kraus operators K_k[o][i] = sqrt(lambda_k) v_k[i*d + o] from the positive eigenpairs of J.
inline std::vector<ComplexMatrix> kraus_from_choi(const ComplexMatrix& j, std::size_t d, double cutoff = 1e-13) {
  const auto eig = hermitian_eigen(j);
  if (eig.values.front() < -kValidationTol) throw std::invalid_argument("kraus_from_choi: map is not completely positive");
  std::vector<ComplexMatrix> out;
  for (std::size_t k = 0; k < eig.values.size(); ++k) {
    if (eig.values[k] <= cutoff) continue;
    const double s = std::sqrt(eig.values[k]);
    ComplexMatrix op(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t o = 0; o < d; ++o) op(o, i) = s * eig.vectors(i * d + o, k);
    out.push_back(std::move(op));
  }
  return out;
}

inline std::vector<ComplexMatrix> colored_noise(double g) {
  auto printed = colored_noise_printed(g);
  if (kraus_complete(printed, kValidationTol)) return printed;
  auto ops = kraus_from_choi(choi_matrix([g](const ComplexMatrix& x) { return colored_noise_map(x, g); }, 4), 4);
  if (!kraus_complete(ops, kValidationTol)) throw std::logic_error("colored_noise: Choi decomposition is incomplete");
  return ops;
}

inline StochasticMatrix2 white_noise_detector(double g) {
  check_gamma(g, "white_noise_detector");
  return {{{1.0 - g / 2.0, g / 2.0}, {g / 2.0, 1.0 - g / 2.0}}};
}

inline StochasticMatrix2 biased_detector(double g) {
  check_gamma(g, "biased_detector");
  return {{{1.0, g}, {0.0, 1.0 - g}}};
}

inline bool column_stochastic(const StochasticMatrix2& m, double tol = kSelfCheckTol) {
  for (int c = 0; c < 2; ++c) {
    if (m[0][c] < -tol || m[1][c] < -tol) return false;
    if (std::abs(m[0][c] + m[1][c] - 1.0) > tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// System-environment realizations: the system qubit is local qubit 0 and a
// fresh |0> ancilla is local qubit 1.

inline ComplexMatrix controlled_ry(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  ComplexMatrix u = ComplexMatrix::identity(4);
  u(2, 2) = c;
  u(2, 3) = -s;
  u(3, 2) = s;
  u(3, 3) = c;
  return u;
}

inline ComplexMatrix dephasing_ancilla_unitary(double g) {
  check_gamma(g, "dephasing");
  return controlled_ry(2.0 * std::asin(std::sqrt(g)));
}

inline ComplexMatrix amplitude_damping_ancilla_unitary(double g) {
  check_gamma(g, "amplitude_damping");
  ComplexMatrix cnot_env_to_sys(4, 4);  // control = ancilla (qubit 1), target = system (qubit 0)
  cnot_env_to_sys(0, 0) = 1.0;
  cnot_env_to_sys(3, 1) = 1.0;
  cnot_env_to_sys(2, 2) = 1.0;
  cnot_env_to_sys(1, 3) = 1.0;
  return cnot_env_to_sys * controlled_ry(2.0 * std::asin(std::sqrt(g)));
}

// Appends an ancilla as the last qubit, applies u on (target, ancilla), and traces the ancilla out.
inline DensityMatrix apply_via_ancilla(const DensityMatrix& state, const ComplexMatrix& u, int target) {
  const int n = state.num_qubits();
  const DensityMatrix extended = tensor(state, DensityMatrix::zero_state(1));
  const std::vector<int> targets{target, n};
  const DensityMatrix evolved = apply_unitary(extended, u, targets);
  std::vector<int> keep(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) keep[std::size_t(q)] = q;
  return partial_trace(evolved, keep);
}

inline Ket apply_via_ancilla(const Ket& state, const ComplexMatrix& u, int target) {
  std::vector<cplx> amps(state.amplitudes().size() * 2, 0.0);
  for (std::size_t i = 0; i < state.amplitudes().size(); ++i) amps[2 * i] = state.amplitudes()[i];
  const int n = state.num_qubits();
  const std::vector<int> targets{target, n};
  return apply_unitary(Ket(n + 1, std::move(amps)), u, targets);
}

// ---------------------------------------------------------------------------
// Noise model attached to a network.

enum class ChannelModel {
  kDepolarizingQubit,
  kDepolarizingSource,
  kDephasing,
  kAmplitudeDamping,
  kColored,
  kWhiteNoiseDetector,
  kBiasedDetector,
};

enum class Placement { kSingle, kUniform, kExplicit };

inline const std::vector<std::string>& channel_model_names() {
  static const std::vector<std::string> names{"depolarizing_qubit", "depolarizing_source", "dephasing",
                                              "amplitude_damping", "colored", "white_noise_detector",
                                              "biased_detector"};
  return names;
}

inline std::string to_string(ChannelModel m) { return channel_model_names()[std::size_t(m)]; }

inline ChannelModel parse_channel_model(const std::string& s) {
  const auto& names = channel_model_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == s) return ChannelModel(i);
  throw std::invalid_argument("unknown noise model '" + s + "'");
}

inline std::string to_string(Placement p) {
  switch (p) {
    case Placement::kSingle: return "single";
    case Placement::kUniform: return "uniform";
    case Placement::kExplicit: return "explicit";
  }
  return "?";
}

inline Placement parse_placement(const std::string& s) {
  if (s == "single") return Placement::kSingle;
  if (s == "uniform") return Placement::kUniform;
  if (s == "explicit") return Placement::kExplicit;
  throw std::invalid_argument("unknown placement '" + s + "' (expected single, uniform, explicit)");
}

enum class ChannelScope { kQubit, kSource, kDetector };

inline ChannelScope scope_of(ChannelModel m) {
  switch (m) {
    case ChannelModel::kDepolarizingQubit:
    case ChannelModel::kDephasing:
    case ChannelModel::kAmplitudeDamping: return ChannelScope::kQubit;
    case ChannelModel::kDepolarizingSource:
    case ChannelModel::kColored: return ChannelScope::kSource;
    case ChannelModel::kWhiteNoiseDetector:
    case ChannelModel::kBiasedDetector: return ChannelScope::kDetector;
  }
  return ChannelScope::kQubit;
}

inline std::vector<ComplexMatrix> kraus_for(ChannelModel m, double g) {
  switch (m) {
    case ChannelModel::kDepolarizingQubit: return depolarizing_qubit(g);
    case ChannelModel::kDepolarizingSource: return depolarizing_source(g);
    case ChannelModel::kDephasing: return dephasing(g);
    case ChannelModel::kAmplitudeDamping: return amplitude_damping(g);
    case ChannelModel::kColored: return colored_noise(g);
    default: throw std::invalid_argument(to_string(m) + " is not a Kraus channel");
  }
}

inline StochasticMatrix2 detector_map_for(ChannelModel m, double g) {
  switch (m) {
    case ChannelModel::kWhiteNoiseDetector: return white_noise_detector(g);
    case ChannelModel::kBiasedDetector: return biased_detector(g);
    default: throw std::invalid_argument(to_string(m) + " is not a detector map");
  }
}

struct NoiseSpec {
  ChannelModel model = ChannelModel::kDepolarizingQubit;
  Placement placement = Placement::kUniform;
  // single/uniform read gammas[0]; explicit gives one value per element.
  std::vector<double> gammas{0.0};
};

struct KrausChannel {
  std::string label;
  std::vector<ComplexMatrix> kraus;
  std::vector<int> targets;  // global qubit indices
};

struct DetectorMap {
  std::size_t node = 0;
  StochasticMatrix2 map{};
};

struct NoiseModel {
  std::vector<KrausChannel> channels;
  std::vector<DetectorMap> detectors;

  bool has_kraus() const { return !channels.empty(); }
  bool empty() const { return channels.empty() && detectors.empty(); }

  NoiseModel& append(const NoiseModel& o) {
    channels.insert(channels.end(), o.channels.begin(), o.channels.end());
    detectors.insert(detectors.end(), o.detectors.begin(), o.detectors.end());
    return *this;
  }
};

// Per-element gamma values implied by a placement for `count` elements.
inline std::vector<double> placement_gammas(const NoiseSpec& spec, std::size_t count) {
  if (spec.gammas.empty()) throw std::invalid_argument("noise spec has no gamma values");
  for (double g : spec.gammas) check_gamma(g, to_string(spec.model));
  std::vector<double> out(count, 0.0);
  switch (spec.placement) {
    case Placement::kSingle: out[0] = spec.gammas[0]; break;
    case Placement::kUniform: std::fill(out.begin(), out.end(), spec.gammas[0]); break;
    case Placement::kExplicit:
      if (spec.gammas.size() != count)
        throw std::invalid_argument("explicit placement needs " + std::to_string(count) + " gamma values, got " +
                                    std::to_string(spec.gammas.size()));
      out = spec.gammas;
      break;
  }
  return out;
}

inline NoiseModel build_noise_model(const Network& net, const NoiseSpec& spec) {
  NoiseModel model;
  const auto& t = net.topology;
  switch (scope_of(spec.model)) {
    case ChannelScope::kQubit: {
      const auto g = placement_gammas(spec, std::size_t(t.num_qubits));
      for (int q = 0; q < t.num_qubits; ++q) {
        if (g[std::size_t(q)] == 0.0) continue;
        model.channels.push_back({to_string(spec.model) + "@q" + std::to_string(q),
                                  kraus_for(spec.model, g[std::size_t(q)]), {q}});
      }
      break;
    }
    case ChannelScope::kSource: {
      const auto g = placement_gammas(spec, t.sources.size());
      for (std::size_t i = 0; i < t.sources.size(); ++i) {
        if (g[i] == 0.0) continue;
        if (t.sources[i].qubits.size() != 2)
          throw std::invalid_argument(to_string(spec.model) + " requires two-qubit sources");
        model.channels.push_back({to_string(spec.model) + "@" + t.sources[i].id, kraus_for(spec.model, g[i]),
                                  t.sources[i].qubits});
      }
      break;
    }
    case ChannelScope::kDetector: {
      const auto g = placement_gammas(spec, t.nodes.size());
      for (std::size_t j = 0; j < t.nodes.size(); ++j) {
        if (g[j] == 0.0) continue;
        model.detectors.push_back({j, detector_map_for(spec.model, g[j])});
      }
      break;
    }
  }
  return model;
}

}  // namespace bellnet
