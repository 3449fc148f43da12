#pragma once

// Closed-form reference values: Horodecki criterion, maximal star/chain
// scores from source states, partially classical strategies and analytic
// noise-robustness curves.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellnet/ansatz.hpp"
#include "bellnet/channels.hpp"
#include "bellnet/network.hpp"
#include "bellnet/qmath.hpp"

namespace bellnet {

using CorrelationMatrix = Mat3;

inline CorrelationMatrix correlation_matrix_T(const DensityMatrix& rho) {
  if (rho.num_qubits() != 2) throw std::invalid_argument("correlation_matrix_T: expected a two-qubit state");
  CorrelationMatrix t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const ComplexMatrix p = kron(pauli::by_index(i + 1), pauli::by_index(j + 1));
      cplx acc = 0.0;
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) acc += rho(r, c) * p(c, r);
      t[std::size_t(i)][std::size_t(j)] = acc.real();
    }
  return t;
}

// Eigenvalues of R = T^T T, descending.
inline std::array<double, 3> correlation_eigenvalues(const DensityMatrix& rho) {
  const auto t = correlation_matrix_T(rho);
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += t[std::size_t(k)][std::size_t(i)] * t[std::size_t(k)][std::size_t(j)];
      r[std::size_t(i)][std::size_t(j)] = acc;
    }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) r[std::size_t(j)][std::size_t(i)] = r[std::size_t(i)][std::size_t(j)];
  auto mu = eig3_sym_desc(r);
  for (auto& m : mu) m = std::max(0.0, m);
  return mu;
}

inline double horodecki_max_chsh(const DensityMatrix& rho) {
  const auto mu = correlation_eigenvalues(rho);
  return 2.0 * std::sqrt(mu[0] + mu[1]);
}

inline double max_star_score(const std::vector<DensityMatrix>& sources, int n) {
  if (n < 1 || sources.size() != std::size_t(n))
    throw std::invalid_argument("max_star_score: expected " + std::to_string(n) + " source states");
  double p1 = 1.0, p2 = 1.0;
  for (const auto& s : sources) {
    const auto mu = correlation_eigenvalues(s);
    p1 *= mu[0];
    p2 *= mu[1];
  }
  return std::sqrt(std::pow(p1, 1.0 / n) + std::pow(p2, 1.0 / n));
}

inline double max_chain_score(const std::vector<DensityMatrix>& sources, int n) {
  if (n < 2 || sources.size() != std::size_t(n))
    throw std::invalid_argument("max_chain_score: expected " + std::to_string(n) + " source states");
  double p1 = 1.0, p2 = 1.0;
  for (const auto& s : sources) {
    const auto mu = correlation_eigenvalues(s);
    p1 *= mu[0];
    p2 *= mu[1];
  }
  return std::sqrt(std::sqrt(p1) + std::sqrt(p2));
}

// Score of the n-star when k sources emit |00> and the rest emit Bell states.
inline double classical_source_star_score(int n, int k) {
  if (n < 1 || k < 0 || k > n) throw std::invalid_argument("classical_source_star_score: need 0 <= k <= n, n >= 1");
  return std::pow(std::numbers::sqrt2, double(n - k) / double(n));
}

// True when two-sided amplitude damping breaks CHSH nonlocality of every maximally entangled state.
inline bool amplitude_damping_breaking(double g1, double g2) {
  check_gamma(g1, "amplitude_damping_breaking");
  check_gamma(g2, "amplitude_damping_breaking");
  return 0.5 >= (1.0 - g1) * (1.0 - g2);
}

inline std::vector<cplx> phi_plus_ket() { return {std::numbers::sqrt2 / 2, 0.0, 0.0, std::numbers::sqrt2 / 2}; }
inline std::vector<cplx> psi_plus_ket() { return {0.0, std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2, 0.0}; }

inline DensityMatrix pure_density(const std::vector<cplx>& psi) {
  int n = 0;
  while (dim_of(n) < psi.size()) ++n;
  return DensityMatrix::unchecked(n, outer(psi, psi));
}

// Two-qubit state with independent channels on each qubit.
inline DensityMatrix apply_two_sided(const DensityMatrix& rho, const std::vector<ComplexMatrix>& k1,
                                     const std::vector<ComplexMatrix>& k2) {
  return apply_kraus(apply_kraus(rho, k1, {0}), k2, {1});
}

inline ComplexMatrix maxent_family_unitary(double theta, double phi, double omega) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return {{std::polar(c, -(phi + omega) / 2), -std::polar(s, (phi - omega) / 2)},
          {std::polar(s, -(phi - omega) / 2), std::polar(c, (phi + omega) / 2)}};
}

struct GridSearchResult {
  double value = 0.0;  // best Horodecki value found (a lower bound on the maximum)
  double theta = 0.0, phi = 0.0, omega = 0.0;
  std::size_t evaluations = 0;
};

// Maximizes the Horodecki value over (U (x) I)|Phi+> followed by the channel
// pair, on a resolution^3 grid with `passes` local refinements.
inline GridSearchResult maxent_gridsearch_oracle(const std::vector<ComplexMatrix>& k1,
                                                 const std::vector<ComplexMatrix>& k2, int resolution = 24,
                                                 int passes = 2) {
  if (resolution < 2) throw std::invalid_argument("maxent_gridsearch_oracle: resolution must be at least 2");
  const DensityMatrix bell = pure_density(phi_plus_ket());
  GridSearchResult best;
  best.value = -1.0;
  auto eval = [&](double th, double ph, double om) {
    const ComplexMatrix u = maxent_family_unitary(th, ph, om);
    const DensityMatrix rho = apply_two_sided(apply_unitary(bell, u, {0}), k1, k2);
    const double v = horodecki_max_chsh(rho);
    ++best.evaluations;
    if (v > best.value) {
      best.value = v;
      best.theta = th;
      best.phi = ph;
      best.omega = om;
    }
  };
  const double two_pi = 2.0 * std::numbers::pi;
  double width = two_pi;
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  for (int pass = 0; pass <= passes; ++pass) {
    const double step = (pass == 0) ? width / resolution : width / (resolution - 1);
    for (int a = 0; a < resolution; ++a)
      for (int b = 0; b < resolution; ++b)
        for (int c = 0; c < resolution; ++c) eval(lo[0] + a * step, lo[1] + b * step, lo[2] + c * step);
    width /= 4.0;
    lo = {best.theta - width / 2, best.phi - width / 2, best.omega - width / 2};
  }
  return best;
}

// ---------------------------------------------------------------------------
// Analytic curves.

struct CurveQuery {
  ChannelModel model = ChannelModel::kDepolarizingSource;
  NetworkKind kind = NetworkKind::kStar;
  int n = 1;
  Placement placement = Placement::kUniform;
  std::vector<double> gammas{0.0};
  std::string prep = "phi_plus";  // source state for colored noise: phi_plus or psi_plus
};

class UnsupportedCurve : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::vector<double> curve_gammas(const CurveQuery& q, std::size_t count) {
  NoiseSpec spec{q.model, q.placement, q.gammas};
  return placement_gammas(spec, count);
}

inline double product(const std::vector<double>& v) {
  double p = 1.0;
  for (double x : v) p *= x;
  return p;
}

inline double colored_source_chsh_normalized(const std::string& prep, double g) {
  std::vector<cplx> psi;
  if (prep == "phi_plus")
    psi = phi_plus_ket();
  else if (prep == "psi_plus")
    psi = psi_plus_ket();
  else
    throw UnsupportedCurve("colored-noise curve needs prep phi_plus or psi_plus");
  const DensityMatrix rho = apply_kraus(pure_density(psi), colored_noise(g), {0, 1});
  return 0.5 * horodecki_max_chsh(rho);
}

}  // namespace detail

inline std::string curve_description(const CurveQuery& q) {
  return to_string(q.model) + " " + (q.kind == NetworkKind::kStar ? "star" : "chain") + ":" + std::to_string(q.n) +
         " " + to_string(q.placement);
}

// Analytic maximal score (normalized CHSH scale for n = 1). Throws
// UnsupportedCurve for combinations without a closed form.
inline double curve(const CurveQuery& q) {
  const bool star = q.kind == NetworkKind::kStar;
  if (q.n < 1 || (!star && q.n < 2)) throw std::invalid_argument("curve: invalid network size");
  const int n = q.n;
  const double r2 = std::numbers::sqrt2;
  switch (q.model) {
    case ChannelModel::kDepolarizingSource: {
      auto g = detail::curve_gammas(q, std::size_t(n));
      double p = 1.0;
      for (double x : g) p *= std::abs(1.0 - 16.0 * x / 15.0);
      return star ? r2 * std::pow(p, 1.0 / n) : r2 * std::sqrt(p);
    }
    case ChannelModel::kWhiteNoiseDetector: {
      auto g = detail::curve_gammas(q, std::size_t(n + 1));
      double p = 1.0;
      for (double x : g) p *= (1.0 - x);
      return star ? r2 * std::pow(p, 1.0 / n) : r2 * std::sqrt(p);
    }
    case ChannelModel::kDephasing: {
      if (q.gammas.empty()) throw std::invalid_argument("curve: missing gamma");
      const double g = q.gammas[0];
      check_gamma(g, "dephasing");
      if (q.placement == Placement::kUniform) return std::sqrt(1.0 + (1.0 - g) * (1.0 - g));
      if (q.placement == Placement::kSingle) {
        const int m = star ? n : 2;
        return std::pow(std::sqrt(2.0 - g) * std::pow(2.0, (m - 1) / 2.0), 1.0 / m);
      }
      break;
    }
    case ChannelModel::kColored: {
      if (q.placement == Placement::kExplicit) break;
      auto g = detail::curve_gammas(q, std::size_t(n));
      std::vector<double> s;
      for (double x : g) s.push_back(detail::colored_source_chsh_normalized(q.prep, x));
      if (star) return std::pow(detail::product(s), 1.0 / n);
      // Chain form as printed: exterior sources by their CHSH value, interior
      // sources by mu_1 of their correlation matrix.
      double inner = 1.0;
      for (int i = 1; i + 1 < n; ++i) {
        std::vector<cplx> psi = q.prep == "psi_plus" ? psi_plus_ket() : phi_plus_ket();
        const DensityMatrix rho = apply_kraus(pure_density(psi), colored_noise(g[std::size_t(i)]), {0, 1});
        inner *= correlation_eigenvalues(rho)[0];
      }
      return std::sqrt(s.front() * s.back() * inner);
    }
    default: break;
  }
  throw UnsupportedCurve("no analytic curve for " + curve_description(q));
}

}  // namespace bellnet
