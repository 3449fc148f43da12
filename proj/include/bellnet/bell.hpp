#pragma once

// Bell-score functionals over correlator tables.
//
// Tables are indexed by network input with the central input y in the last
// (least significant) slot, so entry (x_1..x_k, y) lives at 2*xbits + y.

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellnet/network.hpp"

namespace bellnet {

enum class InequalityKind { kChsh, kStar, kChain };

struct Inequality {
  InequalityKind kind = InequalityKind::kChsh;
  int n = 1;
  bool normalized = false;  // CHSH only: report half the value

  static Inequality parse(const std::string& id) {
    if (id == "chsh") return {InequalityKind::kChsh, 1, false};
    if (id == "bilocal") return {InequalityKind::kStar, 2, false};
    const auto colon = id.find(':');
    if (colon != std::string::npos) {
      const std::string kind = id.substr(0, colon);
      int n = 0;
      try {
        std::size_t used = 0;
        n = std::stoi(id.substr(colon + 1), &used);
        if (used != id.size() - colon - 1) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw std::invalid_argument("inequality id '" + id + "' has a malformed size");
      }
      if (kind == "star" && n >= 1) return {InequalityKind::kStar, n, false};
      if (kind == "chain" && n >= 2) return {InequalityKind::kChain, n, false};
    }
    throw std::invalid_argument("unknown inequality id '" + id + "' (expected chsh, bilocal, star:n, chain:n)");
  }

  // Natural inequality of a network; CHSH for the 1-star.
  static Inequality for_network(const Network& net) {
    if (net.kind == NetworkKind::kChain) return {InequalityKind::kChain, net.n, false};
    if (net.n == 1) return {InequalityKind::kChsh, 1, false};
    return {InequalityKind::kStar, net.n, false};
  }

  std::string id() const {
    switch (kind) {
      case InequalityKind::kChsh: return normalized ? "chsh_normalized" : "chsh";
      case InequalityKind::kStar: return n == 2 ? "bilocal" : "star:" + std::to_string(n);
      case InequalityKind::kChain: return "chain:" + std::to_string(n);
    }
    return "?";
  }

  double classical_bound() const { return (kind == InequalityKind::kChsh && !normalized) ? 2.0 : 1.0; }
  double quantum_bound() const {
    return (kind == InequalityKind::kChsh && !normalized) ? 2.0 * std::numbers::sqrt2 : std::numbers::sqrt2;
  }

  // Number of exterior input slots in the correlator table.
  int exterior_slots() const {
    switch (kind) {
      case InequalityKind::kChsh: return 1;
      case InequalityKind::kStar: return n;
      case InequalityKind::kChain: return 2;
    }
    return 0;
  }

  void check_network(const Network& net) const {
    const int ext = net.num_exterior_slots();
    bool ok = true;
    for (int a : net.wiring.slot_arity) ok = ok && a == 2;
    ok = ok && ext == exterior_slots();
    if (kind == InequalityKind::kChain) ok = ok && (net.kind == NetworkKind::kChain ? net.n == n : n == 2 && net.n == 2);
    if (kind == InequalityKind::kStar) ok = ok && (net.kind == NetworkKind::kStar ? net.n == n : n == 2 && net.n == 2);
    if (kind == InequalityKind::kChsh) ok = ok && net.kind == NetworkKind::kStar && net.n == 1;
    if (!ok) throw std::invalid_argument("inequality " + id() + " does not apply to network " + net.name());
  }
};

struct BellScore {
  double value = 0.0;
  std::string id;
  double classical_bound = 0.0;
  double quantum_bound = 0.0;
};

inline void require_table_size(const std::vector<double>& c, int k) {
  if (c.size() != (std::size_t{1} << (k + 1)))
    throw std::invalid_argument("correlator table has " + std::to_string(c.size()) + " entries, expected " +
                                std::to_string(std::size_t{1} << (k + 1)));
}

// I_{k,y} = 2^-k sum_x (-1)^{y * |x|} C(x, y) over k exterior inputs.
inline double I_ny(const std::vector<double>& c, int k, int y) {
  require_table_size(c, k);
  if (y != 0 && y != 1) throw std::invalid_argument("I_ny: y must be 0 or 1");
  double acc = 0.0;
  const std::size_t nx = std::size_t{1} << k;
  for (std::size_t xb = 0; xb < nx; ++xb) {
    const double sign = (y == 1 && (std::popcount(xb) & 1)) ? -1.0 : 1.0;
    acc += sign * c[2 * xb + std::size_t(y)];
  }
  return acc / double(nx);
}

inline double chsh_raw(const std::vector<double>& c) {
  require_table_size(c, 1);
  return c[0] + c[1] + c[2] - c[3];
}

inline BellScore chsh_score(const std::vector<double>& c, bool normalized = false) {
  Inequality ineq{InequalityKind::kChsh, 1, normalized};
  const double s = std::abs(chsh_raw(c));
  return {normalized ? 0.5 * s : s, ineq.id(), ineq.classical_bound(), ineq.quantum_bound()};
}

inline double root_abs(double v, int n) { return std::pow(std::abs(v), 1.0 / double(n)); }

// d|I|^{1/n}/dI, zero where |I| < 1e-9.
inline double root_abs_derivative(double v, int n) {
  if (std::abs(v) < 1e-9) return 0.0;
  return (v > 0 ? 1.0 : -1.0) * (1.0 / double(n)) * std::pow(std::abs(v), 1.0 / double(n) - 1.0);
}

inline BellScore star_score(const std::vector<double>& c, int n) {
  Inequality ineq{InequalityKind::kStar, n, false};
  const double v = root_abs(I_ny(c, n, 0), n) + root_abs(I_ny(c, n, 1), n);
  return {v, ineq.id(), ineq.classical_bound(), ineq.quantum_bound()};
}

inline BellScore chain_score(const std::vector<double>& c, int n) {
  Inequality ineq{InequalityKind::kChain, n, false};
  const double v = root_abs(I_ny(c, 2, 0), 2) + root_abs(I_ny(c, 2, 1), 2);
  return {v, ineq.id(), ineq.classical_bound(), ineq.quantum_bound()};
}

inline double cost(double score) { return -score; }
inline double cost(const BellScore& s) { return -s.value; }

struct ScoreGradient {
  double value = 0.0;
  std::vector<double> d_correlators;  // dS/dC per table entry
};

inline ScoreGradient score_with_gradient(const Inequality& ineq, const std::vector<double>& c) {
  ScoreGradient g;
  g.d_correlators.assign(c.size(), 0.0);
  if (ineq.kind == InequalityKind::kChsh) {
    const double raw = chsh_raw(c);
    const double scale = ineq.normalized ? 0.5 : 1.0;
    g.value = scale * std::abs(raw);
    const double sgn = raw > 0 ? 1.0 : (raw < 0 ? -1.0 : 0.0);
    const double w[4] = {1.0, 1.0, 1.0, -1.0};
    for (int i = 0; i < 4; ++i) g.d_correlators[std::size_t(i)] = scale * sgn * w[i];
    return g;
  }
  const int k = ineq.exterior_slots();
  const int root = ineq.kind == InequalityKind::kStar ? ineq.n : 2;
  const std::size_t nx = std::size_t{1} << k;
  for (int y = 0; y < 2; ++y) {
    const double iy = I_ny(c, k, y);
    g.value += root_abs(iy, root);
    const double d = root_abs_derivative(iy, root);
    for (std::size_t xb = 0; xb < nx; ++xb) {
      const double sign = (y == 1 && (std::popcount(xb) & 1)) ? -1.0 : 1.0;
      g.d_correlators[2 * xb + std::size_t(y)] += d * sign / double(nx);
    }
  }
  return g;
}

inline BellScore score(const Inequality& ineq, const std::vector<double>& c) {
  switch (ineq.kind) {
    case InequalityKind::kChsh: return chsh_score(c, ineq.normalized);
    case InequalityKind::kStar: return star_score(c, ineq.n);
    case InequalityKind::kChain: return chain_score(c, ineq.n);
  }
  throw std::logic_error("score: unhandled inequality");
}

}  // namespace bellnet
