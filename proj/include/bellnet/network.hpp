#pragma once

// n-local network topology, input wiring and settings-vector layout.

#include <cstddef>
#include <numeric>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellnet {

enum class NetworkKind { kStar, kChain };

struct Source {
  std::string id;
  std::vector<int> qubits;
};

struct Node {
  std::string id;
  std::vector<int> qubits;
  int input_arity = 2;
};

struct Link {
  std::string id;
  std::vector<int> qubits;
};

struct Topology {
  int num_qubits = 0;
  std::vector<Source> sources;
  std::vector<Node> nodes;
  std::vector<Link> links;

  void validate() const {
    auto check_partition = [&](auto const& groups, const char* what) {
      std::set<int> seen;
      std::size_t total = 0;
      for (const auto& g : groups) {
        if (g.qubits.empty()) throw std::invalid_argument(std::string(what) + " with no qubits");
        for (int q : g.qubits) {
          if (q < 0 || q >= num_qubits)
            throw std::invalid_argument(std::string(what) + " qubit out of range");
          seen.insert(q);
          ++total;
        }
      }
      if (total != seen.size()) throw std::invalid_argument(std::string(what) + " qubit sets overlap");
      if (int(seen.size()) != num_qubits)
        throw std::invalid_argument(std::string(what) + " qubits do not cover the register");
    };
    check_partition(sources, "source");
    check_partition(nodes, "node");
  }

  int source_of_qubit(int q) const {
    for (std::size_t i = 0; i < sources.size(); ++i)
      for (int s : sources[i].qubits)
        if (s == q) return int(i);
    throw std::invalid_argument("qubit " + std::to_string(q) + " belongs to no source");
  }
};

// Network inputs are vectors over "slots"; each node reads exactly one slot.
// Inputs are enumerated lexicographically with slot 0 most significant.
struct InputWiring {
  std::vector<int> slot_arity;
  std::vector<int> node_slot;

  std::size_t num_inputs() const {
    std::size_t n = 1;
    for (int a : slot_arity) n *= std::size_t(a);
    return n;
  }

  std::vector<int> input(std::size_t index) const {
    if (index >= num_inputs()) throw std::out_of_range("network input index out of range");
    std::vector<int> x(slot_arity.size());
    for (std::size_t s = slot_arity.size(); s-- > 0;) {
      x[s] = int(index % std::size_t(slot_arity[s]));
      index /= std::size_t(slot_arity[s]);
    }
    return x;
  }

  std::size_t index_of(std::span<const int> x) const {
    validate_input(x);
    std::size_t idx = 0;
    for (std::size_t s = 0; s < slot_arity.size(); ++s) idx = idx * std::size_t(slot_arity[s]) + std::size_t(x[s]);
    return idx;
  }

  int node_input(std::span<const int> x, std::size_t node) const { return x[std::size_t(node_slot.at(node))]; }

  void validate_input(std::span<const int> x) const {
    if (x.size() != slot_arity.size()) throw std::invalid_argument("network input has wrong length");
    for (std::size_t s = 0; s < x.size(); ++s)
      if (x[s] < 0 || x[s] >= slot_arity[s])
        throw std::invalid_argument("network input value out of range in slot " + std::to_string(s));
  }
};

struct Network {
  NetworkKind kind = NetworkKind::kStar;
  int n = 1;  // number of sources
  Topology topology;
  InputWiring wiring;
  // Number of leading input slots that belong to exterior nodes; the last slot is y.
  int num_exterior_slots() const { return int(wiring.slot_arity.size()) - 1; }
  std::string name() const {
    if (kind == NetworkKind::kStar) {
      if (n == 1) return "chsh";
      if (n == 2) return "bilocal";
      return "star:" + std::to_string(n);
    }
    return "chain:" + std::to_string(n);
  }
};

namespace detail {
inline void add_qubit_links(Topology& t) {
  for (int q = 0; q < t.num_qubits; ++q) t.links.push_back({"L" + std::to_string(q + 1), {q}});
}
}  // namespace detail

// Source i owns qubits {2i, 2i+1}. Exterior node A1 measures the first qubit of
// source 1; every other exterior node A_i measures the second qubit of source i.
// The central node B holds the remaining qubit of each source, in source order.
// For n = 2 this gives A1={q0}, B={q1,q2}, A2={q3}, the same layout as the 2-chain.
inline Network build_star(int n) {
  if (n < 1) throw std::invalid_argument("build_star: n must be at least 1");
  Network net;
  net.kind = NetworkKind::kStar;
  net.n = n;
  Topology& t = net.topology;
  t.num_qubits = 2 * n;
  for (int i = 0; i < n; ++i) t.sources.push_back({"S" + std::to_string(i + 1), {2 * i, 2 * i + 1}});
  std::vector<int> central;
  for (int i = 0; i < n; ++i) {
    const int exterior = (i == 0) ? 0 : 2 * i + 1;
    const int inner = (i == 0) ? 1 : 2 * i;
    t.nodes.push_back({"A" + std::to_string(i + 1), {exterior}, 2});
    central.push_back(inner);
  }
  t.nodes.push_back({"B", central, 2});
  detail::add_qubit_links(t);
  net.wiring.slot_arity.assign(std::size_t(n) + 1, 2);
  for (int i = 0; i <= n; ++i) net.wiring.node_slot.push_back(i);
  t.validate();
  return net;
}

// Sources {2i, 2i+1}; A1={q0}, A2={q_{2n-1}}; interior B_j={q_{2j-1}, q_{2j}}
// (0-based) for j = 1..n-1, all reading the shared input y.
inline Network build_chain(int n) {
  if (n < 2) throw std::invalid_argument("build_chain: n must be at least 2");
  Network net;
  net.kind = NetworkKind::kChain;
  net.n = n;
  Topology& t = net.topology;
  t.num_qubits = 2 * n;
  for (int i = 0; i < n; ++i) t.sources.push_back({"S" + std::to_string(i + 1), {2 * i, 2 * i + 1}});
  t.nodes.push_back({"A1", {0}, 2});
  t.nodes.push_back({"A2", {2 * n - 1}, 2});
  for (int j = 1; j < n; ++j) t.nodes.push_back({"B" + std::to_string(j), {2 * j - 1, 2 * j}, 2});
  detail::add_qubit_links(t);
  net.wiring.slot_arity = {2, 2, 2};
  net.wiring.node_slot = {0, 1};
  for (int j = 1; j < n; ++j) net.wiring.node_slot.push_back(2);
  t.validate();
  return net;
}

// Parses "chsh", "bilocal", "star:n", "chain:n".
inline Network build_network(const std::string& id) {
  if (id == "chsh") return build_star(1);
  if (id == "bilocal") return build_star(2);
  const auto colon = id.find(':');
  if (colon != std::string::npos) {
    const std::string kind = id.substr(0, colon);
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(id.substr(colon + 1), &used);
      if (used != id.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw std::invalid_argument("network id '" + id + "' has a malformed size");
    }
    if (kind == "star") return build_star(n);
    if (kind == "chain") return build_chain(n);
  }
  throw std::invalid_argument("unknown network id '" + id + "' (expected chsh, bilocal, star:n, chain:n)");
}

struct Range {
  std::size_t offset = 0;
  std::size_t count = 0;
};

class SettingsLayout {
 public:
  SettingsLayout() = default;
  SettingsLayout(std::vector<int> source_counts, std::vector<std::vector<int>> node_counts)
      : source_counts_(std::move(source_counts)), node_counts_(std::move(node_counts)) {
    std::size_t off = 0;
    for (int c : source_counts_) {
      if (c < 0) throw std::invalid_argument("negative parameter count");
      source_ranges_.push_back({off, std::size_t(c)});
      off += std::size_t(c);
    }
    for (const auto& per_input : node_counts_) {
      std::vector<Range> r;
      for (int c : per_input) {
        if (c < 0) throw std::invalid_argument("negative parameter count");
        r.push_back({off, std::size_t(c)});
        off += std::size_t(c);
      }
      node_ranges_.push_back(std::move(r));
    }
    total_ = off;
  }

  std::size_t size() const { return total_; }
  std::size_t num_sources() const { return source_ranges_.size(); }
  std::size_t num_nodes() const { return node_ranges_.size(); }
  Range source_range(std::size_t i) const { return source_ranges_.at(i); }
  Range node_range(std::size_t j, int input) const { return node_ranges_.at(j).at(std::size_t(input)); }
  std::size_t node_arity(std::size_t j) const { return node_ranges_.at(j).size(); }

  bool operator==(const SettingsLayout& o) const {
    return source_counts_ == o.source_counts_ && node_counts_ == o.node_counts_;
  }

 private:
  std::vector<int> source_counts_;
  std::vector<std::vector<int>> node_counts_;
  std::vector<Range> source_ranges_;
  std::vector<std::vector<Range>> node_ranges_;
  std::size_t total_ = 0;
};

struct SettingsVector {
  SettingsLayout layout;
  std::vector<double> values;

  SettingsVector() = default;
  SettingsVector(SettingsLayout l, std::vector<double> v) : layout(std::move(l)), values(std::move(v)) {
    if (values.size() != layout.size()) throw std::invalid_argument("settings length does not match layout");
  }
};

// Parameter views for one network input.
struct SettingsSlice {
  std::vector<std::span<const double>> sources;
  std::vector<std::span<const double>> nodes;
};

inline SettingsSlice slice_settings(const SettingsLayout& layout, std::span<const double> values,
                                    const InputWiring& wiring, std::span<const int> x) {
  if (values.size() != layout.size()) throw std::invalid_argument("settings length does not match layout");
  wiring.validate_input(x);
  if (wiring.node_slot.size() != layout.num_nodes())
    throw std::invalid_argument("wiring and layout disagree on node count");
  SettingsSlice s;
  for (std::size_t i = 0; i < layout.num_sources(); ++i) {
    const auto r = layout.source_range(i);
    s.sources.push_back(values.subspan(r.offset, r.count));
  }
  for (std::size_t j = 0; j < layout.num_nodes(); ++j) {
    const int v = wiring.node_input(x, j);
    if (std::size_t(v) >= layout.node_arity(j)) throw std::invalid_argument("node input out of range");
    const auto r = layout.node_range(j, v);
    s.nodes.push_back(values.subspan(r.offset, r.count));
  }
  return s;
}

inline SettingsSlice slice_settings(const SettingsVector& theta, const InputWiring& wiring,
                                    std::span<const int> x) {
  return slice_settings(theta.layout, theta.values, wiring, x);
}

}  // namespace bellnet
