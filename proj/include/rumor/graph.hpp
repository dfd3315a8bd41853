#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rumor/errors.hpp"

namespace rumor {

using NodeId = std::uint32_t;

struct Edge {
  NodeId u;
  NodeId v;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Immutable simple undirected graph in compressed adjacency (CSR) form.
// Neighbor lists are sorted ascending. Optionally carries a super-node layout
// (flower and moderate-expander constructions group nodes into cliques).
class Graph {
 public:
  Graph() : offsets_(1, 0) {}

  // Builds from an arbitrary edge list: self-loops are dropped, duplicates and
  // reversed duplicates collapse to one undirected edge.
  static Graph from_edges(std::size_t n, std::vector<Edge> edges,
                          std::vector<std::uint32_t> super_layout = {}) {
    for (const auto& e : edges) {
      if (e.u >= n || e.v >= n) {
        throw UsageError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                         ") out of range for n=" + std::to_string(n));
      }
    }
    std::erase_if(edges, [](const Edge& e) { return e.u == e.v; });
    for (auto& e : edges) {
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    Graph g;
    g.offsets_.assign(n + 1, 0);
    for (const auto& e : edges) {
      ++g.offsets_[e.u + 1];
      ++g.offsets_[e.v + 1];
    }
    std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
    g.adjacency_.resize(2 * edges.size());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& e : edges) {
      g.adjacency_[cursor[e.u]++] = e.v;
      g.adjacency_[cursor[e.v]++] = e.u;
    }
    for (std::size_t v = 0; v < n; ++v) {
      auto first = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
      auto last = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
      std::sort(first, last);
    }
    g.num_edges_ = edges.size();

    if (!super_layout.empty()) {
      if (super_layout.size() != n) throw UsageError("super layout size must equal node count");
      g.num_super_ = *std::max_element(super_layout.begin(), super_layout.end()) + 1;
      g.super_of_ = std::move(super_layout);
    }
    return g;
  }

  std::size_t num_nodes() const noexcept { return offsets_.size() - 1; }
  std::size_t num_edges() const noexcept { return num_edges_; }

  std::span<const NodeId> neighbors(NodeId v) const {
    check(v);
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }

  std::size_t degree(NodeId v) const {
    check(v);
    return offsets_[v + 1] - offsets_[v];
  }

  // Position of v's first neighbor in the flat adjacency array. Slot
  // offset(v) + j holds the j-th neighbor of v; per-edge caches index by slot.
  std::size_t offset(NodeId v) const noexcept { return offsets_[v]; }
  std::span<const NodeId> adjacency() const noexcept { return adjacency_; }

  bool has_edge(NodeId u, NodeId v) const {
    const auto nb = neighbors(u);
    check(v);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  std::size_t max_degree() const {
    std::size_t best = 0;
    for (std::size_t v = 0; v < num_nodes(); ++v) best = std::max(best, offsets_[v + 1] - offsets_[v]);
    return best;
  }

  // True with *degree set when every node has the same degree.
  bool is_regular(std::size_t* common_degree = nullptr) const {
    if (num_nodes() == 0) return false;
    const std::size_t d0 = offsets_[1] - offsets_[0];
    for (std::size_t v = 1; v < num_nodes(); ++v) {
      if (offsets_[v + 1] - offsets_[v] != d0) return false;
    }
    if (common_degree) *common_degree = d0;
    return true;
  }

  bool has_super_layout() const noexcept { return !super_of_.empty(); }
  std::size_t num_super_nodes() const noexcept { return num_super_; }
  std::uint32_t super_node(NodeId v) const {
    check(v);
    if (super_of_.empty()) throw UsageError("graph has no super-node layout");
    return super_of_[v];
  }
  const std::vector<std::uint32_t>& super_layout() const noexcept { return super_of_; }

  // Deduplicated edge list, u < v, ascending.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges_);
    for (NodeId u = 0; u < num_nodes(); ++u) {
      for (NodeId v : neighbors(u)) {
        if (u < v) out.push_back({u, v});
      }
    }
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.offsets_ == b.offsets_ && a.adjacency_ == b.adjacency_ && a.super_of_ == b.super_of_;
  }

 private:
  void check(NodeId v) const {
    if (v >= num_nodes()) {
      throw UsageError("node id " + std::to_string(v) + " out of range [0," +
                       std::to_string(num_nodes()) + ")");
    }
  }

  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::size_t num_edges_ = 0;
  std::vector<std::uint32_t> super_of_;
  std::size_t num_super_ = 0;
};

inline std::size_t degree(const Graph& g, NodeId v) { return g.degree(v); }

// Subset of [0, n) with ascending iteration.
class NodeSet {
 public:
  NodeSet() = default;
  explicit NodeSet(std::size_t universe) : member_(universe, 0) {}
  NodeSet(std::size_t universe, std::span<const NodeId> nodes) : NodeSet(universe) {
    for (NodeId v : nodes) insert(v);
  }

  std::size_t universe() const noexcept { return member_.size(); }
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  bool contains(NodeId v) const { return v < member_.size() && member_[v] != 0; }

  void insert(NodeId v) {
    if (v >= member_.size()) throw UsageError("node id " + std::to_string(v) + " outside node set universe");
    if (!member_[v]) {
      member_[v] = 1;
      ++count_;
    }
  }

  void erase(NodeId v) {
    if (contains(v)) {
      member_[v] = 0;
      --count_;
    }
  }

  std::vector<NodeId> members() const {
    std::vector<NodeId> out;
    out.reserve(count_);
    for (NodeId v = 0; v < member_.size(); ++v) {
      if (member_[v]) out.push_back(v);
    }
    return out;
  }

  friend bool operator==(const NodeSet& a, const NodeSet& b) { return a.member_ == b.member_; }

 private:
  std::vector<std::uint8_t> member_;
  std::size_t count_ = 0;
};

// Exact value of the trust weight between two adjacent nodes.
struct Similarity {
  std::size_t numerator;
  std::size_t denominator;

  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};

inline std::size_t count_common_neighbors(const Graph& g, NodeId u, NodeId v) {
  const auto a = g.neighbors(u);
  const auto b = g.neighbors(v);
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return common;
}

// |closed N(u) ∩ closed N(v)| / |N(u) ∪ N(v)| for an edge {u, v}.
// For adjacent u != v the closed intersection is the common neighbors plus
// u and v themselves, and the open union contains both endpoints.
inline Similarity jaccard_similarity(const Graph& g, NodeId u, NodeId v) {
  if (!g.has_edge(u, v)) {
    throw UsageError("similarity requested for non-adjacent pair (" + std::to_string(u) + "," +
                     std::to_string(v) + ")");
  }
  const std::size_t common = count_common_neighbors(g, u, v);
  return {common + 2, g.degree(u) + g.degree(v) - common};
}

// Nodes outside `a` with at least one neighbor inside `a`.
inline NodeSet node_boundary(const Graph& g, const NodeSet& a) {
  if (a.universe() != g.num_nodes()) throw UsageError("node set universe does not match graph");
  NodeSet out(g.num_nodes());
  for (NodeId v : a.members()) {
    for (NodeId w : g.neighbors(v)) {
      if (!a.contains(w)) out.insert(w);
    }
  }
  return out;
}

// Precomputed similarity per adjacency slot, shared read-only by every
// replication running on the same graph.
class SimilarityTable {
 public:
  SimilarityTable() = default;

  explicit SimilarityTable(const Graph& g) : values_(g.adjacency().size()) {
    const std::size_t n = g.num_nodes();
    std::vector<std::uint8_t> mark(n, 0);
    // cursor[v] walks v's lower neighbors; they are met in increasing u below.
    std::vector<std::size_t> cursor(n);
    for (NodeId v = 0; v < n; ++v) cursor[v] = g.offset(v);
    for (NodeId u = 0; u < n; ++u) {
      const auto nu = g.neighbors(u);
      for (NodeId w : nu) mark[w] = 1;
      for (std::size_t j = 0; j < nu.size(); ++j) {
        const NodeId v = nu[j];
        if (v < u) continue;
        std::size_t common = 0;
        for (NodeId w : g.neighbors(v)) common += mark[w];
        const double s = static_cast<double>(common + 2) /
                         static_cast<double>(nu.size() + g.degree(v) - common);
        values_[g.offset(u) + j] = s;
        values_[cursor[v]++] = s;
      }
      for (NodeId w : nu) mark[w] = 0;
    }
  }

  double at_slot(std::size_t slot) const { return values_[slot]; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::vector<double> values_;
};

}  // namespace rumor
