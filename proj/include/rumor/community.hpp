#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "rumor/errors.hpp"
#include "rumor/graph.hpp"
#include "rumor/rng.hpp"

namespace rumor {

struct Partition {
  std::vector<std::uint32_t> community_of;
  std::size_t community_count = 0;

  friend bool operator==(const Partition&, const Partition&) = default;
};

// Renumbers labels densely in order of first appearance by node id.
inline Partition make_partition(const std::vector<std::uint32_t>& labels) {
  Partition p;
  p.community_of.resize(labels.size());
  std::unordered_map<std::uint32_t, std::uint32_t> remap;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    auto [it, inserted] = remap.try_emplace(labels[v], static_cast<std::uint32_t>(remap.size()));
    p.community_of[v] = it->second;
  }
  p.community_count = remap.size();
  return p;
}

// Q = sum_c [ e_c / m - (deg_c / 2m)^2 ].
inline double modularity(const Graph& g, const Partition& p) {
  if (p.community_of.size() != g.num_nodes()) throw UsageError("partition does not cover the graph");
  const double m = static_cast<double>(g.num_edges());
  if (m == 0.0) return 0.0;
  std::vector<double> intra(p.community_count, 0.0), deg(p.community_count, 0.0);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const auto cu = p.community_of[u];
    deg[cu] += static_cast<double>(g.degree(u));
    for (NodeId v : g.neighbors(u)) {
      if (u < v && p.community_of[v] == cu) intra[cu] += 1.0;
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < p.community_count; ++c) {
    const double share = deg[c] / (2.0 * m);
    q += intra[c] / m - share * share;
  }
  return q;
}

struct LouvainOptions {
  // Upper bound on local-move sweeps per level.
  std::size_t max_passes = 1000;
  double min_gain = 1e-12;
};

struct LouvainTrace {
  // Modularity of the level graph after each local-move sweep, all levels in order.
  std::vector<double> pass_modularity;
  std::size_t levels = 0;
};

namespace detail {

// Weighted graph used between aggregation levels. Self-loop weight counts
// twice toward the node's strength, matching the unweighted convention.
struct WeightedGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;  // no self entries
  std::vector<double> self_loop;                                   // weight of internal edges
  std::vector<double> strength;                                    // sum of incident weight, loops twice
  double total_weight = 0.0;                                       // m

  std::size_t size() const { return adj.size(); }
};

inline WeightedGraph to_weighted(const Graph& g) {
  WeightedGraph w;
  const std::size_t n = g.num_nodes();
  w.adj.resize(n);
  w.self_loop.assign(n, 0.0);
  w.strength.assign(n, 0.0);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : g.neighbors(u)) w.adj[u].emplace_back(v, 1.0);
    w.strength[u] = static_cast<double>(g.degree(u));
  }
  w.total_weight = static_cast<double>(g.num_edges());
  return w;
}

inline double level_modularity(const WeightedGraph& w, const std::vector<std::uint32_t>& comm,
                               std::size_t count) {
  if (w.total_weight == 0.0) return 0.0;
  std::vector<double> in(count, 0.0), tot(count, 0.0);
  for (std::size_t u = 0; u < w.size(); ++u) {
    tot[comm[u]] += w.strength[u];
    in[comm[u]] += 2.0 * w.self_loop[u];
    for (const auto& [v, wt] : w.adj[u])
      if (comm[v] == comm[u]) in[comm[u]] += wt;
  }
  const double m2 = 2.0 * w.total_weight;
  double q = 0.0;
  for (std::size_t c = 0; c < count; ++c) q += in[c] / m2 - (tot[c] / m2) * (tot[c] / m2);
  return q;
}

// One local-move phase. Returns true when any node moved.
inline bool local_moves(const WeightedGraph& w, std::vector<std::uint32_t>& comm, Rng& rng,
                        const LouvainOptions& opts, LouvainTrace* trace) {
  const std::size_t n = w.size();
  const double m2 = 2.0 * w.total_weight;
  if (m2 == 0.0) return false;
  std::vector<double> tot(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) tot[comm[u]] += w.strength[u];

  std::vector<double> link(n, 0.0);
  std::vector<std::uint32_t> touched;
  std::vector<std::uint32_t> order(n);
  bool any_move = false;

  for (std::size_t pass = 0; pass < opts.max_passes; ++pass) {
    for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order.begin(), order.end());
    bool moved = false;
    for (const std::uint32_t u : order) {
      const std::uint32_t own = comm[u];
      const double k = w.strength[u];
      for (const auto& [v, wt] : w.adj[u]) {
        const auto c = comm[v];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += wt;
      }
      tot[own] -= k;
      // Gain of inserting u into community c, up to the constant factor 1/m.
      auto gain = [&](std::uint32_t c) { return link[c] - tot[c] * k / m2; };
      const double stay = gain(own);
      std::sort(touched.begin(), touched.end());
      std::uint32_t best = own;
      double best_gain = -std::numeric_limits<double>::infinity();
      for (const auto c : touched) {
        if (c == own) continue;
        const double gc = gain(c);
        if (gc > best_gain + opts.min_gain) {
          best = c;
          best_gain = gc;
        }
      }
      if (best_gain <= stay + opts.min_gain) best = own;
      tot[best] += k;
      if (best != own) {
        comm[u] = best;
        moved = true;
      }
      for (const auto c : touched) link[c] = 0.0;
      touched.clear();
    }
    if (trace) trace->pass_modularity.push_back(level_modularity(w, comm, n));
    if (!moved) break;
    any_move = true;
  }
  return any_move;
}

inline WeightedGraph aggregate(const WeightedGraph& w, const std::vector<std::uint32_t>& comm,
                               std::size_t count) {
  WeightedGraph out;
  out.adj.resize(count);
  out.self_loop.assign(count, 0.0);
  out.strength.assign(count, 0.0);
  out.total_weight = w.total_weight;
  std::vector<std::unordered_map<std::uint32_t, double>> acc(count);
  for (std::size_t u = 0; u < w.size(); ++u) {
    const auto cu = comm[u];
    out.strength[cu] += w.strength[u];
    out.self_loop[cu] += w.self_loop[u];
    for (const auto& [v, wt] : w.adj[u]) {
      const auto cv = comm[v];
      if (cu == cv) {
        // Each internal edge is seen from both endpoints.
        out.self_loop[cu] += wt / 2.0;
      } else {
        acc[cu][cv] += wt;
      }
    }
  }
  for (std::size_t c = 0; c < count; ++c) {
    out.adj[c].assign(acc[c].begin(), acc[c].end());
    std::sort(out.adj[c].begin(), out.adj[c].end());
  }
  return out;
}

}  // namespace detail

// Multi-level greedy modularity optimization (Louvain). Nodes are visited in
// a seeded random order per sweep; among equal-gain targets the lowest
// community index wins; a node moves only for a strictly positive gain.
inline Partition louvain(const Graph& g, RngSeed seed, const LouvainOptions& opts = {},
                         LouvainTrace* trace = nullptr) {
  if (g.num_nodes() == 0) throw UsageError("louvain requires a non-empty graph");
  Rng rng(seed);
  auto level = detail::to_weighted(g);
  std::vector<std::uint32_t> flat(g.num_nodes());
  for (std::uint32_t v = 0; v < flat.size(); ++v) flat[v] = v;

  while (true) {
    std::vector<std::uint32_t> comm(level.size());
    for (std::uint32_t v = 0; v < comm.size(); ++v) comm[v] = v;
    const bool moved = detail::local_moves(level, comm, rng, opts, trace);
    if (trace) ++trace->levels;
    if (!moved) break;
    const auto dense = make_partition(comm);
    for (auto& f : flat) f = dense.community_of[f];
    level = detail::aggregate(level, dense.community_of, dense.community_count);
  }
  return make_partition(flat);
}

}  // namespace rumor
