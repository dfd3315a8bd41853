#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "rumor/errors.hpp"
#include "rumor/graph.hpp"
#include "rumor/rng.hpp"

namespace rumor {

struct ErSpec {
  std::size_t n = 0;
  double p = 0.0;
};

// r == 0 selects the divisor of n nearest to ln(n)^2.
struct FlowerSpec {
  std::size_t n = 0;
  std::size_t r = 0;
};

struct RandomRegularSpec {
  std::size_t nodes = 0;   // N
  std::size_t degree = 0;  // D
};

// clique_size == 0 selects the divisor of n nearest to ln(n)^2.
struct ModerateExpanderSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t clique_size = 0;
};

struct HrgSpec {
  std::size_t n = 0;
  double target_avg_degree = 0.0;
  double beta = 2.5;
  double temperature = 0.6;
};

using GenSpec = std::variant<ErSpec, FlowerSpec, RandomRegularSpec, ModerateExpanderSpec, HrgSpec>;

// Divisor of n closest to ln(n)^2; ties go to the smaller divisor.
inline std::size_t nearest_divisor_to_log_squared(std::size_t n) {
  if (n == 0) throw UsageError("n must be positive");
  const double target = std::pow(std::log(static_cast<double>(n)), 2.0);
  std::size_t best = 1;
  double best_dist = std::abs(1.0 - target);
  for (std::size_t r = 2; r <= n; ++r) {
    if (n % r != 0) continue;
    const double dist = std::abs(static_cast<double>(r) - target);
    if (dist < best_dist) {
      best = r;
      best_dist = dist;
    }
  }
  return best;
}

// G(n, p) with geometric skipping over the lexicographic pair sequence.
inline Graph gen_er(std::size_t n, double p, RngSeed seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("ER edge probability must lie in [0,1]");
  std::vector<Edge> edges;
  if (p == 0.0 || n < 2) return Graph::from_edges(n, std::move(edges));
  if (p == 1.0) {
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v) edges.push_back({u, v});
    return Graph::from_edges(n, std::move(edges));
  }
  Rng rng(seed);
  edges.reserve(static_cast<std::size_t>(static_cast<double>(n) * static_cast<double>(n - 1) / 2.0 * p * 1.05) + 16);
  const double log_q = std::log1p(-p);
  std::int64_t v = 1;
  std::int64_t w = -1;
  const auto nn = static_cast<std::int64_t>(n);
  while (v < nn) {
    const double r = rng.uniform();
    const double skip = std::floor(std::log1p(-r) / log_q);
    // Guard against overflow when p is tiny.
    if (skip > 4.0e18) break;
    w += 1 + static_cast<std::int64_t>(skip);
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) edges.push_back({static_cast<NodeId>(w), static_cast<NodeId>(v)});
  }
  return Graph::from_edges(n, std::move(edges));
}

// Cycle of n/r boundary nodes, each attached to its own (r-1)-clique.
// Super node i occupies ids [i*r, (i+1)*r); id i*r is its boundary node.
inline Graph gen_flower(std::size_t n, std::size_t r) {
  if (r == 0) r = nearest_divisor_to_log_squared(n);
  if (n == 0 || n % r != 0) throw UsageError("flower: r must divide n");
  const std::size_t super_count = n / r;
  if (super_count < 3) throw UsageError("flower: need at least 3 super nodes (n/r >= 3)");

  std::vector<Edge> edges;
  std::vector<std::uint32_t> layout(n);
  for (std::size_t i = 0; i < super_count; ++i) {
    const auto boundary = static_cast<NodeId>(i * r);
    const auto next_boundary = static_cast<NodeId>(((i + 1) % super_count) * r);
    edges.push_back({boundary, next_boundary});
    for (std::size_t a = 0; a < r; ++a) {
      layout[i * r + a] = static_cast<std::uint32_t>(i);
      for (std::size_t b = a + 1; b < r; ++b) {
        // a == 0 links the boundary node to every clique member.
        edges.push_back({static_cast<NodeId>(i * r + a), static_cast<NodeId>(i * r + b)});
      }
    }
  }
  return Graph::from_edges(n, std::move(edges), std::move(layout));
}

namespace detail {

inline bool contains_node(const std::vector<NodeId>& list, NodeId v) {
  return std::find(list.begin(), list.end(), v) != list.end();
}

}  // namespace detail

// Random D-regular simple graph by the pairing model. Unsuitable pairs (loop
// or repeated edge) are rejected and redrawn; when the remaining points admit
// no suitable pair the whole pairing restarts.
inline Graph gen_random_regular(std::size_t nodes, std::size_t degree, RngSeed seed,
                                std::size_t max_restarts = 1000) {
  if (nodes == 0 || degree == 0) throw UsageError("random regular: N and D must be positive");
  if (degree >= nodes) throw UsageError("random regular: need D < N");
  if ((nodes * degree) % 2 != 0) throw UsageError("random regular: N*D must be even");

  Rng rng(seed);
  const std::size_t total = nodes * degree;
  std::vector<NodeId> points(total);
  std::vector<std::vector<NodeId>> adj(nodes);

  for (std::size_t attempt = 0; attempt <= max_restarts; ++attempt) {
    for (std::size_t i = 0; i < total; ++i) points[i] = static_cast<NodeId>(i / degree);
    for (auto& a : adj) {
      a.clear();
      a.reserve(degree);
    }
    std::size_t remaining = total;
    bool stuck = false;
    std::size_t failures = 0;

    auto take = [&](std::size_t i, std::size_t j) {
      const NodeId u = points[i];
      const NodeId v = points[j];
      adj[u].push_back(v);
      adj[v].push_back(u);
      // Remove the higher index first so the lower one stays valid.
      if (i < j) std::swap(i, j);
      points[i] = points[remaining - 1];
      --remaining;
      points[j] = points[remaining - 1];
      --remaining;
      failures = 0;
    };

    while (remaining > 0) {
      const auto i = static_cast<std::size_t>(rng.below(remaining));
      const auto j = static_cast<std::size_t>(rng.below(remaining));
      const NodeId u = points[i];
      const NodeId v = points[j];
      if (i != j && u != v && !detail::contains_node(adj[u], v)) {
        take(i, j);
        continue;
      }
      if (++failures < 64 + 4 * remaining) continue;
      // Many consecutive rejections: enumerate what is still possible.
      std::vector<std::pair<std::size_t, std::size_t>> suitable;
      for (std::size_t a = 0; a < remaining; ++a) {
        for (std::size_t b = a + 1; b < remaining; ++b) {
          if (points[a] != points[b] && !detail::contains_node(adj[points[a]], points[b])) {
            suitable.emplace_back(a, b);
          }
        }
      }
      if (suitable.empty()) {
        stuck = true;
        break;
      }
      const auto pick = suitable[rng.below(suitable.size())];
      take(pick.first, pick.second);
    }
    if (stuck) continue;

    std::vector<Edge> edges;
    edges.reserve(total / 2);
    for (NodeId u = 0; u < nodes; ++u)
      for (NodeId v : adj[u])
        if (u < v) edges.push_back({u, v});
    return Graph::from_edges(nodes, std::move(edges));
  }
  throw GenerationError("random regular: pairing failed after " + std::to_string(max_restarts) +
                        " restarts");
}

// Clique blow-up of a random D-regular base graph, D = d * c. Base node x
// becomes clique ids [x*c, (x+1)*c); its D base edges are dealt round-robin
// (in ascending base-neighbor order) so each member carries exactly d of them.
inline Graph gen_moderate_expander(std::size_t n, std::size_t d, std::size_t clique_size,
                                   RngSeed seed) {
  const std::size_t c = clique_size == 0 ? nearest_divisor_to_log_squared(n) : clique_size;
  if (n == 0 || d == 0) throw UsageError("moderate expander: n and d must be positive");
  if (n % c != 0) throw UsageError("moderate expander: clique size must divide n");
  const std::size_t base_nodes = n / c;
  const std::size_t base_degree = d * c;
  if (base_degree >= base_nodes) {
    throw UsageError("moderate expander: base degree D=" + std::to_string(base_degree) +
                     " must be below base size N=" + std::to_string(base_nodes));
  }
  if ((base_nodes * base_degree) % 2 != 0) throw UsageError("moderate expander: N*D must be even");

  const Graph base = gen_random_regular(base_nodes, base_degree, seed);

  std::vector<Edge> edges;
  edges.reserve(base_nodes * c * (c - 1) / 2 + base.num_edges());
  std::vector<std::uint32_t> layout(n);
  for (std::size_t x = 0; x < base_nodes; ++x) {
    for (std::size_t a = 0; a < c; ++a) {
      layout[x * c + a] = static_cast<std::uint32_t>(x);
      for (std::size_t b = a + 1; b < c; ++b)
        edges.push_back({static_cast<NodeId>(x * c + a), static_cast<NodeId>(x * c + b)});
    }
  }
  for (NodeId x = 0; x < base_nodes; ++x) {
    const auto nx = base.neighbors(x);
    for (std::size_t i = 0; i < nx.size(); ++i) {
      const NodeId y = nx[i];
      if (y < x) continue;
      const auto ny = base.neighbors(y);
      const auto j = static_cast<std::size_t>(std::lower_bound(ny.begin(), ny.end(), x) - ny.begin());
      edges.push_back({static_cast<NodeId>(x * c + i % c), static_cast<NodeId>(y * c + j % c)});
    }
  }
  return Graph::from_edges(n, std::move(edges), std::move(layout));
}

// Hyperbolic random graph with a temperature-smoothed connection rule.
// Radii follow density alpha*sinh(alpha*r) on [0, R], alpha = (beta-1)/2;
// angles are uniform. Pair {u, v} links with probability
// 1 / (1 + exp((dist(u,v) - R) / (2T))). R is found by bisection on the
// expected mean degree of the seeded point sample.
inline Graph gen_hrg(std::size_t n, double target_avg_degree, double beta, double temperature,
                     RngSeed seed) {
  if (!(beta > 2.0)) throw UsageError("HRG: beta must exceed 2");
  if (!(temperature > 0.0 && temperature < 1.0)) throw UsageError("HRG: temperature must lie in (0,1)");
  if (n < 2) throw UsageError("HRG: need at least two nodes");
  if (!(target_avg_degree > 0.0 && target_avg_degree < static_cast<double>(n - 1)))
    throw UsageError("HRG: target average degree must lie in (0, n-1)");

  Rng rng(seed);
  const double alpha = (beta - 1.0) / 2.0;
  std::vector<double> radial_u(n), cos_t(n), sin_t(n);
  for (std::size_t i = 0; i < n; ++i) {
    radial_u[i] = rng.uniform();
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    cos_t[i] = std::cos(theta);
    sin_t[i] = std::sin(theta);
  }
  std::vector<double> ch(n), sh(n);
  auto place = [&](double radius) {
    const double span = std::cosh(alpha * radius) - 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = std::acosh(1.0 + radial_u[i] * span) / alpha;
      ch[i] = std::cosh(r);
      sh[i] = std::sinh(r);
    }
  };
  auto link_probability = [&](std::size_t i, std::size_t j, double radius) {
    const double cos_dt = cos_t[i] * cos_t[j] + sin_t[i] * sin_t[j];
    const double x = std::max(1.0, ch[i] * ch[j] - sh[i] * sh[j] * cos_dt);
    return 1.0 / (1.0 + std::exp((std::acosh(x) - radius) / (2.0 * temperature)));
  };
  auto expected_degree = [&](double radius) {
    place(radius);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) sum += link_probability(i, j, radius);
    return 2.0 * sum / static_cast<double>(n);
  };

  double lo = 0.0;
  double hi = 2.0 * std::log(static_cast<double>(n)) + 10.0;
  while (expected_degree(hi) > target_avg_degree) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1.0e4) throw GenerationError("HRG: radius calibration diverged");
  }
  double radius = hi;
  for (int iter = 0; iter < 60; ++iter) {
    radius = 0.5 * (lo + hi);
    const double deg = expected_degree(radius);
    if (std::abs(deg - target_avg_degree) <= 0.005 * target_avg_degree) break;
    (deg > target_avg_degree ? lo : hi) = radius;
  }
  place(radius);

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.uniform() < link_probability(i, j, radius))
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
  const double realized = 2.0 * static_cast<double>(edges.size()) / static_cast<double>(n);
  if (std::abs(realized - target_avg_degree) > 0.10 * target_avg_degree) {
    throw GenerationError("HRG: realized mean degree " + std::to_string(realized) +
                          " is not within 10% of target " + std::to_string(target_avg_degree));
  }
  return Graph::from_edges(n, std::move(edges));
}

inline Graph generate(const GenSpec& spec, RngSeed seed) {
  struct Visitor {
    RngSeed seed;
    Graph operator()(const ErSpec& s) const { return gen_er(s.n, s.p, seed); }
    Graph operator()(const FlowerSpec& s) const { return gen_flower(s.n, s.r); }
    Graph operator()(const RandomRegularSpec& s) const { return gen_random_regular(s.nodes, s.degree, seed); }
    Graph operator()(const ModerateExpanderSpec& s) const {
      return gen_moderate_expander(s.n, s.d, s.clique_size, seed);
    }
    Graph operator()(const HrgSpec& s) const {
      return gen_hrg(s.n, s.target_avg_degree, s.beta, s.temperature, seed);
    }
  };
  return std::visit(Visitor{seed}, spec);
}

// Collapses every super node to a single node; parallel edges merge.
inline Graph contract_super_nodes(const Graph& g) {
  if (!g.has_super_layout()) throw UsageError("graph has no super-node layout to contract");
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    const auto a = g.super_node(e.u);
    const auto b = g.super_node(e.v);
    if (a != b) edges.push_back({a, b});
  }
  return Graph::from_edges(g.num_super_nodes(), std::move(edges));
}

}  // namespace rumor
