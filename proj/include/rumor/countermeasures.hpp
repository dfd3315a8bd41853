#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rumor/community.hpp"
#include "rumor/errors.hpp"
#include "rumor/graph.hpp"
#include "rumor/rng.hpp"

namespace rumor {

enum class Color : std::uint8_t { Uncolored = 0, Red = 1, Orange = 2, Green = 3, LightGreen = 4 };

inline constexpr std::size_t kColorCount = 5;

inline constexpr std::string_view color_name(Color c) {
  switch (c) {
    case Color::Uncolored: return "uncolored";
    case Color::Red: return "red";
    case Color::Orange: return "orange";
    case Color::Green: return "green";
    case Color::LightGreen: return "light_green";
  }
  return "?";
}

// CM0.
struct NoCountermeasure {};

// CM1: the top_degree_frac highest-degree nodes plus random_frac of the
// nodes drawn uniformly from the rest never receive or pass on the rumor.
struct BlockNodes {
  double top_degree_frac = 0.05;
  double random_frac = 0.20;
};

// CM2: edges leaving a spreader community are cut while the community stays
// a spreader (red fraction > tau_c) and the global red fraction exceeds tau_g.
struct BlockEdges {
  double tau_g = 0.05;
  double tau_c = 0.05;
};

// CM3: a node about to turn red turns orange instead with reject_prob.
struct AccuracyFlags {
  double reject_prob = 0.30;
};

// CM4: after `delay` rounds the highest-degree uncolored node turns green and
// the truth spreads with half the rumor's acceptance probability.
struct SpreadTruth {
  std::size_t delay = 4;
};

// CM5: a random `frac` of the nodes are fact checkers. They turn green on
// first contact, stay active k_fc rounds, can turn red neighbors green, and
// transmit in every one of `sub_rounds` sub-rounds.
struct FactCheckers {
  double frac = 0.10;
  int k_fc = 20;
  int sub_rounds = 3;
  bool convert_red = true;
};

// CM6: a node accepts the rumor only after `threshold` distinct neighbors
// have successfully passed it on.
struct HearTwice {
  int threshold = 2;
  std::size_t initial_red_seeds = 2;
};

using CountermeasureSpec =
    std::variant<NoCountermeasure, BlockNodes, BlockEdges, AccuracyFlags, SpreadTruth, FactCheckers, HearTwice>;

inline std::string_view countermeasure_name(const CountermeasureSpec& spec) {
  static constexpr std::string_view names[] = {"none",         "block_nodes",   "block_edges", "accuracy_flags",
                                               "spread_truth", "fact_checkers", "hear_twice"};
  return names[spec.index()];
}

namespace detail {
inline void require_fraction(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw UsageError(std::string(what) + " must lie in [0,1]");
}
}  // namespace detail

inline void validate(const CountermeasureSpec& spec) {
  struct Visitor {
    void operator()(const NoCountermeasure&) const {}
    void operator()(const BlockNodes& s) const {
      detail::require_fraction(s.top_degree_frac, "block_nodes.top_degree_frac");
      detail::require_fraction(s.random_frac, "block_nodes.random_frac");
    }
    void operator()(const BlockEdges& s) const {
      detail::require_fraction(s.tau_g, "block_edges.tau_g");
      detail::require_fraction(s.tau_c, "block_edges.tau_c");
    }
    void operator()(const AccuracyFlags& s) const {
      detail::require_fraction(s.reject_prob, "accuracy_flags.reject_prob");
    }
    void operator()(const SpreadTruth& s) const {
      if (s.delay < 1) throw UsageError("spread_truth.delay must be >= 1");
    }
    void operator()(const FactCheckers& s) const {
      detail::require_fraction(s.frac, "fact_checkers.frac");
      if (s.k_fc < 1) throw UsageError("fact_checkers.k_fc must be >= 1");
      if (s.sub_rounds < 1) throw UsageError("fact_checkers.sub_rounds must be >= 1");
    }
    void operator()(const HearTwice& s) const {
      if (s.threshold < 2) throw UsageError("hear_twice.threshold must be >= 2");
    }
  };
  std::visit(Visitor{}, spec);
}

inline std::size_t ceil_fraction(double frac, std::size_t n) {
  return std::min(n, static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n) - 1e-9)));
}

// ceil(top_degree_frac * n) nodes by descending degree (ties to the lower id),
// then ceil(random_frac * n) uniform picks among the remaining nodes.
inline NodeSet cm1_block(const Graph& g, Rng& rng, const BlockNodes& spec) {
  validate(spec);
  const std::size_t n = g.num_nodes();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return g.degree(a) > g.degree(b); });
  const std::size_t top = ceil_fraction(spec.top_degree_frac, n);
  NodeSet blocked(n);
  for (std::size_t i = 0; i < top; ++i) blocked.insert(order[i]);

  std::vector<NodeId> rest;
  rest.reserve(n - top);
  for (NodeId v = 0; v < n; ++v)
    if (!blocked.contains(v)) rest.push_back(v);
  const std::size_t extra = std::min(rest.size(), ceil_fraction(spec.random_frac, n));
  for (std::size_t i = 0; i < extra; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(rest.size() - i));
    std::swap(rest[i], rest[j]);
    blocked.insert(rest[i]);
  }
  return blocked;
}

// Which communities currently have their boundary edges cut.
class EdgeBlockMask {
 public:
  EdgeBlockMask() = default;
  EdgeBlockMask(const Partition* partition, std::vector<std::uint8_t> spreader)
      : partition_(partition), spreader_(std::move(spreader)) {
    active_ = std::any_of(spreader_.begin(), spreader_.end(), [](std::uint8_t s) { return s != 0; });
  }

  bool active() const noexcept { return active_; }
  bool is_spreader(std::uint32_t community) const { return active_ && spreader_[community] != 0; }

  bool blocked(NodeId u, NodeId v) const {
    if (!active_) return false;
    const auto cu = partition_->community_of[u];
    const auto cv = partition_->community_of[v];
    return cu != cv && (spreader_[cu] || spreader_[cv]);
  }

  std::vector<Edge> blocked_edges(const Graph& g) const {
    std::vector<Edge> out;
    if (!active_) return out;
    for (const auto& e : g.edges())
      if (blocked(e.u, e.v)) out.push_back(e);
    return out;
  }

 private:
  const Partition* partition_ = nullptr;
  std::vector<std::uint8_t> spreader_;
  bool active_ = false;
};

// Recomputed from scratch at the start of every round, so edges reopen as
// soon as their community stops being a spreader.
inline EdgeBlockMask cm2_update_mask(const Graph& g, const Partition& partition, std::span<const Color> colors,
                                     const BlockEdges& spec) {
  const std::size_t n = g.num_nodes();
  if (colors.size() != n || partition.community_of.size() != n)
    throw UsageError("cm2_update_mask: size mismatch");
  std::vector<std::size_t> red(partition.community_count, 0), size(partition.community_count, 0);
  std::size_t red_total = 0;
  for (NodeId v = 0; v < n; ++v) {
    const auto c = partition.community_of[v];
    ++size[c];
    if (colors[v] == Color::Red) {
      ++red[c];
      ++red_total;
    }
  }
  std::vector<std::uint8_t> spreader(partition.community_count, 0);
  if (n > 0 && static_cast<double>(red_total) / static_cast<double>(n) > spec.tau_g) {
    for (std::size_t c = 0; c < partition.community_count; ++c) {
      spreader[c] = static_cast<double>(red[c]) / static_cast<double>(size[c]) > spec.tau_c;
    }
  }
  return EdgeBlockMask(&partition, std::move(spreader));
}

inline bool cm3_reject(Rng& rng, const AccuracyFlags& spec) { return rng.uniform() < spec.reject_prob; }

// Highest-degree uncolored node, ties to the lower id. Blocked nodes are
// skipped. nullopt when nothing is uncolored.
inline std::optional<NodeId> cm4_seed_truth(const Graph& g, std::span<const Color> colors,
                                            const NodeSet* blocked = nullptr) {
  std::optional<NodeId> best;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (colors[v] != Color::Uncolored) continue;
    if (blocked && blocked->contains(v)) continue;
    if (!best || g.degree(v) > g.degree(*best)) best = v;
  }
  return best;
}

// Uniform sample of ceil(frac * n) fact checkers among nodes not excluded.
inline NodeSet cm5_sample_fact_checkers(const Graph& g, Rng& rng, const FactCheckers& spec,
                                        const NodeSet* excluded = nullptr) {
  const std::size_t n = g.num_nodes();
  std::vector<NodeId> pool;
  pool.reserve(n);
  for (NodeId v = 0; v < n; ++v)
    if (!excluded || !excluded->contains(v)) pool.push_back(v);
  const std::size_t count = std::min(pool.size(), ceil_fraction(spec.frac, n));
  NodeSet out(n);
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
    out.insert(pool[i]);
  }
  return out;
}

// Records a successful transmission from `source` and reports whether the
// node has now heard the rumor from `threshold` distinct neighbors.
inline bool cm6_gate(std::vector<NodeId>& heard_from, NodeId source, const HearTwice& spec) {
  if (std::find(heard_from.begin(), heard_from.end(), source) == heard_from.end())
    heard_from.push_back(source);
  return heard_from.size() >= static_cast<std::size_t>(spec.threshold);
}

}  // namespace rumor
