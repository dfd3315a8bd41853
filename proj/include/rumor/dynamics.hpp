#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rumor/community.hpp"
#include "rumor/countermeasures.hpp"
#include "rumor/errors.hpp"
#include "rumor/graph.hpp"
#include "rumor/rng.hpp"

namespace rumor {

struct RandomSeeds {
  std::size_t count = 1;
};

struct SeedNodes {
  std::vector<NodeId> nodes;
};

// Every node of `count` uniformly chosen super nodes starts red.
struct SeedSuperNodes {
  std::size_t count = 1;
};

using SeedRule = std::variant<RandomSeeds, SeedNodes, SeedSuperNodes>;

struct TruthSettings {
  int k_green = 0;           // 0: same horizon as the rumor
  double half_factor = 2.0;  // truth acceptance = rumor acceptance / half_factor
};

struct ProcessConfig {
  int k = 5;
  RngSeed seed = 0;
  // Unset: one random red node, or HearTwice::initial_red_seeds under CM6.
  std::optional<SeedRule> seeds;
  CountermeasureSpec countermeasure = NoCountermeasure{};
  TruthSettings truth;
  std::size_t max_rounds = 0;  // 0: 10 * n
  // Community structure for BlockEdges; computed by louvain(seed) when null.
  std::shared_ptr<const Partition> partition;
};

struct ColorCounts {
  std::array<std::size_t, kColorCount> count{};

  std::size_t operator[](Color c) const { return count[static_cast<std::size_t>(c)]; }
  std::size_t& operator[](Color c) { return count[static_cast<std::size_t>(c)]; }
  std::size_t total() const {
    std::size_t t = 0;
    for (auto x : count) t += x;
    return t;
  }
  friend bool operator==(const ColorCounts&, const ColorCounts&) = default;
};

// One synchronous rumor (and optional truth) process on a fixed graph.
//
// Ages follow the J convention: a node colored at the end of round t acts
// with age 1 in round t + 1, and a red node of age k still transmits in that
// round before turning orange. Trials are drawn from a single stream in
// ascending (target, source) order.
class Process {
 public:
  Process(const Graph& g, ProcessConfig cfg, const SimilarityTable* sims = nullptr)
      : g_(g), cfg_(std::move(cfg)), sims_(sims), rng_(cfg_.seed) {
    const std::size_t n = g_.num_nodes();
    if (cfg_.k < 1) throw UsageError("k must be >= 1");
    if (sims_ && sims_->size() != g_.adjacency().size()) throw UsageError("similarity table does not match graph");
    validate(cfg_.countermeasure);
    if (!(cfg_.truth.half_factor > 0.0)) throw UsageError("truth half_factor must be positive");
    if (cfg_.truth.k_green < 0) throw UsageError("truth k_green must be >= 0");

    cm1_ = std::get_if<BlockNodes>(&cfg_.countermeasure);
    cm2_ = std::get_if<BlockEdges>(&cfg_.countermeasure);
    cm3_ = std::get_if<AccuracyFlags>(&cfg_.countermeasure);
    cm4_ = std::get_if<SpreadTruth>(&cfg_.countermeasure);
    cm5_ = std::get_if<FactCheckers>(&cfg_.countermeasure);
    cm6_ = std::get_if<HearTwice>(&cfg_.countermeasure);
    k_green_ = cfg_.truth.k_green > 0 ? cfg_.truth.k_green : cfg_.k;
    max_rounds_ = cfg_.max_rounds > 0 ? cfg_.max_rounds : std::max<std::size_t>(1, 10 * n);

    color_.assign(n, Color::Uncolored);
    next_color_.assign(n, Color::Uncolored);
    age_.assign(n, 0);
    blocked_.assign(n, 0);
    fact_checker_.assign(n, 0);
    ever_red_.assign(n, 0);
    mark_.assign(n, 0);
    counts_[Color::Uncolored] = n;
    if (cm6_) heard_from_.resize(n);

    if (cm1_) {
      blocked_set_ = cm1_block(g_, rng_, *cm1_);
      for (NodeId v : blocked_set_.members()) blocked_[v] = 1;
    }
    if (cm5_) {
      const auto checkers = cm5_sample_fact_checkers(g_, rng_, *cm5_, cm1_ ? &blocked_set_ : nullptr);
      for (NodeId v : checkers.members()) fact_checker_[v] = 1;
    }
    if (cm2_) {
      partition_ = cfg_.partition ? cfg_.partition : std::make_shared<const Partition>(louvain(g_, cfg_.seed));
      if (partition_->community_of.size() != n) throw UsageError("partition does not match graph");
    }

    place_seeds();
    if (cm2_) refresh_edge_mask();
  }

  const Graph& graph() const noexcept { return g_; }
  const ProcessConfig& config() const noexcept { return cfg_; }
  std::size_t round() const noexcept { return round_; }
  std::size_t max_rounds() const noexcept { return max_rounds_; }
  bool fixed() const noexcept { return active_.empty(); }

  Color color(NodeId v) const { return color_.at(v); }
  std::span<const Color> colors() const noexcept { return color_; }
  int age(NodeId v) const { return age_.at(v); }
  std::size_t hit_count(NodeId v) const { return cm6_ ? heard_from_.at(v).size() : 0; }
  bool is_blocked(NodeId v) const { return blocked_.at(v) != 0; }
  bool is_fact_checker(NodeId v) const { return fact_checker_.at(v) != 0; }
  bool ever_red(NodeId v) const { return ever_red_.at(v) != 0; }
  std::size_t ever_red_count() const noexcept { return ever_red_count_; }
  std::size_t rejections() const noexcept { return rejections_; }
  const ColorCounts& counts() const noexcept { return counts_; }
  const std::vector<NodeId>& seeds() const noexcept { return seeds_; }
  const std::vector<NodeId>& spreaders() const noexcept { return active_; }
  std::optional<NodeId> truth_seed() const noexcept { return truth_seed_; }
  bool truth_seed_skipped() const noexcept { return truth_seed_skipped_; }
  const Partition* partition() const noexcept { return partition_.get(); }
  const EdgeBlockMask& edge_mask() const noexcept { return mask_; }
  std::size_t blocked_edge_count() const noexcept { return blocked_edges_; }
  double max_blocked_edge_fraction() const noexcept { return max_blocked_fraction_; }

  // Replaces the initial coloring before the first step: red and green nodes
  // need an age in [1, horizon], every other node age 0. Blocked nodes must
  // stay uncolored. Meant for analysis and tests that start mid-process.
  void set_state(std::span<const Color> colors, std::span<const int> ages) {
    const std::size_t n = g_.num_nodes();
    if (round_ != 0) throw UsageError("set_state is only allowed before the first step");
    if (colors.size() != n || ages.size() != n) throw UsageError("set_state: size mismatch");
    counts_ = {};
    seeds_.clear();
    active_.clear();
    ever_red_.assign(n, 0);
    ever_red_count_ = 0;
    for (NodeId v = 0; v < n; ++v) {
      const Color c = colors[v];
      if (blocked_[v] && c != Color::Uncolored) throw UsageError("set_state: blocked node must stay uncolored");
      color_[v] = c;
      next_color_[v] = c;
      ++counts_[c];
      age_[v] = 0;
    }
    for (NodeId v = 0; v < n; ++v) {
      const Color c = colors[v];
      if (c == Color::Red || c == Color::Green) {
        if (ages[v] < 1 || ages[v] > horizon(v)) throw UsageError("set_state: age out of range");
        age_[v] = ages[v];
        active_.push_back(v);
      } else if (ages[v] != 0) {
        throw UsageError("set_state: only red and green nodes carry an age");
      }
      if (c == Color::Red) {
        ever_red_[v] = 1;
        ++ever_red_count_;
        seeds_.push_back(v);
      }
    }
    if (cm2_) refresh_edge_mask();
  }

  // Sources `v` has already heard the rumor from (hear-twice only).
  void set_heard_from(NodeId v, std::vector<NodeId> sources) {
    if (!cm6_) throw UsageError("set_heard_from needs the hear-twice countermeasure");
    if (round_ != 0) throw UsageError("set_heard_from is only allowed before the first step");
    heard_from_.at(v) = std::move(sources);
  }

  // Rounds a spreader stays active before turning orange / light green.
  int horizon(NodeId v) const {
    if (color_.at(v) == Color::Red) return cfg_.k;
    if (color_[v] == Color::Green) return (cm5_ && fact_checker_[v]) ? cm5_->k_fc : k_green_;
    throw UsageError("horizon is defined for red or green nodes only");
  }

  // Probability that `source` colors `target` in the coming round:
  // S / 2^J for a red source, S / (half_factor * 2^J) for a green one.
  double acceptance_probability(NodeId target, NodeId source) const {
    if (!g_.has_edge(target, source)) throw UsageError("acceptance_probability: nodes are not adjacent");
    const Color cs = color_[source];
    const Color ct = color_[target];
    if (cs != Color::Red && cs != Color::Green) throw UsageError("acceptance_probability: source is not spreading");
    const bool conversion = cs == Color::Green && ct == Color::Red && can_convert(source);
    if (!(ct == Color::Uncolored || conversion)) throw UsageError("acceptance_probability: target cannot be colored");
    if (blocked_[target] || blocked_[source]) throw UsageError("acceptance_probability: blocked node");
    if (mask_.blocked(target, source)) throw UsageError("acceptance_probability: edge is blocked");
    const double s = jaccard_similarity(g_, target, source).value();
    return cs == Color::Red ? rumor_probability(s, source) : truth_probability(s, source);
  }

  // Probability that uncolored v stays uncolored with respect to the rumor:
  // product over red neighbors of (1 - S / 2^J).
  double p_star(NodeId v) const {
    if (color_.at(v) != Color::Uncolored) throw UsageError("p_star: node is not uncolored");
    if (blocked_[v]) return 1.0;
    double stay = 1.0;
    const auto nb = g_.neighbors(v);
    for (std::size_t j = 0; j < nb.size(); ++j) {
      const NodeId s = nb[j];
      if (color_[s] != Color::Red || mask_.blocked(v, s)) continue;
      stay *= 1.0 - rumor_probability(similarity(g_.offset(v) + j, v, s), s);
    }
    return stay;
  }

  void step() {
    if (cm2_) refresh_edge_mask();
    changed_.clear();

    collect_candidates();
    for (const NodeId t : candidates_) {
      if (color_[t] == Color::Uncolored) {
        resolve_uncolored(t);
      } else {
        resolve_conversion(t);
      }
    }
    if (cm5_) {
      for (int sub = 1; sub < cm5_->sub_rounds; ++sub) fact_checker_subround();
    }
    commit();
    ++round_;

    if (cm4_ && !truth_seed_ && !truth_seed_skipped_ && round_ == cm4_->delay) seed_truth();
  }

 private:
  bool can_convert(NodeId source) const {
    return cm5_ && cm5_->convert_red && fact_checker_[source] && color_[source] == Color::Green;
  }

  double similarity(std::size_t slot, NodeId t, NodeId s) const {
    return sims_ ? sims_->at_slot(slot) : jaccard_similarity(g_, t, s).value();
  }

  double rumor_probability(double s, NodeId source) const { return std::ldexp(s, -age_[source]); }
  double truth_probability(double s, NodeId source) const {
    return std::ldexp(s, -age_[source]) / cfg_.truth.half_factor;
  }

  void recolor(NodeId v, Color c) {
    --counts_[color_[v]];
    ++counts_[c];
    color_[v] = c;
    next_color_[v] = c;
  }

  void set_next(NodeId v, Color c) {
    if (next_color_[v] == color_[v]) changed_.push_back(v);
    next_color_[v] = c;
  }

  std::vector<NodeId> eligible_seed_pool() const {
    std::vector<NodeId> pool;
    for (NodeId v = 0; v < g_.num_nodes(); ++v)
      if (!blocked_[v] && !fact_checker_[v]) pool.push_back(v);
    return pool;
  }

  void make_seed(NodeId v) {
    if (color_[v] != Color::Uncolored) return;
    recolor(v, Color::Red);
    age_[v] = 1;
    ever_red_[v] = 1;
    ++ever_red_count_;
    seeds_.push_back(v);
  }

  void place_seeds() {
    SeedRule rule = cfg_.seeds ? *cfg_.seeds : SeedRule{RandomSeeds{cm6_ ? cm6_->initial_red_seeds : 1}};
    const std::size_t n = g_.num_nodes();
    if (auto* r = std::get_if<RandomSeeds>(&rule)) {
      auto pool = eligible_seed_pool();
      if (r->count > pool.size()) throw UsageError("more random seeds requested than eligible nodes");
      for (std::size_t i = 0; i < r->count; ++i) {
        const auto j = i + static_cast<std::size_t>(rng_.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
        make_seed(pool[i]);
      }
    } else if (auto* s = std::get_if<SeedNodes>(&rule)) {
      for (NodeId v : s->nodes) {
        if (v >= n) throw UsageError("seed node " + std::to_string(v) + " out of range");
      }
      for (NodeId v : s->nodes) {
        if (!blocked_[v] && !fact_checker_[v]) {
          make_seed(v);
          continue;
        }
        // A seed that collides with a blocked node or fact checker is redrawn.
        std::vector<NodeId> pool;
        for (NodeId w : eligible_seed_pool())
          if (color_[w] == Color::Uncolored) pool.push_back(w);
        if (pool.empty()) throw UsageError("no eligible node left to reseed a blocked seed");
        make_seed(pool[rng_.below(pool.size())]);
      }
    } else {
      const auto& sup = std::get<SeedSuperNodes>(rule);
      if (!g_.has_super_layout()) throw UsageError("super-node seeding requires a super-node layout");
      const std::size_t count = g_.num_super_nodes();
      if (sup.count > count) throw UsageError("more seed super nodes requested than exist");
      std::vector<std::uint32_t> ids(count);
      for (std::uint32_t i = 0; i < count; ++i) ids[i] = i;
      std::vector<std::uint8_t> chosen(count, 0);
      for (std::size_t i = 0; i < sup.count; ++i) {
        const auto j = i + static_cast<std::size_t>(rng_.below(count - i));
        std::swap(ids[i], ids[j]);
        chosen[ids[i]] = 1;
      }
      for (NodeId v = 0; v < n; ++v)
        if (chosen[g_.super_node(v)] && !blocked_[v] && !fact_checker_[v]) make_seed(v);
    }
    active_ = seeds_;
    std::sort(active_.begin(), active_.end());
  }

  void refresh_edge_mask() {
    mask_ = cm2_update_mask(g_, *partition_, color_, *cm2_);
    blocked_edges_ = 0;
    if (mask_.active()) {
      for (NodeId u = 0; u < g_.num_nodes(); ++u)
        for (NodeId v : g_.neighbors(u))
          if (u < v && mask_.blocked(u, v)) ++blocked_edges_;
    }
    if (g_.num_edges() > 0) {
      max_blocked_fraction_ = std::max(max_blocked_fraction_, static_cast<double>(blocked_edges_) /
                                                                  static_cast<double>(g_.num_edges()));
    }
  }

  void collect_candidates() {
    ++stamp_;
    candidates_.clear();
    for (const NodeId s : active_) {
      const bool converts = can_convert(s);
      for (const NodeId t : g_.neighbors(s)) {
        if (mark_[t] == stamp_) continue;
        const Color ct = color_[t];
        if ((ct == Color::Uncolored && !blocked_[t]) || (ct == Color::Red && converts)) {
          mark_[t] = stamp_;
          candidates_.push_back(t);
        }
      }
    }
    std::sort(candidates_.begin(), candidates_.end());
  }

  void resolve_uncolored(NodeId t) {
    bool red = false;
    bool green = false;
    const bool checker = cm5_ && fact_checker_[t];
    const std::size_t base = g_.offset(t);
    const auto nb = g_.neighbors(t);
    for (std::size_t j = 0; j < nb.size(); ++j) {
      const NodeId s = nb[j];
      const Color cs = color_[s];
      if (cs == Color::Red) {
        if (red || (checker && green)) continue;
        if (mask_.blocked(t, s)) continue;
        if (rng_.uniform() < rumor_probability(similarity(base + j, t, s), s)) {
          red = cm6_ ? cm6_gate(heard_from_[t], s, *cm6_) : true;
        }
      } else if (cs == Color::Green) {
        if (green || (checker && red)) continue;
        if (mask_.blocked(t, s)) continue;
        if (rng_.uniform() < truth_probability(similarity(base + j, t, s), s)) green = true;
      }
    }
    if (!red && !green) return;

    Color out;
    if (checker) {
      out = Color::Green;
    } else if (red && green) {
      out = rng_.uniform() < 0.5 ? Color::Red : Color::Green;
    } else {
      out = red ? Color::Red : Color::Green;
    }
    if (out == Color::Red && cm3_ && cm3_reject(rng_, *cm3_)) {
      out = Color::Orange;
      ++rejections_;
    }
    set_next(t, out);
  }

  // Red target next to at least one green fact checker.
  void resolve_conversion(NodeId t) {
    const std::size_t base = g_.offset(t);
    const auto nb = g_.neighbors(t);
    for (std::size_t j = 0; j < nb.size(); ++j) {
      const NodeId s = nb[j];
      if (!can_convert(s) || mask_.blocked(t, s)) continue;
      if (rng_.uniform() < truth_probability(similarity(base + j, t, s), s)) {
        set_next(t, Color::Green);
        return;
      }
    }
  }

  // Extra sub-round: only fact checkers that were green at the start of the
  // round transmit, with their round-start age. Targets are judged on the
  // colors already decided this round.
  void fact_checker_subround() {
    ++stamp_;
    candidates_.clear();
    for (const NodeId s : active_) {
      if (color_[s] != Color::Green || !fact_checker_[s]) continue;
      for (const NodeId t : g_.neighbors(s)) {
        if (mark_[t] == stamp_) continue;
        const Color ct = next_color_[t];
        if ((ct == Color::Uncolored && !blocked_[t]) || (ct == Color::Red && cm5_->convert_red)) {
          mark_[t] = stamp_;
          candidates_.push_back(t);
        }
      }
    }
    std::sort(candidates_.begin(), candidates_.end());
    for (const NodeId t : candidates_) {
      const std::size_t base = g_.offset(t);
      const auto nb = g_.neighbors(t);
      for (std::size_t j = 0; j < nb.size(); ++j) {
        const NodeId s = nb[j];
        if (color_[s] != Color::Green || !fact_checker_[s] || mask_.blocked(t, s)) continue;
        if (rng_.uniform() < truth_probability(similarity(base + j, t, s), s)) {
          set_next(t, Color::Green);
          break;
        }
      }
    }
  }

  void commit() {
    std::vector<NodeId> next_active;
    next_active.reserve(active_.size() + changed_.size());
    for (const NodeId s : active_) {
      if (next_color_[s] != color_[s]) continue;  // converted this round
      const Color c = color_[s];
      const int limit = c == Color::Red ? cfg_.k : ((cm5_ && fact_checker_[s]) ? cm5_->k_fc : k_green_);
      if (age_[s] >= limit) {
        recolor(s, c == Color::Red ? Color::Orange : Color::LightGreen);
        age_[s] = 0;
      } else {
        ++age_[s];
        next_active.push_back(s);
      }
    }
    for (const NodeId t : changed_) {
      const Color c = next_color_[t];
      recolor(t, c);
      if (c == Color::Red || c == Color::Green) {
        age_[t] = 1;
        next_active.push_back(t);
      } else {
        age_[t] = 0;
      }
      if (c == Color::Red && !ever_red_[t]) {
        ever_red_[t] = 1;
        ++ever_red_count_;
      }
    }
    std::sort(next_active.begin(), next_active.end());
    active_ = std::move(next_active);
  }

  void seed_truth() {
    const auto v = cm4_seed_truth(g_, color_, cm1_ ? &blocked_set_ : nullptr);
    if (!v) {
      truth_seed_skipped_ = true;
      return;
    }
    recolor(*v, Color::Green);
    age_[*v] = 1;
    truth_seed_ = v;
    active_.insert(std::lower_bound(active_.begin(), active_.end(), *v), *v);
  }

  const Graph& g_;
  ProcessConfig cfg_;
  const SimilarityTable* sims_;
  Rng rng_;

  const BlockNodes* cm1_ = nullptr;
  const BlockEdges* cm2_ = nullptr;
  const AccuracyFlags* cm3_ = nullptr;
  const SpreadTruth* cm4_ = nullptr;
  const FactCheckers* cm5_ = nullptr;
  const HearTwice* cm6_ = nullptr;
  int k_green_ = 5;
  std::size_t max_rounds_ = 1;

  std::size_t round_ = 0;
  std::vector<Color> color_;
  std::vector<Color> next_color_;
  std::vector<int> age_;
  std::vector<std::uint8_t> blocked_;
  std::vector<std::uint8_t> fact_checker_;
  std::vector<std::uint8_t> ever_red_;
  std::vector<std::vector<NodeId>> heard_from_;
  NodeSet blocked_set_;
  ColorCounts counts_;
  std::size_t ever_red_count_ = 0;
  std::size_t rejections_ = 0;
  std::vector<NodeId> seeds_;
  std::vector<NodeId> active_;  // red and green nodes, ascending

  std::shared_ptr<const Partition> partition_;
  EdgeBlockMask mask_;
  std::size_t blocked_edges_ = 0;
  double max_blocked_fraction_ = 0.0;

  std::optional<NodeId> truth_seed_;
  bool truth_seed_skipped_ = false;

  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  std::vector<NodeId> candidates_;
  std::vector<NodeId> changed_;
};

struct RunResult {
  std::size_t nodes = 0;
  std::vector<ColorCounts> trajectory;  // row t: counts after t rounds; row 0 is the seeding
  std::size_t rounds = 0;
  bool truncated = false;
  std::size_t ever_red = 0;
  std::size_t rejections = 0;
  double max_blocked_edge_fraction = 0.0;
  std::optional<NodeId> truth_seed;
  std::vector<NodeId> seeds;

  double fraction(Color c, std::size_t row) const {
    return nodes == 0 ? 0.0 : static_cast<double>(trajectory.at(row)[c]) / static_cast<double>(nodes);
  }
  double final_fraction(Color c) const { return fraction(c, trajectory.size() - 1); }
};

using RoundCallback = std::function<void(const Process&)>;

// Steps until no red or green node remains, or the round cap is hit.
// on_round sees the initial state and the state after every step.
inline RunResult drive(Process& proc, const RoundCallback& on_round = {}) {
  RunResult out;
  out.nodes = proc.graph().num_nodes();
  out.trajectory.push_back(proc.counts());
  if (on_round) on_round(proc);
  while (!proc.fixed() && proc.round() < proc.max_rounds()) {
    proc.step();
    out.trajectory.push_back(proc.counts());
    if (on_round) on_round(proc);
  }
  out.rounds = proc.round();
  out.truncated = !proc.fixed();
  out.ever_red = proc.ever_red_count();
  out.rejections = proc.rejections();
  out.max_blocked_edge_fraction = proc.max_blocked_edge_fraction();
  out.truth_seed = proc.truth_seed();
  out.seeds = proc.seeds();
  return out;
}

inline RunResult run(const Graph& g, const ProcessConfig& cfg, const SimilarityTable* sims = nullptr,
                     const RoundCallback& on_round = {}) {
  Process proc(g, cfg, sims);
  return drive(proc, on_round);
}

inline constexpr double kSpreadThreshold = 0.10;

// The rumor spreads when the final orange fraction reaches 10%.
inline bool spreads(const RunResult& result, double threshold = kSpreadThreshold) {
  if (result.trajectory.empty()) return false;
  return result.final_fraction(Color::Orange) >= threshold;
}

}  // namespace rumor
