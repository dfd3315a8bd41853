#pragma once

#include <algorithm>
#include <array>
#include <exception>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "rumor/community.hpp"
#include "rumor/countermeasures.hpp"
#include "rumor/dynamics.hpp"
#include "rumor/errors.hpp"
#include "rumor/generators.hpp"
#include "rumor/graph.hpp"
#include "rumor/io.hpp"

namespace rumor {

struct GeneratedGraph {
  GenSpec spec;
  std::optional<RngSeed> seed;  // unset: the experiment's base seed
};

struct DatasetGraph {
  std::string path;
  bool largest_component = true;
};

using GraphSource = std::variant<GeneratedGraph, DatasetGraph>;

struct ExperimentSpec {
  std::string name = "experiment";
  GraphSource graph = GeneratedGraph{};
  ProcessConfig process;  // process.seed is replaced by base_seed + i
  std::size_t replications = 100;
  RngSeed base_seed = 1;
  std::size_t threads = 0;  // 0: one per hardware thread
};

struct ColorSeries {
  std::vector<double> mean;
  std::vector<double> std;
};

struct RunAggregate {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t replications = 0;
  std::array<ColorSeries, kColorCount> series;  // indexed by Color
  std::vector<double> final_orange;             // per replication, in index order
  std::vector<double> final_ever_red;
  std::vector<std::size_t> rounds;
  std::size_t truncated_runs = 0;
  double spread_rate = 0.0;
  double mean_final_orange = 0.0;
  double mean_final_ever_red = 0.0;
  double max_std = 0.0;  // over the std_orange column
  double avg_std = 0.0;
  double mean_max_blocked_edge_fraction = 0.0;

  const ColorSeries& operator[](Color c) const { return series[static_cast<std::size_t>(c)]; }
  std::size_t length() const { return series[0].mean.size(); }
  bool truncated() const { return truncated_runs > 0; }
};

inline void validate(const ExperimentSpec& spec) {
  if (spec.replications < 1) throw UsageError("replications must be >= 1");
  if (spec.process.k < 1) throw UsageError("k must be >= 1");
  validate(spec.process.countermeasure);
}

inline Graph build_graph(const GraphSource& source, RngSeed default_seed) {
  if (const auto* gen = std::get_if<GeneratedGraph>(&source)) {
    return generate(gen->spec, gen->seed.value_or(default_seed));
  }
  const auto& ds = std::get<DatasetGraph>(source);
  return load_snap(ds.path, ds.largest_component).graph;
}

// Padded per-round means and population stds. Deterministic: replications
// are folded in index order.
inline RunAggregate aggregate_runs(const std::vector<RunResult>& runs, std::size_t edges = 0) {
  if (runs.empty()) throw UsageError("nothing to aggregate");
  RunAggregate agg;
  agg.nodes = runs.front().nodes;
  agg.edges = edges;
  agg.replications = runs.size();
  std::size_t rows = 0;
  for (const auto& r : runs) rows = std::max(rows, r.trajectory.size());
  const double reps = static_cast<double>(runs.size());
  const double n = static_cast<double>(agg.nodes);

  for (std::size_t c = 0; c < kColorCount; ++c) {
    auto& s = agg.series[c];
    s.mean.assign(rows, 0.0);
    s.std.assign(rows, 0.0);
    for (std::size_t t = 0; t < rows; ++t) {
      double sum = 0.0, sum2 = 0.0;
      for (const auto& r : runs) {
        const auto& row = r.trajectory[std::min(t, r.trajectory.size() - 1)];
        const double x = static_cast<double>(row.count[c]) / n;
        sum += x;
        sum2 += x * x;
      }
      const double mean = sum / reps;
      s.mean[t] = mean;
      s.std[t] = std::sqrt(std::max(0.0, sum2 / reps - mean * mean));
    }
  }
  // The one-pass variance can leave ~1e-17 noise when all runs agree.
  for (auto& s : agg.series)
    for (auto& x : s.std)
      if (x < 1e-12) x = 0.0;

  std::size_t spread = 0;
  double blocked = 0.0;
  for (const auto& r : runs) {
    agg.final_orange.push_back(r.final_fraction(Color::Orange));
    agg.final_ever_red.push_back(static_cast<double>(r.ever_red) / n);
    agg.rounds.push_back(r.rounds);
    if (r.truncated) ++agg.truncated_runs;
    if (spreads(r)) ++spread;
    blocked += r.max_blocked_edge_fraction;
  }
  agg.spread_rate = static_cast<double>(spread) / reps;
  for (double x : agg.final_orange) agg.mean_final_orange += x / reps;
  for (double x : agg.final_ever_red) agg.mean_final_ever_red += x / reps;
  agg.mean_max_blocked_edge_fraction = blocked / reps;
  const auto& so = agg[Color::Orange].std;
  for (double x : so) {
    agg.max_std = std::max(agg.max_std, x);
    agg.avg_std += x;
  }
  agg.avg_std /= static_cast<double>(so.size());
  return agg;
}

// Called once per replication after its run ends, with the finished process.
// Calls are serialized but arrive in completion order.
using ReplicationHook = std::function<void(std::size_t replication, const Process&)>;

inline RunAggregate run_experiment(const ExperimentSpec& spec, const Graph& g,
                                   const ReplicationHook& hook = {}) {
  validate(spec);
  const SimilarityTable sims(g);
  ProcessConfig base = spec.process;
  if (std::holds_alternative<BlockEdges>(base.countermeasure) && !base.partition) {
    base.partition = std::make_shared<const Partition>(louvain(g, spec.base_seed));
  }

  std::vector<RunResult> results(spec.replications);
  std::atomic<std::size_t> next{0};
  std::mutex hook_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= spec.replications) return;
      try {
        ProcessConfig cfg = base;
        cfg.seed = spec.base_seed + i;
        Process proc(g, cfg, &sims);
        results[i] = drive(proc);
        if (hook) {
          std::lock_guard lock(hook_mutex);
          hook(i, proc);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(spec.replications);
        return;
      }
    }
  };

  std::size_t threads = spec.threads > 0 ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, spec.replications);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return aggregate_runs(results, g.num_edges());
}

inline RunAggregate run_experiment(const ExperimentSpec& spec, const ReplicationHook& hook = {}) {
  validate(spec);
  const Graph g = build_graph(spec.graph, spec.base_seed);
  return run_experiment(spec, g, hook);
}

// ---------------------------------------------------------------------------
// Presets.

inline constexpr std::size_t kFigureNodes = 16000;

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "fig1a-flower",    "fig1a-me-low",     "fig1a-er-high",     "fig1a-er-low",   "fig1-me-cm",
      "fig1-me-cm1",     "fig1-me-cm2",      "fig1-me-cm3",       "fig1-me-cm4",    "fig1-me-cm5",
      "fig1-me-cm6",     "fb-baseline",      "fb-cm1",            "fb-cm2",         "fb-cm3",
      "fb-cm4",          "fb-cm5",           "fb-cm6",            "cm4-delay-sweep", "hrg-fb"};
  return names;
}

namespace detail {

inline ExperimentSpec generated(std::string name, GenSpec gen, CountermeasureSpec cm = NoCountermeasure{}) {
  ExperimentSpec s;
  s.name = std::move(name);
  s.graph = GeneratedGraph{std::move(gen), std::nullopt};
  s.process.countermeasure = std::move(cm);
  if (std::holds_alternative<BlockEdges>(s.process.countermeasure)) s.replications = 10;
  return s;
}

inline ExperimentSpec dataset(std::string name, const std::string& path, CountermeasureSpec cm = NoCountermeasure{}) {
  ExperimentSpec s;
  s.name = std::move(name);
  s.graph = DatasetGraph{path, true};
  s.process.countermeasure = std::move(cm);
  if (std::holds_alternative<BlockEdges>(s.process.countermeasure)) s.replications = 10;
  return s;
}

inline CountermeasureSpec cm_by_index(int i) {
  switch (i) {
    case 1: return BlockNodes{};
    case 2: return BlockEdges{};
    case 3: return AccuracyFlags{};
    case 4: return SpreadTruth{};
    case 5: return FactCheckers{};
    case 6: return HearTwice{};
    default: return NoCountermeasure{};
  }
}

}  // namespace detail

// Facebook ego network dimensions (SNAP ego-Facebook).
inline constexpr std::size_t kFacebookNodes = 4039;
inline constexpr std::size_t kFacebookEdges = 88234;

// Returns one spec, or several for sweeps. Dataset presets read the edge list
// from `dataset_path`.
inline std::vector<ExperimentSpec> preset(const std::string& name, const std::string& dataset_path = {}) {
  const double n = static_cast<double>(kFigureNodes);
  if (name == "fig1a-flower") return {detail::generated(name, FlowerSpec{kFigureNodes, 0})};
  if (name == "fig1a-me-low") return {detail::generated(name, ModerateExpanderSpec{kFigureNodes, 4, 16})};
  if (name == "fig1a-er-high") return {detail::generated(name, ErSpec{kFigureNodes, 4.0 / std::sqrt(n)})};
  if (name == "fig1a-er-low") return {detail::generated(name, ErSpec{kFigureNodes, 1.0 / (4.0 * std::sqrt(n))})};
  if (name == "hrg-fb") {
    const double avg = 2.0 * static_cast<double>(kFacebookEdges) / static_cast<double>(kFacebookNodes);
    return {detail::generated(name, HrgSpec{kFacebookNodes, avg, 2.5, 0.6})};
  }
  // ME(22000, d=12): the automatic clique size would exceed the base graph, so
  // cliques of 16 are used as in ME-low.
  const ModerateExpanderSpec me_cm{22000, 12, 16};
  if (name == "fig1-me-cm") return {detail::generated(name, me_cm)};
  for (int i = 1; i <= 6; ++i) {
    if (name == "fig1-me-cm" + std::to_string(i)) return {detail::generated(name, me_cm, detail::cm_by_index(i))};
  }

  const bool fb = name == "fb-baseline" || name == "cm4-delay-sweep" || name.rfind("fb-cm", 0) == 0;
  if (fb && dataset_path.empty()) throw UsageError("preset '" + name + "' needs a dataset path");
  if (name == "fb-baseline") return {detail::dataset(name, dataset_path)};
  for (int i = 1; i <= 6; ++i) {
    if (name == "fb-cm" + std::to_string(i)) return {detail::dataset(name, dataset_path, detail::cm_by_index(i))};
  }
  if (name == "cm4-delay-sweep") {
    std::vector<ExperimentSpec> out;
    for (std::size_t tau : {1u, 2u, 4u, 8u, 16u}) {
      out.push_back(detail::dataset(name + "-tau" + std::to_string(tau), dataset_path, SpreadTruth{tau}));
    }
    return out;
  }

  std::string list;
  for (const auto& p : preset_names()) list += (list.empty() ? "" : ", ") + p;
  throw UsageError("unknown preset '" + name + "'; available: " + list);
}

}  // namespace rumor
