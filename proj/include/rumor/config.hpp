#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rumor/countermeasures.hpp"
#include "rumor/dynamics.hpp"
#include "rumor/errors.hpp"
#include "rumor/experiments.hpp"
#include "rumor/generators.hpp"

namespace rumor {

using json = nlohmann::json;

// Shortest round-trip decimal form, so output never depends on stream state.
inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Generator specs as text: "family:key=value,key=value".
//   er:n=,p=   flower:n=,r=   regular:n=,d=   me:n=,d=,c=   hrg:n=,deg=,beta=,t=

namespace detail {

inline std::map<std::string, std::string> parse_kv(std::string_view body, std::string_view what) {
  std::map<std::string, std::string> kv;
  while (!body.empty()) {
    const auto comma = body.find(',');
    const auto item = body.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) throw UsageError("bad " + std::string(what) + " item '" + std::string(item) + "'");
    kv[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return kv;
}

class KeyReader {
 public:
  KeyReader(std::map<std::string, std::string> kv, std::string family)
      : kv_(std::move(kv)), family_(std::move(family)) {}

  std::size_t size(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) {
    auto it = kv_.find(key);
    if (it == kv_.end()) {
      if (fallback) return *fallback;
      throw UsageError(family_ + " needs '" + key + "'");
    }
    std::size_t v = 0;
    const auto& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw UsageError(family_ + ": '" + key + "' must be an integer");
    kv_.erase(it);
    return v;
  }

  double real(const std::string& key, std::optional<double> fallback = std::nullopt) {
    auto it = kv_.find(key);
    if (it == kv_.end()) {
      if (fallback) return *fallback;
      throw UsageError(family_ + " needs '" + key + "'");
    }
    double v = 0;
    const auto& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
      throw UsageError(family_ + ": '" + key + "' must be a number");
    kv_.erase(it);
    return v;
  }

  void finish() const {
    if (!kv_.empty()) throw UsageError(family_ + ": unknown key '" + kv_.begin()->first + "'");
  }

 private:
  std::map<std::string, std::string> kv_;
  std::string family_;
};

}  // namespace detail

inline GenSpec parse_gen_spec(std::string_view text) {
  const auto colon = text.find(':');
  const std::string family(text.substr(0, colon));
  const auto body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  detail::KeyReader r(detail::parse_kv(body, "generator"), family);
  GenSpec out;
  if (family == "er") {
    ErSpec s{r.size("n"), r.real("p")};
    out = s;
  } else if (family == "flower") {
    FlowerSpec s{r.size("n"), r.size("r", 0)};
    out = s;
  } else if (family == "regular") {
    RandomRegularSpec s{r.size("n"), r.size("d")};
    out = s;
  } else if (family == "me") {
    ModerateExpanderSpec s{r.size("n"), r.size("d"), r.size("c", 0)};
    out = s;
  } else if (family == "hrg") {
    HrgSpec s{r.size("n"), r.real("deg"), r.real("beta", 2.5), r.real("t", 0.6)};
    out = s;
  } else {
    throw UsageError("unknown graph family '" + family + "' (er, flower, regular, me, hrg)");
  }
  r.finish();
  return out;
}

inline std::string to_string(const GenSpec& spec) {
  struct Visitor {
    std::string operator()(const ErSpec& s) const {
      return "er:n=" + std::to_string(s.n) + ",p=" + format_double(s.p);
    }
    std::string operator()(const FlowerSpec& s) const {
      return "flower:n=" + std::to_string(s.n) + ",r=" + std::to_string(s.r);
    }
    std::string operator()(const RandomRegularSpec& s) const {
      return "regular:n=" + std::to_string(s.nodes) + ",d=" + std::to_string(s.degree);
    }
    std::string operator()(const ModerateExpanderSpec& s) const {
      return "me:n=" + std::to_string(s.n) + ",d=" + std::to_string(s.d) + ",c=" + std::to_string(s.clique_size);
    }
    std::string operator()(const HrgSpec& s) const {
      return "hrg:n=" + std::to_string(s.n) + ",deg=" + format_double(s.target_avg_degree) +
             ",beta=" + format_double(s.beta) + ",t=" + format_double(s.temperature);
    }
  };
  return std::visit(Visitor{}, spec);
}

// ---------------------------------------------------------------------------
// JSON configuration. Unknown keys are rejected everywhere.
//
// {
//   "name": "flower-demo",
//   "graph": {"generate": "flower:n=16000", "seed": 3} | {"path": "fb.txt", "largest_component": true},
//   "process": {"k": 5, "max_rounds": 0, "seeds": {"random": 1} | {"nodes": [0, 4]} | {"super_nodes": 3},
//               "truth": {"k_green": 5, "half_factor": 2}},
//   "countermeasure": {"type": "fact_checkers", "frac": 0.1, "k_fc": 20, "sub_rounds": 3, "convert_red": true},
//   "experiment": {"replications": 100, "base_seed": 1, "threads": 0},
//   "output": {"csv": "agg.csv", "summary": "summary.json"}
// }

struct OutputSettings {
  std::string csv;
  std::string summary;
};

struct Config {
  ExperimentSpec experiment;
  OutputSettings output;
};

namespace detail {

inline void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) throw UsageError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw UsageError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(where + "." + key + " has the wrong type");
  }
}

inline std::size_t get_size(const json& obj, const char* key, std::size_t fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw UsageError(where + "." + key + " must be a non-negative integer");
  return v.get<std::size_t>();
}

inline CountermeasureSpec parse_countermeasure(const json& j) {
  const std::string where = "countermeasure";
  if (!j.is_object() || !j.contains("type")) throw UsageError("countermeasure needs a 'type'");
  const auto type = get_or<std::string>(j, "type", "", where);
  CountermeasureSpec out;
  if (type == "none") {
    check_keys(j, {"type"}, where);
    out = NoCountermeasure{};
  } else if (type == "block_nodes") {
    check_keys(j, {"type", "top_degree_frac", "random_frac"}, where);
    BlockNodes s;
    s.top_degree_frac = get_or(j, "top_degree_frac", s.top_degree_frac, where);
    s.random_frac = get_or(j, "random_frac", s.random_frac, where);
    out = s;
  } else if (type == "block_edges") {
    check_keys(j, {"type", "tau_g", "tau_c"}, where);
    BlockEdges s;
    s.tau_g = get_or(j, "tau_g", s.tau_g, where);
    s.tau_c = get_or(j, "tau_c", s.tau_c, where);
    out = s;
  } else if (type == "accuracy_flags") {
    check_keys(j, {"type", "reject_prob"}, where);
    AccuracyFlags s;
    s.reject_prob = get_or(j, "reject_prob", s.reject_prob, where);
    out = s;
  } else if (type == "spread_truth") {
    check_keys(j, {"type", "delay"}, where);
    SpreadTruth s;
    s.delay = get_size(j, "delay", s.delay, where);
    out = s;
  } else if (type == "fact_checkers") {
    check_keys(j, {"type", "frac", "k_fc", "sub_rounds", "convert_red"}, where);
    FactCheckers s;
    s.frac = get_or(j, "frac", s.frac, where);
    s.k_fc = get_or(j, "k_fc", s.k_fc, where);
    s.sub_rounds = get_or(j, "sub_rounds", s.sub_rounds, where);
    s.convert_red = get_or(j, "convert_red", s.convert_red, where);
    out = s;
  } else if (type == "hear_twice") {
    check_keys(j, {"type", "threshold", "initial_red_seeds"}, where);
    HearTwice s;
    s.threshold = get_or(j, "threshold", s.threshold, where);
    s.initial_red_seeds = get_size(j, "initial_red_seeds", s.initial_red_seeds, where);
    out = s;
  } else {
    throw UsageError("unknown countermeasure type '" + type + "'");
  }
  validate(out);
  return out;
}

inline SeedRule parse_seeds(const json& j) {
  check_keys(j, {"random", "nodes", "super_nodes"}, "process.seeds");
  if (j.size() != 1) throw UsageError("process.seeds must hold exactly one of random, nodes, super_nodes");
  if (j.contains("random")) return RandomSeeds{get_size(j, "random", 1, "process.seeds")};
  if (j.contains("super_nodes")) return SeedSuperNodes{get_size(j, "super_nodes", 1, "process.seeds")};
  try {
    return SeedNodes{j.at("nodes").get<std::vector<NodeId>>()};
  } catch (const json::exception&) {
    throw UsageError("process.seeds.nodes must be a list of node ids");
  }
}

}  // namespace detail

inline Config parse_config(const json& root) {
  detail::check_keys(root, {"name", "graph", "process", "countermeasure", "experiment", "output"}, "config");
  Config cfg;
  auto& spec = cfg.experiment;
  spec.name = detail::get_or<std::string>(root, "name", spec.name, "config");

  if (!root.contains("graph")) throw UsageError("config needs a 'graph' section");
  const auto& g = root.at("graph");
  detail::check_keys(g, {"generate", "seed", "path", "largest_component"}, "graph");
  if (g.contains("generate") == g.contains("path")) throw UsageError("graph needs exactly one of 'generate' or 'path'");
  if (g.contains("generate")) {
    if (g.contains("largest_component")) throw UsageError("graph.largest_component applies to files only");
    GeneratedGraph gen{parse_gen_spec(detail::get_or<std::string>(g, "generate", "", "graph")), std::nullopt};
    if (g.contains("seed")) gen.seed = detail::get_size(g, "seed", 0, "graph");
    spec.graph = gen;
  } else {
    if (g.contains("seed")) throw UsageError("graph.seed applies to generated graphs only");
    spec.graph = DatasetGraph{detail::get_or<std::string>(g, "path", "", "graph"),
                              detail::get_or(g, "largest_component", true, "graph")};
  }

  if (root.contains("process")) {
    const auto& p = root.at("process");
    detail::check_keys(p, {"k", "max_rounds", "seeds", "truth"}, "process");
    spec.process.k = detail::get_or(p, "k", spec.process.k, "process");
    spec.process.max_rounds = detail::get_size(p, "max_rounds", 0, "process");
    if (p.contains("seeds")) spec.process.seeds = detail::parse_seeds(p.at("seeds"));
    if (p.contains("truth")) {
      const auto& t = p.at("truth");
      detail::check_keys(t, {"k_green", "half_factor"}, "process.truth");
      spec.process.truth.k_green = detail::get_or(t, "k_green", 0, "process.truth");
      spec.process.truth.half_factor = detail::get_or(t, "half_factor", 2.0, "process.truth");
    }
  }
  if (root.contains("countermeasure")) spec.process.countermeasure = detail::parse_countermeasure(root.at("countermeasure"));
  if (std::holds_alternative<BlockEdges>(spec.process.countermeasure)) spec.replications = 10;

  if (root.contains("experiment")) {
    const auto& e = root.at("experiment");
    detail::check_keys(e, {"replications", "base_seed", "threads"}, "experiment");
    spec.replications = detail::get_size(e, "replications", spec.replications, "experiment");
    spec.base_seed = detail::get_size(e, "base_seed", spec.base_seed, "experiment");
    spec.threads = detail::get_size(e, "threads", spec.threads, "experiment");
  }
  if (root.contains("output")) {
    const auto& o = root.at("output");
    detail::check_keys(o, {"csv", "summary"}, "output");
    cfg.output.csv = detail::get_or<std::string>(o, "csv", "", "output");
    cfg.output.summary = detail::get_or<std::string>(o, "summary", "", "output");
  }
  if (spec.process.k < 1) throw UsageError("process.k must be >= 1");
  if (spec.process.truth.k_green < 0) throw UsageError("process.truth.k_green must be >= 0");
  if (!(spec.process.truth.half_factor > 0)) throw UsageError("process.truth.half_factor must be positive");
  validate(spec);
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config: " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  return parse_config(root);
}

// ---------------------------------------------------------------------------
// Echo of a spec, used in the summary.

inline json countermeasure_json(const CountermeasureSpec& cm) {
  struct Visitor {
    json operator()(const NoCountermeasure&) const { return {{"type", "none"}}; }
    json operator()(const BlockNodes& s) const {
      return {{"type", "block_nodes"}, {"top_degree_frac", s.top_degree_frac}, {"random_frac", s.random_frac}};
    }
    json operator()(const BlockEdges& s) const { return {{"type", "block_edges"}, {"tau_g", s.tau_g}, {"tau_c", s.tau_c}}; }
    json operator()(const AccuracyFlags& s) const { return {{"type", "accuracy_flags"}, {"reject_prob", s.reject_prob}}; }
    json operator()(const SpreadTruth& s) const { return {{"type", "spread_truth"}, {"delay", s.delay}}; }
    json operator()(const FactCheckers& s) const {
      return {{"type", "fact_checkers"}, {"frac", s.frac}, {"k_fc", s.k_fc},
              {"sub_rounds", s.sub_rounds}, {"convert_red", s.convert_red}};
    }
    json operator()(const HearTwice& s) const {
      return {{"type", "hear_twice"}, {"threshold", s.threshold}, {"initial_red_seeds", s.initial_red_seeds}};
    }
  };
  return std::visit(Visitor{}, cm);
}

inline json spec_json(const ExperimentSpec& spec) {
  json graph;
  if (const auto* gen = std::get_if<GeneratedGraph>(&spec.graph)) {
    graph["generate"] = to_string(gen->spec);
    graph["seed"] = gen->seed.value_or(spec.base_seed);
  } else {
    const auto& ds = std::get<DatasetGraph>(spec.graph);
    graph["path"] = ds.path;
    graph["largest_component"] = ds.largest_component;
  }
  json process{{"k", spec.process.k}, {"max_rounds", spec.process.max_rounds}};
  if (spec.process.seeds) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, RandomSeeds>) process["seeds"] = {{"random", s.count}};
          else if constexpr (std::is_same_v<T, SeedNodes>) process["seeds"] = {{"nodes", s.nodes}};
          else process["seeds"] = {{"super_nodes", s.count}};
        },
        *spec.process.seeds);
  }
  process["truth"] = {{"k_green", spec.process.truth.k_green}, {"half_factor", spec.process.truth.half_factor}};
  return {{"name", spec.name},
          {"graph", graph},
          {"process", process},
          {"countermeasure", countermeasure_json(spec.process.countermeasure)},
          {"experiment", {{"replications", spec.replications}, {"base_seed", spec.base_seed}}}};
}

// ---------------------------------------------------------------------------
// Writers.

inline void write_trajectory_csv(std::ostream& out, const RunResult& r) {
  out << "round,orange,red,green,light_green,uncolored\n";
  const double n = static_cast<double>(r.nodes);
  for (std::size_t t = 0; t < r.trajectory.size(); ++t) {
    const auto& c = r.trajectory[t];
    out << t;
    for (Color col : {Color::Orange, Color::Red, Color::Green, Color::LightGreen, Color::Uncolored})
      out << ',' << format_double(static_cast<double>(c[col]) / n);
    out << '\n';
  }
}

inline void write_aggregate_csv(std::ostream& out, const RunAggregate& agg) {
  out << "round,mean_orange,std_orange,mean_red,std_red,mean_green,std_green,mean_uncolored,std_uncolored\n";
  for (std::size_t t = 0; t < agg.length(); ++t) {
    out << t;
    for (Color col : {Color::Orange, Color::Red, Color::Green, Color::Uncolored}) {
      out << ',' << format_double(agg[col].mean[t]) << ',' << format_double(agg[col].std[t]);
    }
    out << '\n';
  }
}

// Data part of the summary; no timing here so it stays byte-stable.
inline json summary_json(const ExperimentSpec& spec, const RunAggregate& agg) {
  json finals = json::array();
  for (std::size_t i = 0; i < agg.final_orange.size(); ++i) {
    finals.push_back({{"replication", i},
                      {"seed", spec.base_seed + i},
                      {"final_orange", agg.final_orange[i]},
                      {"ever_red", agg.final_ever_red[i]},
                      {"rounds", agg.rounds[i]}});
  }
  json light_green = json::array();
  for (double x : agg[Color::LightGreen].mean) light_green.push_back(x);
  return {{"spec", spec_json(spec)},
          {"nodes", agg.nodes},
          {"edges", agg.edges},
          {"replications", agg.replications},
          {"spread_rate", agg.spread_rate},
          {"mean_final_orange", agg.mean_final_orange},
          {"mean_final_ever_red", agg.mean_final_ever_red},
          {"max_std", agg.max_std},
          {"avg_std", agg.avg_std},
          {"std_kind", "population"},
          {"truncated_runs", agg.truncated_runs},
          {"mean_max_blocked_edge_fraction", agg.mean_max_blocked_edge_fraction},
          {"mean_light_green", light_green},
          {"finals", finals}};
}

// One line per round: the round index and one digit per node (Color value).
inline void write_state_dump_line(std::ostream& out, const Process& proc) {
  out << proc.round() << ',';
  for (Color c : proc.colors()) out << static_cast<char>('0' + static_cast<int>(c));
  out << '\n';
}

}  // namespace rumor
