// rumor: command-line front end for the simulator.
//
// Exit codes: 0 ok, 1 usage or configuration error, 2 runtime failure.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rumor/rumor.hpp"

namespace {

using namespace rumor;

constexpr int kUsage = 1;
constexpr int kRuntime = 2;

struct GraphArgs {
  std::string file;
  std::string gen;
  bool all_components = false;
  bool largest_component = false;
  std::string labels;
};

void add_graph_options(CLI::App* cmd, GraphArgs& a, bool allow_gen) {
  auto* file = cmd->add_option("--graph", a.file, "Edge-list file");
  if (allow_gen) {
    auto* gen = cmd->add_option("--gen", a.gen, "Generator spec, e.g. flower:n=12,r=3");
    file->excludes(gen);
  }
  auto* all = cmd->add_flag("--all-components", a.all_components, "Keep every connected component of a file");
  auto* lcc = cmd->add_flag("--largest-component", a.largest_component, "Restrict a file to its largest component");
  all->excludes(lcc);
  cmd->add_option("--labels", a.labels, "Write node,original_id for a loaded file");
}

// Files written by `generate` keep all components unless asked otherwise;
// other edge lists (datasets) default to their largest component.
Graph load_graph(const GraphArgs& a, RngSeed seed) {
  if (!a.gen.empty()) return generate(parse_gen_spec(a.gen), seed);
  if (a.file.empty()) throw UsageError("a graph is required (--graph FILE or --gen SPEC)");
  std::ifstream in(a.file);
  if (!in) throw UsageError("cannot open graph file: " + a.file);
  auto lg = parse_edge_list(in);
  const bool lcc = a.largest_component || (!a.all_components && !lg.has_header);
  if (lcc) lg = largest_component(lg);
  if (!a.labels.empty()) {
    std::ofstream out(a.labels);
    if (!out) throw std::runtime_error("cannot write " + a.labels);
    write_labels(out, lg);
  }
  return std::move(lg.graph);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string family;
  std::optional<std::size_t> n, r, d, c;
  std::optional<double> p, deg, beta, t;
  RngSeed seed = 1;
  std::string out;
};

GenSpec gen_spec_from(const GenerateArgs& a) {
  if (a.family.find(':') != std::string::npos) return parse_gen_spec(a.family);
  std::string text = a.family + ":";
  bool first = true;
  auto put = [&](const char* key, const std::string& value) {
    text += (first ? "" : ",") + std::string(key) + "=" + value;
    first = false;
  };
  if (a.n) put("n", std::to_string(*a.n));
  if (a.r) put("r", std::to_string(*a.r));
  if (a.d) put("d", std::to_string(*a.d));
  if (a.c) put("c", std::to_string(*a.c));
  if (a.p) put("p", format_double(*a.p));
  if (a.deg) put("deg", format_double(*a.deg));
  if (a.beta) put("beta", format_double(*a.beta));
  if (a.t) put("t", format_double(*a.t));
  return parse_gen_spec(text);
}

int cmd_generate(const GenerateArgs& a) {
  const Graph g = generate(gen_spec_from(a), a.seed);
  if (a.out.empty() || a.out == "-") {
    write_edge_list(std::cout, g);
  } else {
    auto out = open_out(a.out);
    write_edge_list(out, g);
  }
  std::cerr << "nodes=" << g.num_nodes() << " edges=" << g.num_edges() << '\n';
  return 0;
}

struct SimulateArgs {
  GraphArgs graph;
  std::string config;
  RngSeed seed = 1;
  std::optional<int> k;
  std::string out;
  std::string dump_states;
};

int cmd_simulate(const SimulateArgs& a) {
  ProcessConfig cfg;
  if (!a.config.empty()) {
    // Only the process and countermeasure sections matter for a single run;
    // the graph given on the command line wins.
    std::ifstream in(a.config);
    if (!in) throw UsageError("cannot open config: " + a.config);
    json root;
    try {
      root = json::parse(in);
    } catch (const json::parse_error& e) {
      throw UsageError("config " + a.config + ": " + e.what());
    }
    if (!root.contains("graph")) root["graph"] = {{"generate", "flower:n=6,r=3"}};
    cfg = parse_config(root).experiment.process;
  }
  if (a.k) cfg.k = *a.k;
  cfg.seed = a.seed;
  const Graph g = load_graph(a.graph, a.seed);
  const SimilarityTable sims(g);
  Process proc(g, cfg, &sims);

  std::ofstream dump;
  if (!a.dump_states.empty()) dump = open_out(a.dump_states);
  RoundCallback cb;
  if (dump.is_open()) cb = [&](const Process& p) { write_state_dump_line(dump, p); };
  const RunResult r = drive(proc, cb);

  if (a.out.empty() || a.out == "-") {
    write_trajectory_csv(std::cout, r);
  } else {
    auto out = open_out(a.out);
    write_trajectory_csv(out, r);
  }
  std::cerr << "rounds=" << r.rounds << " final_orange=" << format_double(r.final_fraction(Color::Orange))
            << " spreads=" << (spreads(r) ? "true" : "false") << (r.truncated ? " truncated" : "") << '\n';
  return 0;
}

struct ExperimentArgs {
  std::string config;
  std::string preset;
  std::string dataset;
  std::optional<std::size_t> replications;
  std::optional<RngSeed> base_seed;
  std::optional<std::size_t> threads;
  std::string csv;
  std::string summary;
  std::string out_dir;
};

int cmd_experiment(const ExperimentArgs& a) {
  std::vector<Config> runs;
  if (!a.config.empty()) {
    runs.push_back(load_config(a.config));
  } else {
    std::string dataset = a.dataset;
    if (dataset.empty()) {
      if (const char* env = std::getenv("RUMOR_FB_DATASET")) dataset = env;
    }
    for (auto& spec : preset(a.preset, dataset)) runs.push_back(Config{std::move(spec), {}});
  }
  if (runs.size() > 1 && (!a.csv.empty() || !a.summary.empty()))
    throw UsageError("this preset is a sweep; use --out-dir instead of --csv/--summary");

  for (auto& run : runs) {
    auto& spec = run.experiment;
    if (a.replications) spec.replications = *a.replications;
    if (a.base_seed) spec.base_seed = *a.base_seed;
    if (a.threads) spec.threads = *a.threads;
    validate(spec);

    std::string csv_path = !a.csv.empty() ? a.csv : run.output.csv;
    std::string summary_path = !a.summary.empty() ? a.summary : run.output.summary;
    if (!a.out_dir.empty()) {
      std::filesystem::create_directories(a.out_dir);
      const auto base = std::filesystem::path(a.out_dir) / spec.name;
      csv_path = base.string() + ".csv";
      summary_path = base.string() + ".json";
    }

    const auto start = std::chrono::steady_clock::now();
    const RunAggregate agg = run_experiment(spec);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const json summary = summary_json(spec, agg);
    // Timing goes to stderr only, so every written file is reproducible.
    std::cerr << spec.name << ": " << agg.replications << " replications in " << format_double(wall) << " s\n";

    if (!csv_path.empty()) {
      auto out = open_out(csv_path);
      write_aggregate_csv(out, agg);
    }
    if (!summary_path.empty()) {
      auto out = open_out(summary_path);
      out << summary.dump(2) << '\n';
    }
    if (csv_path.empty() && summary_path.empty()) std::cout << summary.dump(2) << '\n';
    std::cerr << spec.name << ": spread_rate=" << format_double(agg.spread_rate)
              << " mean_final_orange=" << format_double(agg.mean_final_orange)
              << " max_std=" << format_double(agg.max_std) << (agg.truncated() ? " (truncated runs)" : "")
              << '\n';
  }
  return 0;
}

struct CommunitiesArgs {
  GraphArgs graph;
  RngSeed seed = 1;
  std::string out;
};

int cmd_communities(const CommunitiesArgs& a) {
  const Graph g = load_graph(a.graph, a.seed);
  const Partition p = louvain(g, a.seed);
  auto emit = [&](std::ostream& out) {
    out << "node,community\n";
    for (NodeId v = 0; v < g.num_nodes(); ++v) out << v << ',' << p.community_of[v] << '\n';
  };
  if (a.out.empty() || a.out == "-") {
    emit(std::cout);
  } else {
    auto out = open_out(a.out);
    emit(out);
  }
  std::cerr << "communities=" << p.community_count << " modularity=" << format_double(modularity(g, p)) << '\n';
  return 0;
}

struct SpectralArgs {
  GraphArgs graph;
  double tol = 1e-8;
  std::size_t max_iter = 100000;
  RngSeed seed = 1;
};

int cmd_spectral(const SpectralArgs& a) {
  const Graph g = load_graph(a.graph, a.seed);
  const auto est = estimate_lambda(g, a.tol, a.max_iter, a.seed);
  std::size_t degree = 0;
  g.is_regular(&degree);
  const json out{{"nodes", g.num_nodes()},
                 {"degree", degree},
                 {"lambda", est.lambda},
                 {"iterations", est.iterations_used},
                 {"residual", est.residual},
                 {"converged", est.converged}};
  std::cout << out.dump(2) << '\n';
  return est.converged ? 0 : kRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-weighted rumor spreading simulator"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a graph and write it as an edge list");
  g->add_option("family", gen.family, "er | flower | regular | me | hrg, or a full spec like flower:n=12,r=3")
      ->required();
  g->add_option("--n", gen.n, "Node count");
  g->add_option("--r", gen.r, "Flower clique size");
  g->add_option("--d", gen.d, "Degree (regular, me)");
  g->add_option("--c", gen.c, "Moderate-expander clique size");
  g->add_option("--p", gen.p, "ER edge probability");
  g->add_option("--deg", gen.deg, "HRG target average degree");
  g->add_option("--beta", gen.beta, "HRG power-law exponent");
  g->add_option("--t", gen.t, "HRG temperature");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--out", gen.out, "Output file (default stdout)");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run the process once and print the trajectory CSV");
  add_graph_options(s, sim.graph, true);
  s->add_option("--config", sim.config, "JSON config (process and countermeasure sections)");
  s->add_option("--seed", sim.seed, "Run seed (also seeds --gen)");
  s->add_option("--k", sim.k, "Forgetting horizon")->check(CLI::PositiveNumber);
  s->add_option("--out", sim.out, "Trajectory CSV (default stdout)");
  s->add_option("--dump-states", sim.dump_states, "Write one line of node colors per round");

  ExperimentArgs exp;
  auto* e = app.add_subcommand("experiment", "Run replications and aggregate them");
  auto* cfg_opt = e->add_option("--config", exp.config, "JSON experiment config");
  auto* preset_opt = e->add_option("--preset", exp.preset, "Named preset");
  cfg_opt->excludes(preset_opt);
  e->add_option("--dataset", exp.dataset, "Edge list for dataset presets (default: $RUMOR_FB_DATASET)");
  e->add_option("--replications", exp.replications, "Override the replication count")->check(CLI::PositiveNumber);
  e->add_option("--base-seed", exp.base_seed, "Override the base seed");
  e->add_option("--threads", exp.threads, "Worker threads (0: all cores)");
  e->add_option("--csv", exp.csv, "Aggregate CSV path");
  e->add_option("--summary", exp.summary, "Summary JSON path");
  e->add_option("--out-dir", exp.out_dir, "Write <name>.csv and <name>.json here");
  bool list_presets = false;
  e->add_flag("--list-presets", list_presets, "Print the preset names and exit");

  CommunitiesArgs com;
  auto* c = app.add_subcommand("communities", "Louvain partition as node,community CSV");
  add_graph_options(c, com.graph, true);
  c->add_option("--seed", com.seed, "Random seed");
  c->add_option("--out", com.out, "Output CSV (default stdout)");

  SpectralArgs spec;
  auto* sp = app.add_subcommand("spectral", "Estimate the second-largest absolute eigenvalue");
  add_graph_options(sp, spec.graph, true);
  sp->add_option("--tol", spec.tol, "Residual tolerance")->check(CLI::PositiveNumber);
  sp->add_option("--max-iter", spec.max_iter, "Iteration cap");
  sp->add_option("--seed", spec.seed, "Start-vector seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*s) return cmd_simulate(sim);
    if (*e) {
      if (list_presets) {
        for (const auto& name : preset_names()) std::cout << name << '\n';
        return 0;
      }
      if (exp.config.empty() && exp.preset.empty()) throw UsageError("experiment needs --config or --preset");
      return cmd_experiment(exp);
    }
    if (*c) return cmd_communities(com);
    if (*sp) return cmd_spectral(spec);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsage;
  } catch (const ParseError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kRuntime;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
