#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "oracles.hpp"
#include "rumor/rumor.hpp"

using namespace rumor;
namespace fs = std::filesystem;

namespace {

struct Cmd {
  int code;
  std::string out;
};

// Runs the CLI through the shell; stderr is discarded unless asked for.
Cmd cli(const std::string& args, bool with_stderr = false) {
  const std::string line = std::string(RUMOR_CLI_PATH) + " " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(line.c_str(), "r");
  if (!pipe) return {-1, {}};
  std::string out;
  char buf[4096];
  while (std::size_t got = fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("rumor-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& f) const { return path_ / f; }

 private:
  fs::path path_;
  static inline int counter_ = 0;
};

}  // namespace

TEST(EdgeList, CommentsDuplicatesAndReversals) {
  const auto lg = parse_edge_list(std::string_view("# c\n0 1\n1 0\n1 2\n"));
  EXPECT_EQ(lg.graph.num_nodes(), 3u);
  EXPECT_EQ(lg.graph.num_edges(), 2u);
  const auto loop = parse_edge_list(std::string_view("0 0\n0 1\n"));
  EXPECT_EQ(loop.graph.num_edges(), 1u);
}

TEST(EdgeList, SparseIdsAreRelabeledInOrder) {
  const auto lg = parse_edge_list(std::string_view("100 7\n7 42\n"));
  EXPECT_EQ(lg.original_id, (std::vector<std::uint64_t>{7, 42, 100}));
  EXPECT_TRUE(lg.graph.has_edge(0, 2));
  EXPECT_TRUE(lg.graph.has_edge(0, 1));
  std::ostringstream labels;
  write_labels(labels, lg);
  EXPECT_NE(labels.str().find("2,100"), std::string::npos);
}

TEST(EdgeList, Errors) {
  try {
    parse_edge_list(std::string_view("0 1\n1 x\n"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_edge_list(std::string_view("0 1 2\n")), ParseError);
  EXPECT_THROW(parse_edge_list(std::string_view("-1 2\n")), ParseError);
  EXPECT_THROW(parse_edge_list(std::string_view("# nothing\n\n")), UsageError);
}

TEST(EdgeList, HeaderKeepsIsolatedNodes) {
  Graph g = Graph::from_edges(5, {{0, 1}, {3, 4}});
  std::stringstream ss;
  write_edge_list(ss, g);
  const auto back = parse_edge_list(ss);
  EXPECT_TRUE(back.has_header);
  EXPECT_EQ(back.graph.num_nodes(), 5u);
  EXPECT_TRUE(back.graph == g);
}

TEST(EdgeList, LargestComponent) {
  const auto lg = parse_edge_list(std::string_view("0 1\n1 2\n10 11\n"));
  const auto big = largest_component(lg);
  EXPECT_EQ(big.graph.num_nodes(), 3u);
  EXPECT_EQ(big.graph.num_edges(), 2u);
  EXPECT_EQ(big.original_id, (std::vector<std::uint64_t>{0, 1, 2}));
}

TEST(Config, GeneratorSpecs) {
  const auto f = std::get<FlowerSpec>(parse_gen_spec("flower:n=12,r=3"));
  EXPECT_EQ(f.n, 12u);
  EXPECT_EQ(f.r, 3u);
  const auto me = std::get<ModerateExpanderSpec>(parse_gen_spec("me:n=16000,d=4,c=16"));
  EXPECT_EQ(me.clique_size, 16u);
  EXPECT_THROW(parse_gen_spec("flower:n=12,x=3"), UsageError);
  EXPECT_THROW(parse_gen_spec("torus:n=4"), UsageError);
  for (const char* text : {"er:n=100,p=0.1", "flower:n=12,r=3", "regular:n=10,d=3", "me:n=160,d=1,c=16"}) {
    EXPECT_EQ(to_string(parse_gen_spec(text)), to_string(parse_gen_spec(to_string(parse_gen_spec(text)))));
  }
}

TEST(Config, ParsesAndRejectsUnknownKeys) {
  const auto cfg = parse_config(json::parse(R"({
    "name": "demo",
    "graph": {"generate": "er:n=200,p=0.05", "seed": 2},
    "process": {"k": 4, "seeds": {"nodes": [0, 3]}},
    "countermeasure": {"type": "fact_checkers", "frac": 0.2, "k_fc": 10},
    "experiment": {"replications": 7, "base_seed": 9}
  })"));
  EXPECT_EQ(cfg.experiment.name, "demo");
  EXPECT_EQ(cfg.experiment.process.k, 4);
  EXPECT_EQ(cfg.experiment.replications, 7u);
  const auto fc = std::get<FactCheckers>(cfg.experiment.process.countermeasure);
  EXPECT_DOUBLE_EQ(fc.frac, 0.2);
  EXPECT_EQ(fc.k_fc, 10);
  EXPECT_EQ(fc.sub_rounds, 3);

  EXPECT_THROW(parse_config(json::parse(R"({"graph": {"generate": "er:n=9,p=0.5"}, "bogus": 1})")), UsageError);
  EXPECT_THROW(parse_config(json::parse(R"({"graph": {"generate": "er:n=9,p=0.5"},
                                            "countermeasure": {"type": "block_nodes", "frac": 0.1}})")),
               UsageError);
  EXPECT_THROW(parse_config(json::parse(R"({"graph": {"generate": "er:n=9,p=0.5"},
                                            "process": {"k": 0}})")),
               UsageError);
}

TEST(Config, SpecJsonRoundTrip) {
  for (const auto& name : {"fig1a-flower", "fig1-me-cm2", "fig1-me-cm5", "fig1-me-cm6"}) {
    const auto spec = preset(name).front();
    json j = spec_json(spec);
    const auto again = parse_config(j);
    EXPECT_EQ(spec_json(again.experiment), j) << name;
  }
}

TEST(Cli, GenerateFlower) {
  TempDir dir;
  const auto out = dir / "f.txt";
  const auto r = cli("generate flower --n 12 --r 3 --seed 1 --out " + out.string());
  ASSERT_EQ(r.code, 0);
  const auto lg = load_snap(out.string(), false);
  EXPECT_EQ(lg.graph.num_nodes(), 12u);
  EXPECT_EQ(lg.graph.num_edges(), 16u);
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  EXPECT_EQ(cli("").code, 1);
  EXPECT_EQ(cli("frobnicate").code, 1);
  EXPECT_EQ(cli("generate flower --n 10 --r 3").code, 1);
  std::ofstream(dir / "bad.txt") << "0 1\n1 banana\n";
  const auto bad = cli("simulate --graph " + (dir / "bad.txt").string() + " --seed 1", true);
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.out.find("line 2"), std::string::npos) << bad.out;
  // A path that cannot be opened is a bad argument; unreadable contents are a runtime error.
  EXPECT_EQ(cli("simulate --graph " + (dir / "missing.txt").string() + " --seed 1").code, 1);
  EXPECT_EQ(cli("experiment --preset no-such-preset").code, 1);
}

TEST(Cli, SimulateIsByteDeterministic) {
  TempDir dir;
  const std::string base = "simulate --gen me:n=1600,d=4,c=16 --seed 5";
  ASSERT_EQ(cli(base + " --out " + (dir / "a.csv").string() + " --dump-states " + (dir / "a.dump").string()).code, 0);
  ASSERT_EQ(cli(base + " --out " + (dir / "b.csv").string() + " --dump-states " + (dir / "b.dump").string()).code, 0);
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  EXPECT_EQ(slurp(dir / "a.dump"), slurp(dir / "b.dump"));
  EXPECT_FALSE(slurp(dir / "a.csv").empty());
  EXPECT_EQ(slurp(dir / "a.csv").substr(0, 42), "round,orange,red,green,light_green,uncolor");
}

TEST(Cli, ExperimentPresetSummary) {
  TempDir dir;
  const auto r = cli("experiment --preset fig1a-er-low --replications 20 --threads 1 --summary " +
                     (dir / "s.json").string() + " --csv " + (dir / "a.csv").string());
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(slurp(dir / "s.json"));
  EXPECT_LE(j.at("spread_rate").get<double>(), 0.1);
  EXPECT_EQ(j.at("replications"), 20);
  EXPECT_FALSE(j.contains("metadata"));
}

TEST(Cli, CommunitiesAndSpectral) {
  TempDir dir;
  const auto c = cli("communities --gen me:n=640,d=1,c=16 --seed 1 --out " + (dir / "c.csv").string());
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(slurp(dir / "c.csv").rfind("node,community", 0), 0u);
  const auto s = cli("spectral --gen regular:n=200,d=6 --seed 1 --tol 1e-8 --max-iter 100000");
  ASSERT_EQ(s.code, 0);
  const auto j = json::parse(s.out);
  EXPECT_TRUE(j.at("converged").get<bool>());
  EXPECT_EQ(cli("spectral --gen regular:n=200,d=6 --seed 1 --tol 1e-12 --max-iter 2").code, 2);
}
