#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rumor/errors.hpp"
#include "rumor/graph.hpp"

namespace rumor {

// Graph read from an edge list plus the original id of every dense NodeId.
struct LoadedGraph {
  Graph graph;
  std::vector<std::uint64_t> original_id;
  bool has_header = false;  // written by write_edge_list
};

namespace detail {

inline bool parse_u64(std::string_view tok, std::uint64_t& out) {
  if (tok.empty()) return false;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

// "# rumor edge list: nodes=N edges=M" lets isolated nodes survive a round trip.
inline bool parse_header_nodes(std::string_view line, std::uint64_t& nodes) {
  constexpr std::string_view tag = "# rumor edge list: nodes=";
  if (line.substr(0, tag.size()) != tag) return false;
  auto rest = line.substr(tag.size());
  const auto sp = rest.find(' ');
  return parse_u64(rest.substr(0, sp), nodes);
}

}  // namespace detail

// Whitespace-separated integer pairs, '#' lines ignored. Ids are relabeled
// densely in ascending order of original id; duplicates, reversed duplicates
// and self-loops vanish.
inline LoadedGraph parse_edge_list(std::istream& in) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::vector<std::uint64_t> ids;
  std::uint64_t declared_nodes = 0;
  bool has_declared = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv(line);
    const auto first = sv.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    if (sv[first] == '#') {
      if (lineno == 1 && detail::parse_header_nodes(sv, declared_nodes)) has_declared = true;
      continue;
    }
    const auto tok = detail::split_ws(sv);
    std::uint64_t a = 0, b = 0;
    if (tok.size() != 2 || !detail::parse_u64(tok[0], a) || !detail::parse_u64(tok[1], b)) {
      throw ParseError("malformed edge line: '" + line + "'", lineno);
    }
    raw.emplace_back(a, b);
    ids.push_back(a);
    ids.push_back(b);
  }
  if (has_declared) {
    for (std::uint64_t v = 0; v < declared_nodes; ++v) ids.push_back(v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (has_declared && !ids.empty() && ids.back() >= declared_nodes) {
    throw ParseError("edge endpoint exceeds declared node count", 1);
  }
  if (ids.empty()) throw UsageError("edge list describes an empty graph");

  std::unordered_map<std::uint64_t, NodeId> dense;
  dense.reserve(ids.size() * 2);
  for (std::size_t i = 0; i < ids.size(); ++i) dense.emplace(ids[i], static_cast<NodeId>(i));
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& [a, b] : raw) edges.push_back({dense.at(a), dense.at(b)});

  return LoadedGraph{Graph::from_edges(ids.size(), std::move(edges)), std::move(ids), has_declared};
}

inline LoadedGraph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_edge_list(in);
}

// Induced subgraph on the largest connected component (ties to the component
// holding the lowest node id). Node order is preserved.
inline LoadedGraph largest_component(const LoadedGraph& lg) {
  const Graph& g = lg.graph;
  const std::size_t n = g.num_nodes();
  std::vector<std::uint32_t> comp(n, UINT32_MAX);
  std::vector<std::size_t> sizes;
  std::vector<NodeId> queue;
  for (NodeId root = 0; root < n; ++root) {
    if (comp[root] != UINT32_MAX) continue;
    const auto id = static_cast<std::uint32_t>(sizes.size());
    comp[root] = id;
    queue.assign(1, root);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (NodeId w : g.neighbors(queue[head])) {
        if (comp[w] == UINT32_MAX) {
          comp[w] = id;
          queue.push_back(w);
        }
      }
    }
    sizes.push_back(queue.size());
  }
  const auto best = static_cast<std::uint32_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  if (sizes[best] == n) return lg;

  std::vector<NodeId> remap(n, UINT32_MAX);
  LoadedGraph out;
  out.has_header = lg.has_header;
  for (NodeId v = 0; v < n; ++v) {
    if (comp[v] != best) continue;
    remap[v] = static_cast<NodeId>(out.original_id.size());
    out.original_id.push_back(lg.original_id.empty() ? v : lg.original_id[v]);
  }
  std::vector<Edge> edges;
  for (const auto& e : g.edges())
    if (comp[e.u] == best) edges.push_back({remap[e.u], remap[e.v]});
  out.graph = Graph::from_edges(out.original_id.size(), std::move(edges));
  return out;
}

inline LoadedGraph load_snap(const std::string& path, bool keep_largest_component) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open graph file: " + path);
  auto lg = parse_edge_list(in);
  return keep_largest_component ? largest_component(lg) : lg;
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# rumor edge list: nodes=" << g.num_nodes() << " edges=" << g.num_edges() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

inline void write_edge_list(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_edge_list(out, g);
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_labels(std::ostream& out, const LoadedGraph& lg) {
  out << "node,original_id\n";
  for (std::size_t v = 0; v < lg.original_id.size(); ++v) out << v << ',' << lg.original_id[v] << '\n';
}

}  // namespace rumor
