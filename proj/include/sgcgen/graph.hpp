#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sgcgen/error.hpp"

namespace sgcgen {

using NodeId = std::uint32_t;

/// Immutable sparse undirected simple graph. Neighbor lists are stored sorted
/// ascending in a CSR layout, so cut and intersection counting stay linear in
/// the degrees involved. Safe for concurrent reads once constructed.
class Graph {
public:
  Graph() = default;

  /// Builds a graph on nodes 0..n-1 from an arbitrary edge collection.
  /// Self-loops are dropped, duplicates (in either orientation) collapse to a
  /// single undirected edge. A graph with zero edges is permitted here; the
  /// parser is the layer that rejects empty inputs.
  static Graph from_edges(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges) {
    for (auto& [u, v] : edges) {
      if (u >= n || v >= n)
        throw Error(ErrorCode::validation, "edge endpoint out of range");
      if (u > v) std::swap(u, v);
    }
    std::erase_if(edges, [](const auto& e) { return e.first == e.second; });
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    Graph g;
    g.n_ = n;
    g.m_ = edges.size();
    std::vector<std::size_t> deg(n, 0);
    for (const auto& [u, v] : edges) {
      ++deg[u];
      ++deg[v];
    }
    g.offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + deg[i];
    g.adj_.resize(2 * g.m_);
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    // edges are sorted (u,v) with u <= v, so both runs land ascending
    for (const auto& [u, v] : edges) {
      g.adj_[cursor[u]++] = v;
      g.adj_[cursor[v]++] = u;
    }
    return g;
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t total_degree() const noexcept { return 2 * m_; }

  std::size_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }

  std::span<const NodeId> neighbors(NodeId i) const {
    return {adj_.data() + offsets_[i], adj_.data() + offsets_[i + 1]};
  }

  bool has_edge(NodeId u, NodeId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  /// y = A x
  void adjacency_matvec(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    y.resize(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (std::size_t o = offsets_[i]; o < offsets_[i + 1]; ++o)
        acc += x[static_cast<Eigen::Index>(adj_[o])];
      y[static_cast<Eigen::Index>(i)] = acc;
    }
  }

private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> adj_;
};

/// Sum of degrees over a duplicate-free node set.
inline std::uint64_t volume(const Graph& g, std::span<const NodeId> nodes) {
  std::vector<bool> seen(g.n(), false);
  std::uint64_t vol = 0;
  for (NodeId i : nodes) {
    if (i >= g.n()) throw Error(ErrorCode::validation, "node id out of range in volume()");
    if (seen[i]) throw Error(ErrorCode::validation, "duplicate node id in volume()");
    seen[i] = true;
    vol += g.degree(i);
  }
  return vol;
}

struct EdgeListOptions {
  std::string comment_prefix = "#";
  /// When true, node ids in the file start at 1 and are shifted to 0-based on
  /// load (the remap table then holds the shifted ids).
  bool one_indexed = false;
};

struct ParsedGraph {
  Graph graph;
  /// original_ids[new_id] = node id as it appeared in the file (after the
  /// one-indexed shift, if any), in first-appearance order.
  std::vector<long long> original_ids;
};

namespace detail {

inline bool parse_ll(std::string_view tok, long long& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) toks.push_back(line.substr(start, i - start));
  }
  return toks;
}

}  // namespace detail

/// Parses a whitespace-separated edge list ("u v" per line). Lines starting
/// with the comment prefix and blank lines are ignored. Node ids are remapped
/// to 0..n-1 in first-appearance order; self-loops are dropped and duplicate
/// edges collapsed.
inline ParsedGraph parse_edge_list(std::istream& in, const EdgeListOptions& opts = {}) {
  std::unordered_map<long long, NodeId> remap;
  std::vector<long long> original;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::string line;
  std::size_t line_no = 0;

  auto intern = [&](long long id) -> NodeId {
    auto it = remap.find(id);
    if (it != remap.end()) return it->second;
    NodeId fresh = static_cast<NodeId>(original.size());
    remap.emplace(id, fresh);
    original.push_back(id);
    return fresh;
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv(line);
    std::size_t first = sv.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    sv.remove_prefix(first);
    if (!opts.comment_prefix.empty() && sv.starts_with(opts.comment_prefix)) continue;

    auto toks = detail::split_ws(sv);
    long long a = 0, b = 0;
    if (toks.size() != 2 || !detail::parse_ll(toks[0], a) || !detail::parse_ll(toks[1], b))
      throw Error(ErrorCode::parse, "parse error at line " + std::to_string(line_no) +
                                        ": expected two integer node ids");
    if (opts.one_indexed) {
      if (a < 1 || b < 1)
        throw Error(ErrorCode::parse, "parse error at line " + std::to_string(line_no) +
                                          ": node id < 1 in one-indexed input");
      --a;
      --b;
    }
    const NodeId ia = intern(a);  // sequenced: first appearance decides the id
    const NodeId ib = intern(b);
    edges.emplace_back(ia, ib);
  }

  ParsedGraph out;
  out.graph = Graph::from_edges(original.size(), std::move(edges));
  out.original_ids = std::move(original);
  if (out.graph.m() == 0)
    throw Error(ErrorCode::empty_graph, "no edges left after simplification");
  return out;
}

inline ParsedGraph parse_edge_list_file(const std::string& path, const EdgeListOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open edge list file: " + path);
  return parse_edge_list(in, opts);
}

/// Canonical edge-list serialization: one "u v" line per edge with u < v,
/// lexicographically sorted. Re-parsing yields an isomorphic graph.
inline void write_edge_list(const Graph& g, std::ostream& out) {
  for (NodeId u = 0; u < g.n(); ++u)
    for (NodeId v : g.neighbors(u))
      if (v > u) out << u << ' ' << v << '\n';
}

/// Component id per node, ids assigned in order of first discovery.
inline std::vector<int> connected_components(const Graph& g, int* count_out = nullptr) {
  std::vector<int> comp(g.n(), -1);
  int count = 0;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < g.n(); ++s) {
    if (comp[s] != -1) continue;
    comp[s] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : g.neighbors(u)) {
        if (comp[v] == -1) {
          comp[v] = count;
          stack.push_back(v);
        }
      }
    }
    ++count;
  }
  if (count_out) *count_out = count;
  return comp;
}

inline bool is_connected(const Graph& g) {
  if (g.n() == 0) return false;
  int count = 0;
  connected_components(g, &count);
  return count == 1;
}

struct LccResult {
  Graph graph;
  /// original node id (in the input graph) for each node of the component
  std::vector<NodeId> original_ids;
};

/// Induced subgraph on the largest connected component; ties go to the
/// component containing the smallest node id. New ids preserve the relative
/// order of the old ones.
inline LccResult largest_connected_component(const Graph& g) {
  if (g.n() == 0) throw Error(ErrorCode::empty_graph, "empty graph has no components");
  int count = 0;
  std::vector<int> comp = connected_components(g, &count);
  std::vector<std::size_t> size(count, 0);
  for (int c : comp) ++size[static_cast<std::size_t>(c)];
  // components are numbered by first discovery, so the first maximum is the
  // one containing the smallest node id
  int best = 0;
  for (int c = 1; c < count; ++c)
    if (size[static_cast<std::size_t>(c)] > size[static_cast<std::size_t>(best)]) best = c;

  LccResult out;
  std::vector<NodeId> new_id(g.n(), 0);
  for (NodeId u = 0; u < g.n(); ++u) {
    if (comp[u] == best) {
      new_id[u] = static_cast<NodeId>(out.original_ids.size());
      out.original_ids.push_back(u);
    }
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u : out.original_ids)
    for (NodeId v : g.neighbors(u))
      if (v > u) edges.emplace_back(new_id[u], new_id[v]);
  out.graph = Graph::from_edges(out.original_ids.size(), std::move(edges));
  return out;
}

/// Label file: one "node_id label_id" pair per line, same comment and
/// indexing conventions as the edge-list format (the shift applies to the
/// node id only).
inline std::vector<std::pair<long long, long long>> read_labels(std::istream& in,
                                                                const EdgeListOptions& opts = {}) {
  std::vector<std::pair<long long, long long>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv(line);
    std::size_t first = sv.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    sv.remove_prefix(first);
    if (!opts.comment_prefix.empty() && sv.starts_with(opts.comment_prefix)) continue;
    auto toks = detail::split_ws(sv);
    long long node = 0, label = 0;
    if (toks.size() != 2 || !detail::parse_ll(toks[0], node) || !detail::parse_ll(toks[1], label))
      throw Error(ErrorCode::parse, "parse error at line " + std::to_string(line_no) +
                                        ": expected \"node_id label_id\"");
    if (opts.one_indexed) {
      if (node < 1)
        throw Error(ErrorCode::parse, "parse error at line " + std::to_string(line_no) +
                                          ": node id < 1 in one-indexed input");
      --node;
    }
    pairs.emplace_back(node, label);
  }
  return pairs;
}

inline std::vector<std::pair<long long, long long>> read_labels_file(
    const std::string& path, const EdgeListOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open label file: " + path);
  return read_labels(in, opts);
}

/// Joins raw (node, label) pairs against a remap table; every node must be
/// labeled exactly once.
inline std::vector<long long> join_labels(const std::vector<long long>& original_ids,
                                          const std::vector<std::pair<long long, long long>>& pairs) {
  std::unordered_map<long long, long long> by_node;
  for (const auto& [node, label] : pairs) {
    if (!by_node.emplace(node, label).second)
      throw Error(ErrorCode::inconsistent, "node " + std::to_string(node) +
                                               " labeled more than once");
  }
  std::vector<long long> labels;
  labels.reserve(original_ids.size());
  for (long long id : original_ids) {
    auto it = by_node.find(id);
    if (it == by_node.end())
      throw Error(ErrorCode::inconsistent, "no label for node " + std::to_string(id));
    labels.push_back(it->second);
  }
  return labels;
}

}  // namespace sgcgen
