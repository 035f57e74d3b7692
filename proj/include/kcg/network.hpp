#pragma once

// Immutable undirected graph with per-edge participation probabilities,
// edge-list ingestion and bounded breadth-first queries.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kcg/error.hpp"

namespace kcg {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
  NodeId u;
  NodeId v;
  double p;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  NodeId node;
  EdgeId edge;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

class Graph {
 public:
  Graph() = default;

  /// Builds a graph over nodes 0..node_count-1. Endpoints are stored with
  /// u < v. Throws ArgumentError on self-loops, duplicates, bad ids or p outside [0,1].
  static Graph from_edges(std::size_t node_count, std::vector<Edge> edges,
                          std::vector<std::string> labels = {}) {
    if (node_count > std::numeric_limits<NodeId>::max())
      throw ArgumentError("too many nodes");
    if (!labels.empty() && labels.size() != node_count)
      throw ArgumentError("label table size does not match node count");
    if (labels.empty()) {
      labels.reserve(node_count);
      for (std::size_t i = 0; i < node_count; ++i) labels.push_back(std::to_string(i));
    }

    Graph g;
    g.labels_ = std::move(labels);
    for (std::size_t i = 0; i < g.labels_.size(); ++i) {
      if (!g.index_.emplace(g.labels_[i], static_cast<NodeId>(i)).second)
        throw ArgumentError("duplicate node label '" + g.labels_[i] + "'");
    }

    std::vector<std::size_t> degree(node_count, 0);
    for (auto& e : edges) {
      if (e.u >= node_count || e.v >= node_count)
        throw ArgumentError("edge endpoint out of range");
      if (e.u == e.v) throw ArgumentError("self-loop at node " + std::to_string(e.u));
      if (!(e.p >= 0.0 && e.p <= 1.0))
        throw ArgumentError("edge probability outside [0,1]");
      if (e.u > e.v) std::swap(e.u, e.v);
      ++degree[e.u];
      ++degree[e.v];
    }

    g.offsets_.assign(node_count + 1, 0);
    for (std::size_t i = 0; i < node_count; ++i) g.offsets_[i + 1] = g.offsets_[i] + degree[i];
    g.adjacency_.resize(g.offsets_.back());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto id = static_cast<EdgeId>(i);
      g.adjacency_[cursor[edges[i].u]++] = {edges[i].v, id};
      g.adjacency_[cursor[edges[i].v]++] = {edges[i].u, id};
    }
    for (std::size_t v = 0; v < node_count; ++v) {
      auto first = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
      auto last = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
      std::sort(first, last, [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
      if (std::adjacent_find(first, last, [](const Neighbor& a, const Neighbor& b) {
            return a.node == b.node;
          }) != last)
        throw ArgumentError("duplicate edge at node " + std::to_string(v));
    }
    g.edges_ = std::move(edges);
    return g;
  }

  std::size_t node_count() const noexcept { return labels_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  /// Neighbors of v sorted by node id.
  std::span<const Neighbor> neighbors(NodeId v) const {
    check_node(v);
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

  std::size_t degree(NodeId v) const {
    check_node(v);
    return offsets_[v + 1] - offsets_[v];
  }

  const Edge& edge(EdgeId e) const {
    if (e >= edges_.size()) throw ArgumentError("edge id " + std::to_string(e) + " out of range");
    return edges_[e];
  }

  std::span<const Edge> edges() const noexcept { return edges_; }

  std::optional<EdgeId> edge_between(NodeId a, NodeId b) const {
    auto adj = neighbors(a);
    check_node(b);
    auto it = std::lower_bound(adj.begin(), adj.end(), b,
                               [](const Neighbor& n, NodeId x) { return n.node < x; });
    if (it == adj.end() || it->node != b) return std::nullopt;
    return it->edge;
  }

  const std::string& label(NodeId v) const {
    check_node(v);
    return labels_[v];
  }

  std::optional<NodeId> find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(NodeId v) const noexcept { return v < labels_.size(); }

  friend bool operator==(const Graph& a, const Graph& b) {
    if (a.labels_ != b.labels_ || a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t i = 0; i < a.edges_.size(); ++i) {
      const auto& x = a.edges_[i];
      const auto& y = b.edges_[i];
      if (x.u != y.u || x.v != y.v || x.p != y.p) return false;
    }
    return true;
  }

 private:
  void check_node(NodeId v) const {
    if (v >= labels_.size())
      throw ArgumentError("node id " + std::to_string(v) + " out of range");
  }

  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  std::vector<Edge> edges_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
};

inline std::span<const Neighbor> neighbors(const Graph& g, NodeId v) { return g.neighbors(v); }

struct LoadResult {
  Graph graph;
  /// Lines dropped as self-loops or duplicate edges.
  std::size_t warnings = 0;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r' ||
                               line[i] == '\v' || line[i] == '\f'))
      ++i;
    std::size_t j = i;
    while (j < line.size() && !(line[j] == ' ' || line[j] == '\t' || line[j] == '\r' ||
                                line[j] == '\v' || line[j] == '\f'))
      ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  double value = 0.0;
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

inline bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace detail

/// Reads "u v" / "u v p" lines. Labels get dense ids in first-seen order;
/// '#' and '%' lines are comments; self-loops and repeated edges are dropped
/// (the first probability wins) and counted in `warnings`.
inline LoadResult load_edge_list(std::istream& in, double default_p) {
  if (!detail::is_probability(default_p))
    throw ArgumentError("default edge probability outside [0,1]");

  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> ids;
  std::vector<Edge> edges;
  std::unordered_map<std::uint64_t, EdgeId> seen;
  std::size_t warnings = 0;

  auto intern = [&](std::string_view label) {
    auto [it, inserted] = ids.try_emplace(std::string(label), static_cast<NodeId>(labels.size()));
    if (inserted) labels.emplace_back(label);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = detail::split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.front().front() == '#' || tokens.front().front() == '%') continue;
    if (tokens.size() != 2 && tokens.size() != 3)
      throw ParseError(line_no, "expected 2 or 3 tokens, found " + std::to_string(tokens.size()));

    double p = default_p;
    if (tokens.size() == 3) {
      auto parsed = detail::parse_double(tokens[2]);
      if (!parsed) throw ParseError(line_no, "edge probability is not a number");
      if (!detail::is_probability(*parsed))
        throw ParseError(line_no, "edge probability outside [0,1]");
      p = *parsed;
    }

    NodeId a = intern(tokens[0]);
    NodeId b = intern(tokens[1]);
    if (a == b) {
      ++warnings;
      continue;
    }
    const auto key = (std::uint64_t{std::min(a, b)} << 32) | std::max(a, b);
    if (!seen.emplace(key, static_cast<EdgeId>(edges.size())).second) {
      ++warnings;
      continue;
    }
    edges.push_back({a, b, p});
  }
  if (in.bad()) throw ParseError(0, "read failure");

  const std::size_t n = labels.size();
  return {Graph::from_edges(n, std::move(edges), std::move(labels)), warnings};
}

inline LoadResult load_edge_list(std::string_view text, double default_p) {
  std::istringstream in{std::string(text)};
  return load_edge_list(in, default_p);
}

inline LoadResult load_edge_list_file(const std::string& path, double default_p) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return load_edge_list(in, default_p);
}

/// Writes "u v p" lines using node labels; load_edge_list reads it back to an equal graph.
inline void write_edge_list(std::ostream& out, const Graph& g) {
  out.precision(17);
  for (const auto& e : g.edges()) out << g.label(e.u) << ' ' << g.label(e.v) << ' ' << e.p << '\n';
}

struct NodeDistance {
  NodeId node;
  std::uint32_t distance;

  friend bool operator==(const NodeDistance&, const NodeDistance&) = default;
};

/// Reusable bounded BFS. Stamps avoid clearing O(n) state between runs.
class BoundedBfs {
 public:
  explicit BoundedBfs(std::size_t node_count = 0) { resize(node_count); }

  void resize(std::size_t node_count) {
    if (stamp_.size() != node_count) {
      stamp_.assign(node_count, 0);
      epoch_ = 0;
    }
  }

  /// Visits every node within `max_hops` of src in BFS order (distance non-decreasing).
  /// `edge_ok(edge_id)` filters traversable edges.
  template <class EdgeFilter>
  const std::vector<NodeDistance>& run(const Graph& g, NodeId src, std::uint32_t max_hops,
                                       EdgeFilter&& edge_ok) {
    resize(g.node_count());
    (void)g.neighbors(src);
    next_epoch();
    order_.clear();
    order_.push_back({src, 0});
    stamp_[src] = epoch_;
    for (std::size_t head = 0; head < order_.size(); ++head) {
      const auto [v, d] = order_[head];
      if (d == max_hops) continue;
      for (const auto& nb : g.neighbors(v)) {
        if (stamp_[nb.node] == epoch_ || !edge_ok(nb.edge)) continue;
        stamp_[nb.node] = epoch_;
        order_.push_back({nb.node, d + 1});
      }
    }
    return order_;
  }

  const std::vector<NodeDistance>& run(const Graph& g, NodeId src, std::uint32_t max_hops) {
    return run(g, src, max_hops, [](EdgeId) { return true; });
  }

 private:
  void next_epoch() {
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
  }

  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<NodeDistance> order_;
};

/// Nodes within `max_hops` unweighted hops of src, in BFS order; src has distance 0.
inline std::vector<NodeDistance> bfs_within(const Graph& g, NodeId src, std::uint32_t max_hops) {
  BoundedBfs bfs(g.node_count());
  return bfs.run(g, src, max_hops);
}

}  // namespace kcg
