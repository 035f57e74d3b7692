#pragma once

// Seeded graph generators for tests and for building stand-in datasets.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "kcg/error.hpp"
#include "kcg/network.hpp"
#include "kcg/random.hpp"

namespace kcg::synthetic {

namespace detail {

inline std::uint64_t pair_key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t{a} << 32) | b;
}

}  // namespace detail

/// Holme-Kim preferential attachment with triad formation: heavy-tailed
/// degrees and clustering, like co-authorship and social graphs. The edge
/// count lands near `target_edges`.
inline Graph powerlaw_cluster(std::size_t n, std::size_t target_edges, double triad_p, double p,
                              std::uint64_t seed) {
  if (n < 3) throw ArgumentError("powerlaw_cluster needs at least 3 nodes");
  Rng rng(seed);
  const double per_node = static_cast<double>(target_edges) / static_cast<double>(n);
  const auto core = std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil(per_node)) + 1);

  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> present;
  std::vector<std::vector<NodeId>> adj(n);
  std::vector<NodeId> endpoints;  // each node repeated once per incident edge
  auto add = [&](NodeId a, NodeId b) {
    if (a == b || !present.insert(detail::pair_key(a, b)).second) return false;
    edges.push_back({a, b, p});
    adj[a].push_back(b);
    adj[b].push_back(a);
    endpoints.push_back(a);
    endpoints.push_back(b);
    return true;
  };

  for (NodeId a = 0; a < core; ++a)
    for (NodeId b = a + 1; b < core; ++b) add(a, b);

  const double remaining = static_cast<double>(target_edges) - static_cast<double>(edges.size());
  const double rate = std::max(1.0, remaining / static_cast<double>(n - core));
  for (auto v = static_cast<NodeId>(core); v < n; ++v) {
    auto want = static_cast<std::size_t>(rate);
    if (bernoulli(rng, rate - std::floor(rate))) ++want;
    want = std::min<std::size_t>(want, v);
    std::size_t added = 0;
    std::size_t attempts = 0;
    NodeId anchor = endpoints[uniform_index(rng, endpoints.size())];
    if (add(v, anchor)) ++added;
    while (added < want && attempts++ < 50 * want) {
      NodeId target;
      if (bernoulli(rng, triad_p) && !adj[anchor].empty())
        target = adj[anchor][uniform_index(rng, adj[anchor].size())];
      else
        target = anchor = endpoints[uniform_index(rng, endpoints.size())];
      if (add(v, target)) ++added;
    }
  }
  return Graph::from_edges(n, std::move(edges));
}

/// Uniform random recursive tree: node i attaches to a uniform earlier node.
inline Graph random_tree(std::size_t n, double p, Rng& rng) {
  std::vector<Edge> edges;
  for (std::size_t v = 1; v < n; ++v)
    edges.push_back({static_cast<NodeId>(uniform_index(rng, v)), static_cast<NodeId>(v), p});
  return Graph::from_edges(n, std::move(edges));
}

/// G(n, q) with every edge probability p.
inline Graph erdos_renyi(std::size_t n, double q, double p, Rng& rng) {
  std::vector<Edge> edges;
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b)
      if (bernoulli(rng, q)) edges.push_back({a, b, p});
  return Graph::from_edges(n, std::move(edges));
}

inline Graph path(std::size_t n, double p) {
  std::vector<Edge> edges;
  for (std::size_t v = 1; v < n; ++v)
    edges.push_back({static_cast<NodeId>(v - 1), static_cast<NodeId>(v), p});
  return Graph::from_edges(n, std::move(edges));
}

inline Graph star(std::size_t leaves, double p) {
  std::vector<Edge> edges;
  for (std::size_t v = 1; v <= leaves; ++v) edges.push_back({0, static_cast<NodeId>(v), p});
  return Graph::from_edges(leaves + 1, std::move(edges));
}

}  // namespace kcg::synthetic
