#pragma once

// Hop assignment under the minimum-level rule, realized revenue, and an
// exact expected-revenue oracle for fixed initiator sets on small graphs.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kcg/error.hpp"
#include "kcg/model.hpp"
#include "kcg/network.hpp"
#include "kcg/realization.hpp"

namespace kcg {

/// Level of every node plus |D_i| for i = 0..k.
struct HopAssignment {
  std::vector<Hop> hop;
  std::vector<std::size_t> participant_counts;
};

namespace detail {

template <class LiveFn>
HopAssignment assign_hops(const Graph& g, std::span<const NodeId> initiators, std::size_t k,
                          LiveFn&& live) {
  std::vector<std::uint32_t> level(g.node_count(), Hop::kInfiniteLevel);
  std::vector<NodeId> touched;
  multi_source_levels(g, initiators, k, live, level, touched);
  HopAssignment out{std::vector<Hop>(g.node_count()), std::vector<std::size_t>(k + 1, 0)};
  for (NodeId v : touched) {
    out.hop[v] = Hop{level[v]};
    ++out.participant_counts[level[v]];
  }
  return out;
}

/// Scratch buffers for repeated level computations on one graph.
class LevelScratch {
 public:
  explicit LevelScratch(std::size_t node_count) : level_(node_count, Hop::kInfiniteLevel) {}

  /// Sum of R[level] over all participants reached from `initiators`.
  template <class LiveFn>
  double revenue(const Graph& g, std::span<const NodeId> initiators, std::span<const double> R,
                 LiveFn&& live) {
    touched_.clear();
    multi_source_levels(g, initiators, R.size() - 1, live, level_, touched_);
    double sum = 0.0;
    for (NodeId v : touched_) {
      sum += R[level_[v]];
      level_[v] = Hop::kInfiniteLevel;
    }
    return sum;
  }

  /// Adds weight * R[level] per participant into `acc`.
  template <class LiveFn>
  void accumulate(const Graph& g, std::span<const NodeId> initiators, std::span<const double> R,
                  LiveFn&& live, double weight, std::vector<double>& acc) {
    touched_.clear();
    multi_source_levels(g, initiators, R.size() - 1, live, level_, touched_);
    for (NodeId v : touched_) {
      acc[v] += weight * R[level_[v]];
      level_[v] = Hop::kInfiniteLevel;
    }
  }

 private:
  std::vector<std::uint32_t> level_;
  std::vector<NodeId> touched_;
};

}  // namespace detail

/// Levels from `initiators` over edges observed live in psi (unknown counts as dead).
/// Every initiator must be an accepted node of psi.
inline HopAssignment hop_assignment(const Graph& g, const PartialRealization& psi,
                                    std::span<const NodeId> initiators, std::size_t k) {
  if (psi.node_count() != g.node_count() || psi.edge_count() != g.edge_count())
    throw ArgumentError("partial realization does not match graph");
  for (NodeId s : initiators) {
    if (!g.contains(s)) throw ArgumentError("initiator id out of range");
    if (psi.node(s) != TriState::One)
      throw ArgumentError("initiator " + std::to_string(s) + " is not in the accepted state");
  }
  return detail::assign_hops(g, initiators, k,
                             [&](EdgeId e) { return psi.edge(e) == TriState::One; });
}

/// Levels from `initiators` over the live edges of a full realization.
inline HopAssignment hop_assignment(const Graph& g, const Realization& phi,
                                    std::span<const NodeId> initiators, std::size_t k) {
  if (phi.node_count() != g.node_count() || phi.edge_count() != g.edge_count())
    throw ArgumentError("realization does not match graph");
  for (NodeId s : initiators) {
    if (!g.contains(s)) throw ArgumentError("initiator id out of range");
    if (!phi.node(s))
      throw ArgumentError("initiator " + std::to_string(s) + " is not in the accepted state");
  }
  return detail::assign_hops(g, initiators, k, [&](EdgeId e) { return phi.edge(e); });
}

/// Realized revenue under the observation: all accepted initiators of psi.
inline HopAssignment hop_assignment(const Graph& g, const PartialRealization& psi, std::size_t k) {
  return hop_assignment(g, psi, psi.accepted_initiators(), k);
}

/// Sum over participants of R[level]; non-participants contribute 0.
inline double total_revenue(const HopAssignment& assignment, std::span<const double> revenue) {
  double sum = 0.0;
  for (Hop h : assignment.hop) {
    if (!h.is_finite()) continue;
    if (h.level() >= revenue.size())
      throw ArgumentError("assignment level exceeds revenue vector");
    sum += revenue[h.level()];
  }
  return sum;
}

struct ExpectedRevenue {
  double total = 0.0;
  /// Expected revenue collected from each node.
  std::vector<double> per_node;
  /// Non-degenerate random variables enumerated.
  std::size_t variables = 0;
};

inline constexpr std::size_t kDefaultEnumerationCap = 24;

/// Exact E[f(S, Phi)] for a fixed (non-adaptive) invitation set S, by
/// enumerating every acceptance of S and every edge that can carry
/// participation within k hops of S. Variables with probability 0 or 1 are
/// fixed rather than enumerated.
inline ExpectedRevenue expected_revenue_exact(const Graph& g, const ModelParams& params,
                                              std::span<const NodeId> initiator_set,
                                              std::size_t k,
                                              std::size_t cap = kDefaultEnumerationCap) {
  if (params.theta.size() != g.node_count()) throw ArgumentError("theta length does not match graph");
  if (params.revenue.size() < k + 1) throw ArgumentError("revenue vector shorter than k+1");
  const std::span<const double> R(params.revenue.data(), k + 1);

  std::vector<std::uint8_t> in_set(g.node_count(), 0);
  for (NodeId s : initiator_set) {
    if (!g.contains(s)) throw ArgumentError("initiator id out of range");
    in_set[s] = 1;
  }

  // Graph distance from the set decides which edges can matter.
  std::vector<std::uint32_t> dist(g.node_count(), Hop::kInfiniteLevel);
  {
    std::vector<NodeId> touched;
    std::vector<NodeId> sources;
    for (std::size_t v = 0; v < g.node_count(); ++v)
      if (in_set[v]) sources.push_back(static_cast<NodeId>(v));
    detail::multi_source_levels(g, sources, k, [](EdgeId) { return true; }, dist, touched);
  }

  std::vector<std::uint8_t> node_live(g.node_count(), 0);
  std::vector<std::uint8_t> edge_live(g.edge_count(), 0);
  std::vector<NodeId> random_nodes;
  std::vector<EdgeId> random_edges;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    if (!in_set[v]) continue;
    const double t = params.theta[v];
    if (t >= 1.0) node_live[v] = 1;
    else if (t > 0.0) random_nodes.push_back(static_cast<NodeId>(v));
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edges()[e];
    if (std::min(dist[ed.u], dist[ed.v]) >= k) continue;
    if (ed.p >= 1.0) edge_live[e] = 1;
    else if (ed.p > 0.0) random_edges.push_back(static_cast<EdgeId>(e));
  }

  const std::size_t r = random_nodes.size() + random_edges.size();
  if (r > cap || r >= 63) throw SizeError(r, cap);

  ExpectedRevenue out;
  out.per_node.assign(g.node_count(), 0.0);
  out.variables = r;

  detail::LevelScratch scratch(g.node_count());
  std::vector<NodeId> initiators;
  const std::uint64_t combos = std::uint64_t{1} << r;
  for (std::uint64_t mask = 0; mask < combos; ++mask) {
    double weight = 1.0;
    std::size_t bit = 0;
    for (NodeId v : random_nodes) {
      const bool on = (mask >> bit++) & 1U;
      node_live[v] = on;
      weight *= on ? params.theta[v] : 1.0 - params.theta[v];
    }
    for (EdgeId e : random_edges) {
      const bool on = (mask >> bit++) & 1U;
      edge_live[e] = on;
      weight *= on ? g.edges()[e].p : 1.0 - g.edges()[e].p;
    }
    initiators.clear();
    for (NodeId s : initiator_set)
      if (node_live[s]) initiators.push_back(s);
    scratch.accumulate(g, initiators, R, [&](EdgeId e) { return edge_live[e] != 0; }, weight,
                       out.per_node);
  }
  for (double x : out.per_node) out.total += x;
  return out;
}

}  // namespace kcg
