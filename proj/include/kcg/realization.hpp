#pragma once

// Ground truth (full realizations), observations (partial realizations),
// hop levels under the observed live edges, and the feedback step that
// reveals an initiator's diffusion after it accepts.

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "kcg/error.hpp"
#include "kcg/model.hpp"
#include "kcg/network.hpp"
#include "kcg/random.hpp"

namespace kcg {

enum class TriState : std::uint8_t { Unknown = 0, Zero = 1, One = 2 };

constexpr TriState to_tristate(bool b) noexcept { return b ? TriState::One : TriState::Zero; }

/// Hop level of a participant: 0..k, or infinity for non-participants.
class Hop {
 public:
  static constexpr std::uint32_t kInfiniteLevel = std::numeric_limits<std::uint32_t>::max();

  constexpr Hop() noexcept = default;
  constexpr explicit Hop(std::uint32_t level) noexcept : level_(level) {}

  static constexpr Hop infinity() noexcept { return Hop{}; }

  constexpr bool is_finite() const noexcept { return level_ != kInfiniteLevel; }
  constexpr std::uint32_t level() const noexcept { return level_; }

  friend constexpr auto operator<=>(Hop, Hop) noexcept = default;

 private:
  std::uint32_t level_ = kInfiniteLevel;
};

/// R[h], with R[infinity] = 0.
inline double revenue_at(std::span<const double> revenue, Hop h) noexcept {
  return h.is_finite() && h.level() < revenue.size() ? revenue[h.level()] : 0.0;
}

/// A complete assignment of node (accept if invited) and edge (live) states.
class Realization {
 public:
  Realization() = default;
  Realization(std::vector<std::uint8_t> node_state, std::vector<std::uint8_t> edge_state)
      : node_(std::move(node_state)), edge_(std::move(edge_state)) {}

  bool node(NodeId v) const { return node_.at(v) != 0; }
  bool edge(EdgeId e) const { return edge_.at(e) != 0; }
  std::size_t node_count() const noexcept { return node_.size(); }
  std::size_t edge_count() const noexcept { return edge_.size(); }
  std::size_t accepted_count() const { return static_cast<std::size_t>(std::count(node_.begin(), node_.end(), 1)); }
  std::size_t live_edge_count() const { return static_cast<std::size_t>(std::count(edge_.begin(), edge_.end(), 1)); }

  friend bool operator==(const Realization&, const Realization&) = default;

 private:
  std::vector<std::uint8_t> node_;
  std::vector<std::uint8_t> edge_;
};

/// Each node accepts with probability theta, each edge is live with probability p.
template <class URBG>
Realization sample_realization(const Graph& g, const ModelParams& params, URBG& rng) {
  if (params.theta.size() != g.node_count())
    throw ArgumentError("theta length does not match graph");
  std::vector<std::uint8_t> nodes(g.node_count());
  std::vector<std::uint8_t> edges(g.edge_count());
  for (std::size_t v = 0; v < nodes.size(); ++v) nodes[v] = bernoulli(rng, params.theta[v]);
  for (std::size_t e = 0; e < edges.size(); ++e) edges[e] = bernoulli(rng, g.edges()[e].p);
  return {std::move(nodes), std::move(edges)};
}

/// Ground truth sampled on first access and cached (deferred decisions).
/// Distributionally identical to sample_realization.
class LazyRealization {
 public:
  LazyRealization(const Graph& g, std::vector<double> theta, std::uint64_t seed)
      : graph_(&g),
        theta_(std::move(theta)),
        rng_(seed),
        node_(g.node_count(), TriState::Unknown),
        edge_(g.edge_count(), TriState::Unknown) {
    if (theta_.size() != g.node_count()) throw ArgumentError("theta length does not match graph");
  }

  bool node(NodeId v) {
    auto& s = node_.at(v);
    if (s == TriState::Unknown) s = to_tristate(bernoulli(rng_, theta_[v]));
    return s == TriState::One;
  }

  bool edge(EdgeId e) {
    auto& s = edge_.at(e);
    if (s == TriState::Unknown) s = to_tristate(bernoulli(rng_, graph_->edges()[e].p));
    return s == TriState::One;
  }

  std::size_t node_count() const noexcept { return node_.size(); }
  std::size_t edge_count() const noexcept { return edge_.size(); }

 private:
  const Graph* graph_;
  std::vector<double> theta_;
  Rng rng_;
  std::vector<TriState> node_;
  std::vector<TriState> edge_;
};

/// What the policy has observed so far. States move from Unknown to a
/// determined value at most once.
class PartialRealization {
 public:
  PartialRealization() = default;
  PartialRealization(std::size_t node_count, std::size_t edge_count)
      : node_(node_count, TriState::Unknown), edge_(edge_count, TriState::Unknown) {}
  explicit PartialRealization(const Graph& g) : PartialRealization(g.node_count(), g.edge_count()) {}

  TriState node(NodeId v) const { return node_.at(v); }
  TriState edge(EdgeId e) const { return edge_.at(e); }
  bool invited(NodeId v) const { return node_.at(v) != TriState::Unknown; }

  /// Records an invitation outcome. A node can be determined once.
  void set_node(NodeId v, TriState s) {
    if (s == TriState::Unknown) throw UsageError("cannot reset a node to unknown");
    auto& cur = node_.at(v);
    if (cur != TriState::Unknown)
      throw UsageError("node " + std::to_string(v) + " was already invited");
    cur = s;
    invited_.push_back(v);
    if (s == TriState::One) accepted_.push_back(v);
  }

  /// Records an edge outcome. Re-recording the same value is a no-op.
  void set_edge(EdgeId e, TriState s) {
    if (s == TriState::Unknown) throw UsageError("cannot reset an edge to unknown");
    auto& cur = edge_.at(e);
    if (cur == s) return;
    if (cur != TriState::Unknown)
      throw UsageError("edge " + std::to_string(e) + " state is already determined");
    cur = s;
    ++known_edges_;
  }

  /// Accepted initiators in acceptance order.
  std::span<const NodeId> accepted_initiators() const noexcept { return accepted_; }
  /// Invited nodes in invitation order.
  std::span<const NodeId> invited_nodes() const noexcept { return invited_; }

  std::size_t node_count() const noexcept { return node_.size(); }
  std::size_t edge_count() const noexcept { return edge_.size(); }
  std::size_t known_edge_count() const noexcept { return known_edges_; }

  std::span<const TriState> node_states() const noexcept { return node_; }
  std::span<const TriState> edge_states() const noexcept { return edge_; }

  /// Equal observations; invitation order is ignored.
  friend bool operator==(const PartialRealization& a, const PartialRealization& b) {
    return a.node_ == b.node_ && a.edge_ == b.edge_;
  }

 private:
  std::vector<TriState> node_;
  std::vector<TriState> edge_;
  std::vector<NodeId> accepted_;
  std::vector<NodeId> invited_;
  std::size_t known_edges_ = 0;
};

/// True iff every determined entry of psi equals phi's entry.
inline bool is_consistent(const Realization& phi, const PartialRealization& psi) {
  if (phi.node_count() != psi.node_count() || phi.edge_count() != psi.edge_count())
    throw ArgumentError("realization and partial realization sizes differ");
  for (std::size_t v = 0; v < psi.node_count(); ++v) {
    auto s = psi.node(static_cast<NodeId>(v));
    if (s != TriState::Unknown && s != to_tristate(phi.node(static_cast<NodeId>(v)))) return false;
  }
  for (std::size_t e = 0; e < psi.edge_count(); ++e) {
    auto s = psi.edge(static_cast<EdgeId>(e));
    if (s != TriState::Unknown && s != to_tristate(phi.edge(static_cast<EdgeId>(e)))) return false;
  }
  return true;
}

/// psi ⊆ psi2: dom(psi) ⊆ dom(psi2) and both agree on dom(psi).
inline bool is_subrealization(const PartialRealization& psi, const PartialRealization& psi2) {
  if (psi.node_count() != psi2.node_count() || psi.edge_count() != psi2.edge_count())
    throw ArgumentError("partial realization sizes differ");
  auto covered = [](std::span<const TriState> a, std::span<const TriState> b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != TriState::Unknown && a[i] != b[i]) return false;
    return true;
  };
  return covered(psi.node_states(), psi2.node_states()) &&
         covered(psi.edge_states(), psi2.edge_states());
}

namespace detail {

/// Multi-source BFS from `sources` over edges accepted by `live`, truncated at
/// depth k. `level` must have node_count entries, all kInfiniteLevel on entry;
/// every node whose level is set is appended to `touched` (in BFS order).
template <class LiveFn>
void multi_source_levels(const Graph& g, std::span<const NodeId> sources, std::size_t k,
                         LiveFn&& live, std::vector<std::uint32_t>& level,
                         std::vector<NodeId>& touched) {
  const std::size_t start = touched.size();
  for (NodeId s : sources) {
    if (level[s] == 0) continue;
    level[s] = 0;
    touched.push_back(s);
  }
  for (std::size_t head = start; head < touched.size(); ++head) {
    const NodeId v = touched[head];
    const std::uint32_t d = level[v];
    if (d >= k) continue;
    for (const auto& nb : g.neighbors(v)) {
      if (level[nb.node] != Hop::kInfiniteLevel || !live(nb.edge)) continue;
      level[nb.node] = d + 1;
      touched.push_back(nb.node);
    }
  }
}

}  // namespace detail

/// h(v|psi) for every node: distance from the nearest accepted initiator over
/// edges observed live, if at most k; infinity otherwise.
inline std::vector<Hop> hop_levels(const Graph& g, const PartialRealization& psi, std::size_t k) {
  if (psi.node_count() != g.node_count() || psi.edge_count() != g.edge_count())
    throw ArgumentError("partial realization does not match graph");
  std::vector<std::uint32_t> level(g.node_count(), Hop::kInfiniteLevel);
  std::vector<NodeId> touched;
  detail::multi_source_levels(
      g, psi.accepted_initiators(), k,
      [&](EdgeId e) { return psi.edge(e) == TriState::One; }, level, touched);
  std::vector<Hop> out(g.node_count());
  for (NodeId v : touched) out[v] = Hop{level[v]};
  return out;
}

inline Hop hop_level(const Graph& g, const PartialRealization& psi, NodeId v, std::size_t k) {
  if (!g.contains(v)) throw ArgumentError("node id " + std::to_string(v) + " out of range");
  return hop_levels(g, psi, k)[v];
}

enum class RevealMode {
  /// Edges incident to the initiator's participants at levels < k.
  Diffusion,
  /// Every edge with an endpoint at graph distance < k from the initiator.
  Distance,
};

/// Records the invitation of u in place: u's acceptance and, if it accepts,
/// the resulting diffusion states. Truth is a Realization or LazyRealization.
template <class Truth>
void apply_invitation(const Graph& g, PartialRealization& psi, NodeId u, Truth& truth,
                      std::size_t k, RevealMode mode = RevealMode::Diffusion) {
  if (!g.contains(u)) throw ArgumentError("node id " + std::to_string(u) + " out of range");
  if (psi.node_count() != g.node_count() || psi.edge_count() != g.edge_count())
    throw ArgumentError("partial realization does not match graph");
  if (psi.invited(u)) throw UsageError("node " + std::to_string(u) + " was already invited");

  const bool accepted = truth.node(u);
  psi.set_node(u, to_tristate(accepted));
  if (!accepted || k == 0) return;

  auto reveal_incident = [&](NodeId w) {
    for (const auto& nb : g.neighbors(w))
      if (psi.edge(nb.edge) == TriState::Unknown) psi.set_edge(nb.edge, to_tristate(truth.edge(nb.edge)));
  };

  BoundedBfs bfs(g.node_count());
  if (mode == RevealMode::Distance) {
    for (const auto& [w, d] : bfs.run(g, u, static_cast<std::uint32_t>(k - 1))) reveal_incident(w);
    return;
  }

  // Level by level: reveal around participants at distance i < k, then step
  // along edges now known live. Edges incident to P_k stay unknown.
  std::vector<NodeId> frontier{u};
  std::vector<NodeId> next;
  std::vector<std::uint8_t> seen(g.node_count(), 0);
  seen[u] = 1;
  for (std::size_t i = 0; i < k && !frontier.empty(); ++i) {
    next.clear();
    for (NodeId w : frontier) {
      reveal_incident(w);
      for (const auto& nb : g.neighbors(w)) {
        if (seen[nb.node] || psi.edge(nb.edge) != TriState::One) continue;
        seen[nb.node] = 1;
        next.push_back(nb.node);
      }
    }
    frontier.swap(next);
  }
}

inline void apply_invitation(const Graph& g, PartialRealization& psi, NodeId u,
                             const Realization& phi, std::size_t k,
                             RevealMode mode = RevealMode::Diffusion) {
  if (!is_consistent(phi, psi)) throw ArgumentError("partial realization is inconsistent with the realization");
  apply_invitation<const Realization>(g, psi, u, phi, k, mode);
}

/// Pure form of apply_invitation: returns the observation after inviting u.
inline PartialRealization reveal_after_accept(const Graph& g, const PartialRealization& psi,
                                              NodeId u, const Realization& phi, std::size_t k,
                                              RevealMode mode = RevealMode::Diffusion) {
  PartialRealization out = psi;
  apply_invitation(g, out, u, phi, k, mode);
  return out;
}

/// Debug fixture format: "N <id> <0|1>" per invited node (invitation order),
/// then "E <u> <v> <0|1>" per known edge.
inline void write_debug(std::ostream& out, const Graph& g, const PartialRealization& psi) {
  for (NodeId v : psi.invited_nodes())
    out << "N " << v << ' ' << (psi.node(v) == TriState::One ? 1 : 0) << '\n';
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    auto s = psi.edge(static_cast<EdgeId>(e));
    if (s == TriState::Unknown) continue;
    const auto& ed = g.edges()[e];
    out << "E " << ed.u << ' ' << ed.v << ' ' << (s == TriState::One ? 1 : 0) << '\n';
  }
}

inline PartialRealization read_debug(std::istream& in, const Graph& g) {
  PartialRealization psi(g);
  std::string line;
  std::size_t line_no = 0;
  auto parse_id = [&](std::string_view tok) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ParseError(line_no, "expected a non-negative integer, got '" + std::string(tok) + "'");
    return value;
  };
  auto parse_bit = [&](std::string_view tok) {
    if (tok == "0") return TriState::Zero;
    if (tok == "1") return TriState::One;
    throw ParseError(line_no, "state must be 0 or 1");
  };
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = detail::split_ws(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    try {
      if (tokens[0] == "N" && tokens.size() == 3) {
        auto v = parse_id(tokens[1]);
        if (v >= g.node_count()) throw ParseError(line_no, "node id out of range");
        psi.set_node(static_cast<NodeId>(v), parse_bit(tokens[2]));
      } else if (tokens[0] == "E" && tokens.size() == 4) {
        auto a = parse_id(tokens[1]);
        auto b = parse_id(tokens[2]);
        if (a >= g.node_count() || b >= g.node_count())
          throw ParseError(line_no, "node id out of range");
        auto e = g.edge_between(static_cast<NodeId>(a), static_cast<NodeId>(b));
        if (!e) throw ParseError(line_no, "no such edge");
        psi.set_edge(*e, parse_bit(tokens[3]));
      } else {
        throw ParseError(line_no, "expected 'N <id> <0|1>' or 'E <u> <v> <0|1>'");
      }
    } catch (const UsageError& err) {
      throw ParseError(line_no, err.what());
    }
  }
  return psi;
}

}  // namespace kcg
