#pragma once

// Exhaustive adaptive-submodularity check on small instances.
//
// Walks every observation ψ reachable from the empty observation by
// invitations with positive probability, and compares exact Δ(u|ψ) against
// Δ(u|ψ') for every one-step extension ψ'. Revealed sets depend only on the
// ground truth, not on invitation order, so every reachable pair ψ ⊆ ψ' is
// joined by a chain of one-step extensions and the one-step comparisons cover
// all pairs by transitivity.

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "kcg/error.hpp"
#include "kcg/gain.hpp"
#include "kcg/model.hpp"
#include "kcg/network.hpp"
#include "kcg/realization.hpp"

namespace kcg {

struct SubmodularityViolation {
  PartialRealization before;
  PartialRealization after;
  NodeId candidate = 0;
  double gain_before = 0.0;
  double gain_after = 0.0;
};

struct SubmodularityReport {
  std::size_t states = 0;
  std::size_t pairs_checked = 0;
  std::size_t violation_count = 0;
  double worst_excess = 0.0;
  /// First violations found, up to the configured limit.
  std::vector<SubmodularityViolation> violations;

  bool submodular() const noexcept { return violation_count == 0; }
};

struct SubmodularityOptions {
  double tolerance = 1e-9;
  std::size_t max_states = 5'000'000;
  std::size_t keep_violations = 8;
  RevealMode reveal = RevealMode::Diffusion;
};

namespace detail {

inline std::string state_key(const PartialRealization& psi) {
  std::string key((psi.node_count() + psi.edge_count() + 3) / 4, '\0');
  std::size_t i = 0;
  auto put = [&](TriState s) {
    key[i / 4] = static_cast<char>(key[i / 4] | (static_cast<int>(s) << (2 * (i % 4))));
    ++i;
  };
  for (TriState s : psi.node_states()) put(s);
  for (TriState s : psi.edge_states()) put(s);
  return key;
}

class SubmodularityWalker {
 public:
  SubmodularityWalker(const Graph& g, const ModelParams& params, const SubmodularityOptions& opt)
      : g_(g), params_(params), opt_(opt) {}

  SubmodularityReport run() {
    PartialRealization empty(g_);
    visit(empty, 0);
    return std::move(report_);
  }

 private:
  /// All distinct observations after inviting w in psi, with positive probability.
  std::vector<PartialRealization> children(const PartialRealization& psi, NodeId w) const {
    std::vector<PartialRealization> out;
    const double theta = params_.theta[w];
    if (theta < 1.0) {
      PartialRealization c = psi;
      c.set_node(w, TriState::Zero);
      out.push_back(std::move(c));
    }
    if (theta <= 0.0) return out;

    // Ground-truth template consistent with psi; branch on the unknown edges a
    // reveal from w could touch.
    std::vector<std::uint8_t> nodes(g_.node_count(), 0);
    std::vector<std::uint8_t> edges(g_.edge_count(), 0);
    for (std::size_t v = 0; v < nodes.size(); ++v)
      nodes[v] = psi.node(static_cast<NodeId>(v)) == TriState::One;
    nodes[w] = 1;
    std::vector<EdgeId> branch;
    std::vector<std::uint8_t> near(g_.edge_count(), 0);
    if (params_.k > 0) {
      BoundedBfs bfs(g_.node_count());
      for (const auto& [x, d] : bfs.run(g_, w, static_cast<std::uint32_t>(params_.k - 1)))
        for (const auto& nb : g_.neighbors(x)) near[nb.edge] = 1;
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const TriState known = psi.edge(static_cast<EdgeId>(e));
      const double p = g_.edges()[e].p;
      if (known != TriState::Unknown) edges[e] = known == TriState::One;
      else if (p >= 1.0) edges[e] = 1;
      else if (p > 0.0 && near[e]) branch.push_back(static_cast<EdgeId>(e));
    }
    if (branch.size() > 24) throw SizeError(branch.size(), 24);

    std::unordered_set<std::string> seen;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << branch.size()); ++mask) {
      for (std::size_t b = 0; b < branch.size(); ++b) edges[branch[b]] = (mask >> b) & 1U;
      Realization phi(nodes, edges);
      PartialRealization c = psi;
      apply_invitation<const Realization>(g_, c, w, phi, params_.k, opt_.reveal);
      if (seen.insert(state_key(c)).second) out.push_back(std::move(c));
    }
    return out;
  }

  std::vector<double> gains(const PartialRealization& psi) const {
    std::vector<double> out(g_.node_count(), 0.0);
    for (std::size_t u = 0; u < out.size(); ++u)
      if (!psi.invited(static_cast<NodeId>(u)))
        out[u] = marginal_gain_exact(g_, psi, static_cast<NodeId>(u), params_).value;
    return out;
  }

  // Canonical walk: states are generated by inviting nodes in increasing id
  // order, so each reachable state is visited once.
  void visit(const PartialRealization& psi, NodeId next_min) {
    if (++report_.states > opt_.max_states) throw SizeError(report_.states, opt_.max_states);
    const auto base = gains(psi);
    for (std::size_t wi = 0; wi < g_.node_count(); ++wi) {
      const auto w = static_cast<NodeId>(wi);
      if (psi.invited(w)) continue;
      for (const auto& child : children(psi, w)) {
        for (std::size_t ui = 0; ui < g_.node_count(); ++ui) {
          const auto u = static_cast<NodeId>(ui);
          if (child.invited(u)) continue;
          const double after = marginal_gain_exact(g_, child, u, params_).value;
          ++report_.pairs_checked;
          const double excess = after - base[u];
          if (excess > opt_.tolerance) {
            ++report_.violation_count;
            report_.worst_excess = std::max(report_.worst_excess, excess);
            if (report_.violations.size() < opt_.keep_violations)
              report_.violations.push_back({psi, child, u, base[u], after});
          }
        }
        if (w >= next_min) visit(child, w + 1);
      }
    }
  }

  const Graph& g_;
  const ModelParams& params_;
  const SubmodularityOptions& opt_;
  SubmodularityReport report_;
};

}  // namespace detail

/// Checks Δ(u|ψ) ≥ Δ(u|ψ') − tolerance over all reachable ψ ⊆ ψ' using exact gains.
inline SubmodularityReport check_adaptive_submodularity(const Graph& g, const ModelParams& params,
                                                        const SubmodularityOptions& options = {}) {
  if (params.theta.size() != g.node_count()) throw ArgumentError("theta length does not match graph");
  if (params.revenue.size() != params.k + 1) throw ArgumentError("revenue vector must have k+1 entries");
  return detail::SubmodularityWalker(g, params, options).run();
}

}  // namespace kcg
