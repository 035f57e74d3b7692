#pragma once

// Conditional expected marginal revenue Δ(u|ψ): the expected increase of
// realized revenue from inviting u, over ground truths consistent with ψ.
//
// Three estimators:
//   FastGain          layered single-pass approximation. Per hop level it
//                     combines parent participation probabilities as if they
//                     were independent and ignores nodes that are reached at a
//                     level later than their BFS level.
//   MonteCarloGain    averages sampled completions of ψ.
//   marginal_gain_exact  enumerates every relevant unknown variable.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kcg/error.hpp"
#include "kcg/model.hpp"
#include "kcg/network.hpp"
#include "kcg/random.hpp"
#include "kcg/realization.hpp"
#include "kcg/revenue.hpp"

namespace kcg {

enum class GainMethod { Fast, MonteCarlo, Exact };

inline const char* to_string(GainMethod m) {
  switch (m) {
    case GainMethod::Fast: return "fast";
    case GainMethod::MonteCarlo: return "mc";
    case GainMethod::Exact: return "exact";
  }
  return "?";
}

struct GainEstimate {
  double value = 0.0;
  GainMethod method = GainMethod::Fast;
  /// Monte-Carlo only.
  std::size_t samples = 0;
  /// Monte-Carlo only: sample standard deviation / sqrt(samples).
  double standard_error = 0.0;
};

/// Participation probabilities per BFS level from the candidate; level 0 holds the candidate.
struct LayerTable {
  std::vector<std::vector<std::pair<NodeId, double>>> levels;
};

namespace detail {

inline void check_candidate(const Graph& g, const PartialRealization& psi, NodeId u,
                            const ModelParams& params) {
  if (!g.contains(u)) throw ArgumentError("node id " + std::to_string(u) + " out of range");
  if (psi.node_count() != g.node_count() || psi.edge_count() != g.edge_count())
    throw ArgumentError("partial realization does not match graph");
  if (params.theta.size() != g.node_count()) throw ArgumentError("theta length does not match graph");
  if (params.revenue.size() != params.k + 1) throw ArgumentError("revenue vector must have k+1 entries");
  if (psi.invited(u)) throw UsageError("node " + std::to_string(u) + " was already invited");
}

}  // namespace detail

/// Layered estimator with reusable scratch space; one instance per thread.
class FastGain {
 public:
  explicit FastGain(std::size_t node_count = 0) { reserve(node_count); }

  /// Δ(u|ψ) given precomputed hop levels h(·|ψ) (see hop_levels).
  double operator()(const Graph& g, const PartialRealization& psi, std::span<const Hop> hops,
                    NodeId u, const ModelParams& params) {
    detail::check_candidate(g, psi, u, params);
    if (hops.size() != g.node_count()) throw ArgumentError("hop table does not match graph");
    build(g, psi, u, params);
    const std::span<const double> R(params.revenue);

    double gain = params.theta[u] * (R[0] - revenue_at(R, hops[u]));
    for (std::size_t i = 1; i < bounds_.size() - 1; ++i) {
      for (std::size_t j = bounds_[i]; j < bounds_[i + 1]; ++j) {
        const NodeId v = order_[j];
        const Hop h = hops[v];
        if (Hop{static_cast<std::uint32_t>(i)} < h) gain += prob_[v] * (R[i] - revenue_at(R, h));
      }
    }
    return gain;
  }

  /// The per-level probabilities computed for candidate u.
  LayerTable layers(const Graph& g, const PartialRealization& psi, NodeId u,
                    const ModelParams& params) {
    detail::check_candidate(g, psi, u, params);
    build(g, psi, u, params);
    LayerTable table;
    for (std::size_t i = 0; i + 1 < bounds_.size(); ++i) {
      auto& level = table.levels.emplace_back();
      for (std::size_t j = bounds_[i]; j < bounds_[i + 1]; ++j)
        level.emplace_back(order_[j], prob_[order_[j]]);
    }
    return table;
  }

 private:
  void reserve(std::size_t n) {
    if (stamp_.size() < n) {
      stamp_.assign(n, 0);
      level_.assign(n, 0);
      prob_.assign(n, 0.0);
      epoch_ = 0;
    }
  }

  void build(const Graph& g, const PartialRealization& psi, NodeId u, const ModelParams& params) {
    reserve(g.node_count());
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
    const std::size_t k = params.k;

    // First-reached BFS level of every node within k hops of u.
    order_.clear();
    bounds_.assign(1, 0);
    order_.push_back(u);
    stamp_[u] = epoch_;
    level_[u] = 0;
    bounds_.push_back(1);
    for (std::size_t i = 1; i <= k; ++i) {
      const std::size_t begin = bounds_[i - 1];
      const std::size_t end = bounds_[i];
      for (std::size_t j = begin; j < end; ++j) {
        for (const auto& nb : g.neighbors(order_[j])) {
          if (stamp_[nb.node] == epoch_) continue;
          stamp_[nb.node] = epoch_;
          level_[nb.node] = static_cast<std::uint32_t>(i);
          order_.push_back(nb.node);
        }
      }
      if (order_.size() == end) break;
      bounds_.push_back(order_.size());
    }

    prob_[u] = params.theta[u];
    for (std::size_t i = 1; i + 1 < bounds_.size(); ++i) {
      for (std::size_t j = bounds_[i]; j < bounds_[i + 1]; ++j) {
        const NodeId v = order_[j];
        double t = 1.0;
        for (const auto& nb : g.neighbors(v)) {
          if (stamp_[nb.node] != epoch_ || level_[nb.node] + 1 != i) continue;
          switch (psi.edge(nb.edge)) {
            case TriState::One: t *= 1.0 - prob_[nb.node]; break;
            case TriState::Unknown: t *= 1.0 - g.edges()[nb.edge].p * prob_[nb.node]; break;
            case TriState::Zero: break;
          }
        }
        prob_[v] = 1.0 - t;
      }
    }
  }

  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint32_t> level_;
  std::vector<double> prob_;
  std::uint32_t epoch_ = 0;
  std::vector<NodeId> order_;
  std::vector<std::size_t> bounds_;
};

inline GainEstimate marginal_gain_fast(const Graph& g, const PartialRealization& psi, NodeId u,
                                       const ModelParams& params) {
  detail::check_candidate(g, psi, u, params);
  const auto hops = hop_levels(g, psi, params.k);
  FastGain fast(g.node_count());
  return {fast(g, psi, hops, u, params), GainMethod::Fast, 0, 0.0};
}

inline LayerTable layer_table(const Graph& g, const PartialRealization& psi, NodeId u,
                              const ModelParams& params) {
  FastGain fast(g.node_count());
  return fast.layers(g, psi, u, params);
}

/// How a Monte-Carlo sample completes the unknown edge states of ψ.
enum class McSampling {
  /// Draw every unknown edge for every sample.
  Full,
  /// Draw an unknown edge only when a diffusion first reaches it. Same
  /// distribution, far less work on large graphs.
  Lazy,
};

/// Averages f(dx(ψ) ∪ {u}, φ) − f(dx(ψ), φ) over sampled completions φ of ψ.
class MonteCarloGain {
 public:
  explicit MonteCarloGain(std::size_t node_count = 0, std::size_t edge_count = 0,
                          McSampling sampling = McSampling::Full)
      : scratch_(node_count), node_count_(node_count), sampling_(sampling) {
    sample_stamp_.assign(edge_count, 0);
    sample_live_.assign(edge_count, 0);
  }

  template <class URBG>
  GainEstimate operator()(const Graph& g, const PartialRealization& psi, NodeId u,
                          const ModelParams& params, std::size_t samples, URBG& rng) {
    detail::check_candidate(g, psi, u, params);
    if (samples < 1) throw ArgumentError("Monte-Carlo sample count must be at least 1");
    resize(g);
    const std::span<const double> R(params.revenue);

    const auto accepted = psi.accepted_initiators();
    with_u_.assign(accepted.begin(), accepted.end());
    with_u_.push_back(u);
    unknown_.clear();
    if (sampling_ == McSampling::Full) {
      for (std::size_t e = 0; e < g.edge_count(); ++e)
        if (psi.edge(static_cast<EdgeId>(e)) == TriState::Unknown) unknown_.push_back(static_cast<EdgeId>(e));
    }

    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t s = 1; s <= samples; ++s) {
      next_sample();
      double x = 0.0;
      if (bernoulli(rng, params.theta[u])) {
        for (EdgeId e : unknown_) {
          sample_stamp_[e] = sample_;
          sample_live_[e] = bernoulli(rng, g.edges()[e].p);
        }
        auto live = [&](EdgeId e) {
          const TriState known = psi.edge(e);
          if (known != TriState::Unknown) return known == TriState::One;
          if (sample_stamp_[e] != sample_) {
            sample_stamp_[e] = sample_;
            sample_live_[e] = bernoulli(rng, g.edges()[e].p);
          }
          return sample_live_[e] != 0;
        };
        const double before = scratch_.revenue(g, accepted, R, live);
        const double after = scratch_.revenue(g, with_u_, R, live);
        x = after - before;
      }
      const double delta = x - mean;
      mean += delta / static_cast<double>(s);
      m2 += delta * (x - mean);
    }
    const double var = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
    return {mean, GainMethod::MonteCarlo, samples, std::sqrt(var / static_cast<double>(samples))};
  }

 private:
  void resize(const Graph& g) {
    if (sample_stamp_.size() != g.edge_count()) {
      sample_stamp_.assign(g.edge_count(), 0);
      sample_live_.assign(g.edge_count(), 0);
      sample_ = 0;
    }
    if (node_count_ != g.node_count()) {
      scratch_ = detail::LevelScratch(g.node_count());
      node_count_ = g.node_count();
    }
  }

  void next_sample() {
    if (++sample_ == 0) {
      std::fill(sample_stamp_.begin(), sample_stamp_.end(), 0);
      sample_ = 1;
    }
  }

  detail::LevelScratch scratch_;
  std::size_t node_count_ = 0;
  McSampling sampling_;
  std::vector<std::uint32_t> sample_stamp_;
  std::vector<std::uint8_t> sample_live_;
  std::uint32_t sample_ = 0;
  std::vector<NodeId> with_u_;
  std::vector<EdgeId> unknown_;
};

template <class URBG>
GainEstimate marginal_gain_mc(const Graph& g, const PartialRealization& psi, NodeId u,
                              const ModelParams& params, std::size_t samples, URBG& rng,
                              McSampling sampling = McSampling::Full) {
  MonteCarloGain mc(g.node_count(), g.edge_count(), sampling);
  return mc(g, psi, u, params, samples, rng);
}

/// Distribution of the realized marginal revenue of u given ψ: (value, probability)
/// pairs with equal values merged.
struct GainDistribution {
  std::vector<std::pair<double, double>> outcomes;
  std::size_t variables = 0;

  double mean() const {
    double m = 0.0;
    for (const auto& [value, prob] : outcomes) m += value * prob;
    return m;
  }
};

/// Enumerates u's acceptance and every unknown edge that a k-truncated
/// diffusion from u or from an accepted initiator could cross. Edges known in
/// ψ keep their state; variables with probability 0 or 1 are fixed.
inline GainDistribution exact_gain_distribution(const Graph& g, const PartialRealization& psi,
                                                NodeId u, const ModelParams& params,
                                                std::size_t cap = kDefaultEnumerationCap) {
  detail::check_candidate(g, psi, u, params);
  // A candidate that never accepts changes nothing.
  if (params.theta[u] == 0.0) return {{{0.0, 1.0}}, 0};
  const std::size_t k = params.k;
  const std::span<const double> R(params.revenue);

  std::vector<NodeId> before(psi.accepted_initiators().begin(), psi.accepted_initiators().end());
  std::vector<NodeId> sources = before;
  sources.push_back(u);

  std::vector<std::uint32_t> dist(g.node_count(), Hop::kInfiniteLevel);
  {
    std::vector<NodeId> touched;
    detail::multi_source_levels(g, sources, k, [](EdgeId) { return true; }, dist, touched);
  }

  std::vector<std::uint8_t> edge_live(g.edge_count(), 0);
  std::vector<EdgeId> random_edges;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto id = static_cast<EdgeId>(e);
    const TriState known = psi.edge(id);
    if (known != TriState::Unknown) {
      edge_live[e] = known == TriState::One;
      continue;
    }
    const auto& ed = g.edges()[e];
    if (std::min(dist[ed.u], dist[ed.v]) >= k) continue;
    if (ed.p >= 1.0) edge_live[e] = 1;
    else if (ed.p > 0.0) random_edges.push_back(id);
  }

  const double theta = params.theta[u];
  const bool u_random = theta > 0.0 && theta < 1.0;
  const std::size_t r = random_edges.size() + (u_random ? 1 : 0);
  if (r > cap || r >= 63) throw SizeError(r, cap);

  std::map<double, double> merged;
  if (theta < 1.0) merged[0.0] += 1.0 - theta;  // u rejects: nothing changes
  if (theta > 0.0) {
    detail::LevelScratch scratch(g.node_count());
    auto live = [&](EdgeId e) { return edge_live[e] != 0; };
    const std::uint64_t combos = std::uint64_t{1} << random_edges.size();
    for (std::uint64_t mask = 0; mask < combos; ++mask) {
      double weight = theta;
      for (std::size_t b = 0; b < random_edges.size(); ++b) {
        const EdgeId e = random_edges[b];
        const bool on = (mask >> b) & 1U;
        edge_live[e] = on;
        weight *= on ? g.edges()[e].p : 1.0 - g.edges()[e].p;
      }
      const double x = scratch.revenue(g, sources, R, live) - scratch.revenue(g, before, R, live);
      merged[x] += weight;
    }
  }

  GainDistribution out;
  out.variables = r;
  for (const auto& [value, prob] : merged)
    if (prob > 0.0) out.outcomes.emplace_back(value, prob);
  return out;
}

inline GainEstimate marginal_gain_exact(const Graph& g, const PartialRealization& psi, NodeId u,
                                        const ModelParams& params,
                                        std::size_t cap = kDefaultEnumerationCap) {
  return {exact_gain_distribution(g, psi, u, params, cap).mean(), GainMethod::Exact, 0, 0.0};
}

}  // namespace kcg
