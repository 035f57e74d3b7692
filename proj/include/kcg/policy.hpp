#pragma once

// Adaptive invitation (greedy on Δ(u|ψ) with full feedback after each accept)
// and the four selection baselines.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "kcg/error.hpp"
#include "kcg/gain.hpp"
#include "kcg/model.hpp"
#include "kcg/network.hpp"
#include "kcg/random.hpp"
#include "kcg/realization.hpp"
#include "kcg/revenue.hpp"

namespace kcg {

struct AdaptiveInvitation {
  GainMethod gain = GainMethod::Fast;
  std::size_t mc_samples = 100;
  McSampling mc_sampling = McSampling::Full;
  /// Reuse Δ values of candidates farther than 2k from the last accepted
  /// initiator. Unset: on for k <= 2, off otherwise. Ignored for Monte-Carlo.
  std::optional<bool> use_cache;
};
struct MaxDegree {};
struct RandomChoice {};
struct MaxProb {};
struct MaxDegreeProb {};

using PolicyKind = std::variant<AdaptiveInvitation, MaxDegree, RandomChoice, MaxProb, MaxDegreeProb>;

inline std::string to_string(const PolicyKind& kind) {
  return std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, AdaptiveInvitation>) {
          if (k.gain == GainMethod::MonteCarlo)
            return std::string(k.mc_sampling == McSampling::Lazy ? "adaptive[mc-lazy:" : "adaptive[mc:") +
                   std::to_string(k.mc_samples) + "]";
          return std::string("adaptive[") + to_string(k.gain) + "]";
        } else if constexpr (std::is_same_v<T, MaxDegree>) {
          return "maxdegree";
        } else if constexpr (std::is_same_v<T, RandomChoice>) {
          return "random";
        } else if constexpr (std::is_same_v<T, MaxProb>) {
          return "maxprob";
        } else {
          return "maxdegreeprob";
        }
      },
      kind);
}

/// Cached Δ per candidate with a validity flag.
class GainCache {
 public:
  explicit GainCache(std::size_t node_count = 0) : value_(node_count, 0.0), valid_(node_count, 0) {}

  bool valid(NodeId v) const { return valid_.at(v) != 0; }
  double value(NodeId v) const { return value_.at(v); }
  void store(NodeId v, double gain) {
    value_.at(v) = gain;
    valid_.at(v) = 1;
  }
  void invalidate(NodeId v) { valid_.at(v) = 0; }
  std::size_t size() const noexcept { return valid_.size(); }

 private:
  std::vector<double> value_;
  std::vector<std::uint8_t> valid_;
};

/// Marks every candidate within distance 2k of the newly accepted initiator.
/// Δ(u|ψ) reads only edges and hop levels within k of u, and an accept
/// changes those only within k of the initiator.
inline void invalidate_cache(GainCache& cache, const Graph& g, NodeId last_accepted, std::size_t k,
                             BoundedBfs* scratch = nullptr) {
  if (cache.size() != g.node_count()) throw ArgumentError("cache does not match graph");
  BoundedBfs local;
  BoundedBfs& bfs = scratch ? *scratch : local;
  for (const auto& [v, d] : bfs.run(g, last_accepted, static_cast<std::uint32_t>(2 * k)))
    cache.invalidate(v);
}

struct StepRecord {
  NodeId node = 0;
  bool accepted = false;
  /// Realized revenue of the observation after this step.
  double revenue = 0.0;
  std::size_t gain_evaluations = 0;
  std::chrono::nanoseconds elapsed{0};
};

struct RunResult {
  std::vector<NodeId> invited;
  std::vector<NodeId> accepted;
  PartialRealization final_psi;
  HopAssignment assignment;
  double revenue = 0.0;
  std::size_t gain_evaluations = 0;
  std::chrono::nanoseconds wall_time{0};
  /// One record per invitation; the prefix of length b is the run with budget b.
  std::vector<StepRecord> steps;
};

struct RunOptions {
  RevealMode reveal = RevealMode::Diffusion;
  /// Seeds the Random baseline and Monte-Carlo gain sampling.
  std::uint64_t seed = 0;
};

namespace detail {

inline bool cache_enabled(const AdaptiveInvitation& a, std::size_t k) {
  if (a.gain == GainMethod::MonteCarlo) return false;
  return a.use_cache.value_or(k <= 2);
}

/// Index of the max score among uninvited nodes; smallest id wins ties.
template <class Score>
NodeId argmax_uninvited(const PartialRealization& psi, Score&& score) {
  std::optional<NodeId> best;
  double best_score = 0.0;
  for (std::size_t i = 0; i < psi.node_count(); ++i) {
    const auto v = static_cast<NodeId>(i);
    if (psi.invited(v)) continue;
    const double s = score(v);
    if (!best || s > best_score) {
      best = v;
      best_score = s;
    }
  }
  return *best;
}

}  // namespace detail

/// Runs one policy for params.budget invitations (fewer if the graph runs out of nodes).
/// Truth is a Realization (fixed ground truth) or LazyRealization.
template <class Truth>
RunResult run_policy(const PolicyKind& kind, const Graph& g, const ModelParams& params, Truth& truth,
                     const RunOptions& options = {}) {
  if (g.node_count() == 0) throw ArgumentError("cannot run a policy on an empty graph");
  validate(params, g);
  if (truth.node_count() != g.node_count() || truth.edge_count() != g.edge_count())
    throw ArgumentError("ground truth does not match graph");

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const std::size_t rounds = std::min(params.budget, g.node_count());

  RunResult result;
  PartialRealization psi(g);
  Rng rng(options.seed);
  std::vector<NodeId> uninvited;
  uninvited.reserve(g.node_count());
  for (std::size_t v = 0; v < g.node_count(); ++v) uninvited.push_back(static_cast<NodeId>(v));

  const auto* adaptive = std::get_if<AdaptiveInvitation>(&kind);
  const bool caching = adaptive && detail::cache_enabled(*adaptive, params.k);
  GainCache cache(caching ? g.node_count() : 0);
  FastGain fast(g.node_count());
  MonteCarloGain mc(g.node_count(), g.edge_count(),
                    adaptive ? adaptive->mc_sampling : McSampling::Full);
  BoundedBfs bfs(g.node_count());

  for (std::size_t round = 0; round < rounds; ++round) {
    NodeId pick = 0;
    if (adaptive) {
      const auto hops = hop_levels(g, psi, params.k);
      pick = detail::argmax_uninvited(psi, [&](NodeId u) {
        if (caching && cache.valid(u)) return cache.value(u);
        double gain = 0.0;
        switch (adaptive->gain) {
          case GainMethod::Fast:
            gain = fast(g, psi, hops, u, params);
            break;
          case GainMethod::MonteCarlo: {
            Rng sample_rng(derive_seed(options.seed, {round, u}));
            gain = mc(g, psi, u, params, adaptive->mc_samples, sample_rng).value;
            break;
          }
          case GainMethod::Exact:
            gain = marginal_gain_exact(g, psi, u, params).value;
            break;
        }
        ++result.gain_evaluations;
        if (caching) cache.store(u, gain);
        return gain;
      });
    } else if (std::holds_alternative<RandomChoice>(kind)) {
      pick = uninvited[uniform_index(rng, uninvited.size())];
    } else if (std::holds_alternative<MaxDegree>(kind)) {
      pick = detail::argmax_uninvited(psi, [&](NodeId v) { return static_cast<double>(g.degree(v)); });
    } else if (std::holds_alternative<MaxProb>(kind)) {
      pick = detail::argmax_uninvited(psi, [&](NodeId v) { return params.theta[v]; });
    } else {
      pick = detail::argmax_uninvited(
          psi, [&](NodeId v) { return static_cast<double>(g.degree(v)) * params.theta[v]; });
    }

    apply_invitation(g, psi, pick, truth, params.k, options.reveal);
    uninvited.erase(std::find(uninvited.begin(), uninvited.end(), pick));
    const bool accepted = psi.node(pick) == TriState::One;
    result.invited.push_back(pick);
    if (accepted) {
      result.accepted.push_back(pick);
      if (caching) invalidate_cache(cache, g, pick, params.k, &bfs);
    }

    StepRecord step;
    step.node = pick;
    step.accepted = accepted;
    step.revenue = total_revenue(hop_assignment(g, psi, params.k), params.revenue);
    step.gain_evaluations = result.gain_evaluations;
    step.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - start);
    result.steps.push_back(step);
  }

  result.assignment = hop_assignment(g, psi, params.k);
  result.revenue = total_revenue(result.assignment, params.revenue);
  result.final_psi = std::move(psi);
  result.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - start);
  return result;
}

}  // namespace kcg
