#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kcg/error.hpp"
#include "kcg/network.hpp"

namespace kcg {

/// Acceptance probabilities, per-hop revenue R[0..k], hop limit and budget.
struct ModelParams {
  std::vector<double> theta;
  std::vector<double> revenue;
  std::size_t k = 0;
  std::size_t budget = 1;
};

/// Throws ConfigError describing the first violated constraint.
inline void validate(const ModelParams& params) {
  if (params.revenue.size() != params.k + 1)
    throw ConfigError("revenue vector must have k+1 = " + std::to_string(params.k + 1) +
                      " entries, got " + std::to_string(params.revenue.size()));
  for (std::size_t i = 0; i < params.revenue.size(); ++i) {
    if (!(params.revenue[i] >= 0.0)) throw ConfigError("revenue entries must be non-negative");
    if (i > 0 && params.revenue[i] > params.revenue[i - 1])
      throw ConfigError("revenue vector must be non-increasing");
  }
  if (params.budget < 1) throw ConfigError("budget must be at least 1");
  for (double t : params.theta)
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("acceptance probability outside [0,1]");
}

inline void validate(const ModelParams& params, const Graph& g) {
  validate(params);
  if (params.theta.size() != g.node_count())
    throw ConfigError("theta has " + std::to_string(params.theta.size()) +
                      " entries for a graph with " + std::to_string(g.node_count()) + " nodes");
}

}  // namespace kcg
