#pragma once

// Experiment runner: seeded repetitions of policies over a budget sweep,
// per-run and aggregate CSV rows, and the fast-vs-reference gain comparison.
//
// Seed scheme (stable): run r uses run_seed = derive_seed(master, r). Within a
// run, theta comes from derive_seed(run_seed, 1) (or from theta_seed when
// frozen), the ground truth from derive_seed(run_seed, 2), and policy
// randomness from derive_seed(run_seed, 3). Every policy in a run sees the same
// theta and ground truth.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "kcg/error.hpp"
#include "kcg/gain.hpp"
#include "kcg/model.hpp"
#include "kcg/network.hpp"
#include "kcg/policy.hpp"
#include "kcg/random.hpp"
#include "kcg/realization.hpp"

namespace kcg {

struct ThetaSpec {
  enum class Mode { Uniform, Constant, File };
  Mode mode = Mode::Uniform;
  double value = 0.0;
  std::string path;
};

struct GainSpec {
  GainMethod method = GainMethod::Fast;
  std::size_t mc_samples = 100;
  McSampling sampling = McSampling::Full;
};

struct ExperimentConfig {
  std::string dataset;
  double default_p = 0.5;
  ThetaSpec theta;
  std::size_t k = 1;
  std::vector<double> revenue{8.0, 6.0};
  std::vector<std::size_t> budgets{10};
  /// Adaptive entries take their gain method from `gain`.
  std::vector<PolicyKind> policies{AdaptiveInvitation{}};
  std::size_t reps = 50;
  GainSpec gain;
  std::uint64_t seed = 0;
  /// Freezes theta across runs when set.
  std::optional<std::uint64_t> theta_seed;
  RevealMode reveal = RevealMode::Diffusion;
  std::optional<bool> use_cache;
  std::size_t threads = 1;
  /// Write wall_ms as 0 so repeated runs produce identical files.
  bool omit_timing = false;
};

struct ExperimentRow {
  std::string policy;
  std::size_t k = 0;
  std::size_t b = 0;
  /// Run index, or "mean" / "std" for aggregate rows.
  std::string run;
  std::uint64_t seed = 0;
  double revenue = 0.0;
  double accepted = 0.0;
  double invited = 0.0;
  double gain_evals = 0.0;
  double wall_ms = 0.0;
};

struct ComparisonRow {
  std::string reference;
  std::size_t k = 0;
  std::size_t b = 0;
  std::string run;
  std::uint64_t seed = 0;
  double revenue_fast = 0.0;
  double revenue_ref = 0.0;
  double revenue_ratio = 0.0;
  double wall_ms_fast = 0.0;
  double wall_ms_ref = 0.0;
  double wall_ratio = 0.0;
};

// ---------------------------------------------------------------- parsing

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    auto item = s.substr(start, comma == std::string_view::npos ? s.npos : comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    out.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::size_t parse_count(std::string_view s, const char* what) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end)
    throw ConfigError(std::string("invalid ") + what + ": '" + std::string(s) + "'");
  return v;
}

inline double parse_real(std::string_view s, const char* what) {
  auto v = parse_double(s);
  if (!v || !std::isfinite(*v))
    throw ConfigError(std::string("invalid ") + what + ": '" + std::string(s) + "'");
  return *v;
}

}  // namespace detail

/// "8,6,4" -> {8,6,4}.
inline std::vector<double> parse_revenue(std::string_view s) {
  std::vector<double> out;
  for (auto item : detail::split_commas(s)) out.push_back(detail::parse_real(item, "revenue entry"));
  return out;
}

/// "10,20,30" -> {10,20,30}.
inline std::vector<std::size_t> parse_budgets(std::string_view s) {
  std::vector<std::size_t> out;
  for (auto item : detail::split_commas(s)) out.push_back(detail::parse_count(item, "budget"));
  return out;
}

/// "uniform", "const:<v>" or "file:<path>".
inline ThetaSpec parse_theta_spec(std::string_view s) {
  ThetaSpec t;
  if (s == "uniform") return t;
  if (s.starts_with("const:")) {
    t.mode = ThetaSpec::Mode::Constant;
    t.value = detail::parse_real(s.substr(6), "constant theta");
    if (t.value < 0.0 || t.value > 1.0) throw ConfigError("constant theta outside [0,1]");
    return t;
  }
  if (s.starts_with("file:") && s.size() > 5) {
    t.mode = ThetaSpec::Mode::File;
    t.path = std::string(s.substr(5));
    return t;
  }
  throw ConfigError("theta must be uniform, const:<v> or file:<path>, got '" + std::string(s) + "'");
}

/// "fast", "exact", "mc:<r>" or "mc-lazy:<r>".
inline GainSpec parse_gain_spec(std::string_view s) {
  if (s == "fast") return {GainMethod::Fast};
  if (s == "exact") return {GainMethod::Exact};
  const bool lazy = s.starts_with("mc-lazy:");
  if (lazy || s.starts_with("mc:")) {
    const auto r = detail::parse_count(s.substr(lazy ? 8 : 3), "Monte-Carlo sample count");
    if (r < 1) throw ConfigError("Monte-Carlo sample count must be at least 1");
    return {GainMethod::MonteCarlo, r, lazy ? McSampling::Lazy : McSampling::Full};
  }
  throw ConfigError("gain must be fast, exact, mc:<r> or mc-lazy:<r>, got '" + std::string(s) + "'");
}

/// Comma list of adaptive, maxdegree, random, maxprob, maxdegreeprob, or "all".
inline std::vector<PolicyKind> parse_policies(std::string_view s) {
  std::vector<PolicyKind> out;
  for (auto name : detail::split_commas(s)) {
    if (name == "adaptive") out.emplace_back(AdaptiveInvitation{});
    else if (name == "maxdegree") out.emplace_back(MaxDegree{});
    else if (name == "random") out.emplace_back(RandomChoice{});
    else if (name == "maxprob") out.emplace_back(MaxProb{});
    else if (name == "maxdegreeprob") out.emplace_back(MaxDegreeProb{});
    else if (name == "all") {
      out.insert(out.end(), {AdaptiveInvitation{}, MaxDegree{}, RandomChoice{}, MaxProb{}, MaxDegreeProb{}});
    } else {
      throw ConfigError("unknown policy '" + std::string(name) + "'");
    }
  }
  return out;
}

inline const char* to_string(RevealMode m) {
  return m == RevealMode::Diffusion ? "diffusion" : "distance";
}

inline RevealMode parse_reveal_mode(std::string_view s) {
  if (s == "diffusion") return RevealMode::Diffusion;
  if (s == "distance") return RevealMode::Distance;
  throw ConfigError("reveal must be diffusion or distance, got '" + std::string(s) + "'");
}

inline void validate(const ExperimentConfig& c) {
  if (!(c.default_p >= 0.0 && c.default_p <= 1.0)) throw ConfigError("default-p outside [0,1]");
  ModelParams probe{{}, c.revenue, c.k, 1};
  validate(probe);
  if (c.budgets.empty()) throw ConfigError("at least one budget is required");
  for (auto b : c.budgets)
    if (b < 1) throw ConfigError("budgets must be at least 1");
  if (c.policies.empty()) throw ConfigError("at least one policy is required");
  if (c.reps < 1) throw ConfigError("reps must be at least 1");
  if (c.gain.method == GainMethod::MonteCarlo && c.gain.mc_samples < 1)
    throw ConfigError("Monte-Carlo sample count must be at least 1");
  if (c.threads < 1) throw ConfigError("threads must be at least 1");
}

// ---------------------------------------------------------------- inputs

/// Reads "label theta" lines ('#' comments). Every graph node needs a value.
inline std::vector<double> load_theta_file(const std::string& path, const Graph& g) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open theta file '" + path + "'");
  std::vector<double> theta(g.node_count(), 0.0);
  std::vector<std::uint8_t> seen(g.node_count(), 0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    const auto where = path + ":" + std::to_string(line_no) + ": ";
    if (tok.size() != 2) throw ConfigError(where + "expected '<label> <theta>'");
    auto v = detail::parse_double(tok[1]);
    if (!v || *v < 0.0 || *v > 1.0) throw ConfigError(where + "theta must be a number in [0,1]");
    auto id = g.find(tok[0]);
    if (!id) throw ConfigError(where + "unknown node '" + std::string(tok[0]) + "'");
    theta[*id] = *v;
    seen[*id] = 1;
  }
  for (std::size_t v = 0; v < seen.size(); ++v)
    if (!seen[v]) throw ConfigError("theta file has no value for node '" + g.label(static_cast<NodeId>(v)) + "'");
  return theta;
}

/// Per-run inputs shared by all policies of that run.
struct RunInputs {
  std::uint64_t seed = 0;
  ModelParams params;
  Realization truth;
};

inline std::uint64_t run_seed(std::uint64_t master, std::size_t run) { return derive_seed(master, run); }

/// Builds theta and the ground truth for run `run`. `file_theta` is used in file mode.
inline RunInputs make_run_inputs(const ExperimentConfig& c, const Graph& g, std::size_t run,
                                 const std::vector<double>& file_theta = {}) {
  RunInputs in;
  in.seed = run_seed(c.seed, run);
  in.params.k = c.k;
  in.params.revenue = c.revenue;
  in.params.budget = std::max<std::size_t>(1, *std::max_element(c.budgets.begin(), c.budgets.end()));
  switch (c.theta.mode) {
    case ThetaSpec::Mode::Uniform: {
      Rng rng(c.theta_seed ? *c.theta_seed : derive_seed(in.seed, 1));
      in.params.theta.resize(g.node_count());
      for (auto& t : in.params.theta) t = uniform01(rng);
      break;
    }
    case ThetaSpec::Mode::Constant:
      in.params.theta.assign(g.node_count(), c.theta.value);
      break;
    case ThetaSpec::Mode::File:
      if (file_theta.size() != g.node_count()) throw ConfigError("theta file not loaded");
      in.params.theta = file_theta;
      break;
  }
  Rng truth_rng(derive_seed(in.seed, 2));
  in.truth = sample_realization(g, in.params, truth_rng);
  return in;
}

inline PolicyKind with_gain(PolicyKind kind, const ExperimentConfig& c) {
  if (auto* a = std::get_if<AdaptiveInvitation>(&kind)) {
    a->gain = c.gain.method;
    a->mc_samples = c.gain.mc_samples;
    a->mc_sampling = c.gain.sampling;
    a->use_cache = c.use_cache;
  }
  return kind;
}

/// Runs one policy for run index `run` with budget `budget`. Equal to the
/// budget-`budget` prefix of the corresponding row in run_experiment.
inline RunResult run_single(const ExperimentConfig& c, const Graph& g, const PolicyKind& kind,
                            std::size_t run, std::size_t budget) {
  std::vector<double> file_theta;
  if (c.theta.mode == ThetaSpec::Mode::File) file_theta = load_theta_file(c.theta.path, g);
  auto in = make_run_inputs(c, g, run, file_theta);
  in.params.budget = budget;
  return run_policy(with_gain(kind, c), g, in.params, in.truth, {c.reveal, derive_seed(in.seed, 3)});
}

// ---------------------------------------------------------------- execution

namespace detail {

/// Calls task(i) for i in [0, count) on `threads` workers; rethrows the first failure.
template <class Task>
void parallel_for(std::size_t count, std::size_t threads, Task&& task) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

inline double ms(std::chrono::nanoseconds d) { return static_cast<double>(d.count()) / 1e6; }

inline ExperimentRow prefix_row(const std::string& policy, std::size_t k, std::size_t b,
                                std::size_t run, std::uint64_t seed, const RunResult& r) {
  ExperimentRow row{policy, k, b, std::to_string(run), seed};
  const std::size_t steps = std::min(b, r.steps.size());
  if (steps > 0) {
    const auto& last = r.steps[steps - 1];
    row.revenue = last.revenue;
    row.gain_evals = static_cast<double>(last.gain_evaluations);
    row.wall_ms = ms(last.elapsed);
  }
  row.invited = static_cast<double>(steps);
  row.accepted = static_cast<double>(
      std::count_if(r.steps.begin(), r.steps.begin() + static_cast<std::ptrdiff_t>(steps),
                    [](const StepRecord& s) { return s.accepted; }));
  return row;
}

/// Mean and sample (n-1) standard deviation; n = 1 gives std 0.
inline std::pair<double, double> mean_std(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

inline std::vector<double> load_file_theta(const ExperimentConfig& c, const Graph& g) {
  if (c.theta.mode == ThetaSpec::Mode::File) return load_theta_file(c.theta.path, g);
  return {};
}

}  // namespace detail

/// Per-run rows in (policy, budget, run) order, each cell followed by its
/// "mean" and "std" rows. One trajectory per (policy, run) is executed at the
/// largest budget; smaller budgets read its prefix, since selection does not
/// depend on the remaining budget.
inline std::vector<ExperimentRow> run_experiment(const ExperimentConfig& c, const Graph& g) {
  validate(c);
  if (g.node_count() == 0) throw ArgumentError("cannot run an experiment on an empty graph");
  const auto file_theta = detail::load_file_theta(c, g);
  const std::size_t P = c.policies.size();

  // results[run * P + policy]
  std::vector<std::vector<ExperimentRow>> results(c.reps * P);
  detail::parallel_for(c.reps, c.threads, [&](std::size_t run) {
    const auto in = make_run_inputs(c, g, run, file_theta);
    for (std::size_t pi = 0; pi < P; ++pi) {
      const auto kind = with_gain(c.policies[pi], c);
      const auto result = run_policy(kind, g, in.params, in.truth, {c.reveal, derive_seed(in.seed, 3)});
      auto& rows = results[run * P + pi];
      for (auto b : c.budgets) rows.push_back(detail::prefix_row(to_string(kind), c.k, b, run, in.seed, result));
    }
  });

  std::vector<ExperimentRow> out;
  for (std::size_t pi = 0; pi < P; ++pi) {
    for (std::size_t bi = 0; bi < c.budgets.size(); ++bi) {
      std::vector<double> cols[5];
      for (std::size_t run = 0; run < c.reps; ++run) {
        auto row = results[run * P + pi][bi];
        if (c.omit_timing) row.wall_ms = 0.0;
        cols[0].push_back(row.revenue);
        cols[1].push_back(row.accepted);
        cols[2].push_back(row.invited);
        cols[3].push_back(row.gain_evals);
        cols[4].push_back(row.wall_ms);
        out.push_back(std::move(row));
      }
      ExperimentRow mean{out.back().policy, c.k, c.budgets[bi], "mean", c.seed};
      ExperimentRow sd{out.back().policy, c.k, c.budgets[bi], "std", c.seed};
      double* mean_fields[5] = {&mean.revenue, &mean.accepted, &mean.invited, &mean.gain_evals, &mean.wall_ms};
      double* sd_fields[5] = {&sd.revenue, &sd.accepted, &sd.invited, &sd.gain_evals, &sd.wall_ms};
      for (int f = 0; f < 5; ++f) std::tie(*mean_fields[f], *sd_fields[f]) = detail::mean_std(cols[f]);
      out.push_back(std::move(mean));
      out.push_back(std::move(sd));
    }
  }
  return out;
}

/// Adaptive invitation with the fast estimator against the configured
/// reference estimator (Monte-Carlo or exact) on identical theta and ground
/// truth. Per-run rows, then one "mean" row per budget whose ratios are
/// ratios of means.
inline std::vector<ComparisonRow> compare_gain_methods(const ExperimentConfig& c, const Graph& g) {
  validate(c);
  if (c.gain.method == GainMethod::Fast)
    throw ConfigError("compare-gain needs a reference estimator: mc:<r> or exact");
  if (g.node_count() == 0) throw ArgumentError("cannot run an experiment on an empty graph");
  const auto file_theta = detail::load_file_theta(c, g);

  PolicyKind fast = AdaptiveInvitation{GainMethod::Fast, c.gain.mc_samples, c.gain.sampling, c.use_cache};
  PolicyKind ref = AdaptiveInvitation{c.gain.method, c.gain.mc_samples, c.gain.sampling, c.use_cache};
  const std::string ref_name = to_string(ref);

  std::vector<std::vector<ComparisonRow>> results(c.reps);
  detail::parallel_for(c.reps, c.threads, [&](std::size_t run) {
    const auto in = make_run_inputs(c, g, run, file_theta);
    const RunOptions opt{c.reveal, derive_seed(in.seed, 3)};
    const auto a = run_policy(fast, g, in.params, in.truth, opt);
    const auto r = run_policy(ref, g, in.params, in.truth, opt);
    for (auto b : c.budgets) {
      const auto fa = detail::prefix_row("", c.k, b, run, in.seed, a);
      const auto re = detail::prefix_row("", c.k, b, run, in.seed, r);
      ComparisonRow row{ref_name, c.k, b, std::to_string(run), in.seed};
      row.revenue_fast = fa.revenue;
      row.revenue_ref = re.revenue;
      row.revenue_ratio = re.revenue > 0.0 ? fa.revenue / re.revenue : 0.0;
      row.wall_ms_fast = c.omit_timing ? 0.0 : fa.wall_ms;
      row.wall_ms_ref = c.omit_timing ? 0.0 : re.wall_ms;
      row.wall_ratio = row.wall_ms_fast > 0.0 ? row.wall_ms_ref / row.wall_ms_fast : 0.0;
      results[run].push_back(row);
    }
  });

  std::vector<ComparisonRow> out;
  for (std::size_t bi = 0; bi < c.budgets.size(); ++bi) {
    ComparisonRow mean{ref_name, c.k, c.budgets[bi], "mean", c.seed};
    for (std::size_t run = 0; run < c.reps; ++run) {
      const auto& row = results[run][bi];
      mean.revenue_fast += row.revenue_fast;
      mean.revenue_ref += row.revenue_ref;
      mean.wall_ms_fast += row.wall_ms_fast;
      mean.wall_ms_ref += row.wall_ms_ref;
      out.push_back(row);
    }
    const auto n = static_cast<double>(c.reps);
    mean.revenue_fast /= n;
    mean.revenue_ref /= n;
    mean.wall_ms_fast /= n;
    mean.wall_ms_ref /= n;
    mean.revenue_ratio = mean.revenue_ref > 0.0 ? mean.revenue_fast / mean.revenue_ref : 0.0;
    mean.wall_ratio = mean.wall_ms_fast > 0.0 ? mean.wall_ms_ref / mean.wall_ms_fast : 0.0;
    out.push_back(mean);
  }
  return out;
}

// ---------------------------------------------------------------- CSV

inline constexpr std::string_view kExperimentHeader =
    "policy,k,b,run,seed,revenue,accepted,invited,gain_evals,wall_ms";
inline constexpr std::string_view kComparisonHeader =
    "reference,k,b,run,seed,revenue_fast,revenue_ref,revenue_ratio,wall_ms_fast,wall_ms_ref,wall_ratio";

/// Shortest decimal that reads back to the same double.
inline std::string format_number(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

inline void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  out << kExperimentHeader << '\n';
  for (const auto& r : rows) {
    out << r.policy << ',' << r.k << ',' << r.b << ',' << r.run << ',' << r.seed << ','
        << format_number(r.revenue) << ',' << format_number(r.accepted) << ','
        << format_number(r.invited) << ',' << format_number(r.gain_evals) << ','
        << format_number(r.wall_ms) << '\n';
  }
}

inline void write_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << kComparisonHeader << '\n';
  for (const auto& r : rows) {
    out << r.reference << ',' << r.k << ',' << r.b << ',' << r.run << ',' << r.seed << ','
        << format_number(r.revenue_fast) << ',' << format_number(r.revenue_ref) << ','
        << format_number(r.revenue_ratio) << ',' << format_number(r.wall_ms_fast) << ','
        << format_number(r.wall_ms_ref) << ',' << format_number(r.wall_ratio) << '\n';
  }
}

}  // namespace kcg
