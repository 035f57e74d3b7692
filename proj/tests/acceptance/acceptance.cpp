// Acceptance checks, one per criterion id: `kcg_acceptance <id>`.
// Each prints detail lines and a final "[id] PASS|FAIL ..." line. Exit status
// is nonzero on FAIL, except for the soft variance-trend check (10).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "kcg/kcg.hpp"

using namespace kcg;

namespace {

// Tolerances and limits pinned from the criteria.
constexpr double kExactTol = 1e-12;
constexpr double kMonotoneTol = 1e-12;
constexpr double kSubmodularTol = 1e-9;
constexpr double kStdErrBand = 4.0;
constexpr std::size_t kMcSamplesOracle = 200000;
constexpr std::size_t kCorpusSize = 2000;
constexpr double kRatioLow = 0.90;
constexpr double kRatioHigh = 1.05;
constexpr double kMinSpeedup = 100.0;
constexpr double kFastCheckSeconds = 1.0;
constexpr std::size_t kDominanceReps = 50;
constexpr std::size_t kSpeedupReps = 20;
constexpr std::size_t kCacheRuns = 50;
const std::vector<std::size_t> kBudgets{10, 20, 30, 40, 50, 60};
const char* const kDominanceCsv = "criterion7.csv";

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int verdict(int id, bool pass, const std::string& summary) {
  std::printf("[%d] %s %s\n", id, pass ? "PASS" : "FAIL", summary.c_str());
  return pass ? 0 : 1;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Graph load_dataset(const std::string& name) {
  return load_edge_list_file(std::string(KCG_TEST_DATA_DIR) + "/" + name, 0.5).graph;
}

// ------------------------------------------------------------------ 1

int worked_example() {
  const auto t0 = Clock::now();
  const auto g = synthetic::path(5, 0.5);
  std::vector<std::uint8_t> edges(4, 0);
  edges[*g.edge_between(1, 2)] = 1;
  edges[*g.edge_between(3, 4)] = 1;
  const Realization phi(std::vector<std::uint8_t>(5, 1), edges);
  PartialRealization psi(g);
  apply_invitation(g, psi, 2, phi, 2);

  auto gain = [&](NodeId u, const std::vector<double>& R) {
    return marginal_gain_fast(g, psi, u, {std::vector<double>(5, 1.0), R, 2, 1}).value;
  };
  // Coefficients on (R0, R1, R2) from indicator vectors.
  const std::vector<std::pair<NodeId, std::array<double, 3>>> symbolic{
      {0, {1, 0, 0}}, {1, {1, -1, 0}}, {3, {1, 0.5, 0}}, {4, {1, 0.5, 0}}};
  const std::vector<std::pair<NodeId, double>> numeric{{0, 8}, {1, 2}, {3, 11}, {4, 11}};

  bool ok = true;
  for (const auto& [u, c] : symbolic) {
    const double a = gain(u, {1, 0, 0});
    const double b = gain(u, {1, 1, 0}) - a;
    const double d = gain(u, {1, 1, 1}) - a - b;
    const bool match = std::abs(a - c[0]) <= kExactTol && std::abs(b - c[1]) <= kExactTol &&
                       std::abs(d - c[2]) <= kExactTol;
    std::printf("  v%u: %g*R0 %+g*R1 %+g*R2 %s\n", u + 1, a, b, d, match ? "ok" : "MISMATCH");
    ok &= match;
  }
  for (const auto& [u, want] : numeric) {
    const double got = gain(u, {8, 6, 4});
    std::printf("  v%u with R=(8,6,4): %.17g (want %g)\n", u + 1, got, want);
    ok &= std::abs(got - want) <= kExactTol;
  }
  const double secs = seconds_since(t0);
  ok &= secs < kFastCheckSeconds;
  return verdict(1, ok, fmt("worked-example gains symbolic and numeric, %.4fs", secs));
}

// ------------------------------------------------------------------ 2

int star_counterexample() {
  const auto t0 = Clock::now();
  const auto g = Graph::from_edges(4, {{0, 1, 0.1}, {1, 2, 0.1}, {1, 3, 0.1}});
  const ModelParams params{{0.5, 0.5, 0.5, 0.5}, {5, 3, 1}, 2, 1};
  const PartialRealization psi1(g);
  const Realization all_live(std::vector<std::uint8_t>(4, 1), std::vector<std::uint8_t>(3, 1));
  const auto psi2 = reveal_after_accept(g, psi1, 0, all_live, 2);

  bool ok = true;
  for (auto method : {GainMethod::Fast, GainMethod::Exact}) {
    auto gain = [&](const PartialRealization& psi) {
      return method == GainMethod::Fast ? marginal_gain_fast(g, psi, 1, params).value
                                        : marginal_gain_exact(g, psi, 1, params).value;
    };
    const double a = gain(psi1), b = gain(psi2);
    std::printf("  %s: gain before %.17g, after %.17g\n", to_string(method), a, b);
    ok &= std::abs(a - 2.95) <= kExactTol && std::abs(b - 3.0) <= kExactTol;
  }
  const auto report = check_adaptive_submodularity(g, params);
  std::printf("  checker: %zu states, %zu violations, worst excess %.6g\n", report.states,
              report.violation_count, report.worst_excess);
  ok &= !report.submodular();
  const double secs = seconds_since(t0);
  ok &= secs < kFastCheckSeconds;
  return verdict(2, ok, fmt("star counterexample 2.95 < 3.00 and checker violation, %.4fs", secs));
}

// ------------------------------------------------------------------ 3

int oracle_equivalence() {
  const auto t0 = Clock::now();
  const auto corpus = corpus::gain_corpus(kCorpusSize, 20240601);
  std::size_t mc_fail = 0, equal_checked = 0, equal_fail = 0;
  std::map<std::size_t, std::size_t> above_checked, above_fail;
  double worst_above = 0.0;
  Rng rng(99);
  for (const auto& inst : corpus) {
    const auto& [g, params, psi, u, forest, vars, seed] = inst;
    const double exact = marginal_gain_exact(g, psi, u, params).value;
    const double fast = marginal_gain_fast(g, psi, u, params).value;
    const auto mc = marginal_gain_mc(g, psi, u, params, kMcSamplesOracle, rng);

    const double dev = std::abs(mc.value - exact);
    const bool mc_ok = mc.standard_error > 0.0 ? dev <= kStdErrBand * mc.standard_error : dev <= 1e-9;
    if (!mc_ok) {
      ++mc_fail;
      std::printf("  mc outside band: seed %llu exact %.12g mc %.12g se %.3g\n",
                  static_cast<unsigned long long>(seed), exact, mc.value, mc.standard_error);
    }
    if (forest || params.k <= 1) {
      ++equal_checked;
      if (std::abs(fast - exact) > kExactTol) {
        ++equal_fail;
        std::printf("  fast != exact: seed %llu k=%zu fast %.17g exact %.17g\n",
                    static_cast<unsigned long long>(seed), params.k, fast, exact);
      }
    } else {
      ++above_checked[params.k];
      if (fast > exact + kExactTol) {
        ++above_fail[params.k];
        worst_above = std::max(worst_above, fast - exact);
        std::printf("  fast > exact: seed %llu k=%zu theta_u=%.3g fast %.17g exact %.17g\n",
                    static_cast<unsigned long long>(seed), params.k, params.theta[u], fast, exact);
      }
    }
  }
  std::size_t above_total = 0;
  for (const auto& [k, n] : above_checked)
    std::printf("  fast <= exact on cyclic k=%zu: %zu/%zu hold\n", k, n - above_fail[k], n);
  for (const auto& [k, n] : above_fail) above_total += n;
  const double secs = seconds_since(t0);
  std::printf("  %zu instances, mc band failures %zu, forest/k<=1 equal %zu/%zu, worst fast-exact %.3g\n",
              corpus.size(), mc_fail, equal_checked - equal_fail, equal_checked, worst_above);
  const bool ok = mc_fail == 0 && equal_fail == 0 && above_total == 0 && secs < 300.0;
  return verdict(3, ok,
                 fmt("%zu instances: mc within 4 SE, fast==exact on forests and k<=1, fast>exact in %zu cases, %.1fs",
                     corpus.size(), above_total, secs));
}

// ------------------------------------------------------------------ 4

int monotonicity() {
  const auto t0 = Clock::now();
  std::size_t checked = 0, negative = 0;
  double lowest = 0.0;
  Rng rng(4);
  for (std::uint64_t corpus_seed : {20240601ULL, 777ULL}) {
    for (const auto& inst : corpus::gain_corpus(kCorpusSize, corpus_seed)) {
      const double values[] = {
          marginal_gain_fast(inst.graph, inst.psi, inst.candidate, inst.params).value,
          marginal_gain_exact(inst.graph, inst.psi, inst.candidate, inst.params).value,
          marginal_gain_mc(inst.graph, inst.psi, inst.candidate, inst.params, 2000, rng).value,
          marginal_gain_mc(inst.graph, inst.psi, inst.candidate, inst.params, 2000, rng, McSampling::Lazy).value};
      for (double v : values) {
        ++checked;
        lowest = std::min(lowest, v);
        if (v < -kMonotoneTol) ++negative;
      }
    }
  }
  const double secs = seconds_since(t0);
  std::printf("  %zu estimates (fast, exact, mc, mc-lazy), lowest %.3g\n", checked, lowest);
  return verdict(4, negative == 0, fmt("%zu negative gains out of %zu, %.1fs", negative, checked, secs));
}

// ------------------------------------------------------------------ 5

int special_case_submodularity() {
  const auto t0 = Clock::now();
  struct Family {
    const char* name;
    double p;
    std::vector<std::size_t> ks;
  };
  const Family families[] = {{"all p=1", 1.0, {0, 1, 2, 3}}, {"k<=1, p=0.5", 0.5, {0, 1}}};
  bool ok = true;
  for (const auto& fam : families) {
    std::size_t graphs = 0, states = 0, pairs = 0, violations = 0;
    for (int n = 1; n <= 6; ++n) {
      for (const auto& edges : corpus::nonisomorphic_graphs(n)) {
        const auto g = corpus::make_graph(n, edges, fam.p);
        for (auto k : fam.ks) {
          const ModelParams params{std::vector<double>(n, 0.5), corpus::revenue_for(k), k, 1};
          SubmodularityOptions opt;
          opt.tolerance = kSubmodularTol;
          const auto report = check_adaptive_submodularity(g, params, opt);
          ++graphs;
          states += report.states;
          pairs += report.pairs_checked;
          violations += report.violation_count;
        }
      }
    }
    std::printf("  %s: %zu (graph, k) cases, %zu states, %zu pairs, %zu violations\n", fam.name, graphs,
                states, pairs, violations);
    ok &= violations == 0;
  }
  const double secs = seconds_since(t0);
  ok &= secs < 300.0;
  return verdict(5, ok, fmt("exhaustive psi <= psi' pairs on all graphs with <= 6 nodes, %.1fs", secs));
}

// ------------------------------------------------------------------ 6

int triangle() {
  const auto g = Graph::from_edges(3, {{0, 1, 0.5}, {1, 2, 0.5}, {0, 2, 0.5}});
  const ModelParams params{{1.0, 1.0, 1.0}, {8, 6, 4}, 2, 1};
  const PartialRealization empty(g);
  const std::vector<NodeId> set{0};
  const auto exact_nodes = expected_revenue_exact(g, params, set, 2).per_node;
  const auto table = layer_table(g, empty, 0, params);

  bool ok = true;
  for (NodeId v : {NodeId{1}, NodeId{2}}) {
    double fast = 0.0;
    for (std::size_t level = 1; level < table.levels.size(); ++level)
      for (auto [w, prob] : table.levels[level])
        if (w == v) fast = prob * params.revenue[level];
    const double diff = exact_nodes[v] - fast;
    std::printf("  v%u: exact %.17g fast %.17g difference %.17g\n", v + 1, exact_nodes[v], fast, diff);
    ok &= std::abs(diff - 0.5) <= kExactTol;
  }
  const double total = marginal_gain_exact(g, empty, 0, params).value - marginal_gain_fast(g, empty, 0, params).value;
  std::printf("  whole gain of v1: exact - fast = %.17g (one omitted term per non-initiator)\n", total);
  return verdict(6, ok, "omitted (1-p)p^2 R2 term equals 0.5 for each of v2 and v3");
}

// ------------------------------------------------------------------ 7

ExperimentConfig dominance_config(std::size_t k) {
  ExperimentConfig c;
  c.dataset = "synthetic-1000.txt";
  c.k = k;
  c.revenue = corpus::revenue_for(k);
  c.revenue.resize(k + 1);
  c.budgets = kBudgets;
  c.policies = parse_policies("all");
  c.reps = kDominanceReps;
  c.seed = 7;
  return c;
}

std::vector<ExperimentRow> dominance_rows(const Graph& g) {
  std::vector<ExperimentRow> all;
  for (std::size_t k = 1; k <= 3; ++k) {
    auto rows = run_experiment(dominance_config(k), g);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  return all;
}

int dominance() {
  const auto t0 = Clock::now();
  const auto g = load_dataset("synthetic-1000.txt");
  const auto rows = dominance_rows(g);
  {
    std::ofstream out(kDominanceCsv);
    write_csv(out, rows);
  }
  // mean revenue by (k, b, policy)
  std::map<std::pair<std::size_t, std::size_t>, std::map<std::string, double>> means;
  for (const auto& r : rows)
    if (r.run == "mean") means[{r.k, r.b}][r.policy] = r.revenue;

  bool adaptive_ok = true;
  std::size_t mdp_best = 0;
  for (const auto& [cell, by_policy] : means) {
    const double adaptive = by_policy.at("adaptive[fast]");
    std::string best;
    double best_value = -1.0;
    std::string line;
    for (const auto& [name, value] : by_policy) {
      line += fmt(" %s=%.2f", name.c_str(), value);
      if (name == "adaptive[fast]") continue;
      adaptive_ok &= adaptive >= value;
      if (value > best_value) best_value = value, best = name;
    }
    mdp_best += best == "maxdegreeprob";
    std::printf("  k=%zu b=%zu%s best baseline %s\n", cell.first, cell.second, line.c_str(), best.c_str());
  }
  const double secs = seconds_since(t0);
  const bool majority = 2 * mdp_best > means.size();
  return verdict(7, adaptive_ok && majority && secs < 600.0,
                 fmt("adaptive >= every baseline in all cells: %s; maxdegreeprob best baseline in %zu/%zu cells, %.1fs",
                     adaptive_ok ? "yes" : "no", mdp_best, means.size(), secs));
}

// ------------------------------------------------------------------ 8

int fast_vs_mc() {
  const auto t0 = Clock::now();
  const auto g = load_dataset("synthetic-400.txt");
  ExperimentConfig c;
  c.dataset = "synthetic-400.txt";
  c.k = 2;
  c.revenue = {8, 6, 4};
  c.budgets = kBudgets;
  c.reps = kSpeedupReps;
  c.gain = parse_gain_spec("mc:100");
  c.seed = 8;
  const auto rows = compare_gain_methods(c, g);
  bool ok = true;
  for (const auto& r : rows) {
    if (r.run != "mean") continue;
    const bool cell = r.revenue_ratio >= kRatioLow && r.revenue_ratio <= kRatioHigh && r.wall_ratio >= kMinSpeedup;
    std::printf("  b=%zu revenue fast %.2f mc %.2f ratio %.4f, wall fast %.2fms mc %.1fms ratio %.1f%s\n", r.b,
                r.revenue_fast, r.revenue_ref, r.revenue_ratio, r.wall_ms_fast, r.wall_ms_ref, r.wall_ratio,
                cell ? "" : "  <-- out of bounds");
    ok &= cell;
  }
  const double secs = seconds_since(t0);
  ok &= secs < 1800.0;
  return verdict(8, ok, fmt("revenue ratio in [%.2f, %.2f] and speedup >= %.0f at every budget, %zu runs, %.1fs",
                            kRatioLow, kRatioHigh, kMinSpeedup, kSpeedupReps, secs));
}

// ------------------------------------------------------------------ 9

int cache_transparency() {
  const auto t0 = Clock::now();
  const auto g = load_dataset("synthetic-400.txt");
  std::size_t identical = 0, evals_on = 0, evals_off = 0;
  for (std::size_t run = 0; run < kCacheRuns; ++run) {
    const std::size_t k = 1 + run % 3;
    ExperimentConfig c;
    c.k = k;
    c.revenue = corpus::revenue_for(k);
    c.budgets = {60};
    c.seed = 9;
    const auto in = make_run_inputs(c, g, run);
    const RunOptions opt{RevealMode::Diffusion, derive_seed(in.seed, 3)};
    const auto on = run_policy(AdaptiveInvitation{GainMethod::Fast, 100, McSampling::Full, true}, g, in.params,
                               in.truth, opt);
    const auto off = run_policy(AdaptiveInvitation{GainMethod::Fast, 100, McSampling::Full, false}, g, in.params,
                                in.truth, opt);
    const bool same = on.invited == off.invited && on.revenue == off.revenue;
    identical += same;
    evals_on += on.gain_evaluations;
    evals_off += off.gain_evaluations;
    if (!same) std::printf("  run %zu (k=%zu) differs: revenue %.6g vs %.6g\n", run, k, on.revenue, off.revenue);
  }
  const double secs = seconds_since(t0);
  std::printf("  gain evaluations with cache %zu, without %zu\n", evals_on, evals_off);
  return verdict(9, identical == kCacheRuns && secs < 120.0,
                 fmt("%zu/%zu runs identical with and without cache (k=1..3, b=60), %.1fs", identical, kCacheRuns,
                     secs));
}

// ------------------------------------------------------------------ 10

std::vector<ExperimentRow> read_std_rows(const std::string& path) {
  std::vector<ExperimentRow> rows;
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 10 || f[3] != "std") continue;
    ExperimentRow r{f[0], std::stoul(f[1]), std::stoul(f[2]), f[3]};
    r.revenue = std::stod(f[5]);
    rows.push_back(r);
  }
  return rows;
}

int variance_trends() {
  std::vector<ExperimentRow> rows;
  if (std::filesystem::exists(kDominanceCsv)) {
    rows = read_std_rows(kDominanceCsv);
    std::printf("  reading %s\n", kDominanceCsv);
  }
  if (rows.empty()) {
    std::printf("  %s not found, recomputing the criterion 7 sweep\n", kDominanceCsv);
    for (auto& r : dominance_rows(load_dataset("synthetic-1000.txt")))
      if (r.run == "std") rows.push_back(r);
  }
  std::map<std::tuple<std::string, std::size_t, std::size_t>, double> sd;
  std::set<std::string> policies;
  for (const auto& r : rows) {
    sd[{r.policy, r.k, r.b}] = r.revenue;
    policies.insert(r.policy);
  }

  std::size_t by_budget = 0, budget_cases = 0, by_hop = 0, hop_cases = 0;
  for (const auto& p : policies) {
    for (std::size_t k = 1; k <= 3; ++k) {
      const double lo = sd[{p, k, 10}], hi = sd[{p, k, 60}];
      ++budget_cases;
      by_budget += hi < lo;
      std::printf("  %s k=%zu: std b=10 %.3f, b=60 %.3f\n", p.c_str(), k, lo, hi);
    }
    std::string line;
    for (auto b : kBudgets) {
      ++hop_cases;
      by_hop += sd[{p, 3, b}] < sd[{p, 1, b}];
      line += fmt(" b=%zu %.1f/%.1f", b, sd[{p, 1, b}], sd[{p, 3, b}]);
    }
    std::printf("  %s std k=1/k=3:%s\n", p.c_str(), line.c_str());
  }
  const bool pass = 2 * by_budget > budget_cases && 2 * by_hop > hop_cases;
  verdict(10, pass,
          fmt("(soft) std(b=60) < std(b=10) in %zu/%zu (policy, k); std(k=3) < std(k=1) in %zu/%zu (policy, b)",
              by_budget, budget_cases, by_hop, hop_cases));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<int()>> checks{
      {1, worked_example}, {2, star_counterexample},  {3, oracle_equivalence}, {4, monotonicity},
      {5, special_case_submodularity}, {6, triangle}, {7, dominance}, {8, fast_vs_mc},
      {9, cache_transparency}, {10, variance_trends}};
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (const auto& [id, fn] : checks) ids.push_back(id);
  int status = 0;
  for (int id : ids) {
    auto it = checks.find(id);
    if (it == checks.end()) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    try {
      status |= it->second();
    } catch (const std::exception& e) {
      std::printf("[%d] FAIL exception: %s\n", id, e.what());
      status = 1;
    }
    std::fflush(stdout);
  }
  return status;
}
