// kcg: run k-hop collaborate-game experiments from the command line.
//
//   kcg run --dataset g.txt --k 2 --revenue 8,6,4 --budgets 10,20 --policies all --out r.csv
//   kcg compare-gain --dataset g.txt --k 2 --revenue 8,6,4 --budgets 10,20 --gain mc:100
//   kcg generate --nodes 400 --edges 1010 --seed 1 --out g.txt
//
// Exit codes: 0 success, 1 configuration error, 2 dataset error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "kcg/kcg.hpp"

namespace {

struct RawFlags {
  std::string dataset;
  double default_p = 0.5;
  std::string theta = "uniform";
  std::size_t k = 1;
  std::string revenue = "8,6";
  std::string budgets = "10,20,30,40,50,60";
  std::string policies = "all";
  std::size_t reps = 50;
  std::string gain = "fast";
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> theta_seed;
  std::string reveal = "diffusion";
  std::string cache = "auto";
  std::size_t threads = 1;
  bool omit_timing = false;
  std::string out;
};

void add_common(CLI::App* cmd, RawFlags& f) {
  cmd->add_option("--dataset", f.dataset, "Edge-list file")->required();
  cmd->add_option("--default-p", f.default_p, "Edge probability when a line has none");
  cmd->add_option("--theta", f.theta, "uniform | const:<v> | file:<path>");
  cmd->add_option("--k", f.k, "Hop limit")->required();
  cmd->add_option("--revenue", f.revenue, "Comma list R0,...,Rk");
  cmd->add_option("--budgets", f.budgets, "Comma list of budgets");
  cmd->add_option("--reps", f.reps, "Seeded runs per cell");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--theta-seed", f.theta_seed, "Freeze theta across runs with this seed");
  cmd->add_option("--reveal", f.reveal, "diffusion | distance");
  cmd->add_option("--cache", f.cache, "auto | on | off");
  cmd->add_option("--threads", f.threads, "Worker threads");
  cmd->add_flag("--omit-timing", f.omit_timing, "Write wall_ms as 0 for byte-stable output");
  cmd->add_option("--out", f.out, "CSV output path (default stdout)");
}

kcg::ExperimentConfig to_config(const RawFlags& f, bool with_policies) {
  kcg::ExperimentConfig c;
  c.dataset = f.dataset;
  c.default_p = f.default_p;
  c.theta = kcg::parse_theta_spec(f.theta);
  c.k = f.k;
  c.revenue = kcg::parse_revenue(f.revenue);
  c.budgets = kcg::parse_budgets(f.budgets);
  if (with_policies) c.policies = kcg::parse_policies(f.policies);
  c.reps = f.reps;
  c.gain = kcg::parse_gain_spec(f.gain);
  c.seed = f.seed;
  c.theta_seed = f.theta_seed;
  c.reveal = kcg::parse_reveal_mode(f.reveal);
  if (f.cache == "on") c.use_cache = true;
  else if (f.cache == "off") c.use_cache = false;
  else if (f.cache != "auto") throw kcg::ConfigError("cache must be auto, on or off");
  c.threads = f.threads;
  c.omit_timing = f.omit_timing;
  kcg::validate(c);
  return c;
}

template <class Rows>
int emit(const Rows& rows, const std::string& out) {
  if (out.empty()) {
    kcg::write_csv(std::cout, rows);
    return 0;
  }
  std::ofstream file(out);
  if (!file) {
    std::cerr << "error: cannot write '" << out << "'\n";
    return 1;
  }
  kcg::write_csv(file, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-hop collaborate game: adaptive invitation experiments"};
  app.require_subcommand(1);

  RawFlags run_flags;
  auto* run = app.add_subcommand("run", "Run policies over a budget sweep");
  add_common(run, run_flags);
  run->add_option("--policies", run_flags.policies,
                  "Comma list: adaptive, maxdegree, random, maxprob, maxdegreeprob, all");
  run->add_option("--gain", run_flags.gain, "Adaptive gain estimator: fast | mc:<r> | mc-lazy:<r> | exact");

  RawFlags cmp_flags;
  cmp_flags.gain = "mc:100";
  auto* cmp = app.add_subcommand("compare-gain", "Fast estimator against a reference estimator");
  add_common(cmp, cmp_flags);
  cmp->add_option("--gain", cmp_flags.gain, "Reference estimator: mc:<r> | mc-lazy:<r> | exact");

  std::size_t gen_nodes = 400, gen_edges = 1010;
  double gen_triad = 0.3, gen_p = 0.5;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "Write a synthetic power-law cluster graph");
  gen->add_option("--nodes", gen_nodes, "Node count");
  gen->add_option("--edges", gen_edges, "Target edge count");
  gen->add_option("--triad", gen_triad, "Triad formation probability");
  gen->add_option("--p", gen_p, "Edge probability written to each line");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      const auto g = kcg::synthetic::powerlaw_cluster(gen_nodes, gen_edges, gen_triad, gen_p, gen_seed);
      if (gen_out.empty()) {
        kcg::write_edge_list(std::cout, g);
        return 0;
      }
      std::ofstream file(gen_out);
      if (!file) {
        std::cerr << "error: cannot write '" << gen_out << "'\n";
        return 1;
      }
      file << "# nodes " << g.node_count() << " edges " << g.edge_count() << '\n';
      kcg::write_edge_list(file, g);
      return 0;
    }

    const bool is_run = run->parsed();
    const RawFlags& flags = is_run ? run_flags : cmp_flags;
    const auto config = to_config(flags, is_run);

    kcg::Graph graph;
    try {
      auto loaded = kcg::load_edge_list_file(config.dataset, config.default_p);
      if (loaded.warnings > 0)
        std::cerr << "warning: dropped " << loaded.warnings << " self-loop or duplicate lines\n";
      graph = std::move(loaded.graph);
    } catch (const kcg::ParseError& e) {
      std::cerr << "dataset error: " << config.dataset << ": " << e.what() << '\n';
      return 2;
    }
    if (graph.node_count() == 0) {
      std::cerr << "dataset error: " << config.dataset << ": no edges\n";
      return 2;
    }

    if (is_run) return emit(kcg::run_experiment(config, graph), flags.out);
    return emit(kcg::compare_gain_methods(config, graph), flags.out);
  } catch (const kcg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const kcg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
