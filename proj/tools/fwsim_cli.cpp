// fwsim command line: run | mc | seeds | metrics

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fwsim/error.hpp"
#include "fwsim/runner.hpp"

namespace fs = std::filesystem;
using namespace fwsim;

namespace {

struct CommonArgs {
  std::string config;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("-c,--config", a.config, "run configuration file (key = value lines)");
  cmd->add_option("-s,--set", a.sets, "override a configuration key, e.g. --set scenario=2")
      ->take_all();
}

RunConfig resolve_config(const CommonArgs& a) { return load_run_config(fs::path(a.config), a.sets); }

void print_run(const RunResult& r, const RunConfig& cfg) {
  std::printf("run %d  master_seed %llu  config_hash %s\n", r.run_index,
              static_cast<unsigned long long>(cfg.master.value), config_hash(cfg).c_str());
  if (!r.ok) {
    std::printf("FAILED at t=%.3f: %s\n", r.failure_time, r.failure.c_str());
    return;
  }
  std::printf("epochs truth %zu  estimated %zu  control %zu  camera %zu  gnss fixes %zu\n",
              r.truth_epochs, r.estimate_epochs, r.control_epochs, r.camera_frames, r.gnss_fixes);
  std::printf("ground distance %.1f m  max radial distance %.1f m  wall %.2f s\n",
              r.ground_distance, r.max_radial_distance, r.wall_seconds);
  std::printf("%-10s %12s %12s %12s %12s\n", "variable", "mean", "std", "max", "final");
  for (std::size_t v = 0; v < kErrorVariableCount; ++v) {
    const auto& m = r.variables[v];
    std::printf("%-10s %12.5g %12.5g %12.5g %12.5g\n", kErrorVariables[v].name, m.metrics.mean,
                m.metrics.std, m.metrics.max, m.final_value);
  }
}

int cmd_run(const CommonArgs& a, int j) {
  const RunConfig cfg = resolve_config(a);
  RunOptions opt;
  opt.write_traces = cfg.write_traces;
  opt.truth_trace = cfg.truth_trace;
  const RunResult r = run_single(cfg, j, opt);
  print_run(r, cfg);
  return r.ok ? 0 : 3;
}

int cmd_mc(const CommonArgs& a) {
  const RunConfig cfg = resolve_config(a);
  const MonteCarloReport rep = run_monte_carlo(cfg, true);
  std::cout << format_report(rep);
  std::cout << "reports written to " << cfg.output_dir.string() << '\n';
  return rep.failed.empty() ? 0 : 3;
}

int cmd_seeds(const CommonArgs& a) {
  const RunConfig cfg = resolve_config(a);
  write_seed_table(std::cout, cfg.master, derive_seed_table(cfg.master, cfg.n_ex));
  return 0;
}

int cmd_metrics(const std::vector<std::string>& dirs) {
  std::vector<TrajectoryMetrics> per_seed[kErrorVariableCount];
  std::vector<double> finals[kErrorVariableCount];
  for (const auto& d : dirs) {
    const StoredRunMetrics m = metrics_from_traces(d);
    std::printf("%s  master_seed %llu  run %d  config_hash %s  epochs %zu\n", d.c_str(),
                static_cast<unsigned long long>(m.provenance.master_seed), m.provenance.run_index,
                m.provenance.config_hash.c_str(), m.epochs);
    for (std::size_t v = 0; v < kErrorVariableCount; ++v) {
      const auto& r = m.variables[v];
      std::printf("  %-10s mean %12.5g  std %12.5g  max %12.5g  final %12.5g\n",
                  kErrorVariables[v].name, r.metrics.mean, r.metrics.std, r.metrics.max,
                  r.final_value);
      per_seed[v].push_back(r.metrics);
      finals[v].push_back(r.final_value);
    }
  }
  if (dirs.size() > 1) {
    std::printf("\naggregated over %zu runs\n", dirs.size());
    std::printf("%-10s %11s %11s %11s %11s %11s %11s\n", "variable", "mu_mu", "sigma_mu",
                "mu_sigma", "mu_max", "mu_end", "sigma_end");
    for (std::size_t v = 0; v < kErrorVariableCount; ++v) {
      const auto a = aggregate(per_seed[v]);
      const auto f = aggregate_final_state(finals[v]);
      std::printf("%-10s %11.4g %11.4g %11.4g %11.4g %11.4g %11.4g\n", kErrorVariables[v].name,
                  a.of_mean.mean, a.of_mean.std, a.of_std.mean, a.of_max.mean, f.mean, f.std);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seeded fixed-wing flight simulation for GNSS-denied navigation testing"};
  app.require_subcommand(1);

  CommonArgs run_args, mc_args, seeds_args;
  int run_index = 1;
  auto* run = app.add_subcommand("run", "simulate one run and write its traces");
  add_common(run, run_args);
  run->add_option("-j,--run-index", run_index, "run index j (1-based)")->check(CLI::PositiveNumber);

  auto* mc = app.add_subcommand("mc", "Monte Carlo batch over runs 1..n_ex or the configured subset");
  add_common(mc, mc_args);

  auto* seeds = app.add_subcommand("seeds", "print the seed table for runs 1..n_ex");
  add_common(seeds, seeds_args);

  std::vector<std::string> metric_dirs;
  auto* metrics = app.add_subcommand("metrics", "recompute metrics from stored run traces");
  metrics->add_option("run_dirs", metric_dirs, "run directories holding estimated.txt and truth_nav.txt")
      ->required()
      ->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_args, run_index);
    if (*mc) return cmd_mc(mc_args);
    if (*seeds) return cmd_seeds(seeds_args);
    if (*metrics) return cmd_metrics(metric_dirs);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
