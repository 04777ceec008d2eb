// flowbasis: solve, sweep and analyze Hermite / flow-augmented Hermite
// Galerkin discretizations of 1D Schrodinger operators.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flowbasis/errors.hpp"
#include "flowbasis/experiment.hpp"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_interrupt(int) { g_stop.store(true); }

struct RunOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> scheme;
  std::optional<std::string> n;
  std::optional<std::string> potential;
  std::optional<std::string> iterations;
  std::optional<std::string> seed;
  std::optional<std::string> output_dir;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "Experiment config file (key = value lines)");
  cmd->add_option("--set", o.overrides, "Override a config key, key=value (repeatable)");
  cmd->add_option("--scheme", o.scheme, "hermite | augmented | both");
  cmd->add_option("-n,--n", o.n, "Basis size N, or a range a..b for sweep");
  cmd->add_option("--potential", o.potential, "harmonic | anharmonic | poly:c0,c1,...");
  cmd->add_option("--iterations", o.iterations, "Adam iterations, or auto");
  cmd->add_option("--seed", o.seed, "Master random seed");
  cmd->add_option("-o,--output-dir", o.output_dir, "Output directory");
}

flowbasis::ExperimentConfig build_config(const RunOptions& o) {
  auto config = o.config_path.empty() ? flowbasis::ExperimentConfig{}
                                      : flowbasis::load_config(o.config_path);
  for (const auto& kv : o.overrides) flowbasis::apply_override(config, kv);
  auto set = [&config](const char* key, const std::optional<std::string>& v) {
    if (v) flowbasis::apply_override(config, key, *v);
  };
  set("scheme", o.scheme);
  set("n", o.n);
  set("potential", o.potential);
  set("iterations", o.iterations);
  set("seed", o.seed);
  set("output_dir", o.output_dir);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hermite and flow-augmented Hermite spectral solver for 1D Schrodinger problems"};
  app.require_subcommand(1);

  RunOptions solve_opts;
  auto* solve = app.add_subcommand("solve", "Assemble, train (augmented) and diagonalize one N");
  add_run_options(solve, solve_opts);

  RunOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "Run solve over a range of N into one spectra file");
  add_run_options(sweep, sweep_opts);

  std::vector<std::string> inputs;
  flowbasis::AnalysisOptions analysis;
  std::string window = "5..10";
  std::string analyze_out = "analysis";
  auto* analyze = app.add_subcommand("analyze", "Band errors, Q-convergence rates and fits");
  analyze->add_option("inputs", inputs, "Spectra CSV files from sweep")->required();
  analyze->add_option("--n-ref", analysis.n_ref, "Reference basis size")->capture_default_str();
  analyze->add_option("--band-size", analysis.band_size, "States per band")->capture_default_str();
  analyze->add_option("--window", window, "State window a..b for e_N")->capture_default_str();
  analyze->add_option("--fit-min-n", analysis.fit_min_n, "Smallest N in the e_N fit")
      ->capture_default_str();
  analyze->add_option("-o,--output-dir", analyze_out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : flowbasis::kExitConfigError;
  }

  try {
    if (*solve) return flowbasis::cmd_solve(build_config(solve_opts), std::cout, std::cerr);
    if (*sweep) {
      const auto config = build_config(sweep_opts);
      std::signal(SIGINT, on_interrupt);
      std::signal(SIGTERM, on_interrupt);
      return flowbasis::cmd_sweep(config, std::cout, std::cerr, &g_stop);
    }
    if (*analyze) {
      flowbasis::ExperimentConfig tmp;
      flowbasis::apply_override(tmp, "window", window);
      analysis.window = tmp.analysis.window;
      std::vector<std::filesystem::path> paths(inputs.begin(), inputs.end());
      return flowbasis::cmd_analyze(paths, analysis,
                                    flowbasis::resolve_output_dir(analyze_out), std::cout,
                                    std::cerr);
    }
  } catch (const flowbasis::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return flowbasis::kExitConfigError;
  } catch (const flowbasis::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return flowbasis::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return flowbasis::kExitFailure;
  }
  return flowbasis::kExitOk;
}
