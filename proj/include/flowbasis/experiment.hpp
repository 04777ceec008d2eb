#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flowbasis/analysis.hpp"
#include "flowbasis/galerkin.hpp"
#include "flowbasis/trainer.hpp"

namespace flowbasis {

// Environment variable prefixed to relative output directories.
inline constexpr const char* kOutputRootVariable = "FLOWBASIS_OUTPUT_ROOT";

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfigError = 2;

// Flat key = value document; '#' starts a comment. Keys:
//   potential         harmonic | anharmonic | poly:c0,c1,...
//   scheme            hermite | augmented | both
//   n                 N or a range "a..b"
//   quadrature_order, hidden, blocks, learning_rate, lipschitz_margin
//   iterations        integer or "auto" (500 for N <= 9, else 2000)
//   seed              master seed; basis size N trains with seed + N
//   output_dir
//   n_ref, band_size, window ("a..b"), fit_min_n   (analysis)
// Unknown or repeated keys are errors.
struct ExperimentConfig {
  std::string potential = "anharmonic";
  std::vector<Scheme> schemes{Scheme::hermite};
  int n_min = 5;
  int n_max = 5;
  TrainingConfig training;  // basis_size, iterations and seed are set per run
  std::optional<int> iterations;
  std::uint64_t seed = 0;
  std::string output_dir = "results";
  AnalysisOptions analysis;

  // TrainingConfig for basis size n: seed + n, iterations or the default.
  TrainingConfig training_for(int n) const;
  Potential make_potential() const;
  // Throws ConfigError on any inconsistent field.
  void validate() const;
};

std::vector<std::string> config_keys();

// Throws ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
void apply_override(ExperimentConfig& config, std::string_view key, std::string_view value);
// "key=value"
void apply_override(ExperimentConfig& config, std::string_view assignment);

// output_dir, prefixed by $FLOWBASIS_OUTPUT_ROOT when relative and set.
std::filesystem::path resolve_output_dir(const std::string& output_dir);

// Solves a single N (n_min == n_max) for each configured scheme. Writes
// spectrum_<scheme>_N<N>.csv and, for the augmented scheme,
// checkpoint_N<N>.txt and trace_N<N>.csv. Returns an exit code.
int cmd_solve(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

// Runs every N in [n_min, n_max] and scheme, appending to spectra.csv and
// manifest.txt after each entry. If `stop` becomes true the current entry
// finishes and the rest are recorded as interrupted.
int cmd_sweep(const ExperimentConfig& config, std::ostream& out, std::ostream& err,
              const std::atomic<bool>* stop = nullptr);

// Reads spectra CSVs and writes bands.csv, rates.csv, fits.csv and
// references.csv to `output_dir`.
int cmd_analyze(const std::vector<std::filesystem::path>& inputs, const AnalysisOptions& options,
                const std::filesystem::path& output_dir, std::ostream& out, std::ostream& err);

}  // namespace flowbasis
