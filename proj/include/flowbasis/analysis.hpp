#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowbasis/galerkin.hpp"
#include "flowbasis/potential.hpp"
#include "flowbasis/trainer.hpp"

namespace flowbasis {

// Eigenvalues per scheme and basis size: spectra[scheme][N] = E_0..E_{N-1}.
using SpectraTable = std::map<Scheme, std::map<int, std::vector<double>>>;

// Inclusive range of state indices.
struct StateWindow {
  int first = 5;
  int last = 10;

  int count() const noexcept { return last - first + 1; }
  std::string label() const;
};

// Sums of consecutive blocks of `band_size` eigenvalues; an incomplete
// trailing block is dropped.
std::vector<double> band_sums(std::span<const double> eigenvalues, int band_size);

// sum_{n=first}^{last} E_n. Throws ArgumentError if the window is not covered.
double window_sum(std::span<const double> eigenvalues, const StateWindow& window);

// Entries whose denominator |x_{N-1} - x*| falls below this are undefined.
inline constexpr double kRateDenominatorFloor = 1e-14;

// e_N = |x_N - x*| / |x_{N-1} - x*| for consecutive entries of `x`. The first
// entry has no predecessor and is undefined, as is any entry with a
// vanishing denominator.
std::vector<std::optional<double>> q_sequence(std::span<const double> x, double x_star);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;

  double at(double x) const noexcept { return slope * x + intercept; }
};

// Ordinary least squares y = slope * x + intercept. Needs >= 2 points with
// distinct x.
LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys);

struct ReferenceEnergies {
  Scheme scheme = Scheme::hermite;
  int basis_size = 0;
  std::vector<double> energies;
};

// Eigenvalues of `scheme` at basis size n_ref (after full training for the
// augmented scheme). `config` supplies everything except the basis size.
ReferenceEnergies reference_energies(Scheme scheme, const Potential& v, int n_ref,
                                     TrainingConfig config);

struct AnalysisOptions {
  int n_ref = 29;
  int band_size = 5;
  StateWindow window{5, 10};
  // Smallest N entering the linear fit of e_N.
  int fit_min_n = 10;
};

struct BandError {
  Scheme scheme = Scheme::hermite;
  int basis_size = 0;
  int band = 0;
  int first_state = 0;
  int last_state = 0;
  double band_sum = 0.0;
  double reference_sum = 0.0;
  double avg_abs_error = 0.0;  // mean_n |E_n - E*_n|
  double avg_rel_error = 0.0;  // mean_n |E_n - E*_n| / |E*_n|
};

struct RateEntry {
  Scheme scheme = Scheme::hermite;
  int basis_size = 0;
  double window_sum = 0.0;
  std::optional<double> rate;
};

struct FitEntry {
  Scheme scheme = Scheme::hermite;
  StateWindow window;
  int min_n = 0;
  int max_n = 0;
  LinearFit fit;
};

struct ConvergenceReport {
  AnalysisOptions options;
  std::vector<ReferenceEnergies> references;
  std::vector<BandError> bands;
  std::vector<RateEntry> rates;
  std::vector<FitEntry> fits;

  const ReferenceEnergies& reference(Scheme scheme) const;
  std::optional<FitEntry> fit(Scheme scheme) const;
  // Band errors of one scheme and band, ordered by N.
  std::vector<BandError> band_errors(Scheme scheme, int band) const;
};

// Builds the report from sweep spectra. Each scheme is measured against its
// own spectrum at options.n_ref, never the other scheme's. The e_N fit uses
// every defined rate with N in [fit_min_n, n_ref]; e at n_ref is zero by
// construction and is included.
// Throws ArgumentError if a scheme lacks its n_ref spectrum.
ConvergenceReport analyze(const SpectraTable& spectra, const AnalysisOptions& options);

// ---------------------------------------------------------------------------
// CSV files. Each starts with a versioned comment line, then a header.

void write_spectra_header(std::ostream& out);
void write_spectra_rows(std::ostream& out, Scheme scheme, int basis_size,
                        std::span<const double> eigenvalues);
// Reads one or more spectra streams into `table`. Throws ArgumentError on a
// malformed file or on conflicting values for the same (scheme, N, n).
void read_spectra_csv(std::istream& in, SpectraTable& table, const std::string& source = "<stream>");

void write_training_trace_csv(std::ostream& out, const TrainingTrace& trace);

// bands.csv, rates.csv, fits.csv, references.csv under `dir`.
void write_report(const ConvergenceReport& report, const std::filesystem::path& dir);

}  // namespace flowbasis
