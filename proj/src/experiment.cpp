#include "flowbasis/experiment.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "flowbasis/errors.hpp"

namespace flowbasis {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <class V>
V parse_value(std::string_view key, std::string_view text) {
  std::istringstream in{std::string(text)};
  V v{};
  in >> v;
  if (!in || in.peek() != std::char_traits<char>::eof())
    throw ConfigError("config: bad value for '" + std::string(key) + "': '" + std::string(text) +
                      "'");
  return v;
}

std::pair<int, int> parse_range(std::string_view key, std::string_view text) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    const int v = parse_value<int>(key, text);
    return {v, v};
  }
  return {parse_value<int>(key, trim(text.substr(0, dots))),
          parse_value<int>(key, trim(text.substr(dots + 2)))};
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << std::setprecision(17);
  return out;
}

void print_summary(std::ostream& out, const SolveResult& r) {
  const auto old = out.precision(10);
  out << to_string(r.scheme) << " N=" << r.basis_size << " Q=" << r.quadrature_order
      << " trace=" << r.hamiltonian.trace() << " E=[";
  const std::size_t shown = std::min<std::size_t>(5, r.spectrum.size());
  for (std::size_t n = 0; n < shown; ++n) out << (n ? ", " : "") << r.spectrum.eigenvalues[n];
  out << (r.spectrum.size() > shown ? ", ...]" : "]") << '\n';
  out.precision(old);
}

void write_training_outputs(const std::filesystem::path& dir, int n, std::uint64_t seed,
                            const TrainingResult& training) {
  save_checkpoint((dir / ("checkpoint_N" + std::to_string(n) + ".txt")).string(),
                  Checkpoint{training.params, seed});
  auto trace = open_output(dir / ("trace_N" + std::to_string(n) + ".csv"));
  write_training_trace_csv(trace, training.trace);
}

}  // namespace

TrainingConfig ExperimentConfig::training_for(int n) const {
  TrainingConfig c = training;
  c.basis_size = n;
  c.iterations = iterations.value_or(TrainingConfig::default_iterations(n));
  c.seed = seed + static_cast<std::uint64_t>(n);
  return c;
}

Potential ExperimentConfig::make_potential() const {
  try {
    return Potential::parse(potential);
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

void ExperimentConfig::validate() const {
  if (schemes.empty()) throw ConfigError("config: no scheme selected");
  if (n_min < 1 || n_max < n_min) throw ConfigError("config: invalid basis size range");
  if (output_dir.empty()) throw ConfigError("config: output_dir is empty");
  if (iterations && *iterations < 0) throw ConfigError("config: iterations must be >= 0");
  make_potential();
  try {
    training_for(n_max).validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (analysis.band_size < 1) throw ConfigError("config: band_size must be >= 1");
  if (analysis.window.first < 0 || analysis.window.last < analysis.window.first)
    throw ConfigError("config: invalid window");
  if (analysis.n_ref < 1) throw ConfigError("config: n_ref must be >= 1");
}

std::vector<std::string> config_keys() {
  return {"potential",  "scheme",     "n",    "quadrature_order", "hidden",
          "blocks",     "learning_rate", "iterations", "seed",    "lipschitz_margin",
          "output_dir", "n_ref",      "band_size", "window",     "fit_min_n"};
}

void apply_override(ExperimentConfig& c, std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  if (key == "potential") {
    c.potential = value;
  } else if (key == "scheme") {
    if (value == "both") {
      c.schemes = {Scheme::hermite, Scheme::augmented};
    } else if (value == "hermite" || value == "augmented") {
      c.schemes = {parse_scheme(value)};
    } else {
      throw ConfigError("config: scheme must be hermite, augmented or both");
    }
  } else if (key == "n") {
    std::tie(c.n_min, c.n_max) = parse_range(key, value);
  } else if (key == "quadrature_order") {
    c.training.quadrature_order = parse_value<int>(key, value);
  } else if (key == "hidden") {
    c.training.hidden = parse_value<int>(key, value);
  } else if (key == "blocks") {
    c.training.blocks = parse_value<int>(key, value);
  } else if (key == "learning_rate") {
    c.training.learning_rate = parse_value<double>(key, value);
  } else if (key == "iterations") {
    if (value == "auto")
      c.iterations.reset();
    else
      c.iterations = parse_value<int>(key, value);
  } else if (key == "seed") {
    c.seed = parse_value<std::uint64_t>(key, value);
  } else if (key == "lipschitz_margin") {
    c.training.lipschitz_margin = parse_value<double>(key, value);
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else if (key == "n_ref") {
    c.analysis.n_ref = parse_value<int>(key, value);
  } else if (key == "band_size") {
    c.analysis.band_size = parse_value<int>(key, value);
  } else if (key == "window") {
    const auto [a, b] = parse_range(key, value);
    c.analysis.window = {a, b};
  } else if (key == "fit_min_n") {
    c.analysis.fit_min_n = parse_value<int>(key, value);
  } else {
    throw ConfigError("config: unknown key '" + std::string(key) + "'");
  }
}

void apply_override(ExperimentConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("override must look like key=value: '" + std::string(assignment) + "'");
  apply_override(config, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (!seen.insert(key).second)
      throw ConfigError("config line " + std::to_string(line_no) + ": repeated key '" + key + "'");
    try {
      apply_override(config, key, std::string_view(line).substr(eq + 1));
    } catch (const ArgumentError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::filesystem::path resolve_output_dir(const std::string& output_dir) {
  std::filesystem::path p(output_dir);
  if (p.is_relative()) {
    if (const char* root = std::getenv(kOutputRootVariable); root && *root)
      return std::filesystem::path(root) / p;
  }
  return p;
}

int cmd_solve(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    if (config.n_min != config.n_max)
      throw ConfigError("solve takes a single basis size; use sweep for a range");
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  const int n = config.n_min;
  try {
    const auto dir = resolve_output_dir(config.output_dir);
    const auto potential = config.make_potential();
    std::vector<SolveResult> results;
    for (Scheme scheme : config.schemes) results.push_back(solve(scheme, config.training_for(n), potential));

    std::filesystem::create_directories(dir);
    for (const auto& r : results) {
      auto csv = open_output(dir / ("spectrum_" + std::string(to_string(r.scheme)) + "_N" +
                                    std::to_string(n) + ".csv"));
      write_spectra_header(csv);
      write_spectra_rows(csv, r.scheme, n, r.spectrum.eigenvalues);
      if (r.training) write_training_outputs(dir, n, config.training_for(n).seed, *r.training);
      print_summary(out, r);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& config, std::ostream& out, std::ostream& err,
              const std::atomic<bool>* stop) {
  try {
    config.validate();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  std::filesystem::path dir;
  std::ofstream spectra, manifest;
  try {
    dir = resolve_output_dir(config.output_dir);
    std::filesystem::create_directories(dir);
    spectra = open_output(dir / "spectra.csv");
    manifest = open_output(dir / "manifest.txt");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  write_spectra_header(spectra);
  manifest << "# flowbasis sweep manifest v1\n"
           << "potential " << config.potential << '\n'
           << "n " << config.n_min << ".." << config.n_max << '\n'
           << "quadrature_order " << config.training.quadrature_order << '\n'
           << "seed " << config.seed << '\n';
  manifest.flush();

  const auto potential = config.make_potential();
  bool failed = false;
  bool interrupted = false;
  for (int n = config.n_min; n <= config.n_max; ++n) {
    for (Scheme scheme : config.schemes) {
      manifest << "entry N=" << n << " scheme=" << to_string(scheme) << " status=";
      if (interrupted || (stop && stop->load())) {
        interrupted = true;
        manifest << "interrupted\n";
        continue;
      }
      try {
        const auto tc = config.training_for(n);
        const auto r = solve(scheme, tc, potential);
        write_spectra_rows(spectra, scheme, n, r.spectrum.eigenvalues);
        spectra.flush();
        if (r.training) write_training_outputs(dir, n, tc.seed, *r.training);
        manifest << "ok\n";
        print_summary(out, r);
      } catch (const Error& e) {
        failed = true;
        manifest << "failed message=\"" << e.what() << "\"\n";
        err << "error: N=" << n << " " << to_string(scheme) << ": " << e.what() << '\n';
      }
      manifest.flush();
    }
  }
  if (!spectra || !manifest) {
    err << "error: failed writing sweep outputs under " << dir.string() << '\n';
    return kExitFailure;
  }
  return failed || interrupted ? kExitFailure : kExitOk;
}

int cmd_analyze(const std::vector<std::filesystem::path>& inputs, const AnalysisOptions& options,
                const std::filesystem::path& output_dir, std::ostream& out, std::ostream& err) {
  if (inputs.empty()) {
    err << "error: analyze needs at least one spectra file\n";
    return kExitConfigError;
  }
  ConvergenceReport report;
  try {
    SpectraTable table;
    for (const auto& path : inputs) {
      std::ifstream in(path);
      if (!in) throw ArgumentError("cannot read spectra file: " + path.string());
      read_spectra_csv(in, table, path.string());
    }
    report = analyze(table, options);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  try {
    write_report(report, output_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  const auto old = out.precision(6);
  for (const auto& f : report.fits)
    out << to_string(f.scheme) << " e_N fit over N=" << f.min_n << ".." << f.max_n << " (states "
        << f.window.label() << "): slope=" << f.fit.slope << " intercept=" << f.fit.intercept
        << '\n';
  out.precision(old);
  return kExitOk;
}

}  // namespace flowbasis
