#include "flowbasis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "flowbasis/errors.hpp"

namespace flowbasis {
namespace {

constexpr const char* kSpectraTag = "# flowbasis spectra v1";
constexpr const char* kSpectraHeader = "scheme,N,n,E";

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << std::setprecision(17);
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

template <class V>
V parse_number(const std::string& text, const std::string& where) {
  std::istringstream in(text);
  V v{};
  in >> v;
  if (!in || in.peek() != std::char_traits<char>::eof())
    throw ArgumentError(where + ": bad number '" + text + "'");
  return v;
}

}  // namespace

std::string StateWindow::label() const {
  return std::to_string(first) + ".." + std::to_string(last);
}

std::vector<double> band_sums(std::span<const double> eigenvalues, int band_size) {
  if (band_size < 1) throw ArgumentError("band_sums: band_size must be >= 1");
  const auto b = static_cast<std::size_t>(band_size);
  std::vector<double> sums;
  for (std::size_t start = 0; start + b <= eigenvalues.size(); start += b) {
    double s = 0.0;
    for (std::size_t k = start; k < start + b; ++k) s += eigenvalues[k];
    sums.push_back(s);
  }
  return sums;
}

double window_sum(std::span<const double> eigenvalues, const StateWindow& window) {
  if (window.first < 0 || window.last < window.first)
    throw ArgumentError("window_sum: invalid window " + window.label());
  if (static_cast<std::size_t>(window.last) >= eigenvalues.size())
    throw ArgumentError("window_sum: window " + window.label() + " needs more than " +
                        std::to_string(eigenvalues.size()) + " eigenvalues");
  double s = 0.0;
  for (int n = window.first; n <= window.last; ++n) s += eigenvalues[static_cast<std::size_t>(n)];
  return s;
}

std::vector<std::optional<double>> q_sequence(std::span<const double> x, double x_star) {
  std::vector<std::optional<double>> e(x.size());
  for (std::size_t k = 1; k < x.size(); ++k) {
    const double denom = std::abs(x[k - 1] - x_star);
    if (denom < kRateDenominatorFloor) continue;
    e[k] = std::abs(x[k] - x_star) / denom;
  }
  return e;
}

LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ArgumentError("linear_fit: x and y sizes differ");
  if (xs.size() < 2) throw ArgumentError("linear_fit: need at least 2 points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw ArgumentError("linear_fit: all x values coincide");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = xs.size();
  return fit;
}

ReferenceEnergies reference_energies(Scheme scheme, const Potential& v, int n_ref,
                                     TrainingConfig config) {
  config.basis_size = n_ref;
  const auto result = solve(scheme, config, v);
  return {scheme, n_ref, result.spectrum.eigenvalues};
}

const ReferenceEnergies& ConvergenceReport::reference(Scheme scheme) const {
  for (const auto& r : references)
    if (r.scheme == scheme) return r;
  throw ArgumentError("report has no reference for scheme " + std::string(to_string(scheme)));
}

std::optional<FitEntry> ConvergenceReport::fit(Scheme scheme) const {
  for (const auto& f : fits)
    if (f.scheme == scheme) return f;
  return std::nullopt;
}

std::vector<BandError> ConvergenceReport::band_errors(Scheme scheme, int band) const {
  std::vector<BandError> out;
  for (const auto& b : bands)
    if (b.scheme == scheme && b.band == band) out.push_back(b);
  return out;
}

ConvergenceReport analyze(const SpectraTable& spectra, const AnalysisOptions& options) {
  if (options.band_size < 1) throw ArgumentError("analyze: band_size must be >= 1");
  ConvergenceReport report;
  report.options = options;

  for (const auto& [scheme, by_n] : spectra) {
    const auto ref_it = by_n.find(options.n_ref);
    if (ref_it == by_n.end())
      throw ArgumentError("analyze: no " + std::string(to_string(scheme)) +
                          " spectrum at reference size N = " + std::to_string(options.n_ref));
    const auto& ref = ref_it->second;
    report.references.push_back({scheme, options.n_ref, ref});

    // Band errors.
    const auto band = static_cast<std::size_t>(options.band_size);
    for (const auto& [n, values] : by_n) {
      for (std::size_t b = 0; (b + 1) * band <= std::min(values.size(), ref.size()); ++b) {
        BandError e;
        e.scheme = scheme;
        e.basis_size = n;
        e.band = static_cast<int>(b);
        e.first_state = static_cast<int>(b * band);
        e.last_state = static_cast<int>((b + 1) * band - 1);
        double abs_err = 0.0, rel_err = 0.0;
        for (std::size_t k = b * band; k < (b + 1) * band; ++k) {
          e.band_sum += values[k];
          e.reference_sum += ref[k];
          const double d = std::abs(values[k] - ref[k]);
          abs_err += d;
          rel_err += d / std::abs(ref[k]);
        }
        e.avg_abs_error = abs_err / static_cast<double>(band);
        e.avg_rel_error = rel_err / static_cast<double>(band);
        report.bands.push_back(e);
      }
    }

    // Q-convergence of the window sum.
    const double x_star = window_sum(ref, options.window);
    std::vector<int> sizes;
    std::vector<double> sums;
    for (const auto& [n, values] : by_n) {
      if (static_cast<std::size_t>(options.window.last) >= values.size()) continue;
      sizes.push_back(n);
      sums.push_back(window_sum(values, options.window));
    }
    const auto e = q_sequence(sums, x_star);
    std::vector<double> fit_x, fit_y;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      RateEntry r{scheme, sizes[k], sums[k], std::nullopt};
      // Only consecutive basis sizes form a ratio.
      if (k > 0 && sizes[k - 1] + 1 == sizes[k]) r.rate = e[k];
      if (r.rate && sizes[k] >= options.fit_min_n && sizes[k] <= options.n_ref) {
        fit_x.push_back(sizes[k]);
        fit_y.push_back(*r.rate);
      }
      report.rates.push_back(r);
    }
    if (fit_x.size() >= 2) {
      FitEntry f;
      f.scheme = scheme;
      f.window = options.window;
      f.min_n = static_cast<int>(fit_x.front());
      f.max_n = static_cast<int>(fit_x.back());
      f.fit = linear_fit(fit_x, fit_y);
      report.fits.push_back(f);
    }
  }
  return report;
}

void write_spectra_header(std::ostream& out) {
  out << kSpectraTag << '\n' << kSpectraHeader << '\n';
}

void write_spectra_rows(std::ostream& out, Scheme scheme, int basis_size,
                        std::span<const double> eigenvalues) {
  const auto old = out.precision(17);
  for (std::size_t n = 0; n < eigenvalues.size(); ++n)
    out << to_string(scheme) << ',' << basis_size << ',' << n << ',' << eigenvalues[n] << '\n';
  out.precision(old);
}

void read_spectra_csv(std::istream& in, SpectraTable& table, const std::string& source) {
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  // Collected as (scheme, N) -> n -> E, then checked for completeness.
  std::map<std::pair<Scheme, int>, std::map<int, double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string where = source + ":" + std::to_string(line_no);
    if (!header_seen) {
      if (line != kSpectraHeader)
        throw ArgumentError(where + ": expected header '" + kSpectraHeader + "'");
      header_seen = true;
      continue;
    }
    const auto parts = split(line, ',');
    if (parts.size() != 4) throw ArgumentError(where + ": expected 4 columns");
    const Scheme scheme = parse_scheme(parts[0]);
    const int n_basis = parse_number<int>(parts[1], where);
    const int n = parse_number<int>(parts[2], where);
    const double e = parse_number<double>(parts[3], where);
    if (n < 0 || n >= n_basis) throw ArgumentError(where + ": state index out of range");
    auto [it, inserted] = rows[{scheme, n_basis}].emplace(n, e);
    if (!inserted && it->second != e)
      throw ArgumentError(where + ": conflicting value for " + parts[0] + " N=" + parts[1] +
                          " n=" + parts[2]);
  }
  if (!header_seen) throw ArgumentError(source + ": missing spectra header");

  for (const auto& [key, states] : rows) {
    const auto [scheme, n_basis] = key;
    if (static_cast<int>(states.size()) != n_basis)
      throw ArgumentError(source + ": incomplete spectrum for " + std::string(to_string(scheme)) +
                          " N=" + std::to_string(n_basis));
    std::vector<double> values;
    values.reserve(states.size());
    for (const auto& [n, e] : states) values.push_back(e);
    auto& slot = table[scheme][n_basis];
    if (!slot.empty() && slot != values)
      throw ArgumentError(source + ": spectrum for " + std::string(to_string(scheme)) +
                          " N=" + std::to_string(n_basis) + " disagrees with an earlier input");
    slot = std::move(values);
  }
}

void write_training_trace_csv(std::ostream& out, const TrainingTrace& trace) {
  const auto old = out.precision(17);
  out << "# flowbasis training-trace v1\n";
  out << "iteration,loss,grad_norm,wall_ms\n";
  for (std::size_t t = 0; t < trace.size(); ++t)
    out << t << ',' << trace.loss[t] << ',' << trace.grad_norm[t] << ',' << trace.wall_ms[t]
        << '\n';
  out.precision(old);
}

void write_report(const ConvergenceReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_output(dir / "references.csv");
    out << "# flowbasis references v1\nscheme,N_ref,n,E\n";
    for (const auto& r : report.references)
      for (std::size_t n = 0; n < r.energies.size(); ++n)
        out << to_string(r.scheme) << ',' << r.basis_size << ',' << n << ',' << r.energies[n]
            << '\n';
  }
  {
    auto out = open_output(dir / "bands.csv");
    out << "# flowbasis bands v1\n"
        << "scheme,N,band,first_state,last_state,band_sum,reference_sum,avg_abs_error,"
           "avg_rel_error\n";
    for (const auto& b : report.bands)
      out << to_string(b.scheme) << ',' << b.basis_size << ',' << b.band << ',' << b.first_state
          << ',' << b.last_state << ',' << b.band_sum << ',' << b.reference_sum << ','
          << b.avg_abs_error << ',' << b.avg_rel_error << '\n';
  }
  {
    auto out = open_output(dir / "rates.csv");
    out << "# flowbasis rates v1 window=" << report.options.window.label() << "\n"
        << "scheme,N,x_N,e_N\n";
    for (const auto& r : report.rates) {
      out << to_string(r.scheme) << ',' << r.basis_size << ',' << r.window_sum << ',';
      if (r.rate)
        out << *r.rate;
      else
        out << "undefined";
      out << '\n';
    }
  }
  {
    auto out = open_output(dir / "fits.csv");
    out << "# flowbasis fits v1\nscheme,window,min_N,max_N,points,slope,intercept\n";
    for (const auto& f : report.fits)
      out << to_string(f.scheme) << ',' << f.window.label() << ',' << f.min_n << ',' << f.max_n
          << ',' << f.fit.points << ',' << f.fit.slope << ',' << f.fit.intercept << '\n';
  }
}

}  // namespace flowbasis
