#include "flowbasis/hermite.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "flowbasis/errors.hpp"

namespace flowbasis {
namespace {

void check_n_max(int n_max) {
  if (n_max < 0) throw ArgumentError("hermite: n_max must be >= 0, got " + std::to_string(n_max));
}

// pi^{-1/4}
const double kSeed = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));

}  // namespace

BasisSpec::BasisSpec(int size) : size_(size) {
  if (size < 1) throw ArgumentError("basis size must be >= 1, got " + std::to_string(size));
}

void hermite_functions(double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = kSeed * std::exp(-0.5 * x * x);
  if (out.size() == 1) return;
  out[1] = std::sqrt(2.0) * x * out[0];
  for (std::size_t n = 1; n + 1 < out.size(); ++n) {
    const double dn = static_cast<double>(n);
    out[n + 1] = x * std::sqrt(2.0 / (dn + 1.0)) * out[n] - std::sqrt(dn / (dn + 1.0)) * out[n - 1];
  }
}

std::vector<double> hermite_functions(int n_max, double x) {
  check_n_max(n_max);
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
  hermite_functions(x, out);
  return out;
}

void hermite_functions_and_derivatives(double x, std::span<double> values,
                                       std::span<double> derivatives) {
  if (values.size() != derivatives.size())
    throw ArgumentError("hermite: values and derivatives must have equal size");
  const std::size_t count = values.size();
  if (count == 0) return;
  // One extra function is needed for the top ladder term.
  std::vector<double> ext(count + 1);
  hermite_functions(x, ext);
  for (std::size_t n = 0; n < count; ++n) {
    const double dn = static_cast<double>(n);
    const double down = n > 0 ? std::sqrt(dn / 2.0) * ext[n - 1] : 0.0;
    derivatives[n] = down - std::sqrt((dn + 1.0) / 2.0) * ext[n + 1];
    values[n] = ext[n];
  }
}

std::vector<double> hermite_derivatives(int n_max, double x) {
  check_n_max(n_max);
  const auto count = static_cast<std::size_t>(n_max) + 1;
  std::vector<double> values(count), derivatives(count);
  hermite_functions_and_derivatives(x, values, derivatives);
  return derivatives;
}

}  // namespace flowbasis
