#include "flowbasis/potential.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "flowbasis/errors.hpp"

namespace flowbasis {

Potential::Potential(std::vector<double> coefficients, std::string descriptor)
    : coefficients_(std::move(coefficients)), descriptor_(std::move(descriptor)) {
  if (coefficients_.empty()) throw ArgumentError("potential: no coefficients");
  for (double c : coefficients_)
    if (!std::isfinite(c)) throw ArgumentError("potential: non-finite coefficient");
}

Potential Potential::harmonic() { return Potential({0.0, 0.0, 0.5}, "harmonic: 0.5*x^2"); }

Potential Potential::anharmonic() {
  return Potential({0.0, 0.0, 0.5, 0.0, 0.25}, "anharmonic: 0.5*x^2 + 0.25*x^4");
}

Potential Potential::parse(std::string_view descriptor) {
  if (descriptor == "harmonic") return harmonic();
  if (descriptor == "anharmonic") return anharmonic();
  constexpr std::string_view prefix = "poly:";
  if (descriptor.substr(0, prefix.size()) != prefix)
    throw ArgumentError("potential: unknown descriptor '" + std::string(descriptor) + "'");
  std::vector<double> coeffs;
  std::string body(descriptor.substr(prefix.size()));
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      coeffs.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ArgumentError("potential: bad coefficient '" + item + "'");
    }
  }
  return Potential(std::move(coeffs), std::string(descriptor));
}

}  // namespace flowbasis
