#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flowbasis {

// Polynomial potential V(x) = sum_k c_k x^k. Evaluation is templated so the
// same potential runs on doubles, jets and taped variables.
class Potential {
 public:
  Potential(std::vector<double> coefficients, std::string descriptor);

  // 0.5 x^2
  static Potential harmonic();
  // 0.5 x^2 + 0.25 x^4
  static Potential anharmonic();
  // "harmonic", "anharmonic", or "poly:c0,c1,c2,..." (ascending powers).
  static Potential parse(std::string_view descriptor);

  template <class T>
  T operator()(const T& x) const {
    T acc = T(coefficients_.back());
    for (std::size_t k = coefficients_.size() - 1; k-- > 0;) acc = acc * x + T(coefficients_[k]);
    return acc;
  }

  std::span<const double> coefficients() const noexcept { return coefficients_; }
  const std::string& descriptor() const noexcept { return descriptor_; }

 private:
  std::vector<double> coefficients_;
  std::string descriptor_;
};

}  // namespace flowbasis
