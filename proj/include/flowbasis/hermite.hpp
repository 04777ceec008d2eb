#pragma once

#include <span>
#include <vector>

namespace flowbasis {

// Number of retained basis functions; indices run 0..size-1.
class BasisSpec {
 public:
  explicit BasisSpec(int size);
  int size() const noexcept { return size_; }
  int max_index() const noexcept { return size_ - 1; }

 private:
  int size_;
};

// Orthonormal Hermite functions phi_0(x)..phi_{n_max}(x),
// phi_n(x) = (2^n n! sqrt(pi))^{-1/2} H_n(x) exp(-x^2/2).
//
// Evaluated with the normalized three-term recurrence seeded by
// pi^{-1/4} exp(-x^2/2), so the Gaussian factor is carried through every term
// and nothing overflows for moderate |x| and large n.
std::vector<double> hermite_functions(int n_max, double x);

// Same, writing into `out` (size n_max + 1).
void hermite_functions(double x, std::span<double> out);

// First derivatives phi_n'(x) for n = 0..n_max from the ladder identity
// phi_n' = sqrt(n/2) phi_{n-1} - sqrt((n+1)/2) phi_{n+1}.
std::vector<double> hermite_derivatives(int n_max, double x);

// Values and derivatives in one pass; both outputs have size n_max + 1.
void hermite_functions_and_derivatives(double x, std::span<double> values,
                                       std::span<double> derivatives);

}  // namespace flowbasis
