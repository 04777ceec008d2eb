#pragma once

#include <span>
#include <vector>

#include "flowbasis/matrix.hpp"

namespace flowbasis {

// Ascending eigenvalues; column n of `eigenvectors` belongs to eigenvalues[n].
struct Spectrum {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;

  std::size_t size() const noexcept { return eigenvalues.size(); }
  // max_n ||M c_n - e_n c_n||_inf
  double max_residual(const Matrix& m) const;
};

// Dense symmetric eigendecomposition (cyclic Jacobi). Requires |M - M^T| <= 1e-9.
Spectrum eigh(const Matrix& m);

// Symmetric tridiagonal eigendecomposition by implicit QL with Wilkinson
// shifts. `offdiag` has diag.size() - 1 entries. Row 0 of the eigenvector
// matrix holds the first components used by Golub-Welsch.
Spectrum eigh_tridiagonal(std::span<const double> diag, std::span<const double> offdiag);

}  // namespace flowbasis
