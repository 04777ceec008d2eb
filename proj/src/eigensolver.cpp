#include "flowbasis/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "flowbasis/errors.hpp"

namespace flowbasis {
namespace {

constexpr double kSymmetryTolerance = 1e-9;
constexpr int kMaxJacobiSweeps = 100;
constexpr int kMaxQlIterations = 60;

double residual_bound(const Matrix& m) { return 1e-9 * (1.0 + m.norm_inf()); }

// Reorders eigenpairs ascending. Stable, so ties keep their original order.
Spectrum sorted_spectrum(std::vector<double> values, const Matrix& vectors) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  Spectrum s;
  s.eigenvalues.resize(n);
  s.eigenvectors = Matrix(vectors.rows(), n);
  for (std::size_t k = 0; k < n; ++k) {
    s.eigenvalues[k] = values[order[k]];
    for (std::size_t i = 0; i < vectors.rows(); ++i) s.eigenvectors(i, k) = vectors(i, order[k]);
  }
  return s;
}

double off_diagonal_norm_sq(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return s;
}

}  // namespace

double Spectrum::max_residual(const Matrix& m) const {
  double worst = 0.0;
  for (std::size_t n = 0; n < eigenvalues.size(); ++n) {
    const auto c = eigenvectors.column(n);
    const auto mc = m * c;
    for (std::size_t i = 0; i < c.size(); ++i)
      worst = std::max(worst, std::abs(mc[i] - eigenvalues[n] * c[i]));
  }
  return worst;
}

Spectrum eigh(const Matrix& m) {
  if (!m.square()) throw ArgumentError("eigh: matrix is not square");
  const double asym = m.max_asymmetry();
  if (asym > kSymmetryTolerance)
    throw ArgumentError("eigh: matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
  const std::size_t n = m.rows();
  if (n == 0) return {};

  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
  Matrix v = Matrix::identity(n);

  double frob_sq = 0.0;
  for (double x : a.data()) frob_sq += x * x;
  const double eps = std::numeric_limits<double>::epsilon();
  const double target = eps * eps * frob_sq * 1e-4;

  // Cyclic Jacobi with the Rutishauser form of the rotation.
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    if (off_diagonal_norm_sq(a) <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          const double new_kp = akp - s * (akq + tau * akp);
          const double new_kq = akq + s * (akp - tau * akq);
          a(k, p) = a(p, k) = new_kp;
          a(k, q) = a(q, k) = new_kq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = vkp - s * (vkq + tau * vkp);
          v(k, q) = vkq + s * (vkp - tau * vkq);
        }
      }
    }
  }

  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
  Spectrum result = sorted_spectrum(std::move(values), v);

  const double residual = result.max_residual(m);
  if (!(residual <= residual_bound(m)))
    throw ConvergenceError("eigh: Jacobi iteration did not converge (residual " +
                           std::to_string(residual) + ")");
  return result;
}

Spectrum eigh_tridiagonal(std::span<const double> diag, std::span<const double> offdiag) {
  const std::size_t n = diag.size();
  if (n == 0) throw ArgumentError("eigh_tridiagonal: empty diagonal");
  if (offdiag.size() + 1 != n)
    throw ArgumentError("eigh_tridiagonal: offdiag must have diag.size() - 1 entries");

  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(n, 0.0);
  std::copy(offdiag.begin(), offdiag.end(), e.begin());
  Matrix z = Matrix::identity(n);
  const double eps = std::numeric_limits<double>::epsilon();

  for (std::size_t l = 0; l < n; ++l) {
    int iterations = 0;
    std::size_t m;
    do {
      // Find a negligible off-diagonal element to split at.
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (++iterations > kMaxQlIterations)
        throw ConvergenceError("eigh_tridiagonal: no convergence for eigenvalue " +
                               std::to_string(l) + " (|e| = " + std::to_string(std::abs(e[l])) +
                               ")");

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        for (std::size_t k = 0; k < n; ++k) {
          f = z(k, i + 1);
          z(k, i + 1) = s * z(k, i) + c * f;
          z(k, i) = c * z(k, i) - s * f;
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }

  return sorted_spectrum(std::move(d), z);
}

}  // namespace flowbasis
