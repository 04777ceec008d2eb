#include "flowbasis/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowbasis/diagnostics.hpp"
#include "flowbasis/eigensolver.hpp"
#include "flowbasis/errors.hpp"
#include "flowbasis/hermite.hpp"

namespace flowbasis {

double QuadratureRule::max_abs_node() const {
  double m = 0.0;
  for (double x : nodes) m = std::max(m, std::abs(x));
  return m;
}

QuadratureRule gauss_hermite_rule(int order) {
  if (order < 1 || order > kMaxQuadratureOrder)
    throw ArgumentError("gauss_hermite_rule: order must be in [1, " +
                        std::to_string(kMaxQuadratureOrder) + "], got " + std::to_string(order));
  if (order > kTestedQuadratureOrder)
    warn("Gauss-Hermite order " + std::to_string(order) + " exceeds the tested range (<= " +
         std::to_string(kTestedQuadratureOrder) + "); node accuracy is not verified there");

  const auto q = static_cast<std::size_t>(order);
  std::vector<double> diag(q, 0.0);
  std::vector<double> offdiag(q - 1);
  for (std::size_t k = 1; k < q; ++k) offdiag[k - 1] = std::sqrt(static_cast<double>(k) / 2.0);

  QuadratureRule rule;
  rule.order = order;
  rule.nodes = eigh_tridiagonal(diag, offdiag).eigenvalues;

  // The Jacobi matrix has zero diagonal, so the spectrum is symmetric.
  for (std::size_t i = 0; i < q / 2; ++i) {
    const double m = 0.5 * (rule.nodes[q - 1 - i] - rule.nodes[i]);
    rule.nodes[i] = -m;
    rule.nodes[q - 1 - i] = m;
  }
  if (q % 2 == 1) rule.nodes[q / 2] = 0.0;

  rule.weights.resize(q);
  rule.lifted_weights.resize(q);
  std::vector<double> phi(q);
  for (std::size_t i = 0; i < q; ++i) {
    const double x = rule.nodes[i];
    hermite_functions(x, phi);
    double christoffel = 0.0;
    for (double p : phi) christoffel += p * p;
    rule.lifted_weights[i] = 1.0 / christoffel;
    rule.weights[i] = std::exp(-x * x - std::log(christoffel));
  }
  return rule;
}

double integrate_lifted(std::span<const double> values_at_nodes, const QuadratureRule& rule) {
  if (values_at_nodes.size() != rule.lifted_weights.size())
    throw ArgumentError("integrate_lifted: expected " + std::to_string(rule.lifted_weights.size()) +
                        " values, got " + std::to_string(values_at_nodes.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < values_at_nodes.size(); ++i)
    s += rule.lifted_weights[i] * values_at_nodes[i];
  return s;
}

}  // namespace flowbasis
