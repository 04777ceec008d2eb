#pragma once

#include <span>
#include <vector>

namespace flowbasis {

inline constexpr int kMaxQuadratureOrder = 200;
// Orders above this are allowed but flagged: node accuracy has only been
// exercised up to here.
inline constexpr int kTestedQuadratureOrder = 100;

// Gauss-Hermite rule for the weight exp(-x^2).
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;           // ascending, symmetric about 0
  std::vector<double> weights;         // w_q, sum = sqrt(pi)
  std::vector<double> lifted_weights;  // w_q * exp(x_q^2)

  double max_abs_node() const;
};

// Nodes from the Golub-Welsch eigenproblem of the Jacobi matrix with
// off-diagonals sqrt(k/2). Weights are formed in log space through the
// Christoffel function, ln w_q = -x_q^2 - ln sum_k phi_k(x_q)^2, which keeps
// full relative accuracy in the far tails where w_q ~ 1e-70.
//
// Throws ArgumentError unless 1 <= order <= kMaxQuadratureOrder.
QuadratureRule gauss_hermite_rule(int order);

// sum_q lifted_weight_q * values_q, i.e. the integral over R of an integrand
// that already carries its own Gaussian decay.
double integrate_lifted(std::span<const double> values_at_nodes, const QuadratureRule& rule);

}  // namespace flowbasis
