#pragma once

#include <string_view>
#include <vector>

#include "flowbasis/flow.hpp"
#include "flowbasis/hermite.hpp"
#include "flowbasis/jet.hpp"
#include "flowbasis/matrix.hpp"
#include "flowbasis/potential.hpp"
#include "flowbasis/quadrature.hpp"

namespace flowbasis {

enum class Scheme { hermite, augmented };

std::string_view to_string(Scheme scheme);
// Throws ArgumentError for anything but "hermite" / "augmented".
Scheme parse_scheme(std::string_view text);

// Symmetric N x N projected Hamiltonian.
struct HamiltonianMatrix {
  Scheme scheme = Scheme::hermite;
  Matrix entries;

  std::size_t size() const noexcept { return entries.rows(); }
  double trace() const { return entries.trace(); }
};

// Asymmetry above this before symmetrization signals an underresolved rule.
inline constexpr double kAssemblyAsymmetryTolerance = 1e-9;

// Matrix elements are integrals in the pulled-back variable y = G^{-1}(x):
//   V_ij = sum_q w~_q phi_i(y_q) V(G(y_q)) phi_j(y_q)
//   T_ij = 1/2 sum_q w~_q A_i(y_q) A_j(y_q) / G'(y_q)^2,
//   A_n  = phi_n' - phi_n G'' / (2 G').
// The kinetic form follows from integrating -1/2 d^2/dx^2 by parts and
// substituting x = G(y) with phi^A_n(G(y)) = phi_n(y) G'(y)^{-1/2}.
// Overloads without FlowParams are the plain Hermite scheme (G = id).

Matrix potential_matrix(const BasisSpec& spec, const QuadratureRule& rule, const Potential& v);
Matrix potential_matrix(const BasisSpec& spec, const QuadratureRule& rule, const Potential& v,
                        const FlowParams& flow);

Matrix kinetic_matrix(const BasisSpec& spec, const QuadratureRule& rule);
Matrix kinetic_matrix(const BasisSpec& spec, const QuadratureRule& rule, const FlowParams& flow);

HamiltonianMatrix assemble_hamiltonian(const BasisSpec& spec, const QuadratureRule& rule,
                                       const Potential& v);
HamiltonianMatrix assemble_hamiltonian(const BasisSpec& spec, const QuadratureRule& rule,
                                       const Potential& v, const FlowParams& flow);

struct OverlapReport {
  Matrix overlap;
  double max_deviation = 0.0;  // max |S - I|
};

// S_ij = sum_q w~_q phi_i(x_q) phi_j(x_q).
OverlapReport overlap_matrix(const BasisSpec& spec, const QuadratureRule& rule);
// The same overlap computed from the augmented functions themselves:
// sum_q w~_q phi^A_i(G(x_q)) phi^A_j(G(x_q)) G'(x_q), with phi^A evaluated
// through the flow inverse. Equals the plain overlap up to inversion error.
OverlapReport overlap_matrix(const BasisSpec& spec, const QuadratureRule& rule,
                             const FlowParams& flow);

// (G, G', G'') at every node of `rule`; throws if G' <= 0 anywhere.
std::vector<Jet2<double>> node_jets(const QuadratureRule& rule, const FlowParams& flow);

}  // namespace flowbasis
