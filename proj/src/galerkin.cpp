#include "flowbasis/galerkin.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>

#include "flowbasis/diagnostics.hpp"
#include "flowbasis/errors.hpp"

namespace flowbasis {
namespace {

// Hermite values and derivatives at every node, row q = node, column n.
struct NodeTable {
  Matrix values;
  Matrix derivatives;
};

NodeTable tabulate(const BasisSpec& spec, const QuadratureRule& rule) {
  const auto q = rule.nodes.size();
  const auto n = static_cast<std::size_t>(spec.size());
  NodeTable t{Matrix(q, n), Matrix(q, n)};
  for (std::size_t k = 0; k < q; ++k)
    hermite_functions_and_derivatives(rule.nodes[k], t.values.row(k), t.derivatives.row(k));
  return t;
}

void check_resolution(const BasisSpec& spec, const QuadratureRule& rule) {
  if (rule.order < 2 * spec.size() + 10)
    warn("quadrature order " + std::to_string(rule.order) + " is below 2N + 10 for N = " +
         std::to_string(spec.size()) + "; energies may fall below the variational limit");
}

std::string node_label(std::size_t k, double x) {
  std::ostringstream s;
  s << "node " << k << " (x = " << std::setprecision(17) << x << ")";
  return s.str();
}

// sum_q weight_q * a(q, i) * b(q, j)
Matrix weighted_gram(std::span<const double> weight, const Matrix& a, const Matrix& b) {
  const std::size_t n = a.cols();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t q = 0; q < weight.size(); ++q) s += weight[q] * a(q, i) * b(q, j);
      m(i, j) = s;
    }
  return m;
}

std::vector<double> potential_weights(const QuadratureRule& rule, const Potential& v,
                                      std::span<const Jet2<double>> jets) {
  std::vector<double> w(rule.nodes.size());
  for (std::size_t q = 0; q < w.size(); ++q) {
    const double vq = v(jets[q].value);
    if (!std::isfinite(vq))
      throw NumericError("potential is not finite at mapped " + node_label(q, rule.nodes[q]));
    w[q] = rule.lifted_weights[q] * vq;
  }
  return w;
}

Matrix potential_from_jets(const BasisSpec& spec, const QuadratureRule& rule, const Potential& v,
                           std::span<const Jet2<double>> jets) {
  const auto table = tabulate(spec, rule);
  return weighted_gram(potential_weights(rule, v, jets), table.values, table.values);
}

Matrix kinetic_from_jets(const BasisSpec& spec, const QuadratureRule& rule,
                         std::span<const Jet2<double>> jets) {
  auto table = tabulate(spec, rule);
  std::vector<double> w(rule.nodes.size());
  Matrix& a = table.derivatives;
  for (std::size_t q = 0; q < w.size(); ++q) {
    const double slope = jets[q].d1;
    if (!(slope > 0.0))
      throw AssemblyError("flow is not strictly increasing at " + node_label(q, rule.nodes[q]));
    const double r = jets[q].d2 / slope;
    w[q] = 0.5 * rule.lifted_weights[q] * (1.0 / (slope * slope));
    for (std::size_t n = 0; n < a.cols(); ++n) a(q, n) = a(q, n) - 0.5 * table.values(q, n) * r;
  }
  return weighted_gram(w, a, a);
}

Matrix plain_kinetic(const BasisSpec& spec, const QuadratureRule& rule) {
  const auto table = tabulate(spec, rule);
  std::vector<double> w(rule.nodes.size());
  for (std::size_t q = 0; q < w.size(); ++q) w[q] = 0.5 * rule.lifted_weights[q];
  return weighted_gram(w, table.derivatives, table.derivatives);
}

std::vector<Jet2<double>> identity_jets(const QuadratureRule& rule) {
  std::vector<Jet2<double>> jets;
  jets.reserve(rule.nodes.size());
  for (double x : rule.nodes) jets.push_back(Jet2<double>::variable(x));
  return jets;
}

HamiltonianMatrix finish(Scheme scheme, Matrix h) {
  const double asym = h.max_asymmetry();
  if (!(asym < kAssemblyAsymmetryTolerance))
    throw AssemblyError("Hamiltonian asymmetry " + std::to_string(asym) +
                        " exceeds tolerance; quadrature order is likely too low");
  const std::size_t n = h.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double m = 0.5 * (h(i, j) + h(j, i));
      h(i, j) = h(j, i) = m;
    }
  for (double v : h.data())
    if (!std::isfinite(v)) throw AssemblyError("Hamiltonian has non-finite entries");
  return {scheme, std::move(h)};
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::hermite ? "hermite" : "augmented";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "hermite") return Scheme::hermite;
  if (text == "augmented") return Scheme::augmented;
  throw ArgumentError("unknown scheme '" + std::string(text) + "'");
}

std::vector<Jet2<double>> node_jets(const QuadratureRule& rule, const FlowParams& flow) {
  validate(flow);
  std::vector<Jet2<double>> jets;
  jets.reserve(rule.nodes.size());
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const auto j = flow_jet(flow, rule.nodes[q]);
    if (!std::isfinite(j.value) || !std::isfinite(j.d1) || !std::isfinite(j.d2))
      throw NumericError("flow jet is not finite at " + node_label(q, rule.nodes[q]));
    if (!(j.d1 > 0.0))
      throw AssemblyError("flow is not strictly increasing at " + node_label(q, rule.nodes[q]));
    jets.push_back(j);
  }
  return jets;
}

Matrix potential_matrix(const BasisSpec& spec, const QuadratureRule& rule, const Potential& v) {
  check_resolution(spec, rule);
  return potential_from_jets(spec, rule, v, identity_jets(rule));
}

Matrix potential_matrix(const BasisSpec& spec, const QuadratureRule& rule, const Potential& v,
                        const FlowParams& flow) {
  check_resolution(spec, rule);
  return potential_from_jets(spec, rule, v, node_jets(rule, flow));
}

Matrix kinetic_matrix(const BasisSpec& spec, const QuadratureRule& rule) {
  check_resolution(spec, rule);
  return plain_kinetic(spec, rule);
}

Matrix kinetic_matrix(const BasisSpec& spec, const QuadratureRule& rule, const FlowParams& flow) {
  check_resolution(spec, rule);
  return kinetic_from_jets(spec, rule, node_jets(rule, flow));
}

HamiltonianMatrix assemble_hamiltonian(const BasisSpec& spec, const QuadratureRule& rule,
                                       const Potential& v) {
  check_resolution(spec, rule);
  return finish(Scheme::hermite,
                plain_kinetic(spec, rule) + potential_from_jets(spec, rule, v, identity_jets(rule)));
}

HamiltonianMatrix assemble_hamiltonian(const BasisSpec& spec, const QuadratureRule& rule,
                                       const Potential& v, const FlowParams& flow) {
  check_resolution(spec, rule);
  const auto jets = node_jets(rule, flow);
  return finish(Scheme::augmented,
                kinetic_from_jets(spec, rule, jets) + potential_from_jets(spec, rule, v, jets));
}

OverlapReport overlap_matrix(const BasisSpec& spec, const QuadratureRule& rule) {
  const auto table = tabulate(spec, rule);
  OverlapReport r;
  r.overlap = weighted_gram(rule.lifted_weights, table.values, table.values);
  r.max_deviation = (r.overlap - Matrix::identity(r.overlap.rows())).max_abs();
  return r;
}

OverlapReport overlap_matrix(const BasisSpec& spec, const QuadratureRule& rule,
                             const FlowParams& flow) {
  const auto jets = node_jets(rule, flow);
  const auto q = rule.nodes.size();
  const auto n = static_cast<std::size_t>(spec.size());
  Matrix aug(q, n);
  std::vector<double> w(q);
  for (std::size_t k = 0; k < q; ++k) {
    const auto phi = evaluate_augmented_basis(flow, spec.max_index(), jets[k].value);
    for (std::size_t i = 0; i < n; ++i) aug(k, i) = phi[i];
    w[k] = rule.lifted_weights[k] * jets[k].d1;
  }
  OverlapReport r;
  r.overlap = weighted_gram(w, aug, aug);
  r.max_deviation = (r.overlap - Matrix::identity(n)).max_abs();
  return r;
}

}  // namespace flowbasis
