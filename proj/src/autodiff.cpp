#include "flowbasis/autodiff.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "flowbasis/errors.hpp"
#include "flowbasis/gradient.hpp"

namespace flowbasis {

Var Tape::variable(double value) {
  if (nodes_.size() >= static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()))
    throw NumericError("tape: node count exceeds index range");
  return Var(this, push(-1, 0.0, -1, 0.0), value);
}

std::vector<double> Tape::adjoints(const Var& output) const {
  std::vector<double> adj(nodes_.size(), 0.0);
  if (output.is_constant()) return adj;
  if (output.tape() != this) throw ArgumentError("tape: output was recorded on a different tape");
  adj[static_cast<std::size_t>(output.index())] = 1.0;
  for (std::size_t k = static_cast<std::size_t>(output.index()) + 1; k-- > 0;) {
    const double a = adj[k];
    if (a == 0.0) continue;
    if (!std::isfinite(a))
      throw NumericError("tape: non-finite adjoint at node " + std::to_string(k));
    const Node& node = nodes_[k];
    if (node.lhs >= 0) adj[static_cast<std::size_t>(node.lhs)] += node.d_lhs * a;
    if (node.rhs >= 0) adj[static_cast<std::size_t>(node.rhs)] += node.d_rhs * a;
  }
  return adj;
}

Var exp(const Var& x) {
  const double e = std::exp(x.value());
  return Var::unary(x, e, e);
}

Var log(const Var& x) { return Var::unary(x, std::log(x.value()), 1.0 / x.value()); }

Var sqrt(const Var& x) {
  const double r = std::sqrt(x.value());
  return Var::unary(x, r, 0.5 / r);
}

Var tanh(const Var& x) {
  const double t = std::tanh(x.value());
  return Var::unary(x, t, 1.0 - t * t);
}

Var atanh(const Var& x) {
  const double v = x.value();
  return Var::unary(x, std::atanh(v), 1.0 / (1.0 - v * v));
}

Var sigmoid(const Var& x) {
  const double s = 1.0 / (1.0 + std::exp(-x.value()));
  return Var::unary(x, s, s * (1.0 - s));
}

GradientResult gradient(const LossFunction& loss, std::span<const double> theta) {
  Tape tape;
  std::vector<Var> params;
  params.reserve(theta.size());
  for (double t : theta) params.push_back(tape.variable(t));
  const Var out = loss(params);
  GradientResult result;
  result.value = out.value();
  result.tape_size = tape.size();
  const auto adj = tape.adjoints(out);
  result.gradient.resize(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    result.gradient[i] = adj[static_cast<std::size_t>(params[i].index())];
  return result;
}

double evaluate(const LossFunction& loss, std::span<const double> theta) {
  std::vector<Var> params(theta.begin(), theta.end());
  return loss(params).value();
}

}  // namespace flowbasis
