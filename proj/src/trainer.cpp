#include "flowbasis/trainer.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "flowbasis/errors.hpp"

namespace flowbasis {

int TrainingConfig::default_iterations(int basis_size) { return basis_size <= 9 ? 500 : 2000; }

void TrainingConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) throw ArgumentError(std::string("training config: ") + name + " must be >= 1");
  };
  positive(basis_size, "basis_size");
  positive(quadrature_order, "quadrature_order");
  positive(hidden, "hidden");
  positive(blocks, "blocks");
  if (iterations < 0) throw ArgumentError("training config: iterations must be >= 0");
  if (quadrature_order > kMaxQuadratureOrder)
    throw ArgumentError("training config: quadrature_order exceeds " +
                        std::to_string(kMaxQuadratureOrder));
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ArgumentError("training config: learning_rate must be positive");
  if (!(lipschitz_margin > 0.0 && lipschitz_margin < 1.0))
    throw ArgumentError("training config: lipschitz_margin must lie in (0, 1)");
}

TraceObjective::TraceObjective(const BasisSpec& spec, QuadratureRule rule, Potential potential)
    : rule_(std::move(rule)), potential_(std::move(potential)) {
  const auto q = rule_.nodes.size();
  const auto n = static_cast<std::size_t>(spec.size());
  grad_sq_.assign(q, 0.0);
  cross_.assign(q, 0.0);
  value_sq_.assign(q, 0.0);
  std::vector<double> phi(n), dphi(n);
  for (std::size_t k = 0; k < q; ++k) {
    hermite_functions_and_derivatives(rule_.nodes[k], phi, dphi);
    for (std::size_t i = 0; i < n; ++i) {
      grad_sq_[k] += dphi[i] * dphi[i];
      cross_[k] += phi[i] * dphi[i];
      value_sq_[k] += phi[i] * phi[i];
    }
  }
}

LossFunction TraceObjective::loss_function(const FlowParams& shape) const {
  return [this, shape](std::span<const Var> theta) { return evaluate_flat<Var>(shape, theta); };
}

GradientResult TraceObjective::gradient(const FlowParams& flow) const {
  const auto theta = flatten(flow);
  Tape tape;
  tape.reserve(tape_hint_);
  std::vector<Var> vars;
  vars.reserve(theta.size());
  for (double t : theta) vars.push_back(tape.variable(t));
  const Var out = evaluate_flat<Var>(flow, std::span<const Var>(vars));
  tape_hint_ = tape.size();

  GradientResult result;
  result.value = out.value();
  result.tape_size = tape.size();
  const auto adj = tape.adjoints(out);
  result.gradient.resize(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    result.gradient[i] = adj[static_cast<std::size_t>(vars[i].index())];
  return result;
}

double trace_loss(const TrainingConfig& config, const FlowParams& flow, const Potential& v) {
  config.validate();
  const auto rule = gauss_hermite_rule(config.quadrature_order);
  return assemble_hamiltonian(BasisSpec(config.basis_size), rule, v, flow).trace();
}

void adam_step(AdamState& state, std::span<const double> grad, FlowParams& params, double lr) {
  auto theta = flatten(params);
  if (grad.size() != theta.size())
    throw ArgumentError("adam_step: gradient has " + std::to_string(grad.size()) +
                        " entries, parameters have " + std::to_string(theta.size()));
  if (state.first_moment.empty()) state = AdamState(theta.size());
  if (state.first_moment.size() != theta.size() || state.second_moment.size() != theta.size())
    throw ArgumentError("adam_step: optimizer state size mismatch");

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double g = grad[i];
    state.first_moment[i] = state.beta1 * state.first_moment[i] + (1.0 - state.beta1) * g;
    state.second_moment[i] = state.beta2 * state.second_moment[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.first_moment[i] / correction1;
    const double v_hat = state.second_moment[i] / correction2;
    theta[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
  params = unflatten(params, theta);
  if (!(params.alpha > 0.0) || !std::isfinite(params.alpha) || !std::isfinite(params.beta))
    throw NumericError("adam_step: flow scale alpha left the admissible range");
  normalize(params);
}

FlowParams initial_flow(const TrainingConfig& config) {
  config.validate();
  const auto rule = gauss_hermite_rule(config.quadrature_order);
  return initialize_flow(config.hidden, config.blocks, 1.05 * rule.max_abs_node(), 0.0,
                         config.lipschitz_margin, config.seed);
}

TrainingResult train(const TrainingConfig& config, const Potential& v) {
  config.validate();
  const BasisSpec spec(config.basis_size);
  const TraceObjective objective(spec, gauss_hermite_rule(config.quadrature_order), v);

  TrainingResult result;
  result.params = initial_flow(config);
  AdamState state(result.params.parameter_count());
  auto& trace = result.trace;
  trace.loss.reserve(static_cast<std::size_t>(config.iterations));
  trace.grad_norm.reserve(static_cast<std::size_t>(config.iterations));
  trace.wall_ms.reserve(static_cast<std::size_t>(config.iterations));

  const auto start = std::chrono::steady_clock::now();
  for (int it = 0; it < config.iterations; ++it) {
    try {
      const auto g = objective.gradient(result.params);
      if (!std::isfinite(g.value))
        throw NumericError("non-finite loss at iteration " + std::to_string(it));
      double norm_sq = 0.0;
      for (double x : g.gradient) norm_sq += x * x;
      trace.loss.push_back(g.value);
      trace.grad_norm.push_back(std::sqrt(norm_sq));
      trace.wall_ms.push_back(
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count());
      adam_step(state, g.gradient, result.params, config.learning_rate);
    } catch (const Error& e) {
      result.aborted = true;
      result.abort_reason = e.what();
      break;
    }
  }
  if (!result.aborted) {
    result.final_loss = objective.value(result.params);
    if (!std::isfinite(result.final_loss)) {
      result.aborted = true;
      result.abort_reason = "non-finite loss after the final step";
    }
  }
  return result;
}

SolveResult solve(Scheme scheme, const TrainingConfig& config, const Potential& v) {
  config.validate();
  const BasisSpec spec(config.basis_size);
  const auto rule = gauss_hermite_rule(config.quadrature_order);
  SolveResult out;
  out.scheme = scheme;
  out.basis_size = config.basis_size;
  out.quadrature_order = config.quadrature_order;
  if (scheme == Scheme::hermite) {
    out.hamiltonian = assemble_hamiltonian(spec, rule, v);
  } else {
    auto training = train(config, v);
    if (training.aborted) throw NumericError("training aborted: " + training.abort_reason);
    out.hamiltonian = assemble_hamiltonian(spec, rule, v, training.params);
    out.training = std::move(training);
  }
  out.spectrum = eigh(out.hamiltonian.entries);
  return out;
}

}  // namespace flowbasis
