#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowbasis/eigensolver.hpp"
#include "flowbasis/flow.hpp"
#include "flowbasis/galerkin.hpp"
#include "flowbasis/gradient.hpp"
#include "flowbasis/hermite.hpp"
#include "flowbasis/potential.hpp"
#include "flowbasis/quadrature.hpp"

namespace flowbasis {

inline constexpr int kDefaultQuadratureOrder = 90;
inline constexpr double kDefaultLearningRate = 1e-3;

struct TrainingConfig {
  int basis_size = 5;
  int quadrature_order = kDefaultQuadratureOrder;
  int hidden = kDefaultHiddenUnits;
  int blocks = 1;
  double learning_rate = kDefaultLearningRate;
  int iterations = 500;
  std::uint64_t seed = 0;
  double lipschitz_margin = kDefaultLipschitzMargin;

  // 500 for N <= 9, 2000 above.
  static int default_iterations(int basis_size);
  // Throws ArgumentError on any non-positive size or out-of-range value.
  void validate() const;
};

// Trace of the projected Hamiltonian as a function of the flow parameters,
// written directly as a sum over quadrature nodes:
//   L = sum_q w~_q [ (a_q - r_q b_q + r_q^2 c_q / 4) / (2 G'_q^2) + V(G_q) c_q ],
// with r = G''/G', a = sum_n phi_n'^2, b = sum_n phi_n phi_n', c = sum_n phi_n^2.
// The Hermite sums do not depend on the flow and are tabulated once.
class TraceObjective {
 public:
  TraceObjective(const BasisSpec& spec, QuadratureRule rule, Potential potential);

  template <class T>
  T operator()(const BasicFlowParams<T>& flow) const {
    T total = T(0.0);
    for (std::size_t q = 0; q < rule_.nodes.size(); ++q) {
      const Jet2<T> g = flow_jet(flow, rule_.nodes[q]);
      const T r = g.d2 / g.d1;
      const T kinetic = T(0.5) * (T(grad_sq_[q]) - r * T(cross_[q]) + T(0.25) * r * r * T(value_sq_[q])) /
                        (g.d1 * g.d1);
      const T pot = potential_(g.value) * T(value_sq_[q]);
      total += T(rule_.lifted_weights[q]) * (kinetic + pot);
    }
    return total;
  }

  // Same loss over a flat parameter vector laid out like `shape`.
  template <class T>
  T evaluate_flat(const FlowParams& shape, std::span<const T> theta) const {
    return (*this)(rebind<T>(shape, theta));
  }

  double value(const FlowParams& flow) const { return (*this)(flow); }
  GradientResult gradient(const FlowParams& flow) const;
  LossFunction loss_function(const FlowParams& shape) const;

  const QuadratureRule& rule() const noexcept { return rule_; }
  const Potential& potential() const noexcept { return potential_; }

 private:
  QuadratureRule rule_;
  Potential potential_;
  std::vector<double> grad_sq_;
  std::vector<double> cross_;
  std::vector<double> value_sq_;
  mutable std::size_t tape_hint_ = 0;
};

// trace(assemble_hamiltonian(...)) for the augmented scheme.
double trace_loss(const TrainingConfig& config, const FlowParams& flow, const Potential& v);

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamState() = default;
  explicit AdamState(std::size_t parameter_count)
      : first_moment(parameter_count, 0.0), second_moment(parameter_count, 0.0) {}
};

// Bias-corrected Adam update of every flow parameter (weights, biases, alpha,
// beta), followed by re-normalization of the residual blocks. Throws
// NumericError if alpha leaves (0, inf).
void adam_step(AdamState& state, std::span<const double> grad, FlowParams& params, double lr);

struct TrainingTrace {
  std::vector<double> loss;       // loss before step t
  std::vector<double> grad_norm;  // Euclidean norm of the gradient at step t
  std::vector<double> wall_ms;    // elapsed time since training start

  std::size_t size() const noexcept { return loss.size(); }
};

struct TrainingResult {
  FlowParams params;
  TrainingTrace trace;
  double final_loss = 0.0;
  bool aborted = false;
  std::string abort_reason;
};

// Flow used at iteration 0: output layers zero (exact identity), alpha =
// 1.05 max|x_q| for the configured rule, beta = 0.
FlowParams initial_flow(const TrainingConfig& config);

// Runs config.iterations Adam steps on the trace loss. Non-finite losses or
// numeric failures stop training and are reported through `aborted`; the
// trace then holds the iterations completed so far.
TrainingResult train(const TrainingConfig& config, const Potential& v);

struct SolveResult {
  Scheme scheme = Scheme::hermite;
  int basis_size = 0;
  int quadrature_order = 0;
  HamiltonianMatrix hamiltonian;
  Spectrum spectrum;
  std::optional<TrainingResult> training;  // augmented scheme only
};

// Assemble (training first for the augmented scheme) and diagonalize.
// Throws NumericError if augmented training aborts.
SolveResult solve(Scheme scheme, const TrainingConfig& config, const Potential& v);

}  // namespace flowbasis
