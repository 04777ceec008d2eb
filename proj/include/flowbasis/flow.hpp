#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "flowbasis/autodiff.hpp"
#include "flowbasis/errors.hpp"
#include "flowbasis/jet.hpp"
#include "flowbasis/matrix.hpp"

namespace flowbasis {

inline constexpr int kDefaultHiddenUnits = 128;
inline constexpr double kDefaultLipschitzMargin = 0.97;
// |atanh argument| is clipped to 1 - kAtanhClip.
inline constexpr double kAtanhClip = 1e-7;
inline constexpr double kLipswishScale = 1.0 / 1.1;

// One residual block z -> z + k(z) with
// k(z) = w_out . lipswish(w_in * z + b_in) + b_out.
// w_in is the h x 1 input layer, w_out the 1 x h output layer.
template <class T>
struct BasicResidualBlock {
  std::vector<T> w_in;
  std::vector<T> b_in;
  std::vector<T> w_out;
  T b_out{};

  std::size_t hidden() const noexcept { return w_in.size(); }
};

// Trainable parameters of the bijection
//   G(x) = alpha * tanh(F(atanh((x - beta) / alpha))) + beta,
// where F is the composition of the residual blocks. G maps
// (beta - alpha, beta + alpha) onto itself.
template <class T>
struct BasicFlowParams {
  std::vector<BasicResidualBlock<T>> blocks;
  T alpha{1.0};
  T beta{0.0};
  double lipschitz_margin = kDefaultLipschitzMargin;

  std::size_t hidden() const noexcept { return blocks.empty() ? 0 : blocks.front().hidden(); }
  // 3h + 1 per block, plus alpha and beta.
  std::size_t parameter_count() const noexcept { return blocks.size() * (3 * hidden() + 1) + 2; }
};

using ResidualBlock = BasicResidualBlock<double>;
using FlowParams = BasicFlowParams<double>;

// ---------------------------------------------------------------------------
// Parameter layout. Flat order: for each block w_in, b_in, w_out, b_out; then
// alpha, beta.

std::vector<double> flatten(const FlowParams& params);

// `shape` supplies the block count, widths and margin; values come from `theta`.
template <class T>
BasicFlowParams<T> rebind(const FlowParams& shape, std::span<const T> theta) {
  if (theta.size() != shape.parameter_count())
    throw ArgumentError("flow parameters: expected " + std::to_string(shape.parameter_count()) +
                        " values, got " + std::to_string(theta.size()));
  BasicFlowParams<T> out;
  out.lipschitz_margin = shape.lipschitz_margin;
  const std::size_t h = shape.hidden();
  std::size_t k = 0;
  auto take = [&](std::size_t n) {
    std::vector<T> v(theta.begin() + static_cast<std::ptrdiff_t>(k),
                     theta.begin() + static_cast<std::ptrdiff_t>(k + n));
    k += n;
    return v;
  };
  out.blocks.resize(shape.blocks.size());
  for (auto& b : out.blocks) {
    b.w_in = take(h);
    b.b_in = take(h);
    b.w_out = take(h);
    b.b_out = theta[k++];
  }
  out.alpha = theta[k++];
  out.beta = theta[k++];
  return out;
}

FlowParams unflatten(const FlowParams& shape, std::span<const double> theta);

// ---------------------------------------------------------------------------
// Construction

// All weights and biases zero: F is exactly the identity and so is G.
FlowParams identity_flow(int hidden, int blocks, double alpha, double beta,
                         double lipschitz_margin = kDefaultLipschitzMargin);

// Input-layer weights uniform(-1e-2, 1e-2) from a seeded generator, then
// normalized; output layers and all biases zero. The flow starts as the exact
// identity while every parameter still receives gradient after one step.
FlowParams initialize_flow(int hidden, int blocks, double alpha, double beta,
                           double lipschitz_margin, std::uint64_t seed);

// Throws ArgumentError on inconsistent shapes or alpha <= 0 or margin outside (0, 1).
void validate(const FlowParams& params);

// ---------------------------------------------------------------------------
// Activation

// Lipswish: x * sigmoid(x) / 1.1. Lipschitz constant < 1.
template <class T>
T lipswish(const T& x) {
  return x * sigmoid(x) * T(kLipswishScale);
}

template <class T>
Jet2<T> lipswish(const Jet2<T>& p) {
  const T s = sigmoid(p.value);
  const T ds = s * (T(1.0) - s);
  const T f = p.value * s * T(kLipswishScale);
  const T fp = (s + p.value * ds) * T(kLipswishScale);
  const T fpp = (T(2.0) * ds + p.value * ds * (T(1.0) - T(2.0) * s)) * T(kLipswishScale);
  return compose(p, f, fp, fpp);
}

// Taped variant: value, first and second derivative of the activation each
// become a single node (with the next derivative as local partial) instead
// of a dozen elementary ones. Same numbers, smaller tape.
Jet2<Var> lipswish(const Jet2<Var>& p);

// ---------------------------------------------------------------------------
// Lipschitz control

// Largest singular value by power iteration on W^T W from the normalized
// all-ones vector. Returns 0 for the zero matrix.
double spectral_norm(const Matrix& w, int max_iterations = 50, double tolerance = 1e-9);

// Scales each layer by min(1, sqrt(c) / sigma_max) so Lip(k) <= c.
ResidualBlock normalize_block(ResidualBlock block, double c);
void normalize(FlowParams& params);

// ---------------------------------------------------------------------------
// Evaluation

template <class T>
T block_residual(const BasicResidualBlock<T>& b, const T& z) {
  T acc = b.b_out;
  for (std::size_t j = 0; j < b.hidden(); ++j) acc += b.w_out[j] * lipswish(T(b.w_in[j] * z + b.b_in[j]));
  return acc;
}

template <class T>
Jet2<T> block_residual(const BasicResidualBlock<T>& b, const Jet2<T>& z) {
  Jet2<T> acc = Jet2<T>::constant(b.b_out);
  for (std::size_t j = 0; j < b.hidden(); ++j) {
    const T& w = b.w_in[j];
    const Jet2<T> act = lipswish(Jet2<T>{w * z.value + b.b_in[j], w * z.d1, w * z.d2});
    const T& v = b.w_out[j];
    acc.value += v * act.value;
    acc.d1 += v * act.d1;
    acc.d2 += v * act.d2;
  }
  return acc;
}

namespace detail {

inline double clip_unit(double u, bool& clipped) {
  const double bound = 1.0 - kAtanhClip;
  clipped = std::abs(u) > bound;
  return std::clamp(u, -bound, bound);
}

// alpha * (tanh(s + delta) - tanh(s)) written through u = tanh(s) and
// t = tanh(delta), so a zero residual gives an exact zero displacement.
template <class U>
U sandwich_displacement(const U& u, const U& t, const U& alpha_term) {
  return alpha_term * (U(1.0) - u * u) * t / (U(1.0) + u * t);
}

}  // namespace detail

// G(x), G'(x), G''(x) by second-order Taylor propagation.
template <class T>
Jet2<T> flow_jet(const BasicFlowParams<T>& params, double x) {
  using J = Jet2<T>;
  const T inv_alpha = T(1.0) / params.alpha;
  const T u_raw = (T(x) - params.beta) * inv_alpha;
  bool clipped = false;
  const double u_clip = detail::clip_unit(value_of(u_raw), clipped);
  const J u = clipped ? J::constant(T(u_clip)) : J{u_raw, inv_alpha, T(0.0)};

  J z = atanh(u);
  J delta = J::constant(T(0.0));
  for (const auto& block : params.blocks) {
    const J k = block_residual(block, z);
    z = z + k;
    delta = delta + k;
  }
  const J t = tanh(delta);
  const J one_minus_u2 = J::constant(T(1.0)) - u * u;
  J displacement = scale(params.alpha, one_minus_u2 * t * reciprocal(shift(u * t, T(1.0))));
  // Same rounding as flow_value for the value itself.
  displacement.value = detail::sandwich_displacement(u.value, t.value, params.alpha);
  return J::variable(T(x)) + displacement;
}

// G(x) only.
template <class T>
T flow_value(const BasicFlowParams<T>& params, double x) {
  using std::atanh;
  using std::tanh;
  bool clipped = false;
  const T u = (T(x) - params.beta) / params.alpha;
  const double u_clip = detail::clip_unit(value_of(u), clipped);
  const T uc = clipped ? T(u_clip) : u;
  T z = atanh(uc);
  T delta = T(0.0);
  for (const auto& block : params.blocks) {
    const T k = block_residual(block, z);
    z = z + k;
    delta = delta + k;
  }
  const T t = tanh(delta);
  return T(x) + detail::sandwich_displacement(uc, t, params.alpha);
}

// Throws NumericError naming x if the result is not finite.
double flow_forward(const FlowParams& params, double x);

struct InverseResult {
  double value = 0.0;
  int iterations = 0;      // fixed-point steps summed over blocks
  double last_step = 0.0;  // |z_{t+1} - z_t| at exit, worst block
};

// Inverts G: the tanh/affine sandwich analytically, each residual block by
// the Banach iteration z <- w - k(z). Throws ConvergenceError if any block
// needs more than max_iterations steps.
InverseResult flow_inverse_detailed(const FlowParams& params, double y, double tolerance = 1e-14,
                                    int max_iterations = 10000);
double flow_inverse(const FlowParams& params, double y, double tolerance = 1e-14,
                    int max_iterations = 10000);

// phi_n^A(x) = phi_n(G^{-1}(x)) / sqrt(G'(G^{-1}(x))) for n = 0..n_max.
std::vector<double> evaluate_augmented_basis(const FlowParams& params, int n_max, double x);

// ---------------------------------------------------------------------------
// Checkpoints

struct Checkpoint {
  FlowParams params;
  std::uint64_t seed = 0;
};

// Versioned text format:
//   flowbasis-checkpoint 1
//   hidden <h>
//   blocks <b>
//   lipschitz_margin <c>
//   alpha <alpha>
//   beta <beta>
//   seed <seed>
//   parameters <count>
//   <one value per line, flat order without alpha and beta>
void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace flowbasis
