#include "flowbasis/flow.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "flowbasis/hermite.hpp"

namespace flowbasis {
namespace {

constexpr const char* kCheckpointMagic = "flowbasis-checkpoint";
constexpr int kCheckpointVersion = 1;

// Uniform in [lo, hi) from the top 53 bits; independent of the standard
// library's distribution implementation.
double uniform(std::mt19937_64& gen, double lo, double hi) {
  const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

Matrix column_matrix(std::span<const double> v) {
  Matrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

Matrix row_matrix(std::span<const double> v) {
  Matrix m(1, v.size());
  for (std::size_t i = 0; i < v.size(); ++i) m(0, i) = v[i];
  return m;
}

double euclidean_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// One power-iteration run from `v` (normalized on entry).
double power_iteration(const Matrix& w, std::vector<double> v, int max_iterations,
                       double tolerance) {
  double sigma = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    const auto wv = w * v;
    const double next = euclidean_norm(wv);
    if (next == 0.0) return 0.0;
    const auto wtwv = w.transposed() * std::span<const double>(wv);
    const double norm = euclidean_norm(wtwv);
    if (norm == 0.0) return next;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = wtwv[i] / norm;
    const bool converged = std::abs(next - sigma) <= tolerance * next;
    sigma = next;
    if (converged) break;
  }
  // Rayleigh estimate at the final vector.
  return euclidean_norm(w * v);
}

void expect_key(std::istream& in, const std::string& key) {
  std::string got;
  if (!(in >> got) || got != key)
    throw IoError("checkpoint: expected key '" + key + "', got '" + got + "'");
}

template <class V>
V read_value(std::istream& in, const std::string& key) {
  expect_key(in, key);
  V v{};
  if (!(in >> v)) throw IoError("checkpoint: bad value for '" + key + "'");
  return v;
}

}  // namespace

Jet2<Var> lipswish(const Jet2<Var>& p) {
  const double x = p.value.value();
  const double s = 1.0 / (1.0 + std::exp(-x));
  const double s1 = s * (1.0 - s);
  const double s2 = s1 * (1.0 - 2.0 * s);
  const double s3 = s2 * (1.0 - 2.0 * s) - 2.0 * s1 * s1;
  const double f0 = x * s * kLipswishScale;
  const double f1 = (s + x * s1) * kLipswishScale;
  const double f2 = (2.0 * s1 + x * s2) * kLipswishScale;
  const double f3 = (3.0 * s2 + x * s3) * kLipswishScale;
  const Var f = Var::unary(p.value, f0, f1);
  const Var fp = Var::unary(p.value, f1, f2);
  const Var fpp = Var::unary(p.value, f2, f3);
  return compose(p, f, fp, fpp);
}

std::vector<double> flatten(const FlowParams& params) {
  std::vector<double> theta;
  theta.reserve(params.parameter_count());
  for (const auto& b : params.blocks) {
    theta.insert(theta.end(), b.w_in.begin(), b.w_in.end());
    theta.insert(theta.end(), b.b_in.begin(), b.b_in.end());
    theta.insert(theta.end(), b.w_out.begin(), b.w_out.end());
    theta.push_back(b.b_out);
  }
  theta.push_back(params.alpha);
  theta.push_back(params.beta);
  return theta;
}

FlowParams unflatten(const FlowParams& shape, std::span<const double> theta) {
  return rebind<double>(shape, theta);
}

FlowParams identity_flow(int hidden, int blocks, double alpha, double beta,
                         double lipschitz_margin) {
  if (hidden < 1) throw ArgumentError("flow: hidden width must be >= 1");
  if (blocks < 0) throw ArgumentError("flow: block count must be >= 0");
  FlowParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.lipschitz_margin = lipschitz_margin;
  const auto h = static_cast<std::size_t>(hidden);
  p.blocks.assign(static_cast<std::size_t>(blocks),
                  ResidualBlock{std::vector<double>(h, 0.0), std::vector<double>(h, 0.0),
                                std::vector<double>(h, 0.0), 0.0});
  validate(p);
  return p;
}

FlowParams initialize_flow(int hidden, int blocks, double alpha, double beta,
                           double lipschitz_margin, std::uint64_t seed) {
  FlowParams p = identity_flow(hidden, blocks, alpha, beta, lipschitz_margin);
  std::mt19937_64 gen(seed);
  for (auto& b : p.blocks)
    for (auto& w : b.w_in) w = uniform(gen, -1e-2, 1e-2);
  normalize(p);
  return p;
}

void validate(const FlowParams& params) {
  if (!(params.alpha > 0.0) || !std::isfinite(params.alpha))
    throw ArgumentError("flow: alpha must be positive and finite");
  if (!std::isfinite(params.beta)) throw ArgumentError("flow: beta must be finite");
  if (!(params.lipschitz_margin > 0.0 && params.lipschitz_margin < 1.0))
    throw ArgumentError("flow: Lipschitz margin must lie in (0, 1)");
  const std::size_t h = params.hidden();
  for (const auto& b : params.blocks) {
    if (b.w_in.size() != h || b.b_in.size() != h || b.w_out.size() != h)
      throw ArgumentError("flow: inconsistent hidden widths across layers");
  }
}

double spectral_norm(const Matrix& w, int max_iterations, double tolerance) {
  if (w.rows() == 0 || w.cols() == 0 || w.max_abs() == 0.0) return 0.0;
  const std::size_t n = w.cols();
  std::vector<double> start(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double sigma = power_iteration(w, start, max_iterations, tolerance);
  // The all-ones start can be orthogonal to every right singular vector with
  // a nonzero singular value; fall back to coordinate starts.
  for (std::size_t k = 0; sigma == 0.0 && k < n; ++k) {
    std::vector<double> e(n, 0.0);
    e[k] = 1.0;
    sigma = power_iteration(w, e, max_iterations, tolerance);
  }
  return sigma;
}

ResidualBlock normalize_block(ResidualBlock block, double c) {
  if (!(c > 0.0 && c < 1.0)) throw ArgumentError("normalize_block: margin must lie in (0, 1)");
  const double target = std::sqrt(c);
  // A layer already on the bound is left alone; rescaling it again would only
  // shuffle rounding bits and break idempotence.
  auto rescale = [target](std::vector<double>& w, double sigma) {
    if (sigma <= target * (1.0 + 1e-12)) return;
    const double f = target / sigma;
    for (double& x : w) x *= f;
  };
  rescale(block.w_in, spectral_norm(column_matrix(block.w_in)));
  rescale(block.w_out, spectral_norm(row_matrix(block.w_out)));
  return block;
}

void normalize(FlowParams& params) {
  for (auto& b : params.blocks) b = normalize_block(std::move(b), params.lipschitz_margin);
}

double flow_forward(const FlowParams& params, double x) {
  const double g = flow_value(params, x);
  if (!std::isfinite(g)) {
    std::ostringstream msg;
    msg << "flow_forward: non-finite result at x = " << std::setprecision(17) << x;
    throw NumericError(msg.str());
  }
  return g;
}

InverseResult flow_inverse_detailed(const FlowParams& params, double y, double tolerance,
                                    int max_iterations) {
  bool clipped = false;
  const double u = detail::clip_unit((y - params.beta) / params.alpha, clipped);
  const double s = std::atanh(u);

  InverseResult result;
  double z = s;
  for (auto block = params.blocks.rbegin(); block != params.blocks.rend(); ++block) {
    const double w = z;
    double step = 0.0;
    int it = 0;
    for (;;) {
      const double next = w - block_residual(*block, z);
      step = std::abs(next - z);
      z = next;
      ++it;
      if (step < tolerance) break;
      if (it >= max_iterations) {
        std::ostringstream msg;
        msg << "flow_inverse: fixed-point iteration did not converge for y = "
            << std::setprecision(17) << y << " (last step " << step << ")";
        throw ConvergenceError(msg.str());
      }
    }
    result.iterations += it;
    result.last_step = std::max(result.last_step, step);
  }
  const double t = std::tanh(z - s);
  result.value = y + detail::sandwich_displacement(u, t, params.alpha);
  if (!std::isfinite(result.value)) throw NumericError("flow_inverse: non-finite result");
  return result;
}

double flow_inverse(const FlowParams& params, double y, double tolerance, int max_iterations) {
  return flow_inverse_detailed(params, y, tolerance, max_iterations).value;
}

std::vector<double> evaluate_augmented_basis(const FlowParams& params, int n_max, double x) {
  const double y = flow_inverse(params, x);
  const double slope = flow_jet(params, y).d1;
  if (!(slope > 0.0)) throw NumericError("evaluate_augmented_basis: flow is not increasing");
  auto phi = hermite_functions(n_max, y);
  const double factor = 1.0 / std::sqrt(slope);
  for (double& v : phi) v *= factor;
  return phi;
}

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint) {
  const FlowParams& p = checkpoint.params;
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  out << std::setprecision(17);
  out << "hidden " << p.hidden() << '\n';
  out << "blocks " << p.blocks.size() << '\n';
  out << "lipschitz_margin " << p.lipschitz_margin << '\n';
  out << "alpha " << p.alpha << '\n';
  out << "beta " << p.beta << '\n';
  out << "seed " << checkpoint.seed << '\n';
  auto theta = flatten(p);
  theta.resize(theta.size() - 2);
  out << "parameters " << theta.size() << '\n';
  for (double v : theta) out << v << '\n';
}

Checkpoint read_checkpoint(std::istream& in) {
  const auto version = read_value<int>(in, kCheckpointMagic);
  if (version != kCheckpointVersion)
    throw IoError("checkpoint: unsupported version " + std::to_string(version));
  const auto hidden = read_value<int>(in, "hidden");
  const auto blocks = read_value<int>(in, "blocks");
  const auto margin = read_value<double>(in, "lipschitz_margin");
  const auto alpha = read_value<double>(in, "alpha");
  const auto beta = read_value<double>(in, "beta");
  const auto seed = read_value<std::uint64_t>(in, "seed");
  const auto count = read_value<std::size_t>(in, "parameters");

  Checkpoint c;
  c.seed = seed;
  c.params = identity_flow(hidden, blocks, alpha, beta, margin);
  if (count + 2 != c.params.parameter_count())
    throw IoError("checkpoint: parameter count does not match hidden/blocks");
  std::vector<double> theta(count + 2);
  for (std::size_t i = 0; i < count; ++i) {
    if (!(in >> theta[i])) throw IoError("checkpoint: truncated parameter list");
  }
  theta[count] = alpha;
  theta[count + 1] = beta;
  c.params = unflatten(c.params, theta);
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  write_checkpoint(out, checkpoint);
  if (!out) throw IoError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  return read_checkpoint(in);
}

}  // namespace flowbasis
