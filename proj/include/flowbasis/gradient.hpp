#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <type_traits>
#include <vector>

#include "flowbasis/autodiff.hpp"

namespace flowbasis {

// A scalar loss over a flat parameter vector, written against Var so it can
// be taped. Fed constants only, it evaluates without recording anything.
using LossFunction = std::function<Var(std::span<const Var>)>;

struct GradientResult {
  double value = 0.0;
  std::vector<double> gradient;
  std::size_t tape_size = 0;
};

// One forward sweep recording the tape, one reverse sweep.
GradientResult gradient(const LossFunction& loss, std::span<const double> theta);

// Plain evaluation through the Var code path, no tape.
double evaluate(const LossFunction& loss, std::span<const double> theta);

// Central differences (L(theta + h e_i) - L(theta - h e_i)) / 2h per entry.
// `loss` is called with std::span<const Scalar> and returns Scalar, so the
// oracle can run in a wider floating-point type than the taped path. A
// LossFunction is also accepted and evaluated through constant Vars.
template <class Scalar = double, class Loss>
std::vector<double> finite_diff_gradient(Loss&& loss, std::span<const double> theta, double step) {
  auto eval = [&loss](std::span<const Scalar> p) -> Scalar {
    if constexpr (std::is_invocable_v<Loss&, std::span<const Scalar>>) {
      return loss(p);
    } else {
      std::vector<Var> v(p.begin(), p.end());
      return Scalar(loss(std::span<const Var>(v)).value());
    }
  };
  std::vector<Scalar> point(theta.begin(), theta.end());
  std::vector<double> grad(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const Scalar center = point[i];
    point[i] = center + Scalar(step);
    const Scalar up = eval(point);
    point[i] = center - Scalar(step);
    const Scalar down = eval(point);
    point[i] = center;
    grad[i] = static_cast<double>((up - down) / (Scalar(2) * Scalar(step)));
  }
  return grad;
}

}  // namespace flowbasis
