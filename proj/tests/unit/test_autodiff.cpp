#include <doctest.h>

#include <cmath>
#include <limits>

#include "flowbasis/errors.hpp"
#include "flowbasis/flow.hpp"
#include "flowbasis/gradient.hpp"
#include "flowbasis/hermite.hpp"
#include "flowbasis/potential.hpp"
#include "flowbasis/trainer.hpp"
#include "support.hpp"

using namespace flowbasis;

namespace {

double max_rel_discrepancy(std::span<const double> a, std::span<const double> b, double floor) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(b[i]) <= floor) continue;
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::abs(b[i]));
  }
  return worst;
}

}  // namespace

TEST_SUITE("autodiff") {
  TEST_CASE("square") {
    const LossFunction loss = [](std::span<const Var> t) { return t[0] * t[0]; };
    const std::vector<double> theta{3.0};
    const auto g = gradient(loss, theta);
    CHECK(g.value == 9.0);
    CHECK(g.gradient == std::vector<double>{6.0});
    const auto fd = finite_diff_gradient(loss, theta, 1e-4);
    CHECK(std::abs(fd[0] - 6.0) < 1e-7);
  }

  TEST_CASE("linear loss has unit finite differences") {
    auto loss = [](std::span<const double> t) {
      double s = 0.0;
      for (double v : t) s += v;
      return s;
    };
    const std::vector<double> theta{0.5, 0.25, -2.0, 8.0};
    for (double d : finite_diff_gradient(loss, theta, 0.5)) CHECK(d == 1.0);
  }

  TEST_CASE("elementary functions") {
    const LossFunction loss = [](std::span<const Var> t) {
      return exp(t[0]) * tanh(t[1]) + log(t[2]) / sqrt(t[2]) - atanh(t[1] * Var(0.5)) + sigmoid(t[0] - t[2]);
    };
    const std::vector<double> theta{0.3, -0.7, 1.9};
    const auto g = gradient(loss, theta);
    CHECK(g.value == doctest::Approx(evaluate(loss, theta)).epsilon(1e-15));
    const auto fd = finite_diff_gradient(loss, theta, 1e-6);
    CHECK(max_rel_discrepancy(g.gradient, fd, 1e-8) < 1e-8);
  }

  TEST_CASE("constants never touch a tape") {
    const Var a(2.0), b(3.0);
    const Var c = a * b + exp(a);
    CHECK(c.is_constant());
    CHECK(c.tape() == nullptr);
    CHECK(c.value() == doctest::Approx(6.0 + std::exp(2.0)));
  }

  TEST_CASE("tape is topologically ordered") {
    Tape tape;
    const Var x = tape.variable(1.5);
    const Var y = tape.variable(-0.5);
    const Var z = x * y + tanh(x) * exp(y);
    CHECK(z.index() == static_cast<std::int32_t>(tape.size() - 1));
    const auto adj = tape.adjoints(z);
    CHECK(adj[x.index()] == doctest::Approx(y.value() + (1 - std::tanh(1.5) * std::tanh(1.5)) * std::exp(-0.5)));
    CHECK(adj[y.index()] == doctest::Approx(x.value() + std::tanh(1.5) * std::exp(-0.5)));
  }

  TEST_CASE("non-finite adjoint names the node") {
    const LossFunction loss = [](std::span<const Var> t) { return sqrt(t[0]); };
    const std::vector<double> theta{0.0};
    try {
      gradient(loss, theta);
      FAIL("expected NumericError");
    } catch (const NumericError& e) {
      CHECK(std::string(e.what()).find("node") != std::string::npos);
    }
  }

  TEST_CASE("flow output with respect to alpha and beta") {
    const FlowParams shape = initialize_flow(32, 1, 9.0, 0.0, 0.97, 3);
    const auto theta = flatten(shape);
    const LossFunction loss = [&](std::span<const Var> t) {
      return flow_value(rebind<Var>(shape, t), 0.5);
    };
    // Second-order-accurate oracle in long double.
    auto wide = [&](std::span<const long double> t) {
      return flow_value(rebind<long double>(shape, t), 0.5);
    };
    const auto g = gradient(loss, theta);
    const auto fd = finite_diff_gradient<long double>(wide, theta, 1e-6);
    const std::size_t a = theta.size() - 2, b = theta.size() - 1;
    // At the identity G does not depend on alpha or beta.
    CHECK(std::abs(g.gradient[a]) < 1e-12);
    CHECK(std::abs(g.gradient[b]) < 1e-12);
    CHECK(std::abs(fd[a]) < 1e-9);
    CHECK(std::abs(fd[b]) < 1e-9);

    // Away from the identity both derivatives are nonzero.
    const FlowParams moved = testing::random_flow(4, 32, 1, 9.0, 0.3);
    const auto theta2 = flatten(moved);
    const LossFunction loss2 = [&](std::span<const Var> t) { return flow_value(rebind<Var>(moved, t), 0.5); };
    auto wide2 = [&](std::span<const long double> t) { return flow_value(rebind<long double>(moved, t), 0.5); };
    const auto g2 = gradient(loss2, theta2);
    const auto fd2 = finite_diff_gradient<long double>(wide2, theta2, 1e-6);
    for (std::size_t i : {a, b}) {
      REQUIRE(std::abs(fd2[i]) > 1e-6);
      CHECK(std::abs(g2.gradient[i] - fd2[i]) <= 1e-6 * std::abs(fd2[i]));
    }
  }

  TEST_CASE("trace loss gradient matches central differences") {
    testing::QuietWarnings quiet;
    for (int n : {3, 5}) {
      const TraceObjective objective(BasisSpec(n), gauss_hermite_rule(30), Potential::anharmonic());
      for (std::uint64_t draw = 0; draw < 4; ++draw) {
        const FlowParams p = testing::random_flow(50 + draw, 24, 1, 7.6, 0.1);
        const auto theta = flatten(p);
        const auto g = objective.gradient(p);
        auto wide = [&](std::span<const long double> t) { return objective.evaluate_flat<long double>(p, t); };
        const auto fd = finite_diff_gradient<long double>(wide, theta, 1e-6);
        INFO("N=" << n << " draw=" << draw);
        CHECK(max_rel_discrepancy(g.gradient, fd, 1e-8) <= 1e-5);
        CHECK(g.value == doctest::Approx(objective.value(p)).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("linearity") {
    const TraceObjective harmonic(BasisSpec(4), gauss_hermite_rule(30), Potential::harmonic());
    const TraceObjective quartic(BasisSpec(4), gauss_hermite_rule(30), Potential::anharmonic());
    const FlowParams p = testing::random_flow(9, 16, 1, 7.6);
    const auto theta = flatten(p);
    const double a = 0.75, b = -2.5;
    const auto l1 = harmonic.loss_function(p);
    const auto l2 = quartic.loss_function(p);
    const LossFunction combo = [&](std::span<const Var> t) { return Var(a) * l1(t) + Var(b) * l2(t); };
    const auto g1 = gradient(l1, theta);
    const auto g2 = gradient(l2, theta);
    const auto gc = gradient(combo, theta);
    for (std::size_t i = 0; i < theta.size(); ++i)
      CHECK(std::abs(gc.gradient[i] - (a * g1.gradient[i] + b * g2.gradient[i])) <= 1e-12);
  }

  TEST_CASE("determinism") {
    const TraceObjective objective(BasisSpec(5), gauss_hermite_rule(30), Potential::anharmonic());
    const FlowParams p = testing::random_flow(21, 32, 2, 7.6);
    const auto first = objective.gradient(p);
    const auto second = objective.gradient(p);
    CHECK(first.value == second.value);
    CHECK(first.gradient == second.gradient);
  }
}
