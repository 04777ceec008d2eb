#include <doctest.h>

#include <cmath>
#include <numbers>

#include "flowbasis/eigensolver.hpp"
#include "flowbasis/errors.hpp"
#include "flowbasis/hermite.hpp"
#include "flowbasis/quadrature.hpp"
#include "support.hpp"

using namespace flowbasis;

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

// Relative error of sum_q w_q x_q^k against Gamma((k+1)/2) for even k.
double moment_error(const QuadratureRule& rule, int k) {
  long double sum = 0.0L;
  for (int q = 0; q < rule.order; ++q)
    sum += static_cast<long double>(rule.weights[q]) * std::pow(static_cast<long double>(rule.nodes[q]), k);
  if (k % 2 == 1) {
    long double scale = 0.0L;
    for (int q = 0; q < rule.order; ++q)
      scale += rule.weights[q] * std::pow(std::abs(static_cast<long double>(rule.nodes[q])), k);
    return scale == 0.0L ? 0.0 : static_cast<double>(std::abs(sum) / scale);
  }
  const long double exact = std::tgamma((k + 1) / 2.0L);
  return static_cast<double>(std::abs(sum - exact) / exact);
}

}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("order one") {
    const auto r = gauss_hermite_rule(1);
    REQUIRE(r.nodes.size() == 1);
    CHECK(r.nodes[0] == 0.0);
    CHECK(std::abs(r.weights[0] - kSqrtPi) < 1e-15);
  }

  TEST_CASE("order two") {
    const auto r = gauss_hermite_rule(2);
    CHECK(std::abs(r.nodes[0] + std::sqrt(0.5)) < 1e-15);
    CHECK(std::abs(r.nodes[1] - std::sqrt(0.5)) < 1e-15);
    for (double w : r.weights) CHECK(std::abs(w - kSqrtPi / 2) < 1e-15);
  }

  TEST_CASE("order three") {
    const auto r = gauss_hermite_rule(3);
    CHECK(std::abs(r.nodes[0] + std::sqrt(1.5)) < 1e-15);
    CHECK(std::abs(r.nodes[1]) < 1e-15);
    CHECK(std::abs(r.nodes[2] - std::sqrt(1.5)) < 1e-15);
    CHECK(std::abs(r.weights[0] - kSqrtPi / 6) < 1e-15);
    CHECK(std::abs(r.weights[1] - 2 * kSqrtPi / 3) < 1e-15);
    CHECK(std::abs(r.weights[2] - kSqrtPi / 6) < 1e-15);
  }

  TEST_CASE("order out of range") {
    CHECK_THROWS_AS(gauss_hermite_rule(0), ArgumentError);
    CHECK_THROWS_AS(gauss_hermite_rule(201), ArgumentError);
  }

  TEST_CASE("orders above the tested range warn") {
    int warnings = 0;
    set_warning_handler([&](std::string_view) { ++warnings; });
    gauss_hermite_rule(100);
    CHECK(warnings == 0);
    gauss_hermite_rule(150);
    CHECK(warnings == 1);
    set_warning_handler(nullptr);
  }

  TEST_CASE("structural invariants") {
    for (int q : {1, 2, 5, 17, 40, 90, 200}) {
      testing::QuietWarnings quiet;
      const auto r = gauss_hermite_rule(q);
      CHECK(r.order == q);
      long double sum = 0.0L;
      for (int i = 0; i < q; ++i) {
        CHECK(r.weights[i] > 0.0);
        CHECK(r.lifted_weights[i] > 0.0);
        CHECK(std::abs(r.nodes[i] + r.nodes[q - 1 - i]) <= 1e-13);
        if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
        sum += r.weights[i];
      }
      CHECK(std::abs(static_cast<double>(sum) - kSqrtPi) <= 1e-12 * kSqrtPi);
    }
  }

  TEST_CASE("lifted weights carry the Gaussian factor") {
    const auto r = gauss_hermite_rule(60);
    for (int i = 0; i < 60; ++i) {
      const double expected = std::log(r.weights[i]) + r.nodes[i] * r.nodes[i];
      CHECK(std::abs(std::log(r.lifted_weights[i]) - expected) < 1e-12 * (1 + std::abs(expected)));
    }
  }

  TEST_CASE("exactness on monomials") {
    for (int q = 1; q <= 60; ++q) {
      const auto r = gauss_hermite_rule(q);
      for (int k = 0; k <= 2 * q - 1; ++k) {
        INFO("Q=" << q << " k=" << k);
        CHECK(moment_error(r, k) < 1e-12);
      }
    }
  }

  TEST_CASE("nodes interlace") {
    auto prev = gauss_hermite_rule(1);
    for (int q = 2; q <= 90; ++q) {
      const auto next = gauss_hermite_rule(q);
      for (int i = 0; i < q - 1; ++i) {
        CHECK(next.nodes[i] < prev.nodes[i]);
        CHECK(prev.nodes[i] < next.nodes[i + 1]);
      }
      prev = next;
    }
  }

  TEST_CASE("weights agree with eigenvector components") {
    const int q = 20;
    std::vector<double> diag(q, 0.0), off(q - 1);
    for (int k = 1; k < q; ++k) off[k - 1] = std::sqrt(k / 2.0);
    const auto spec = eigh_tridiagonal(diag, off);
    const auto r = gauss_hermite_rule(q);
    for (int i = 0; i < q; ++i) {
      const double v0 = spec.eigenvectors(0, i);
      const double w = kSqrtPi * v0 * v0;
      CHECK(std::abs(spec.eigenvalues[i] - r.nodes[i]) < 1e-13);
      // Eigenvector components only carry absolute accuracy.
      CHECK(std::abs(w - r.weights[i]) < 1e-14 + 1e-10 * r.weights[i]);
    }
  }

  TEST_CASE("integrate_lifted examples") {
    const auto r = gauss_hermite_rule(20);
    std::vector<double> gauss, ground, quartic;
    for (double x : r.nodes) {
      const double phi0 = hermite_functions(0, x)[0];
      gauss.push_back(std::exp(-x * x));
      ground.push_back(phi0 * phi0);
      quartic.push_back(phi0 * phi0 * x * x * x * x);
    }
    CHECK(std::abs(integrate_lifted(gauss, r) - kSqrtPi) < 1e-12 * kSqrtPi);
    CHECK(std::abs(integrate_lifted(ground, r) - 1.0) < 1e-12);
    CHECK(std::abs(integrate_lifted(quartic, r) - 0.75) < 1e-12);
    CHECK_THROWS_AS(integrate_lifted(std::vector<double>(19, 0.0), r), ArgumentError);
  }
}
