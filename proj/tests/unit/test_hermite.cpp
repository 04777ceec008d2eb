#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "flowbasis/errors.hpp"
#include "flowbasis/hermite.hpp"
#include "flowbasis/quadrature.hpp"
#include "support.hpp"

using namespace flowbasis;

namespace {

const double kPiQuarter = std::pow(std::numbers::pi, -0.25);

// Physicists' H_n by its own recurrence and the explicit normalization, in
// long double.
long double direct_hermite_function(int n, long double x) {
  long double h_prev = 1.0L;
  long double h = 2.0L * x;
  if (n == 0) h = 1.0L;
  for (int k = 1; k < n; ++k) {
    const long double next = 2.0L * x * h - 2.0L * k * h_prev;
    h_prev = h;
    h = next;
  }
  long double norm = std::sqrt(std::numbers::pi_v<long double>);
  for (int k = 1; k <= n; ++k) norm *= 2.0L * k;
  return h / std::sqrt(norm) * std::exp(-x * x / 2.0L);
}

}  // namespace

TEST_SUITE("hermite") {
  TEST_CASE("ground state at the origin") {
    const auto v = hermite_functions(0, 0.0);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == doctest::Approx(0.7511255).epsilon(1e-7));
    CHECK(std::abs(v[0] - kPiQuarter) < 1e-15);
  }

  TEST_CASE("odd function vanishes at the origin") {
    const auto v = hermite_functions(1, 0.0);
    CHECK(std::abs(v[0] - kPiQuarter) < 1e-15);
    CHECK(v[1] == 0.0);
  }

  TEST_CASE("recurrence and direct formula agree") {
    for (double x : {1.3, -0.4, 2.7, 5.0}) {
      const auto v = hermite_functions(5, x);
      for (int n = 0; n <= 5; ++n) {
        const double ref = static_cast<double>(direct_hermite_function(n, x));
        CHECK(std::abs(v[n] - ref) < 1e-13);
      }
      for (int n = 1; n < 5; ++n) {
        const double residual = v[n + 1] - (x * std::sqrt(2.0 / (n + 1)) * v[n] -
                                            std::sqrt(double(n) / (n + 1)) * v[n - 1]);
        CHECK(std::abs(residual) < 1e-13);
      }
    }
  }

  TEST_CASE("direct formula at higher order") {
    const auto v = hermite_functions(30, 3.1);
    for (int n = 0; n <= 30; ++n)
      CHECK(std::abs(v[n] - static_cast<double>(direct_hermite_function(n, 3.1L))) < 1e-12);
  }

  TEST_CASE("no overflow far out") {
    for (double x : {15.0, -15.0, 12.5}) {
      const auto v = hermite_functions(100, x);
      for (double f : v) CHECK(std::isfinite(f));
    }
  }

  TEST_CASE("negative order is rejected") {
    CHECK_THROWS_AS(hermite_functions(-1, 0.0), ArgumentError);
    CHECK_THROWS_AS(hermite_derivatives(-3, 0.0), ArgumentError);
    CHECK_THROWS_AS(BasisSpec(0), ArgumentError);
  }

  TEST_CASE("derivative examples") {
    CHECK(hermite_derivatives(0, 0.0)[0] == 0.0);
    // sqrt(1/2) phi_0(0) - phi_2(0) with phi_2(0) = -pi^{-1/4} / sqrt(2)
    const auto d = hermite_derivatives(1, 0.0);
    CHECK(std::abs(d[1] - std::sqrt(2.0) * kPiQuarter) < 1e-15);
  }

  TEST_CASE("derivatives match finite differences") {
    const double h = 1e-5;
    const auto d = hermite_derivatives(4, 0.7);
    const auto up = hermite_functions(4, 0.7 + h);
    const auto down = hermite_functions(4, 0.7 - h);
    for (int n = 0; n <= 4; ++n) {
      const double fd = (up[n] - down[n]) / (2 * h);
      CHECK(std::abs(d[n] - fd) <= 1e-7 * std::abs(fd));
    }
  }

  TEST_CASE("ladder consistency on random pairs") {
    std::mt19937_64 rng(7);
    const double h = 1e-5;
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const int n = static_cast<int>(rng() % 30);
      const double x = testing::uniform(rng, -5.0, 5.0);
      const double d = hermite_derivatives(n, x)[n];
      const double fd = (hermite_functions(n, x + h)[n] - hermite_functions(n, x - h)[n]) / (2 * h);
      // Near a root of phi_n' the relative measure is meaningless.
      if (std::abs(fd) < 1e-3) continue;
      CHECK(std::abs(d - fd) <= 1e-7 * std::abs(fd));
      ++checked;
    }
    CHECK(checked > 80);
  }

  TEST_CASE("combined evaluation matches separate calls") {
    std::vector<double> values(12), derivs(12);
    hermite_functions_and_derivatives(-1.9, values, derivs);
    CHECK(values == hermite_functions(11, -1.9));
    CHECK(derivs == hermite_derivatives(11, -1.9));
  }

  TEST_CASE("parity") {
    for (double x : {0.3, 1.7, 4.2, 8.0}) {
      const auto p = hermite_functions(40, x);
      const auto m = hermite_functions(40, -x);
      for (int n = 0; n <= 40; ++n) {
        const double sign = n % 2 == 0 ? 1.0 : -1.0;
        CHECK(std::abs(m[n] - sign * p[n]) <= 1e-14);
      }
    }
  }

  TEST_CASE("orthonormality under quadrature") {
    for (int n : {5, 20, 40}) {
      const auto rule = gauss_hermite_rule(n + 3);
      double worst = 0.0;
      std::vector<std::vector<double>> table;
      for (double x : rule.nodes) table.push_back(hermite_functions(n - 1, x));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (std::size_t q = 0; q < table.size(); ++q)
            s += rule.lifted_weights[q] * table[q][i] * table[q][j];
          worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
      CHECK(worst < 1e-10);
    }
  }
}
