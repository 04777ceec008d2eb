#include <doctest.h>

#include <cmath>

#include "flowbasis/eigensolver.hpp"
#include "flowbasis/errors.hpp"
#include "flowbasis/galerkin.hpp"
#include "flowbasis/hermite.hpp"
#include "flowbasis/potential.hpp"
#include "flowbasis/quadrature.hpp"
#include "support.hpp"

using namespace flowbasis;

namespace {

struct Grid {
  double lo, step;
  std::vector<std::vector<double>> values;  // values[k][n] = phi^A_n(lo + k step)
};

Grid augmented_on_grid(const FlowParams& p, int n, double step) {
  const double edge = p.alpha * (1 - 1e-6);
  Grid g{p.beta - edge, step, {}};
  const int m = static_cast<int>(2 * edge / step);
  for (int k = 0; k <= m; ++k) g.values.push_back(evaluate_augmented_basis(p, n - 1, g.lo + k * step));
  return g;
}

Matrix potential_on_grid(const Grid& g, const Potential& v, int n) {
  Matrix m(n, n);
  const std::size_t last = g.values.size() - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    const double w = (k == 0 || k == last ? 0.5 : 1.0) * g.step * v(g.lo + k * g.step);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) += w * g.values[k][i] * g.values[k][j];
  }
  return m;
}

// -1/2 int f_i f_j'' with a three-point second difference on the same grid.
Matrix kinetic_on_grid(const Grid& g, int n) {
  Matrix m(n, n);
  const double h2 = g.step * g.step;
  for (std::size_t k = 1; k + 1 < g.values.size(); ++k) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double second = (g.values[k + 1][j] - 2 * g.values[k][j] + g.values[k - 1][j]) / h2;
        m(i, j) -= 0.5 * g.step * g.values[k][i] * second;
      }
  }
  return m;
}

const Potential kQuartic({0.0, 0.0, 0.0, 0.0, 0.25}, "quartic: 0.25*x^4");

}  // namespace

TEST_SUITE("galerkin") {
  TEST_CASE("harmonic potential matrix") {
    const auto m = potential_matrix(BasisSpec(4), gauss_hermite_rule(20), Potential::harmonic());
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double expected = 0.0;
        if (i == j) expected = i / 2.0 + 0.25;
        if (j == i + 2) expected = std::sqrt((i + 1.0) * (i + 2.0)) / 4;
        if (i == j + 2) expected = std::sqrt((j + 1.0) * (j + 2.0)) / 4;
        CHECK(std::abs(m(i, j) - expected) < 1e-14);
      }
  }

  TEST_CASE("quartic ground-state element") {
    const auto m = potential_matrix(BasisSpec(3), gauss_hermite_rule(20), kQuartic);
    CHECK(std::abs(m(0, 0) - 3.0 / 16) < 1e-14);
  }

  TEST_CASE("kinetic ground-state element") {
    const auto t = kinetic_matrix(BasisSpec(3), gauss_hermite_rule(20));
    CHECK(std::abs(t(0, 0) - 0.25) < 1e-14);
    CHECK(t.max_asymmetry() < 1e-14);
  }

  TEST_CASE("harmonic oscillator spectrum") {
    const auto h = assemble_hamiltonian(BasisSpec(10), gauss_hermite_rule(40), Potential::harmonic());
    CHECK(h.scheme == Scheme::hermite);
    for (int n = 0; n < 10; ++n) CHECK(std::abs(h.entries(n, n) - (n + 0.5)) < 1e-12);
    const auto s = eigh(h.entries);
    for (int n = 0; n < 10; ++n) CHECK(std::abs(s.eigenvalues[n] - (n + 0.5)) < 1e-8);
  }

  TEST_CASE("identity flow reduces to the plain scheme") {
    const auto rule = gauss_hermite_rule(90);
    const FlowParams id = initialize_flow(128, 1, 1.05 * rule.max_abs_node(), 0.0, 0.97, 5);
    const BasisSpec spec(20);
    const auto v = Potential::anharmonic();
    const auto plain = assemble_hamiltonian(spec, rule, v);
    const auto aug = assemble_hamiltonian(spec, rule, v, id);
    CHECK(aug.scheme == Scheme::augmented);
    CHECK((aug.entries - plain.entries).max_abs() <= 1e-14);
    CHECK((potential_matrix(spec, rule, v, id) - potential_matrix(spec, rule, v)).max_abs() <= 1e-14);
    CHECK((kinetic_matrix(spec, rule, id) - kinetic_matrix(spec, rule)).max_abs() <= 1e-14);
  }

  TEST_CASE("anharmonic trace bound") {
    const auto h = assemble_hamiltonian(BasisSpec(30), gauss_hermite_rule(90), Potential::anharmonic());
    double harmonic_sum = 0.0;
    for (int n = 0; n < 30; ++n) harmonic_sum += n + 0.5;
    CHECK(std::isfinite(h.trace()));
    CHECK(h.trace() >= harmonic_sum);
    double eig_sum = 0.0;
    for (double e : eigh(h.entries).eigenvalues) eig_sum += e;
    CHECK(std::abs(eig_sum - h.trace()) < 1e-10 * h.trace());
  }

  TEST_CASE("potential matrix against grid integration") {
    const auto rule = gauss_hermite_rule(90);
    const auto v = Potential::anharmonic();
    for (int draw = 0; draw < 5; ++draw) {
      const int n = 4 + draw;
      const FlowParams p = testing::random_flow(40 + draw, 16, 1, 1.05 * rule.max_abs_node(), 0.05 * draw, 1.5);
      const Grid g = augmented_on_grid(p, n, 2e-3);
      const Matrix oracle = potential_on_grid(g, v, n);
      const Matrix m = potential_matrix(BasisSpec(n), rule, v, p);
      INFO("draw " << draw);
      CHECK((m - oracle).max_abs() <= 1e-6);
    }
  }

  TEST_CASE("kinetic matrix against second differences on a grid") {
    const auto rule = gauss_hermite_rule(90);
    for (int draw = 0; draw < 3; ++draw) {
      const int n = 6;
      const FlowParams p = testing::random_flow(60 + draw, 16, 1, 1.05 * rule.max_abs_node(), -0.1, 1.5);
      const Grid g = augmented_on_grid(p, n, 1e-3);
      const Matrix oracle = kinetic_on_grid(g, n);
      const Matrix t = kinetic_matrix(BasisSpec(n), rule, p);
      INFO("draw " << draw);
      CHECK((t - oracle).max_abs() <= 1e-5);
    }
  }

  TEST_CASE("overlap") {
    testing::QuietWarnings quiet;
    CHECK(overlap_matrix(BasisSpec(10), gauss_hermite_rule(12)).max_deviation < 1e-10);
    CHECK(overlap_matrix(BasisSpec(30), gauss_hermite_rule(90)).max_deviation < 1e-10);
    const auto coarse = overlap_matrix(BasisSpec(20), gauss_hermite_rule(10));
    CHECK(coarse.max_deviation > 1e-3);
    const auto rule = gauss_hermite_rule(90);
    const FlowParams p = testing::random_flow(70, 16, 1, 1.05 * rule.max_abs_node(), 0.0, 1.5);
    CHECK(overlap_matrix(BasisSpec(30), rule, p).max_deviation < 1e-8);
  }

  TEST_CASE("resolution warning") {
    std::vector<std::string> messages;
    set_warning_handler([&](std::string_view m) { messages.emplace_back(m); });
    assemble_hamiltonian(BasisSpec(20), gauss_hermite_rule(50), Potential::harmonic());
    CHECK(messages.empty());
    assemble_hamiltonian(BasisSpec(20), gauss_hermite_rule(49), Potential::harmonic());
    CHECK(messages.size() == 1);
    set_warning_handler(nullptr);
  }

  TEST_CASE("non-monotone flow is rejected") {
    FlowParams p = identity_flow(1, 1, 12.0, 0.0);
    p.blocks[0].w_in = {4.0};
    p.blocks[0].w_out = {-4.0};
    const auto rule = gauss_hermite_rule(30);
    CHECK_THROWS_AS(assemble_hamiltonian(BasisSpec(4), rule, Potential::harmonic(), p), AssemblyError);
  }

  TEST_CASE("non-finite potential names the node") {
    const Potential huge({0.0, 0.0, 1e308}, "huge");
    try {
      potential_matrix(BasisSpec(3), gauss_hermite_rule(30), huge);
      FAIL("expected NumericError");
    } catch (const NumericError& e) {
      CHECK(std::string(e.what()).find("node") != std::string::npos);
    }
  }

  TEST_CASE("scheme names") {
    CHECK(to_string(Scheme::hermite) == "hermite");
    CHECK(parse_scheme("augmented") == Scheme::augmented);
    CHECK_THROWS_AS(parse_scheme("spline"), ArgumentError);
  }

  TEST_CASE("potential descriptors") {
    CHECK(Potential::parse("harmonic")(2.0) == 2.0);
    CHECK(Potential::parse("anharmonic")(2.0) == 6.0);
    CHECK(Potential::parse("poly:1,0,3")(2.0) == 13.0);
    CHECK_THROWS_AS(Potential::parse("poly:1,x"), ArgumentError);
    CHECK_THROWS_AS(Potential::parse("morse"), ArgumentError);
  }
}
