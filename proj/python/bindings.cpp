#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "flowbasis/analysis.hpp"
#include "flowbasis/eigensolver.hpp"
#include "flowbasis/errors.hpp"
#include "flowbasis/flow.hpp"
#include "flowbasis/galerkin.hpp"
#include "flowbasis/hermite.hpp"
#include "flowbasis/potential.hpp"
#include "flowbasis/quadrature.hpp"
#include "flowbasis/trainer.hpp"

namespace py = pybind11;
using namespace flowbasis;

namespace {

py::array_t<double> to_numpy(const Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) view(i, j) = m(i, j);
  return out;
}

Matrix from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw ArgumentError("expected a 2-D array");
  Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  auto view = a.unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = view(i, j);
  return m;
}

HamiltonianMatrix assemble(int basis_size, const QuadratureRule& rule, const Potential& v,
                           const std::optional<FlowParams>& flow) {
  const BasisSpec spec(basis_size);
  return flow ? assemble_hamiltonian(spec, rule, v, *flow) : assemble_hamiltonian(spec, rule, v);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hermite and flow-augmented Hermite Galerkin solvers for 1D Schroedinger problems";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<AssemblyError>(m, "AssemblyError", base.ptr());

  m.def("hermite_functions", py::overload_cast<int, double>(&hermite_functions), py::arg("n_max"),
        py::arg("x"));
  m.def("hermite_derivatives", &hermite_derivatives, py::arg("n_max"), py::arg("x"));

  py::class_<QuadratureRule>(m, "QuadratureRule")
      .def_readonly("order", &QuadratureRule::order)
      .def_readonly("nodes", &QuadratureRule::nodes)
      .def_readonly("weights", &QuadratureRule::weights)
      .def_readonly("lifted_weights", &QuadratureRule::lifted_weights)
      .def("max_abs_node", &QuadratureRule::max_abs_node);
  m.def("gauss_hermite_rule", &gauss_hermite_rule, py::arg("order"));

  py::class_<Potential>(m, "Potential")
      .def(py::init<std::vector<double>, std::string>(), py::arg("coefficients"), py::arg("descriptor"))
      .def_static("harmonic", &Potential::harmonic)
      .def_static("anharmonic", &Potential::anharmonic)
      .def_static("parse", &Potential::parse, py::arg("descriptor"))
      .def("__call__", [](const Potential& p, double x) { return p(x); })
      .def_property_readonly("descriptor", &Potential::descriptor);

  py::class_<FlowParams>(m, "FlowParams")
      .def_readwrite("alpha", &FlowParams::alpha)
      .def_readwrite("beta", &FlowParams::beta)
      .def_readonly("lipschitz_margin", &FlowParams::lipschitz_margin)
      .def_property_readonly("hidden", &FlowParams::hidden)
      .def_property_readonly("blocks", [](const FlowParams& p) { return p.blocks.size(); })
      .def("parameter_count", &FlowParams::parameter_count)
      .def("flatten", [](const FlowParams& p) { return flatten(p); });
  m.def("identity_flow", &identity_flow, py::arg("hidden"), py::arg("blocks"), py::arg("alpha"),
        py::arg("beta"), py::arg("lipschitz_margin") = kDefaultLipschitzMargin);
  m.def("initialize_flow", &initialize_flow, py::arg("hidden"), py::arg("blocks"), py::arg("alpha"),
        py::arg("beta"), py::arg("lipschitz_margin"), py::arg("seed"));
  m.def("flow_forward", &flow_forward, py::arg("params"), py::arg("x"));
  m.def("flow_inverse", &flow_inverse, py::arg("params"), py::arg("y"), py::arg("tol") = 1e-14,
        py::arg("max_iter") = 10000);
  m.def(
      "flow_jet",
      [](const FlowParams& p, double x) {
        const auto j = flow_jet(p, x);
        return py::make_tuple(j.value, j.d1, j.d2);
      },
      py::arg("params"), py::arg("x"));
  m.def("evaluate_augmented_basis", &evaluate_augmented_basis, py::arg("params"), py::arg("n_max"),
        py::arg("x"));

  m.def(
      "assemble_hamiltonian",
      [](int n, const QuadratureRule& rule, const Potential& v, const std::optional<FlowParams>& flow) {
        return to_numpy(assemble(n, rule, v, flow).entries);
      },
      py::arg("basis_size"), py::arg("rule"), py::arg("potential"), py::arg("flow") = py::none());
  m.def(
      "eigh",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
        const auto s = eigh(from_numpy(a));
        return py::make_tuple(s.eigenvalues, to_numpy(s.eigenvectors));
      },
      py::arg("matrix"));

  py::class_<TrainingConfig>(m, "TrainingConfig")
      .def(py::init<>())
      .def_readwrite("basis_size", &TrainingConfig::basis_size)
      .def_readwrite("quadrature_order", &TrainingConfig::quadrature_order)
      .def_readwrite("hidden", &TrainingConfig::hidden)
      .def_readwrite("blocks", &TrainingConfig::blocks)
      .def_readwrite("learning_rate", &TrainingConfig::learning_rate)
      .def_readwrite("iterations", &TrainingConfig::iterations)
      .def_readwrite("seed", &TrainingConfig::seed)
      .def_readwrite("lipschitz_margin", &TrainingConfig::lipschitz_margin);

  py::class_<TrainingResult>(m, "TrainingResult")
      .def_readonly("params", &TrainingResult::params)
      .def_readonly("final_loss", &TrainingResult::final_loss)
      .def_readonly("aborted", &TrainingResult::aborted)
      .def_readonly("abort_reason", &TrainingResult::abort_reason)
      .def_property_readonly("loss", [](const TrainingResult& r) { return r.trace.loss; })
      .def_property_readonly("grad_norm", [](const TrainingResult& r) { return r.trace.grad_norm; });

  m.def("initial_flow", &initial_flow, py::arg("config"));
  m.def("trace_loss", &trace_loss, py::arg("config"), py::arg("flow"), py::arg("potential"));
  m.def("train", &train, py::arg("config"), py::arg("potential"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "solve",
      [](const std::string& scheme, const TrainingConfig& config, const Potential& v) {
        SolveResult r;
        {
          py::gil_scoped_release release;
          r = solve(parse_scheme(scheme), config, v);
        }
        py::dict out;
        out["eigenvalues"] = r.spectrum.eigenvalues;
        out["trace"] = r.hamiltonian.trace();
        out["hamiltonian"] = to_numpy(r.hamiltonian.entries);
        if (r.training) out["training"] = *r.training;
        return out;
      },
      py::arg("scheme"), py::arg("config"), py::arg("potential"));

  m.def(
      "band_sums",
      [](const std::vector<double>& e, int band_size) { return band_sums(e, band_size); },
      py::arg("eigenvalues"), py::arg("band_size"));
  m.def(
      "q_sequence", [](const std::vector<double>& x, double x_star) { return q_sequence(x, x_star); },
      py::arg("x"), py::arg("x_star"));
  m.def(
      "linear_fit",
      [](const std::vector<double>& xs, const std::vector<double>& ys) {
        const auto f = linear_fit(xs, ys);
        return py::make_tuple(f.slope, f.intercept);
      },
      py::arg("xs"), py::arg("ys"));
}
