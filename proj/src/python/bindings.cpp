#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mbpi/asymptotics.hpp"
#include "mbpi/cli.hpp"
#include "mbpi/errors.hpp"
#include "mbpi/invariants.hpp"
#include "mbpi/kernel.hpp"
#include "mbpi/laws.hpp"
#include "mbpi/sim.hpp"

namespace py = pybind11;
using namespace mbpi;

namespace {

template <class Law>
void bind_law(py::module_& m, const char* name) {
  py::class_<Law>(m, name)
      .def_property_readonly("coefficients",
                             [](const Law& l) { return std::vector<double>(l.coefficients().begin(), l.coefficients().end()); })
      .def_property_readonly("index", &Law::index)
      .def_property_readonly("truncation_order", &Law::truncation_order)
      .def_property_readonly("tail_bound", &Law::tail_bound)
      .def("__call__", [](const Law& l, cplx z) { return l.eval(z); }, py::arg("z"))
      .def("to_text", [](const Law& l) { return to_text(l); })
      .def("validate", [](const Law& l) { return validate_law(l).ok(); });
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Critical Markov branching processes with immigration";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  bind_law<BranchingLaw>(m, "BranchingLaw");
  bind_law<ImmigrationLaw>(m, "ImmigrationLaw");
  m.def("make_stable_offspring", &make_stable_offspring, py::arg("nu"), py::arg("c"), py::arg("kappa") = 0.0,
        py::arg("J") = kDefaultTruncation);
  m.def("make_stable_immigration", &make_stable_immigration, py::arg("delta"), py::arg("d"), py::arg("kappa") = 0.0,
        py::arg("J") = kDefaultTruncation);

  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init([](const BranchingLaw& a, const ImmigrationLaw& b, bool series) {
             return ModelSpec(a, b, series ? EvalMode::kSeries : EvalMode::kAuto);
           }),
           py::arg("offspring"), py::arg("immigration"), py::arg("series") = false)
      .def_property_readonly("nu", &ModelSpec::nu)
      .def_property_readonly("delta", &ModelSpec::delta)
      .def_property_readonly("gamma", &ModelSpec::gamma)
      .def_property_readonly("mu", &ModelSpec::mu)
      .def("f", &ModelSpec::f)
      .def("g", &ModelSpec::g)
      .def("__repr__", [](const ModelSpec& s) { return "ModelSpec(" + s.describe() + ")"; });

  m.def("compute_F", [](const ModelSpec& s, double t, cplx z) { return solve_F(s, t, z).F; }, py::arg("model"),
        py::arg("t"), py::arg("s"));
  m.def("compute_P", [](const ModelSpec& s, double t, cplx z, int i) { return compute_P_i(s, i, t, z).P; },
        py::arg("model"), py::arg("t"), py::arg("s"), py::arg("i") = 0);
  m.def(
      "transition_probs",
      [](const ModelSpec& s, int i, double t, int j_out, double radius, int samples) {
        return transition_probs(s, i, t, InversionSettings{j_out, radius, samples}).values;
      },
      py::arg("model"), py::arg("i"), py::arg("t"), py::arg("j_out") = 64, py::arg("radius") = 0.9,
      py::arg("samples") = 1024);

  m.def("compute_U", &compute_U, py::arg("model"), py::arg("s"), py::arg("rel_tol") = 1e-12);
  m.def("compute_B", &compute_B, py::arg("model"), py::arg("s"), py::arg("rel_tol") = 1e-12);
  m.def("compute_pi", &compute_pi, py::arg("model"), py::arg("s"), py::arg("rel_tol") = 1e-12);
  m.def(
      "invariant_measure",
      [](const ModelSpec& s, int j_out, double radius, int samples) {
        const auto kind = s.gamma() > 0.0 ? MeasureKind::kDistributionU : MeasureKind::kMeasurePi;
        return extract_measure(s, kind, InversionSettings{j_out, radius, samples, 1e-8, false}).coefficients;
      },
      py::arg("model"), py::arg("j_out") = 64, py::arg("radius") = 0.9, py::arg("samples") = 4096);

  m.def(
      "rate_slope",
      [](const ModelSpec& s, double t_min, double t_max, int per_decade) {
        const auto grid = log_grid(t_min, t_max, per_decade);
        const auto fit = s.gamma() > 0.0 ? rate_theorem1(s, 0.0, grid) : rate_theorem2(s, 0.0, grid);
        return py::make_tuple(fit.fitted_slope, fit.predicted_slope, fit.r_squared);
      },
      py::arg("model"), py::arg("t_min") = 1e2, py::arg("t_max") = 1e6, py::arg("per_decade") = 4);

  m.def(
      "simulate_pmf",
      [](const ModelSpec& s, int i, double t, long replicates, std::uint64_t seed, int threads) {
        const auto r = estimate_pmf(s, SimConfig{i, t, replicates, seed}, threads);
        return py::make_tuple(r.pmf, r.se);
      },
      py::arg("model"), py::arg("i"), py::arg("t"), py::arg("replicates"), py::arg("seed") = 1,
      py::arg("threads") = 1);

  m.def("list_families", &list_families);
  m.def(
      "run",
      [](const std::string& config, const std::string& out_dir) {
        std::ostringstream out, err;
        RunOptions opts;
        opts.out_dir = out_dir;
        const int code = run_experiment(config, opts, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("config"), py::arg("out_dir"));
  m.attr("__version__") = "0.1.0";
}
