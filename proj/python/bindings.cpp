#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>

#include "psr/conv_scale.hpp"
#include "psr/errors.hpp"
#include "psr/mc_oracle.hpp"
#include "psr/process_json.hpp"
#include "psr/psr_exit.hpp"
#include "psr/scale_fn.hpp"
#include "psr/total_resetting.hpp"

namespace py = pybind11;
using namespace psr;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ExitQuery make_query(const ProcessSpec& spec, Side side, double q, double lambda, double p,
                     double b, double a, double x) {
  return {spec, q, lambda, p, b, a, x, side};
}

}  // namespace

PYBIND11_MODULE(_psr, m) {
  m.doc() = "Exit identities for spectrally negative Levy processes with partial resetting";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::enum_<Family>(m, "Family")
      .value("BrownianDrift", Family::BrownianDrift)
      .value("CramerLundbergExp", Family::CramerLundbergExp);

  py::class_<ProcessSpec>(m, "ProcessSpec")
      .def_static("brownian", &ProcessSpec::brownian, py::arg("mu"), py::arg("sigma"))
      .def_static("cramer_lundberg", &ProcessSpec::cramer_lundberg, py::arg("c"), py::arg("eta"),
                  py::arg("jump_mean_inv"))
      .def_static("from_json",
                  [](const std::string& text) { return spec_from_json(nlohmann::json::parse(text)); })
      .def_static("load", &load_spec, py::arg("path"))
      .def("to_json", [](const ProcessSpec& s) { return spec_to_json(s).dump(); })
      .def_readonly("family", &ProcessSpec::family)
      .def_readonly("mu", &ProcessSpec::mu)
      .def_readonly("sigma", &ProcessSpec::sigma)
      .def_readonly("c", &ProcessSpec::c)
      .def_readonly("eta", &ProcessSpec::eta)
      .def_readonly("jump_mean_inv", &ProcessSpec::jump_mean_inv)
      .def("__eq__", [](const ProcessSpec& a, const ProcessSpec& b) { return a == b; })
      .def("__repr__", [](const ProcessSpec& s) { return "ProcessSpec(" + spec_to_json(s).dump() + ")"; });

  m.def("laplace_exponent", &laplace_exponent, py::arg("spec"), py::arg("theta"));
  m.def("phi", &phi, py::arg("spec"), py::arg("q"));
  m.def("W", [](const ProcessSpec& s, double q, double x) { return ScaleContext(s, q).W(x); },
        py::arg("spec"), py::arg("q"), py::arg("x"));
  m.def("Z", [](const ProcessSpec& s, double q, double x) { return ScaleContext(s, q).Z(x); },
        py::arg("spec"), py::arg("q"), py::arg("x"));
  m.def("Z_biv",
        [](const ProcessSpec& s, double q, double x, double theta) {
          return ScaleContext(s, q).Z_biv(x, theta);
        },
        py::arg("spec"), py::arg("q"), py::arg("x"), py::arg("theta"));
  m.def("classical_exit_up",
        [](const ProcessSpec& s, double q, double b, double a, double x) {
          return classical_exit_up(ScaleContext(s, q), b, a, x);
        },
        py::arg("spec"), py::arg("q"), py::arg("b"), py::arg("a"), py::arg("x"));
  m.def("classical_exit_down",
        [](const ProcessSpec& s, double q, double b, double a, double x) {
          return classical_exit_down(ScaleContext(s, q), b, a, x);
        },
        py::arg("spec"), py::arg("q"), py::arg("b"), py::arg("a"), py::arg("x"));

  py::enum_<Side>(m, "Side")
      .value("UpTwoSided", Side::UpTwoSided)
      .value("DownTwoSided", Side::DownTwoSided)
      .value("UpOneSided", Side::UpOneSided)
      .value("DownOneSided", Side::DownOneSided);
  py::enum_<Region>(m, "Region")
      .value("PosPos", Region::PosPos)
      .value("PosNeg", Region::PosNeg)
      .value("NegNeg", Region::NegNeg);
  py::enum_<Method>(m, "Method").value("Resolvent", Method::Resolvent).value("Direct", Method::Direct);

  py::class_<ExitValue>(m, "ExitValue")
      .def_readonly("value", &ExitValue::value)
      .def_readonly("correction", &ExitValue::correction)
      .def_readonly("solver_residual", &ExitValue::solver_residual)
      .def_readonly("region", &ExitValue::region)
      .def_readonly("iterations", &ExitValue::iterations)
      .def_readonly("contraction_bound", &ExitValue::contraction_bound)
      .def_readonly("observed_factor", &ExitValue::observed_factor)
      .def("__float__", [](const ExitValue& v) { return v.value; });

  m.def("region_of", &region_of, py::arg("b"), py::arg("a"));
  m.def(
      "exit_value",
      [](const ProcessSpec& s, Side side, double q, double lambda, double p, double b, double a,
         double x, Method method, int grid_points) {
        PsrOptions opts;
        opts.method = method;
        opts.solve.grid_points = grid_points;
        return evaluate_exit(make_query(s, side, q, lambda, p, b, a, x), opts);
      },
      py::arg("spec"), py::arg("side"), py::arg("q"), py::arg("lam"), py::arg("p"),
      py::arg("b") = -kInf, py::arg("a") = kInf, py::arg("x"), py::arg("method") = Method::Resolvent,
      py::arg("grid_points") = SolveConfig{}.grid_points);

  m.def("total_exit_up",
        [](const ProcessSpec& s, double q, double lambda, double b, double a, double x) {
          return total_exit_up({s, q, lambda, b, a}, x);
        },
        py::arg("spec"), py::arg("q"), py::arg("lam"), py::arg("b"), py::arg("a"), py::arg("x"));
  m.def("total_exit_down",
        [](const ProcessSpec& s, double q, double lambda, double b, double a, double x) {
          return total_exit_down({s, q, lambda, b, a}, x);
        },
        py::arg("spec"), py::arg("q"), py::arg("lam"), py::arg("b"), py::arg("a"), py::arg("x"));
  m.def("total_exit_one_sided_up", &total_exit_one_sided_up, py::arg("spec"), py::arg("q"),
        py::arg("lam"), py::arg("a"), py::arg("x"));
  m.def("total_exit_one_sided_down",
        [](const ProcessSpec& s, double q, double lambda, double b, double x) {
          return total_exit_one_sided_down(s, q, lambda, b, x);
        },
        py::arg("spec"), py::arg("q"), py::arg("lam"), py::arg("b"), py::arg("x"));

  m.def("conv_exit_up",
        [](const ProcessSpec& s, double q, double lambda, double p, double b, double a, double x) {
          return conv_exit_up(s, q, lambda, p, b, a, x);
        },
        py::arg("spec"), py::arg("q"), py::arg("lam"), py::arg("p"), py::arg("b"), py::arg("a"),
        py::arg("x"));
  m.def("conv_exit_down",
        [](const ProcessSpec& s, double q, double lambda, double p, double b, double a, double x) {
          return conv_exit_down(s, q, lambda, p, b, a, x);
        },
        py::arg("spec"), py::arg("q"), py::arg("lam"), py::arg("p"), py::arg("b"), py::arg("a"),
        py::arg("x"));

  py::class_<MCEstimate>(m, "MCEstimate")
      .def_readonly("mean", &MCEstimate::mean)
      .def_readonly("std_error", &MCEstimate::std_error)
      .def_readonly("n", &MCEstimate::n)
      .def_property_readonly("bias_note", [](const MCEstimate& e) { return bias_note_name(e.bias_note); });

  m.def(
      "simulate_exit",
      [](const ProcessSpec& s, Side side, double q, double lambda, double p, double b, double a,
         double x, std::int64_t n_paths, std::uint64_t seed, double dt) {
        SimConfig cfg;
        cfg.n_paths = n_paths;
        cfg.seed = seed;
        cfg.dt = dt;
        py::gil_scoped_release release;
        return simulate_exit(make_query(s, side, q, lambda, p, b, a, x), cfg);
      },
      py::arg("spec"), py::arg("side"), py::arg("q"), py::arg("lam"), py::arg("p"),
      py::arg("b") = -kInf, py::arg("a") = kInf, py::arg("x"), py::arg("n_paths") = 100000,
      py::arg("seed") = SimConfig{}.seed, py::arg("dt") = SimConfig{}.dt);

  m.def(
      "simulate_path",
      [](const ProcessSpec& s, double lambda, double p, double x, double horizon, std::uint64_t seed,
         double dt) {
        SimConfig cfg;
        cfg.seed = seed;
        cfg.dt = dt;
        std::vector<std::tuple<double, double, std::string>> rows;
        for (const auto& e : simulate_path(s, lambda, p, x, horizon, cfg))
          rows.emplace_back(e.t, e.u, event_name(e.kind));
        return rows;
      },
      py::arg("spec"), py::arg("lam"), py::arg("p"), py::arg("x"), py::arg("horizon"),
      py::arg("seed") = SimConfig{}.seed, py::arg("dt") = SimConfig{}.dt);
}
