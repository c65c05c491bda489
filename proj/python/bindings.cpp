#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pklap/analysis.hpp"
#include "pklap/builtins.hpp"
#include "pklap/cli.hpp"
#include "pklap/functional.hpp"
#include "pklap/operators.hpp"
#include "pklap/solvers.hpp"

namespace py = pybind11;
using namespace pklap;

namespace {

// Sequences cross the boundary as flat vectors of length m*n, k-major.
PeriodicSequence as_sequence(const Problem& prob, const Vec& flat) {
  return PeriodicSequence(prob.m(), prob.n(), flat);
}

Problem make_problem(const std::vector<double>& p, const Builtin& b, double lambda) {
  return Problem(ExponentFunction(p), b.nonlinearity, lambda);
}

py::dict record_dict(const SolutionRecord& r) {
  py::dict d;
  d["u"] = r.u.flat();
  d["residual_norm"] = r.residual_norm;
  d["J_m"] = r.action_value;
  d["morse_index"] = r.morse_index;
  d["in_Y"] = r.in_Y;
  d["classification"] = to_string(r.classification);
  d["regularized"] = r.regularized;
  return d;
}

py::dict report_dict(const CheckReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["verdict"] = to_string(r.verdict);
  d["samples"] = r.samples;
  d["margin"] = r.margin;
  d["detail"] = r.detail;
  return d;
}

}  // namespace

PYBIND11_MODULE(_pklap, m) {
  m.doc() = "Periodic solutions of anisotropic discrete p(k)-Laplacian problems";

  py::class_<Builtin>(m, "Builtin")
      .def_readonly("name", &Builtin::name)
      .def_property_readonly("period", [](const Builtin& b) { return b.nonlinearity.period(); })
      .def("F", [](const Builtin& b, int k, double u1, double u2) {
        return b.nonlinearity.F(k, Vec::Constant(1, u1), Vec::Constant(1, u2));
      });

  m.def("builtin", &make_builtin, py::arg("name"), py::arg("m"),
        "Built-in nonlinearity by name: example1, example2 or example3.");
  m.def(
      "power",
      [](int period, double a, double b, double s, double r) {
        return make_power(period, a, b, PeriodicFunction(std::vector<double>(period, s)),
                          PeriodicFunction(std::vector<double>(period, r)));
      },
      py::arg("m"), py::arg("a"), py::arg("b"), py::arg("s"), py::arg("r"));

  py::class_<Problem>(m, "Problem")
      .def(py::init(&make_problem), py::arg("p"), py::arg("nonlinearity"), py::arg("lam"))
      .def_property_readonly("m", &Problem::m)
      .def_property_readonly("n", &Problem::n)
      .def_property_readonly("lam", &Problem::lambda)
      .def("with_lambda", &Problem::with_lambda);

  m.def("residual", [](const Problem& prob, const Vec& u) {
    return residual(as_sequence(prob, u), prob).values.flat();
  });
  m.def("residual_norm", [](const Problem& prob, const Vec& u) {
    return residual(as_sequence(prob, u), prob).norm;
  });
  m.def("action", [](const Problem& prob, const Vec& u) { return action(as_sequence(prob, u), prob); });
  m.def("gradient", [](const Problem& prob, const Vec& u) {
    return gradient(as_sequence(prob, u), prob).flat();
  });
  m.def(
      "gradient_check",
      [](const Problem& prob, int points, double step, std::uint64_t seed) {
        return gradient_check(prob, points, step, seed).max_relative_error;
      },
      py::arg("problem"), py::arg("points") = 100, py::arg("step") = 1e-6, py::arg("seed") = 0);

  m.def("xi_constant", &xi_constant, py::arg("m"), py::arg("n"), py::arg("p_plus"));
  m.def(
      "inequality_suite",
      [](int period, int samples, std::uint64_t seed) {
        py::list out;
        for (const CheckReport& r : inequality_suite(period, 1, samples, seed)) out.append(report_dict(r));
        return out;
      },
      py::arg("m"), py::arg("samples"), py::arg("seed") = 0);
  m.def(
      "anticoercivity_probe",
      [](const Problem& prob, std::uint64_t seed) {
        ProbeOptions options;
        options.seed = seed;
        return report_dict(anticoercivity_probe(prob, options));
      },
      py::arg("problem"), py::arg("seed") = 1);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("starts", &SolverConfig::starts)
      .def_readwrite("max_iterations", &SolverConfig::max_iterations)
      .def_readwrite("residual_tol", &SolverConfig::residual_tol)
      .def_readwrite("dedupe_tol", &SolverConfig::dedupe_tol)
      .def_readwrite("regularization_eps", &SolverConfig::regularization_eps)
      .def_readwrite("seed", &SolverConfig::seed)
      .def_readwrite("start_radius", &SolverConfig::start_radius)
      .def_readwrite("mountain_pass", &SolverConfig::mountain_pass)
      .def_readwrite("test_zero", &SolverConfig::test_zero)
      .def_readwrite("check_symmetry", &SolverConfig::check_symmetry)
      .def_property(
          "subspace", [](const SolverConfig& c) { return to_string(c.subspace); },
          [](SolverConfig& c, const std::string& s) { c.subspace = parse_subspace(s); });

  m.def(
      "newton_solve",
      [](const Problem& prob, const Vec& u0, const SolverConfig& cfg) {
        SolveResult r = newton_solve(prob, as_sequence(prob, u0), cfg);
        py::dict d = record_dict(r.record);
        d["converged"] = r.converged;
        d["iterations"] = r.iterations;
        return d;
      },
      py::arg("problem"), py::arg("u0"), py::arg("config") = SolverConfig{});
  m.def(
      "find_multiple",
      [](const Problem& prob, const SolverConfig& cfg) {
        const SolutionSet set = find_multiple(prob, cfg);
        py::list out;
        for (std::size_t i = 0; i < set.records.size(); ++i) {
          py::dict d = record_dict(set.records[i]);
          d["method"] = to_string(set.provenance[i].method);
          out.append(d);
        }
        return out;
      },
      py::arg("problem"), py::arg("config") = SolverConfig{});
  m.def(
      "lambda_sweep",
      [](const Problem& prob, double lo, double hi, int steps, const SolverConfig& cfg) {
        const SweepResult s = lambda_sweep(prob, geometric_grid(lo, hi, steps), cfg);
        py::dict d;
        d["lambda"] = s.lambda_grid;
        d["count"] = s.counts;
        d["nontrivial_count"] = s.nontrivial_counts;
        d["min_J_m"] = s.min_action;
        py::list intervals;
        for (const LambdaInterval& iv : s.A_estimate) intervals.append(py::make_tuple(iv.lo, iv.hi));
        d["A_estimate"] = intervals;
        return d;
      },
      py::arg("problem"), py::arg("lambda_min"), py::arg("lambda_max"), py::arg("steps"),
      py::arg("config") = SolverConfig{});

  m.def(
      "cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "pklap");
        std::vector<const char*> argv;
        for (const std::string& a : args) argv.push_back(a.c_str());
        return cli::run(static_cast<int>(argv.size()), argv.data());
      },
      py::arg("args"), "Runs the command line front end and returns its exit code.");
}
