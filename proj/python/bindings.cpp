#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "feller/battery.hpp"
#include "feller/catalog.hpp"
#include "feller/cli.hpp"
#include "feller/inversion.hpp"
#include "feller/linalg.hpp"
#include "feller/report.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace feller;

namespace {

GridFunction as_function(const OperatorFamily& fam, const Vector& v) {
  return GridFunction(fam.space_ptr(), v);
}

Matrix as_columns(const Vector& v) {
  return Matrix(v);
}

py::dict entry_dict(const CatalogEntry& e) {
  py::dict params;
  for (const auto& [k, v] : e.parameters) params[py::str(k)] = v;
  return py::dict("name"_a = e.name, "parameters"_a = params, "expected_feller"_a = e.expected_feller,
                  "notes"_a = e.closed_form_notes);
}

BatteryConfig battery_config(std::optional<std::vector<double>> t_grid,
                             std::optional<std::vector<double>> lambda_grid, double decay_tol,
                             std::uint64_t seed) {
  BatteryConfig cfg;
  if (t_grid) cfg.t_grid = *t_grid;
  if (lambda_grid) cfg.lambda_grid = *lambda_grid;
  cfg.decay_tol = decay_tol;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Markov semigroups, resolvents, inversion series and the Feller battery";

  py::register_exception<CancellationError>(m, "CancellationError", PyExc_ArithmeticError);

  py::class_<OperatorFamily>(m, "OperatorFamily")
      .def_property_readonly("size", [](const OperatorFamily& f) { return f.space().size(); })
      .def_property_readonly("has_exact_resolvent", &OperatorFamily::has_exact_resolvent)
      .def_property_readonly("coordinates",
                             [](const OperatorFamily& f) -> std::optional<std::vector<double>> {
                               if (!f.space().has_coordinates()) return std::nullopt;
                               return f.space().coordinates();
                             })
      .def_property_readonly("boundary_band", [](const OperatorFamily& f) { return f.space().boundary_band(); })
      .def_property_readonly("generator",
                             [](const OperatorFamily& f) -> std::optional<Matrix> {
                               if (!f.generator()) return std::nullopt;
                               return f.generator()->matrix();
                             })
      .def("semigroup",
           [](const OperatorFamily& f, double t, const Vector& v) {
             return Vector(f.semigroup(t, as_columns(v)).col(0));
           },
           "t"_a, "f"_a, "U_t f")
      .def("resolvent",
           [](const OperatorFamily& f, double lambda, const Vector& v) {
             const auto r = f.resolvent(lambda, as_columns(v));
             return py::make_tuple(Vector(r.value.col(0)), r.error_estimate);
           },
           "lam"_a, "f"_a, "(R_lambda f, error estimate); the estimate is 0 for exact solves")
      .def("resolvent_quadrature",
           [](const OperatorFamily& f, double lambda, const Vector& v, double t_max, int n_nodes) {
             const auto r = resolvent_apply_quadrature(f, lambda, as_function(f, v), t_max, n_nodes);
             return py::make_tuple(Vector(r.value.values()), r.error_estimate);
           },
           "lam"_a, "f"_a, "t_max"_a = 0.0, "n_nodes"_a = 0)
      .def("__repr__", [](const OperatorFamily& f) {
        return "<OperatorFamily " + f.space().summary() +
               (f.has_exact_resolvent() ? " generator>" : " kernel>");
      });

  m.def("catalog", [] {
    py::list out;
    for (const auto& e : catalog_entries()) out.append(entry_dict(e));
    return out;
  });
  m.def("build",
        [](const std::string& name, std::optional<std::size_t> n, std::optional<double> L,
           std::optional<double> h) { return build_process(name, {n, L, h}).family; },
        "name"_a, "n"_a = py::none(), "L"_a = py::none(), "h"_a = py::none());
  m.def("two_state", &make_two_state, "a"_a, "b"_a);
  m.def("birth_death", &make_birth_death, "n"_a, "birth"_a = 1.0, "death"_a = 1.0);
  m.def("killed_chain", &make_killed_chain, "n"_a, "kill_rate"_a = 0.5);
  m.def("heat_kernel", &make_heat_kernel, "L"_a = 10.0, "h"_a = 0.05);
  m.def("non_feller_drift", &make_non_feller_drift, "L"_a = 10.0, "h"_a = 0.01);
  m.def("from_generator",
        [](const Matrix& q) {
          return OperatorFamily(share(StateSpace::finite(static_cast<std::size_t>(q.rows()))), Generator(q));
        },
        "Q"_a);

  m.def("expm", &expm, "A"_a);

  m.def("invert",
        [](const OperatorFamily& fam, const Vector& f, double lambda, double t, double term_tol,
           const std::string& summation, int max_terms) {
          InversionConfig cfg;
          cfg.lambda = lambda;
          cfg.t = t;
          cfg.term_tol = term_tol;
          cfg.summation = parse_summation(summation);
          cfg.max_terms = max_terms;
          const auto r = inversion_apply(fam, cfg, as_function(fam, f));
          return py::dict("value"_a = Vector(r.value.values()), "terms_used"_a = r.terms_used,
                          "cancellation_magnitude"_a = r.cancellation_magnitude,
                          "tail_bound"_a = r.tail_bound);
        },
        "fam"_a, "f"_a, "lam"_a, "t"_a, "term_tol"_a = 1e-12, "summation"_a = "compensated",
        "max_terms"_a = 400);

  m.def("inversion_sweep",
        [](const OperatorFamily& fam, double t, const Vector& f, const std::vector<double>& lambdas) {
          py::list out;
          for (const auto& s : inversion_convergence_sweep(fam, t, as_function(fam, f), lambdas))
            out.append(py::dict("lambda"_a = s.lambda, "sup_error"_a = s.sup_error,
                                "terms_used"_a = s.terms_used,
                                "cancellation_magnitude"_a = s.cancellation_magnitude,
                                "tail_bound"_a = s.tail_bound));
          return out;
        },
        "fam"_a, "t"_a, "f"_a, "lambdas"_a);

  m.def("battery_json",
        [](const OperatorFamily& fam, std::optional<std::vector<double>> t_grid,
           std::optional<std::vector<double>> lambda_grid, double decay_tol, std::uint64_t seed) {
          FellerReport rep;
          {
            py::gil_scoped_release release;
            rep = run_battery(fam, battery_config(t_grid, lambda_grid, decay_tol, seed));
          }
          return dump_json(report_to_json(rep));
        },
        "fam"_a, "t_grid"_a = py::none(), "lambda_grid"_a = py::none(), "decay_tol"_a = 1e-3,
        "seed"_a = 42);

  m.def("check_json",
        [](const std::string& name, std::optional<std::size_t> n, std::optional<double> L,
           std::optional<double> h, std::uint64_t seed) {
          FellerReport rep;
          {
            py::gil_scoped_release release;
            const Process p = build_process(name, {n, L, h});
            BatteryConfig cfg;
            cfg.seed = seed;
            rep = run_battery(p.family, cfg);
            rep.process = p.entry.name;
            rep.parameters = p.entry.parameters;
            set_expected(rep, p.entry.expected_feller);
          }
          return dump_json(report_to_json(rep));
        },
        "name"_a, "n"_a = py::none(), "L"_a = py::none(), "h"_a = py::none(), "seed"_a = 42);

  m.def("cli",
        [](const std::vector<std::string>& args) {
          std::vector<const char*> argv = {"feller-kit"};
          for (const auto& a : args) argv.push_back(a.c_str());
          std::ostringstream out, err;
          const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        "args"_a, "Runs the command line tool in-process; returns (exit code, stdout, stderr)");
}
