#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nontan/certifier.hpp"
#include "nontan/cli.hpp"
#include "nontan/counterexample.hpp"
#include "nontan/errors.hpp"
#include "nontan/oscillatory.hpp"
#include "nontan/schedule.hpp"
#include "nontan/serialize.hpp"

namespace py = pybind11;
using namespace nontan;

namespace {

Schedule make_schedule(int N, int k_max, int dim, const std::string& gamma, double a, double R1, double relax,
                       unsigned bits) {
  ScheduleParams prm;
  prm.gamma = ApproachCurve::parse(gamma);
  prm.dim = dim;
  prm.k_max = k_max;
  prm.radii.N = N;
  prm.radii.R1 = R1;
  prm.radii.relax = relax;
  prm.precision_bits = bits;
  return build_schedule(power_symbol(a), prm);
}

py::dict report_dict(const CertificateReport& rep) {
  py::list rows;
  for (const auto& r : rep.per_k) {
    py::dict d;
    d["k"] = r.k;
    d["diag"] = r.diag;
    d["old_terms"] = r.old_terms;
    d["decay"] = r.decay;
    d["tail"] = r.tail;
    d["L"] = r.L;
    d["dominant"] = r.dominant;
    rows.append(d);
  }
  py::dict out;
  out["pass"] = rep.pass;
  out["c_measured"] = rep.c_measured;
  out["per_k"] = rows;
  out["diagnosis"] = rep.diagnosis;
  return out;
}

}  // namespace

PYBIND11_MODULE(_nontan, m) {
  m.doc() = "Counterexample schedules and certificates (C++ core)";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalRefusal>(m, "NumericalRefusal", PyExc_RuntimeError);

  py::class_<Schedule>(m, "Schedule")
      .def_property_readonly("size", &Schedule::size)
      .def_property_readonly("dim", &Schedule::dim)
      .def("x", &Schedule::x, py::arg("j"))
      .def("t", &Schedule::t_double, py::arg("j"))
      .def("log_inner", [](const Schedule& s, std::size_t j) { return to_decimal(s.log_inner(j)); })
      .def("log_outer", [](const Schedule& s, std::size_t j) { return to_decimal(s.log_outer(j)); })
      .def("to_json", [](const Schedule& s) { return dump_schedule(s, Json::object()); });

  m.def("build_schedule", &make_schedule, py::arg("N") = 4, py::arg("k_max") = 2, py::arg("dim") = 1,
        py::arg("gamma") = "identity", py::arg("a") = 2.0, py::arg("R1") = 3.0, py::arg("relax") = 1.0,
        py::arg("precision_bits") = kDefaultPrecisionBits);
  m.def("load_schedule", [](const std::string& text) { return load_schedule(text); });

  m.def("verify_schedule", [](const Schedule& s) {
    const ScheduleReport rep = verify_schedule(s);
    py::dict margins;
    for (const auto& c : rep.margins) margins[py::str(c.condition)] = c.margin();
    py::list violations;
    for (const auto& v : rep.violations) violations.append(py::make_tuple(v.condition, v.j, v.l, v.detail));
    py::dict out;
    out["ok"] = rep.ok();
    out["margins"] = margins;
    out["violations"] = violations;
    return out;
  });

  m.def("choose_B", &choose_B, py::arg("p"));
  m.def("choose_B_split", &choose_B_split, py::arg("p"), py::arg("q"));
  m.def("choose_N", &choose_N, py::arg("B"));

  m.def(
      "diag_closed_form",
      [](const Schedule& s, std::size_t k, double p, std::optional<double> B) {
        return diag_closed_form(s, single_spec(s, p, B), k);
      },
      py::arg("schedule"), py::arg("k"), py::arg("p") = 2.0, py::arg("B") = py::none());

  m.def(
      "partial_sum",
      [](const Schedule& s, std::size_t m_, std::size_t k, double p, std::optional<double> B,
         const std::string& mode) {
        const PartialSum ps = partial_sum(s, single_spec(s, p, B), m_, lattice_point(s, k), parse_sum_mode(mode));
        py::list methods;
        for (const auto& r : ps.per_j) methods.append(method_name(r.method));
        py::dict out;
        out["value"] = ps.value;
        out["abs_bound"] = ps.abs_bound();
        out["est_error"] = ps.est_error;
        out["method_per_j"] = methods;
        return out;
      },
      py::arg("schedule"), py::arg("m"), py::arg("k"), py::arg("p") = 2.0, py::arg("B") = py::none(),
      py::arg("mode") = "auto");

  m.def(
      "fl_norm",
      [](const Schedule& s, double p, double sreg, std::optional<double> B) {
        const NormResult r = fl_norm(s, single_spec(s, p, B), sreg);
        py::dict out;
        out["divergent"] = r.divergent;
        out["total_bound"] = r.total_bound;
        out["partial_sum"] = r.partial_sum;
        return out;
      },
      py::arg("schedule"), py::arg("p"), py::arg("s"), py::arg("B") = py::none());

  m.def(
      "divergence_certificate",
      [](const Schedule& s, double p, std::optional<double> B, std::size_t k_lo, std::size_t k_hi, std::size_t m_) {
        CertificateOptions opt;
        opt.k_lo = k_lo;
        opt.k_hi = k_hi;
        opt.m = m_;
        return report_dict(divergence_certificate(s, single_spec(s, p, B), opt));
      },
      py::arg("schedule"), py::arg("p") = 2.0, py::arg("B") = py::none(), py::arg("k_lo") = 1,
      py::arg("k_hi") = 3, py::arg("m") = 8);

  m.def(
      "convergence_contrast",
      [](double p, double sreg, int ladder) {
        const ContrastReport r = convergence_contrast(p, sreg, 0.0, ApproachCurve::identity(), ladder);
        std::vector<double> errors;
        for (const auto& row : r.rows) errors.push_back(row.sup_error);
        py::dict out;
        out["errors"] = errors;
        out["monotone"] = r.monotone;
        out["holder_holds"] = r.holder_holds;
        out["bound"] = r.bound;
        return out;
      },
      py::arg("p") = 2.0, py::arg("s") = 0.6, py::arg("ladder") = 6);

  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
