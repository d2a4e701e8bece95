#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ermakov/error.hpp"
#include "ermakov/liealg.hpp"
#include "ermakov/reduce.hpp"
#include "ermakov/scenario.hpp"
#include "ermakov/superpose.hpp"

namespace py = pybind11;
using namespace ermakov;

namespace {

py::dict trajectory_dict(const Trajectory& tr, const char* pos, const char* rate) {
  std::vector<double> t, x, v;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    t.push_back(tr.time(i));
    x.push_back(tr.value(i, 0));
    v.push_back(tr.value(i, 1));
  }
  py::dict d;
  d["t"] = t;
  d[pos] = x;
  d[rate] = v;
  return d;
}

Expr as_expr(const py::object& o) {
  if (py::isinstance<Expr>(o)) return o.cast<Expr>();
  if (py::isinstance<py::str>(o)) return parse_expr(o.cast<std::string>());
  return Expr::constant(o.cast<double>());
}

}  // namespace

PYBIND11_MODULE(_ermakov, m) {
  m.doc() = "Milne-Pinney reductions, Lie brackets and the Ermakov superposition rule";

  auto base = py::register_exception<Error>(m, "ErmakovError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  auto domain = py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<SingularityError>(m, "SingularityError", domain.ptr());
  py::register_exception<VerificationError>(m, "VerificationError", base.ptr());

  py::class_<Expr>(m, "Expr")
      .def("__call__", &Expr::eval, py::arg("t"))
      .def("eval", &Expr::eval, py::arg("t"))
      .def("derivative", [](const Expr& e) { return derivative(e); })
      .def("depends_on_t", &Expr::depends_on_t)
      .def("__str__", &Expr::to_string)
      .def("__repr__", [](const Expr& e) { return "Expr('" + e.to_string() + "')"; })
      .def("__eq__", [](const Expr& a, const Expr& b) { return a == b; });
  m.def("parse_expr", [](const std::string& s) { return parse_expr(s); }, py::arg("source"));

  py::class_<SecondOrderSystem>(m, "SecondOrderSystem")
      .def(py::init([](const py::object& a, const py::object& b, const py::object& c) {
             return SecondOrderSystem{as_expr(a), as_expr(b), as_expr(c)};
           }),
           py::arg("a"), py::arg("b"), py::arg("c"))
      .def_readonly("a", &SecondOrderSystem::a)
      .def_readonly("b", &SecondOrderSystem::b)
      .def_readonly("c", &SecondOrderSystem::c);

  m.def(
      "named_system",
      [](const std::string& name, const py::object& p, const py::object& q, double k) {
        NamedParams np;
        np.p = as_expr(p);
        np.q = as_expr(q);
        np.k = k;
        return named_system(name, np);
      },
      py::arg("name"), py::arg("p") = "1", py::arg("q") = "1", py::arg("k") = 1.0);

  m.def(
      "integrate",
      [](const SecondOrderSystem& sys, double x0, double v0, double t0, double t1, double step) {
        return trajectory_dict(integrate_system(sys, t0, t1, step, x0, v0), "x", "v");
      },
      py::arg("system"), py::arg("x0"), py::arg("v0"), py::arg("t0"), py::arg("t1"), py::arg("step") = kDefaultStep);

  m.def(
      "reducibility_check",
      [](const SecondOrderSystem& sys, double t0, double t1, std::uint64_t seed) {
        ReducibilityOptions opts;
        opts.seed = seed;
        const ReducibilityReport r = reducibility_check(sys, t0, t1, opts);
        py::dict d;
        d["pass"] = r.pass;
        d["max_residual"] = r.max_residual;
        d["max_residual_at"] = r.max_residual_at;
        d["threshold"] = r.threshold;
        d["symbolic_zero"] = r.symbolic_zero;
        d["residual"] = r.residual_expr;
        d["k"] = r.k ? py::cast(*r.k) : py::none();
        d["alpha"] = r.gauge ? py::cast(r.gauge->alpha) : py::none();
        d["beta"] = r.gauge ? py::cast(r.gauge->beta) : py::none();
        return d;
      },
      py::arg("system"), py::arg("t0"), py::arg("t1"), py::arg("seed") = ReducibilityOptions{}.seed);

  m.def(
      "quasi_lie_transform",
      [](const SecondOrderSystem& sys, const py::object& alpha, const py::object& beta) {
        const TransformedCoefficients tc = quasi_lie_transform(sys, {as_expr(alpha), as_expr(beta)});
        py::dict d;
        d["a"] = tc.a;
        d["b"] = tc.b;
        d["c"] = tc.c;
        d["d"] = tc.d;
        d["e"] = tc.e;
        return d;
      },
      py::arg("system"), py::arg("alpha"), py::arg("beta") = "0");

  m.def(
      "ermakov_invariant",
      [](double x, double xdot, double y, double ydot, double k, double F) {
        return ermakov_invariant({x, xdot}, {y, ydot}, k, F);
      },
      py::arg("x"), py::arg("xdot"), py::arg("y"), py::arg("ydot"), py::arg("k"), py::arg("F") = 0.0);

  m.def(
      "wronskian",
      [](double y, double ydot, double z, double zdot, double F) { return wronskian({y, ydot}, {z, zdot}, F); },
      py::arg("y"), py::arg("ydot"), py::arg("z"), py::arg("zdot"), py::arg("F") = 0.0);

  m.def(
      "superpose",
      [](double y, double z, double I1, double I2, double W, double k, int sign) {
        return superpose(y, z, {I1, I2, W, sign}, k);
      },
      py::arg("y"), py::arg("z"), py::arg("I1"), py::arg("I2"), py::arg("W"), py::arg("k"), py::arg("sign") = 1);

  m.def(
      "general_solution",
      [](const py::object& omega2, double k, double I1, double I2, int sign, double t0, double t1, double step,
         const py::object& F) {
        const GeneralSolution g =
            general_solution(as_expr(omega2), as_expr(F), k, {I1, I2, 1.0, sign}, t0, t1, step);
        py::dict d = trajectory_dict(g.x, "x", "v");
        d["I1"] = g.I1;
        d["I2"] = g.I2;
        d["W"] = g.W;
        return d;
      },
      py::arg("omega2"), py::arg("k"), py::arg("I1"), py::arg("I2"), py::arg("sign") = 1, py::arg("t0") = 0.0,
      py::arg("t1") = 10.0, py::arg("step") = kDefaultStep, py::arg("F") = "0");

  m.def(
      "verify",
      [](const std::string& name) {
        const lie::StructureCheck c = lie::named_check(name);
        const lie::StructureReport r = lie::verify_structure(c.algebra, c.relations, c.spans);
        return py::make_tuple(r.all_pass(), r.to_string());
      },
      py::arg("name"));

  m.def(
      "bracket",
      [](const std::string& a, const std::string& b, const std::vector<std::string>& phase,
         const std::vector<std::string>& parameters) {
        const lie::VariableSet vars(phase, parameters);
        return lie::bracket(lie::parse_vector_field(a, vars), lie::parse_vector_field(b, vars)).to_string();
      },
      py::arg("a"), py::arg("b"), py::arg("phase") = std::vector<std::string>{"x", "v"},
      py::arg("parameters") = std::vector<std::string>{"k"});

  m.def(
      "run_scenario",
      [](const std::string& text) {
        const cli::RunResult r = cli::run(cli::load_scenario(cli::ConfigFile::parse(text)));
        return py::make_tuple(r.status, r.output);
      },
      py::arg("text"));
}
