#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qteich/error.hpp"
#include "qteich/groupoid.hpp"
#include "qteich/qdilog.hpp"
#include "qteich/suites.hpp"

namespace py = pybind11;
using namespace qteich;

PYBIND11_MODULE(_qteich, m) {
    m.doc() = "Quantum Teichmuller numerics";
    py::register_exception<Error>(m, "QteichError", PyExc_ValueError);

    py::class_<ModularParameter>(m, "ModularParameter")
        .def(py::init([](cplx b) { return ModularParameter::make(b); }), py::arg("b"))
        .def_readonly("b", &ModularParameter::b)
        .def_readonly("c_b", &ModularParameter::c_b)
        .def_readonly("q", &ModularParameter::q)
        .def_readonly("zeta", &ModularParameter::zeta)
        .def_readonly("unitary_regime", &ModularParameter::unitary_regime);

    m.def(
        "eb",
        [](cplx z, cplx b) {
            const Evaluation e = eb_eval(z, ModularParameter::make(b));
            return py::make_tuple(e.value, e.strategy, e.error_estimate);
        },
        py::arg("z"), py::arg("b") = cplx(1.0), "e_b(z) as (value, strategy, error_estimate)");
    m.def(
        "inversion_factor", [](cplx z, cplx b) { return inversion_factor(z, ModularParameter::make(b)); },
        py::arg("z"), py::arg("b") = cplx(1.0));

    m.def(
        "run_suite",
        [](const std::string& suite, cplx b, int n_points, std::uint64_t seed,
           const std::map<std::string, double>& tolerances, const std::vector<std::string>& only) {
            SuiteConfig cfg;
            cfg.suite = parse_suite(suite);
            cfg.b = b;
            ModularParameter::make(b);
            cfg.n_points = n_points;
            cfg.seed = seed;
            cfg.tolerances = tolerances;
            cfg.only = only;
            py::list out;
            for (const auto& r : run_suite(cfg)) {
                py::dict d;
                d["check_id"] = r.check_id;
                d["relation"] = r.relation;
                d["params"] = r.params;
                d["residual"] = r.residual;
                d["tolerance"] = r.tolerance;
                d["pass"] = r.pass;
                out.append(d);
            }
            return out;
        },
        py::arg("suite"), py::arg("b") = cplx(1.0), py::arg("n_points") = 0, py::arg("seed") = 7,
        py::arg("tolerances") = std::map<std::string, double>{}, py::arg("only") = std::vector<std::string>{});
    m.def(
        "check_ids", [](const std::string& suite) { return suite_check_ids(parse_suite(suite)); }, py::arg("suite"));

    m.def(
        "compile_word", [](const std::string& word, int n_triangles) { return compile(parse_word(word, n_triangles)).str(); },
        py::arg("word"), py::arg("n_triangles"));
}
