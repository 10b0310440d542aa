#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fpfilter/error_bounds.hpp"
#include "fpfilter/errors.hpp"
#include "fpfilter/filters.hpp"
#include "fpfilter/oracle.hpp"
#include "fpfilter/predicates.hpp"
#include "harness.hpp"

namespace py = pybind11;
using namespace fpfilter;

namespace {

std::vector<py::int_> coefficients(const eps_poly& a)
{
    std::vector<py::int_> out;
    for (const mpz_class& c : a.coefficients()) {
        out.emplace_back(py::int_(py::str(c.get_str())));
    }
    return out;
}

py::dict bound_dict(const error_bound& b)
{
    py::dict d;
    d["a"] = b.a.to_string();
    d["coefficients"] = coefficients(b.a);
    d["m"] = b.m.to_string();
    return d;
}

} // namespace

PYBIND11_MODULE(_fpfilter, m)
{
    m.doc() = "Derived floating-point filters and staged robust predicates";

    py::register_exception<fpfilter::error>(m, "Error", PyExc_ValueError);

    py::class_<expr>(m, "Expr")
        .def_property_readonly("arity", &expr::arity)
        .def("__str__", [](const expr& e) { return to_string(e); })
        .def("__repr__", [](const expr& e) { return "Expr('" + to_string(e) + "')"; })
        .def("__eq__", [](const expr& a, const expr& b) { return a == b; });

    m.def("parse", &parse_expr, py::arg("text"));
    m.def("builtin", [](const std::string& name) { return builtin_expr(name); }, py::arg("name"));
    m.def("builtin_names", &builtin_names);
    m.def("phi", [](int precision) { return phi(fpn_params{precision, -1022, 1023}); }, py::arg("precision") = 53);

    m.def("eval_naive", [](const expr& e, const std::vector<double>& in) { return eval_naive(e, in); });
    m.def("oracle_sign", [](const expr& e, const std::vector<double>& in) { return to_int(oracle_sign(e, in)); });

    m.def(
        "derive", [](const expr& e, bool ufp) { return bound_dict(derive(e, ufp)); }, py::arg("expr"),
        py::arg("ufp") = false);
    m.def(
        "filter_constants",
        [](const expr& e, bool ufp) {
            const semi_static_filter f(e, ufp);
            py::dict d;
            d["a_max"] = f.a_max().to_string();
            d["coefficients"] = coefficients(f.a_max());
            d["a3"] = f.constants().a3;
            d["a4"] = f.constants().a4;
            return d;
        },
        py::arg("expr"), py::arg("ufp") = false);

    py::class_<staged_predicate>(m, "StagedPredicate")
        .def(py::init([](const expr& e, const std::string& prof) { return default_pipeline(e, parse_profile(prof)); }),
             py::arg("expr"), py::arg("profile") = "safe")
        .def(py::init([](const std::string& name, const std::string& prof) {
                 return default_pipeline(name, parse_profile(prof));
             }),
             py::arg("name"), py::arg("profile") = "safe")
        .def("__call__", [](const staged_predicate& p, const std::vector<double>& in) { return to_int(p.apply(in)); })
        .def("decide",
             [](const staged_predicate& p, const std::vector<double>& in) {
                 const decision d = p.decide(in);
                 return py::make_tuple(to_int(d.value), d.stage);
             })
        .def_property_readonly("stages",
                               [](const staged_predicate& p) {
                                   std::vector<std::string> names;
                                   for (std::size_t i = 0; i < p.size(); ++i) {
                                       names.push_back(p.stage_at(i).name());
                                   }
                                   return names;
                               })
        .def_property_readonly("arity", &staged_predicate::arity);

    m.def("torture", [] {
        py::list rows;
        for (const auto& r : harness::torture_rows()) {
            py::dict d;
            d["label"] = r.label;
            d["naive"] = r.naive;
            d["staged"] = to_int(r.staged);
            d["stage"] = r.stage;
            d["exact"] = to_int(r.exact);
            rows.append(d);
        }
        return rows;
    });
}
