// Python bindings for the spinbath core: models, dephasing factor, spectrum and verdict.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spinbath/errors.hpp"
#include "spinbath/evolution.hpp"
#include "spinbath/harness.hpp"
#include "spinbath/lemma.hpp"
#include "spinbath/model.hpp"
#include "spinbath/spectrum.hpp"

namespace py = pybind11;
using namespace spinbath;

namespace {

py::dict report_to_dict(const lemma::LemmaReport& r) {
    py::dict d;
    d["verdict"] = lemma::to_string(r.verdict);
    d["route"] = lemma::to_string(r.route);
    d["n_points"] = r.n_points;
    d["quasi_continuous"] = r.quasi_continuous;
    d["qc_gap_cv"] = r.qc_gap_cv;
    d["qc_ks_stat"] = r.qc_ks_stat;
    d["in_l1"] = r.in_l1;
    d["l1_max_weight"] = r.l1_max_weight;
    d["l1_max_group_deviation"] = r.l1_max_group_deviation;
    d["g_groups"] = r.g_groups;
    d["p_per_group"] = r.p_per_group;
    d["recurrence_time"] = r.recurrence_time.is_finite() ? py::cast(r.recurrence_time.period()) : py::none();
    d["sum_of_weights"] = r.sum_of_weights;
    d["max_multiplicity"] = r.max_multiplicity;
    return d;
}

}  // namespace

PYBIND11_MODULE(spinbath, m) {
    m.doc() = "Central spin coupled to a bath of non-interacting spins: dephasing, spectrum and decoherence verdict.";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<NormalizationError>(m, "NormalizationError", base.ptr());
    py::register_exception<CapExceededError>(m, "CapExceededError", base.ptr());
    py::register_exception<InvalidParameterError>(m, "InvalidParameterError", base.ptr());

    py::class_<EnvironmentSpin>(m, "EnvironmentSpin")
        .def(py::init([](cplx alpha, cplx beta, double g) { return EnvironmentSpin{alpha, beta, g}; }),
             py::arg("alpha"), py::arg("beta"), py::arg("g"))
        .def_readonly("alpha", &EnvironmentSpin::alpha)
        .def_readonly("beta", &EnvironmentSpin::beta)
        .def_readonly("g", &EnvironmentSpin::g);

    py::class_<SpinBathModel>(m, "SpinBathModel")
        .def(py::init<cplx, cplx, std::vector<EnvironmentSpin>>(), py::arg("a"), py::arg("b"), py::arg("spins"))
        .def_property_readonly("a", &SpinBathModel::a)
        .def_property_readonly("b", &SpinBathModel::b)
        .def_property_readonly("spins",
                               [](const SpinBathModel& model) {
                                   return std::vector<EnvironmentSpin>(model.spins().begin(), model.spins().end());
                               })
        .def("__len__", &SpinBathModel::size)
        .def("to_json", [](const SpinBathModel& model) { return harness::model_to_json(model); })
        .def_static("from_json", [](const std::string& text) { return harness::model_from_json(text); });

    m.def(
        "generate_random",
        [](std::size_t n, std::uint64_t seed, std::optional<double> equal_coupling, double g_max, bool uniform_phase,
           std::pair<double, double> population) {
            CouplingLaw law = UniformPositive{g_max};
            if (equal_coupling) law = EqualCoupling{*equal_coupling};
            return generate_random(n, seed, law, uniform_phase ? PhaseLaw::Uniform : PhaseLaw::Zero,
                                   {population.first, population.second});
        },
        py::arg("n"), py::arg("seed"), py::arg("equal_coupling") = py::none(), py::arg("g_max") = 1.0,
        py::arg("uniform_phase") = false, py::arg("population") = std::make_pair(0.0, 1.0));

    m.def("r_of_t", &evolution::r_of_t, py::arg("model"), py::arg("t"));
    m.def("r_squared", &evolution::r_squared, py::arg("model"), py::arg("t"));
    m.def(
        "r_bounds",
        [](const SpinBathModel& model) {
            const auto b = evolution::r_bounds(model);
            return std::make_pair(b.lower, b.upper);
        },
        py::arg("model"));
    m.def(
        "expectation_relevant",
        [](const SpinBathModel& model, double s_uu, double s_dd, cplx s_du, double t) {
            return evolution::expectation_relevant(model, {s_uu, s_dd, s_du}, t);
        },
        py::arg("model"), py::arg("s_uu"), py::arg("s_dd"), py::arg("s_du"), py::arg("t"));

    m.def(
        "spectrum",
        [](const SpinBathModel& model, double tol, std::size_t cap) {
            const auto dec = spectrum::spectral_decomposition(model, tol, cap);
            std::vector<std::tuple<double, double, std::uint64_t>> lines;
            for (const auto& l : dec.lines) lines.emplace_back(l.omega, l.weight, l.multiplicity);
            return lines;
        },
        py::arg("model"), py::arg("tol") = 0.0, py::arg("cap") = spectrum::kDefaultEnumerationCap,
        "List of (omega, weight, multiplicity) lines sorted by omega.");
    m.def("degeneracy_count", &spectrum::degeneracy_count, py::arg("n"), py::arg("l"));

    m.def(
        "decoherence_verdict",
        [](const SpinBathModel& model, std::size_t enumeration_cap) {
            lemma::VerdictConfig config;
            config.enumeration_cap = enumeration_cap;
            return report_to_dict(lemma::decoherence_verdict(model, config));
        },
        py::arg("model"), py::arg("enumeration_cap") = spectrum::kDefaultEnumerationCap);

    m.def(
        "oracle_check",
        [](std::size_t n_max, std::size_t cases, std::uint64_t seed) {
            const auto s = harness::run_oracle_check(n_max, cases, seed);
            return py::make_tuple(s.cases, s.failures, s.max_abs_error);
        },
        py::arg("n_max"), py::arg("cases"), py::arg("seed"), "Returns (cases, failures, max_abs_error).");
}
