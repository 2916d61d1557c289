#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cqt/analysis.hpp"
#include "cqt/errors.hpp"
#include "cqt/fcs.hpp"
#include "cqt/io.hpp"
#include "cqt/kernel.hpp"
#include "cqt/liouvillian.hpp"
#include "cqt/rates.hpp"

namespace py = pybind11;
using namespace cqt;

namespace {

// nlohmann::json -> Python objects through the json module; the report is small.
py::object to_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

RateTable rates_of(const ModelParams& p) { return marcus_rates(build_ladder(p), p.baths); }

}  // namespace

PYBIND11_MODULE(_cqt, m) {
    m.doc() = "Energy transport through N collective qubits between two Ohmic photon baths.";

    auto domain = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception<SingularBathError>(m, "SingularBathError", domain.ptr());
    py::register_exception<DisconnectedLadderError>(m, "DisconnectedLadderError", numerical.ptr());
    py::register_exception<MonotoneObjectiveError>(m, "MonotoneObjectiveError", numerical.ptr());

    py::enum_<BathLabel>(m, "BathLabel")
        .value("Source", BathLabel::Source)
        .value("Drain", BathLabel::Drain);

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init<>())
        .def_readwrite("n_qubits", &SystemParams::n_qubits)
        .def_readwrite("eps0", &SystemParams::eps0)
        .def_readwrite("tunneling", &SystemParams::tunneling);

    py::class_<BathParams>(m, "BathParams")
        .def(py::init<>())
        .def_readwrite("label", &BathParams::label)
        .def_readwrite("alpha", &BathParams::alpha)
        .def_readwrite("omega_c", &BathParams::omega_c)
        .def_readwrite("temperature", &BathParams::temperature)
        .def_property_readonly("xi", &BathParams::xi);

    py::class_<BathPair>(m, "BathPair")
        .def(py::init<>())
        .def_readwrite("source", &BathPair::source)
        .def_readwrite("drain", &BathPair::drain);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_readwrite("system", &ModelParams::system)
        .def_readwrite("baths", &ModelParams::baths)
        .def("validate", &ModelParams::validate);

    m.def("symmetric_model", &symmetric_model, py::arg("n_qubits"), py::arg("eps0"), py::arg("alpha"),
          py::arg("omega_c"), py::arg("t_source"), py::arg("t_drain"),
          "Model with equal couplings and cutoffs on both baths.");

    py::class_<CumulantSet>(m, "CumulantSet")
        .def_readonly("flux", &CumulantSet::flux)
        .def_readonly("noise", &CumulantSet::noise)
        .def_readonly("c3", &CumulantSet::c3)
        .def_readonly("ff", &CumulantSet::ff)
        .def_readonly("fd_step", &CumulantSet::fd_step)
        .def_readonly("err_flux", &CumulantSet::err_flux)
        .def_readonly("err_noise", &CumulantSet::err_noise)
        .def_readonly("err_c3", &CumulantSet::err_c3);

    py::class_<OptResult>(m, "OptResult")
        .def_readonly("alpha_opt", &OptResult::alpha_opt)
        .def_readonly("value_opt", &OptResult::value_opt)
        .def_readonly("alpha_lo", &OptResult::alpha_lo)
        .def_readonly("alpha_hi", &OptResult::alpha_hi)
        .def_readonly("evaluations", &OptResult::evaluations);

    m.def("rates", [](const ModelParams& p) {
        const RateTable r = rates_of(p);
        py::dict d;
        d["kappa_plus"] = r.kappa_plus;
        d["kappa_minus"] = r.kappa_minus;
        d["prefactor"] = r.prefactor;
        return d;
    }, py::arg("params"), "Marcus rates per link, m = -j..j-1.");

    m.def("steady_state", [](const ModelParams& p) {
        return steady_state(build_generator(rates_of(p))).populations;
    }, py::arg("params"), "Steady-state populations, m = -j..j.");

    m.def("cgf", [](const ModelParams& p, double s) {
        const Ladder l = build_ladder(p);
        return CgfEvaluator(marcus_rates(l, p.baths), jump_moments(l, p.baths))(s);
    }, py::arg("params"), py::arg("s"), "Scaled cumulant generating function on the real tilt axis.");

    m.def("cumulants", [](const ModelParams& p, int order) { return cumulants_fd(p, order); },
          py::arg("params"), py::arg("order") = 2);
    m.def("flux_direct", py::overload_cast<const ModelParams&>(&flux_direct), py::arg("params"));
    m.def("gc_deviation", [](const ModelParams& p, const std::vector<double>& samples) {
        return gc_deviation(p, samples);
    }, py::arg("params"), py::arg("samples"));

    m.def("log_grid", &log_grid, py::arg("lo"), py::arg("hi"), py::arg("n"));

    m.def("sweep", [](const ModelParams& base, std::vector<int> sizes, std::vector<double> alphas,
                      const std::string& objective, unsigned threads) {
        SweepSpec spec;
        spec.base = base;
        spec.sizes = std::move(sizes);
        spec.alphas = std::move(alphas);
        spec.objective = objective_from_string(objective);
        spec.threads = threads;
        SweepResult r;
        {
            py::gil_scoped_release release;
            r = sweep(spec);
        }
        py::list rows;
        for (const SweepRow& row : r.rows) {
            py::dict d;
            d["N"] = row.n_qubits;
            d["alpha"] = row.alpha;
            d["J"] = row.cumulants.flux;
            d["S"] = row.cumulants.noise;
            d["FF"] = row.cumulants.ff;
            d["J_direct"] = row.flux_direct;
            d["ok"] = row.ok;
            d["flag"] = row.flag;
            rows.append(d);
        }
        return rows;
    }, py::arg("base"), py::arg("sizes"), py::arg("alphas"), py::arg("objective") = "flux",
       py::arg("threads") = 0u);

    m.def("optimize_alpha", [](const ModelParams& base, int n, const std::string& objective) {
        return optimize_alpha(base, n, objective_from_string(objective));
    }, py::arg("base"), py::arg("n_qubits"), py::arg("objective") = "flux");

    m.def("scaling", [](const ModelParams& base, std::vector<int> sizes, const std::string& objective) {
        return to_python(to_json(scaling_analysis(base, sizes, objective_from_string(objective))));
    }, py::arg("base"), py::arg("sizes"), py::arg("objective") = "flux",
       "Optimal coupling per N with the power-law and linear fits, as a dict.");

    m.def("bath_spectrum", [](double alpha, double omega_c, double temperature) {
        const BathParams b{BathLabel::Source, alpha, omega_c, temperature};
        const CorrelationSpectrum c = spectrum(propagator(b));
        const CorrelationSpectrum g = marcus_spectrum_like(b, c);
        py::dict d;
        d["omega"] = c.omegas;
        d["C"] = c.c_values;
        d["C_marcus"] = g.c_values;
        d["sum_rule"] = c.sum_rule();
        d["kms_deviation"] = kms_deviation(c, temperature);
        d["l1_to_marcus"] = spectrum_l1_distance(c, g);
        return d;
    }, py::arg("alpha"), py::arg("omega_c"), py::arg("temperature"),
       "Exact bath correlation spectrum next to its Gaussian short-time form.");
}
