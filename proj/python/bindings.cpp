#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "epidde/experiments.hpp"
#include "epidde/model.hpp"
#include "epidde/stability.hpp"

namespace py = pybind11;
using namespace epidde;

namespace {

std::vector<double> state_list(const StateVector& x) {
    return {x.s, x.e, x.i, x.q, x.r, x.d};
}

py::dict report_dict(const StabilityReport& r) {
    py::dict d;
    d["equilibrium"] = to_string(r.equilibrium);
    d["r0"] = r.r0;
    py::dict cond;
    for (const auto& [name, value] : r.conditions)
        cond[py::str(name)] = value;
    d["conditions"] = cond;
    d["omega_star"] = r.omega_star ? py::object(py::float_(*r.omega_star))
                                   : py::object(py::none());
    d["tau_star"] = r.tau_star ? py::object(py::float_(*r.tau_star))
                               : py::object(py::none());
    d["verdict"] = to_string(r.verdict);
    return d;
}

}  // namespace

PYBIND11_MODULE(_epidde, m) {
    m.doc() = "delay epidemic model toolkit";

    py::class_<TempBetaModel>(m, "TempBetaModel")
        .def_static("linear_default", &TempBetaModel::linear_default)
        .def_static("quadratic_default", &TempBetaModel::quadratic_default)
        .def_static("fixed", &TempBetaModel::fixed);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_readwrite("mu", &ModelParams::mu)
        .def_readwrite("epsilon", &ModelParams::epsilon)
        .def_readwrite("gamma", &ModelParams::gamma)
        .def_readwrite("p", &ModelParams::p)
        .def_readwrite("tau", &ModelParams::tau)
        .def_readwrite("kappa", &ModelParams::kappa)
        .def_readwrite("rho", &ModelParams::rho)
        .def_readwrite("alpha", &ModelParams::alpha)
        .def_readwrite("delta", &ModelParams::delta)
        .def_readwrite("beta_model", &ModelParams::beta_model)
        .def_readwrite("exploratory", &ModelParams::exploratory)
        .def("omega", &ModelParams::omega)
        .def("removal", &ModelParams::removal);

    m.def("beta_at", &beta_at, py::arg("model"), py::arg("temperature_c"));

    m.def(
        "simulate",
        [](const ModelParams& par, double temperature, double horizon,
           double step, double sample_dt) {
            const Trajectory traj = simulate(par, temperature, horizon, step);
            std::vector<double> times;
            std::vector<std::vector<double>> states;
            for (double t = 0.0; t <= horizon + step * 0.5; t += sample_dt) {
                const double tc = std::min(t, horizon);
                times.push_back(tc);
                states.push_back(traj.interpolate(tc));
            }
            return py::make_tuple(times, states);
        },
        py::arg("params"), py::arg("temperature") = 0.0,
        py::arg("horizon") = 500.0, py::arg("step") = 0.01,
        py::arg("sample_dt") = 0.5);

    m.def("reproduction_number", &reproduction_number, py::arg("params"),
          py::arg("beta"));

    m.def("disease_free_equilibrium",
          []() { return state_list(disease_free_equilibrium()); });
    m.def(
        "endemic_equilibrium",
        [](const ModelParams& par, double beta) -> py::object {
            const auto eq = endemic_equilibrium(par, beta);
            if (!eq) return py::none();
            return py::cast(state_list(*eq));
        },
        py::arg("params"), py::arg("beta"));

    m.def(
        "classify_dfe",
        [](const ModelParams& par, double beta) {
            return report_dict(classify_dfe(par, beta));
        },
        py::arg("params"), py::arg("beta"));
    m.def(
        "classify_endemic",
        [](const ModelParams& par, double beta) -> py::object {
            const auto report = classify_endemic(par, beta);
            if (!report) return py::none();
            return report_dict(*report);
        },
        py::arg("params"), py::arg("beta"));

    m.def(
        "critical_delay",
        [](const ModelParams& par, double beta) -> py::object {
            const CriticalDelayResult res = critical_delay(par, beta);
            if (!res.value) return py::str(res.diagnostic);
            py::dict d;
            d["tau_star"] = res.value->tau_star;
            d["omega_star"] = res.value->omega_star;
            d["iterations"] = res.value->iterations;
            return d;
        },
        py::arg("params"), py::arg("beta"));

    m.def(
        "temperature_sweep",
        [](const ModelParams& par, const std::string& kind, double horizon,
           int jobs) {
            SweepOptions opt;
            opt.horizon = horizon;
            opt.jobs = jobs;
            const TempBetaModel::Kind k =
                kind == "quadratic" ? TempBetaModel::Kind::quadratic
                                    : TempBetaModel::Kind::linear;
            const SweepTable table =
                temperature_sweep(par, k, {-10.0, 40.0, 5.0}, opt);
            py::list rows;
            for (const auto& row : table.rows) {
                py::dict r;
                r["value"] = row.value;
                r["ok"] = row.ok;
                r["response"] = row.response;
                rows.append(r);
            }
            return rows;
        },
        py::arg("params"), py::arg("kind") = "linear",
        py::arg("horizon") = 500.0, py::arg("jobs") = 1);
}
