#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "d2d/cell_geometry.hpp"
#include "d2d/config.hpp"
#include "d2d/content_model.hpp"
#include "d2d/errors.hpp"
#include "d2d/experiment.hpp"
#include "d2d/math_kernels.hpp"
#include "d2d/mc_oracle.hpp"
#include "d2d/mode_selection.hpp"
#include "d2d/performance.hpp"
#include "d2d/report.hpp"
#include "d2d/validation.hpp"

namespace py = pybind11;
using namespace d2d;

namespace {

py::dict row_dict(const Row& r) {
    py::dict d;
    d["scheme"] = r.scheme;
    d["k"] = r.k ? py::cast(*r.k) : py::none();
    d["c"] = r.c ? py::cast(*r.c) : py::none();
    d["metric"] = r.metric;
    d["value"] = r.value;
    d["method"] = r.method;
    d["ci_halfwidth"] = r.ci_halfwidth ? py::cast(*r.ci_halfwidth) : py::none();
    d["trials"] = r.trials ? py::cast(*r.trials) : py::none();
    d["seed"] = r.seed ? py::cast(*r.seed) : py::none();
    return d;
}

py::list rows_list(const std::vector<Row>& rows) {
    py::list out;
    for (const auto& r : rows) out.append(row_dict(r));
    return out;
}

ExperimentConfig config_with(const std::string& profile, const std::vector<std::string>& overrides) {
    auto cfg = load_profile(profile);
    for (const auto& o : overrides) apply_override(cfg, o);
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_d2doffload, m) {
    m.doc() = "Analytic model and Monte Carlo oracle for cache-enabled D2D offloading";

    auto base = py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception<NonConvergenceError>(m, "NonConvergenceError", base.ptr());
    py::register_exception<ToleranceNotMet>(m, "ToleranceNotMet", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<UndefinedConditional>(m, "UndefinedConditional", PyExc_ValueError);
    py::register_exception<InsufficientSamples>(m, "InsufficientSamples", PyExc_ValueError);
    py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<IndexError>(m, "IndexError", PyExc_IndexError);

    py::enum_<SelectionScheme>(m, "SelectionScheme").value("NS", SelectionScheme::NS).value("US", SelectionScheme::US);
    py::enum_<Method>(m, "Method").value("exact", Method::exact).value("bound", Method::bound);

    py::class_<CacheParams>(m, "CacheParams")
        .def(py::init<std::int64_t, double, std::int64_t, std::int64_t>(), py::arg("library_size"), py::arg("zeta"),
             py::arg("cache_mbs"), py::arg("cache_d2d"))
        .def_property_readonly("library_size", &CacheParams::library_size)
        .def_property_readonly("zeta", &CacheParams::zeta)
        .def_property_readonly("cache_mbs", &CacheParams::cache_mbs)
        .def_property_readonly("cache_d2d", &CacheParams::cache_d2d)
        .def_property_readonly("rho", &CacheParams::rho);

    py::class_<NetworkParams>(m, "NetworkParams")
        .def(py::init<>())
        .def_readwrite("lambda_m", &NetworkParams::lambda_m)
        .def_readwrite("lambda_d", &NetworkParams::lambda_d)
        .def_readwrite("lambda_u", &NetworkParams::lambda_u)
        .def_readwrite("p_m", &NetworkParams::p_m)
        .def_readwrite("p_d", &NetworkParams::p_d)
        .def_readwrite("w_m", &NetworkParams::w_m)
        .def_readwrite("w_d", &NetworkParams::w_d)
        .def_readwrite("alpha", &NetworkParams::alpha)
        .def_readwrite("tau_m", &NetworkParams::tau_m)
        .def_readwrite("tau_d", &NetworkParams::tau_d)
        .def_readwrite("sigma2", &NetworkParams::sigma2)
        .def_readwrite("beta", &NetworkParams::beta)
        .def("validate", &NetworkParams::validate)
        .def_property_readonly("eta_d", &NetworkParams::eta_d)
        .def_property_readonly("eta_u", &NetworkParams::eta_u);

    m.def("popularity", &popularity, py::arg("c"), py::arg("cache"));
    m.def("hit_mbs", &hit_mbs, py::arg("c"), py::arg("cache"));
    m.def("hit_d2d", &hit_d2d, py::arg("c"), py::arg("cache"));
    m.def("cell_helper_count_pmf", &cell_helper_count_pmf, py::arg("j"), py::arg("eta_d"));
    m.def("helper_count_at_least", &helper_count_at_least, py::arg("i"), py::arg("eta_d"));
    m.def("p_served_by_ith", &p_served_by_ith, py::arg("scheme"), py::arg("i"), py::arg("c"), py::arg("k"),
          py::arg("eta_d"), py::arg("cache"));
    m.def("p_d2d_mode", &p_d2d_mode, py::arg("scheme"), py::arg("c"), py::arg("k"), py::arg("eta_d"),
          py::arg("cache"));
    m.def("p_d2d_mode_bound", &p_d2d_mode_bound, py::arg("scheme"), py::arg("c"), py::arg("k"), py::arg("cache"));
    m.def("offloaded_fraction", &offloaded_fraction, py::arg("scheme"), py::arg("k"), py::arg("eta_d"),
          py::arg("cache"), py::arg("bound") = false);

    m.def("hyp2f1", &math::hyp2f1, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("z"));
    m.def("regularized_upper_gamma", &math::regularized_upper_gamma, py::arg("i"), py::arg("x"));
    m.def("lens_area", [](double r, double y, double x) { return lens_area(r, y, x); }, py::arg("r"), py::arg("y"),
          py::arg("x"));
    m.def("containment_weight", [](double r, double lm, double ld) { return containment_weight(r, {lm, ld}); },
          py::arg("r"), py::arg("lambda_m"), py::arg("lambda_d"));
    m.def("p_user_inside", [](double lm, double ld) { return p_user_inside({lm, ld}); }, py::arg("lambda_m"),
          py::arg("lambda_d"));
    m.def("distance_pdf", [](int i, double r, double lm, double ld) { return distance_pdf(i, r, {lm, ld}); },
          py::arg("i"), py::arg("r"), py::arg("lambda_m"), py::arg("lambda_d"));
    m.def("unconstrained_pdf", &unconstrained_pdf, py::arg("i"), py::arg("r"), py::arg("lambda_d"));
    m.def("coverage_cellular_at",
          [](double tau, const NetworkParams& n) { return coverage_cellular_at(tau, n); }, py::arg("tau"),
          py::arg("network"));

    py::class_<OptimalK>(m, "OptimalK")
        .def_readonly("k", &OptimalK::k)
        .def_readonly("value", &OptimalK::value)
        .def_readonly("curve", &OptimalK::curve);

    py::class_<PerformanceModel>(m, "PerformanceModel")
        .def(py::init([](const NetworkParams& n, const CacheParams& c, int k_max) {
                 ModelOptions o;
                 o.k_max = k_max;
                 return std::make_unique<PerformanceModel>(n, c, o);
             }),
             py::arg("network"), py::arg("cache"), py::arg("k_max") = 10)
        .def("gamma_m", &PerformanceModel::gamma_m, py::call_guard<py::gil_scoped_release>())
        .def("gamma_d", &PerformanceModel::gamma_d, py::arg("i"), py::call_guard<py::gil_scoped_release>())
        .def("gamma_d_at", &PerformanceModel::gamma_d_at, py::arg("i"), py::arg("tau"),
             py::call_guard<py::gil_scoped_release>())
        .def("rate_m", &PerformanceModel::rate_m, py::call_guard<py::gil_scoped_release>())
        .def("rate_d", &PerformanceModel::rate_d, py::arg("i"), py::call_guard<py::gil_scoped_release>())
        .def("coverage", [](const PerformanceModel& pm, SelectionScheme s, std::int64_t c, int k,
                            Method me) { return pm.coverage_overall(s, c, k, me).value; },
             py::arg("scheme"), py::arg("c"), py::arg("k"), py::arg("method") = Method::exact)
        .def("rate", [](const PerformanceModel& pm, SelectionScheme s, std::int64_t c, int k,
                        Method me) { return pm.avg_rate_overall(s, c, k, me).value; },
             py::arg("scheme"), py::arg("c"), py::arg("k"), py::arg("method") = Method::exact)
        .def("optimal_k_coverage", &PerformanceModel::optimal_k_coverage, py::arg("scheme"), py::arg("c"),
             py::arg("k_lo") = 1, py::arg("k_hi") = 0)
        .def("optimal_k_rate", &PerformanceModel::optimal_k_rate, py::arg("scheme"), py::arg("c"),
             py::arg("k_lo") = 1, py::arg("k_hi") = 0);

    py::class_<mc::Estimate>(m, "Estimate")
        .def_readonly("mean", &mc::Estimate::mean)
        .def_readonly("ci_halfwidth", &mc::Estimate::ci_halfwidth)
        .def_readonly("samples", &mc::Estimate::samples)
        .def_readonly("discarded", &mc::Estimate::discarded);

    m.def(
        "simulate_p_inside",
        [](const NetworkParams& n, std::int64_t trials, std::uint64_t seed, unsigned workers) {
            mc::SimConfig cfg;
            cfg.trials = trials;
            cfg.seed = seed;
            cfg.workers = workers;
            py::gil_scoped_release release;
            return mc::estimate_p_inside(n, cfg, 1);
        },
        py::arg("network"), py::arg("trials"), py::arg("seed") = 1, py::arg("workers") = 1);

    m.def("profile_names", &builtin_profile_names);
    m.def("profile_text", [](const std::string& name) { return builtin_profile(name); }, py::arg("name"));
    m.def("load_network", [](const std::string& p) { return load_profile(p).network; }, py::arg("profile") = "table1");
    m.def("load_cache", [](const std::string& p) { return load_profile(p).cache; }, py::arg("profile") = "table1");
    m.def("dump_profile",
          [](const std::string& p, const std::vector<std::string>& o) { return dump_profile(config_with(p, o)); },
          py::arg("profile") = "table1", py::arg("overrides") = std::vector<std::string>{});

    m.def(
        "analytic",
        [](const std::vector<std::string>& metrics, const std::string& profile, const std::vector<std::string>& o) {
            const auto cfg = config_with(profile, o);
            std::vector<Row> rows;
            {
                py::gil_scoped_release release;
                rows = cmd_analytic(cfg, metrics);
            }
            return rows_list(rows);
        },
        py::arg("metrics"), py::arg("profile") = "table1", py::arg("overrides") = std::vector<std::string>{});
    m.def(
        "simulate",
        [](const std::vector<std::string>& observables, const std::string& profile,
           const std::vector<std::string>& o) {
            const auto cfg = config_with(profile, o);
            SimulateRequest req;
            req.observables = observables;
            std::vector<Row> rows;
            {
                py::gil_scoped_release release;
                rows = cmd_simulate(cfg, req);
            }
            return rows_list(rows);
        },
        py::arg("observables"), py::arg("profile") = "table1", py::arg("overrides") = std::vector<std::string>{});
    m.def(
        "optimal_k",
        [](const std::string& profile, const std::vector<std::string>& o) {
            const auto cfg = config_with(profile, o);
            std::vector<Row> rows;
            {
                py::gil_scoped_release release;
                rows = cmd_optimal_k(cfg);
            }
            return rows_list(rows);
        },
        py::arg("profile") = "table1", py::arg("overrides") = std::vector<std::string>{});
    m.def(
        "render",
        [](const std::vector<std::string>& metrics, const std::string& profile, const std::vector<std::string>& o,
           const std::string& fmt) { return render(cmd_analytic(config_with(profile, o), metrics), parse_format(fmt)); },
        py::arg("metrics"), py::arg("profile") = "table1", py::arg("overrides") = std::vector<std::string>{},
        py::arg("format") = "csv");
}
