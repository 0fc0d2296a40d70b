#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>

#include "translim/distribution.hpp"
#include "translim/error.hpp"
#include "translim/ingest.hpp"
#include "translim/inversion.hpp"
#include "translim/model.hpp"
#include "translim/optimizer.hpp"
#include "translim/simulator.hpp"
#include "translim/transforms.hpp"

namespace py = pybind11;
using namespace translim;

namespace {

ModelParams make_params(double arrival_rate, const DistributionSpec& mark, double gamma, double nu, double period,
                        double interest_free, double limit_lo, double limit_hi) {
    return ModelParams(ModelConfig{.gamma_interchange = gamma,
                                   .nu_funding = nu,
                                   .period_days = period,
                                   .interest_free_days = interest_free,
                                   .limit_lo = limit_lo,
                                   .limit_hi = limit_hi,
                                   .mark = mark,
                                   .arrival = DistributionSpec::exponential(arrival_rate, DistRole::InterArrival)});
}

py::dict fit_csv(const std::string& path, std::optional<std::string> category, double window) {
    const auto loaded = load_transactions(path);
    SeriesFilter filter;
    filter.category = std::move(category);
    filter.cluster_window_secs = window;
    const auto rep = fit_series(prepare_series(loaded.records, filter));
    return py::module_::import("json").attr("loads")(rep.to_json().dump());
}

}  // namespace

PYBIND11_MODULE(_translim, m) {
    m.doc() = "Profit-maximizing credit limits for transactor card accounts";

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
    error_type.call_once_and_store_result(
        [&]() { return py::object(py::exception<Error>(m, "TranslimError", PyExc_RuntimeError)); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const py::object& type = error_type.get_stored();
            py::object inst = type(e.what());
            inst.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(type.ptr(), inst.ptr());
        }
    });

    py::enum_<DistRole>(m, "DistRole").value("Mark", DistRole::Mark).value("InterArrival", DistRole::InterArrival);
    py::enum_<DistKind>(m, "DistKind")
        .value("Exponential", DistKind::Exponential)
        .value("Gamma", DistKind::Gamma)
        .value("Deterministic", DistKind::Deterministic);
    py::enum_<PolicyKind>(m, "Policy")
        .value("Freeze", PolicyKind::Freeze)
        .value("Retrial", PolicyKind::Retrial)
        .value("Truncation", PolicyKind::NewsvendorTruncation);
    py::enum_<SolveStatus>(m, "SolveStatus")
        .value("Interior", SolveStatus::Interior)
        .value("LowerBoundary", SolveStatus::LowerBoundary)
        .value("UpperBoundary", SolveStatus::UpperBoundary);

    py::class_<DistributionSpec>(m, "Distribution")
        .def_static("exponential", &DistributionSpec::exponential, py::arg("rate"), py::arg("role") = DistRole::Mark)
        .def_static("gamma", &DistributionSpec::gamma, py::arg("shape"), py::arg("rate"),
                    py::arg("role") = DistRole::Mark)
        .def_static("deterministic", &DistributionSpec::deterministic, py::arg("value"),
                    py::arg("role") = DistRole::Mark)
        .def_property_readonly("kind", &DistributionSpec::kind)
        .def_property_readonly("rate", &DistributionSpec::rate)
        .def_property_readonly("shape", &DistributionSpec::shape)
        .def_property_readonly("mean", &DistributionSpec::mean)
        .def_property_readonly("variance", &DistributionSpec::variance)
        .def("cdf", &DistributionSpec::cdf)
        .def("scaled", &DistributionSpec::scaled)
        .def("__repr__", &DistributionSpec::describe);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init(&make_params), py::arg("arrival_rate"), py::arg("mark"), py::arg("gamma") = 0.0054,
             py::arg("nu") = 0.0007, py::arg("period") = 30.0, py::arg("interest_free") = 0.0,
             py::arg("limit_lo") = 0.0, py::arg("limit_hi") = 5000.0)
        .def_property_readonly("gamma", &ModelParams::gamma_interchange)
        .def_property_readonly("nu", &ModelParams::nu_funding)
        .def_property_readonly("horizon", &ModelParams::horizon)
        .def_property_readonly("limit_lo", &ModelParams::limit_lo)
        .def_property_readonly("limit_hi", &ModelParams::limit_hi)
        .def_property_readonly("mark", &ModelParams::mark_dist)
        .def_property_readonly("arrival_rate", &ModelParams::poisson_rate)
        .def_property_readonly("cost_ratio", &ModelParams::cost_ratio)
        .def_property_readonly("expected_spend", &ModelParams::expected_spend)
        .def("with_limit_set", &ModelParams::with_limit_set, py::arg("lo"), py::arg("hi"))
        .def("with_scaled_marks", &ModelParams::with_scaled_marks, py::arg("alpha"));

    py::class_<OptimizationResult>(m, "OptimizationResult")
        .def_readonly("limit_star", &OptimizationResult::limit_star)
        .def_readonly("profit_at_star", &OptimizationResult::profit_at_star)
        .def_readonly("decline_prob_at_star", &OptimizationResult::decline_prob_at_star)
        .def_readonly("iterations", &OptimizationResult::iterations)
        .def_readonly("residual", &OptimizationResult::residual)
        .def_readonly("status", &OptimizationResult::status)
        .def_readonly("fallback_used", &OptimizationResult::fallback_used)
        .def_readonly("warning", &OptimizationResult::warning);

    py::class_<BoundsResult>(m, "BoundsResult")
        .def_readonly("lower", &BoundsResult::lower)
        .def_readonly("upper", &BoundsResult::upper)
        .def_readonly("gap", &BoundsResult::gap)
        .def_readonly("newsvendor", &BoundsResult::newsvendor)
        .def_readonly("freeze", &BoundsResult::freeze);

    py::class_<LimitReport>(m, "LimitReport")
        .def_readonly("limit", &LimitReport::limit)
        .def_readonly("expected_balance", &LimitReport::expected_balance)
        .def_readonly("expected_min", &LimitReport::expected_min)
        .def_readonly("expected_profit", &LimitReport::expected_profit)
        .def_readonly("expected_profit_truncation", &LimitReport::expected_profit_truncation)
        .def_readonly("decline_prob", &LimitReport::decline_prob);

    py::class_<SimReport>(m, "SimReport")
        .def_readonly("policy", &SimReport::policy)
        .def_readonly("limit", &SimReport::limit)
        .def_readonly("mean_balance", &SimReport::mean_balance)
        .def_readonly("std_err", &SimReport::std_err)
        .def_readonly("decline_frequency", &SimReport::decline_frequency)
        .def_readonly("mean_undershoot_given_exceed", &SimReport::mean_undershoot_given_exceed)
        .def_readonly("replications", &SimReport::replications)
        .def_readonly("seed", &SimReport::seed);

    auto at = [](auto fn) {
        return [fn](const ModelParams& p, double limit) { return fn(make_query(p, limit), EulerConfig{}); };
    };
    m.def("expected_balance", at(&expected_balance), py::arg("params"), py::arg("limit"));
    m.def("balance_derivative", at(&balance_derivative), py::arg("params"), py::arg("limit"));
    m.def("decline_probability", at(&decline_probability), py::arg("params"), py::arg("limit"));
    m.def("expected_min", at(&expected_min), py::arg("params"), py::arg("limit"));
    m.def(
        "expected_profit",
        [](const ModelParams& p, double limit, PolicyKind policy) {
            return expected_profit(make_query(p, limit), policy);
        },
        py::arg("params"), py::arg("limit"), py::arg("policy") = PolicyKind::Freeze);

    m.def("optimal_limit", [](const ModelParams& p) { return optimal_limit_freeze(p); }, py::arg("params"));
    m.def("newsvendor_limit", [](const ModelParams& p) { return newsvendor_limit(p); }, py::arg("params"));
    m.def("retrial_bounds", [](const ModelParams& p) { return retrial_bounds(p); }, py::arg("params"));
    m.def("evaluate_limit", [](const ModelParams& p, double l) { return evaluate_limit(p, l); }, py::arg("params"),
          py::arg("limit"));
    m.def("revised_limit", [](const ModelParams& p, double l, double step) { return revised_limit(p, l, step); },
          py::arg("params"), py::arg("limit"), py::arg("step") = 500.0);

    m.def("simulate", &simulate_policy, py::arg("params"), py::arg("limit"), py::arg("policy") = PolicyKind::Freeze,
          py::arg("replications") = 100000, py::arg("seed") = 20110208, py::call_guard<py::gil_scoped_release>());

    m.def(
        "invert",
        [](const std::function<std::complex<double>(std::complex<double>)>& f, double t, double sigma,
           double A, int n_terms, int m_avg) {
            return invert(TransformFn{f, sigma}, t, EulerConfig{A, n_terms, m_avg});
        },
        py::arg("transform"), py::arg("t"), py::arg("sigma") = 0.0, py::arg("A") = 24.0, py::arg("n_terms") = 60,
        py::arg("m_avg") = 15, "Inverse Laplace transform of a Python callable at t.");

    m.def("fit_csv", &fit_csv, py::arg("path"), py::arg("category") = py::none(),
          py::arg("cluster_window_secs") = 3600.0,
          "Load a transaction CSV, build the purchase series and fit it; returns the fit report as a dict.");
}
