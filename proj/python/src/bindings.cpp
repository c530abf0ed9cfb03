#include "flexq/analysis.hpp"
#include "flexq/errors.hpp"
#include "flexq/experiments.hpp"
#include "flexq/simulator.hpp"
#include "flexq/solver.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace flexq;

namespace {

py::object to_python(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_python(const py::object& o) {
    return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

std::vector<std::string> arrival_codes(const PolicyTable& p) {
    std::vector<std::string> out;
    out.reserve(p.arrival.size());
    for (const ArrivalAction& a : p.arrival) out.push_back(a.code());
    return out;
}

}  // namespace

PYBIND11_MODULE(_flexq, m) {
    m.doc() = "Flexible queue deployment MDP: solver, checks and simulator";

    static py::exception<Error> base(m, "FlexqError", PyExc_RuntimeError);
    static py::exception<InvalidParams> invalid(m, "InvalidParams", base.ptr());
    static py::exception<InvalidState> invalid_state(m, "InvalidState", base.ptr());
    static py::exception<ConvergenceError> convergence(m, "ConvergenceError", base.ptr());
    static py::exception<InstanceTooLarge> too_large(m, "InstanceTooLarge", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConvergenceError& e) {
            PyErr_SetString(convergence.ptr(), e.what());
        } catch (const InstanceTooLarge& e) {
            PyErr_SetString(too_large.ptr(), e.what());
        } catch (const InvalidParams& e) {
            PyErr_SetString(invalid.ptr(), e.what());
        } catch (const InvalidState& e) {
            PyErr_SetString(invalid_state.ptr(), e.what());
        } catch (const Error& e) {
            PyErr_SetString(base.ptr(), e.what());
        }
    });

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_static("uniform", &ModelParams::uniform, py::arg("n"), py::arg("B"), py::arg("lam"), py::arg("mu"),
                    py::arg("gamma"))
        .def_readwrite("n", &ModelParams::n)
        .def_readwrite("B", &ModelParams::B)
        .def_readwrite("lam", &ModelParams::lambda)
        .def_readwrite("mu", &ModelParams::mu)
        .def_readwrite("r", &ModelParams::r)
        .def_readwrite("f", &ModelParams::f)
        .def_readwrite("beta", &ModelParams::beta)
        .def_readwrite("psi", &ModelParams::psi)
        .def_readwrite("kappa", &ModelParams::kappa)
        .def_readwrite("h", &ModelParams::h)
        .def_readwrite("eta", &ModelParams::eta)
        .def_readwrite("gamma", &ModelParams::gamma)
        .def("validate", &ModelParams::validate)
        .def("to_dict", [](const ModelParams& p) { return to_python(to_json(p)); });

    m.def("params_from_config", [](const py::dict& cfg) { return parse_config(from_python(cfg)).params; },
          "Model parameters from a config mapping (unknown keys rejected).");

    py::class_<StateSpace>(m, "StateSpace")
        .def(py::init<int, int>(), py::arg("n"), py::arg("B"))
        .def_property_readonly("cardinality", &StateSpace::cardinality)
        .def("encode", [](const StateSpace& s, std::vector<Level> q) { return s.encode(SystemState{std::move(q)}); })
        .def("decode", [](const StateSpace& s, StateIndex i) { return s.decode(i).levels; });

    py::class_<Model>(m, "Model")
        .def(py::init<ModelParams>())
        .def_property_readonly("size", &Model::size)
        .def_property_readonly("n", &Model::n)
        .def_property_readonly("B", &Model::B)
        .def_property_readonly("space", &Model::space, py::return_value_policy::reference_internal)
        .def_property_readonly("params", &Model::params)
        .def("contraction_modulus", &Model::contraction_modulus);

    py::class_<PolicyTable>(m, "PolicyTable")
        .def_property_readonly("arrival", &arrival_codes)
        .def("destroys", [](const PolicyTable& p, StateIndex s, int i) {
            return p.departure_at(s, i) == DepartureAction::Destroy;
        })
        .def_static("reject_all", &PolicyTable::reject_all);

    py::class_<SolveResult>(m, "SolveResult")
        .def_readonly("values", &SolveResult::values)
        .def_readonly("policy", &SolveResult::policy)
        .def_readonly("iterations", &SolveResult::iterations)
        .def_readonly("residual", &SolveResult::residual)
        .def_readonly("rho", &SolveResult::rho)
        .def_readonly("error_bound", &SolveResult::error_bound)
        .def_readonly("residual_history", &SolveResult::residual_history);

    m.def(
        "value_iteration",
        [](const Model& model, double tol, long max_iters, bool gauss_seidel) {
            py::gil_scoped_release release;
            return value_iteration(model, {.tol = tol, .max_iters = max_iters, .gauss_seidel = gauss_seidel});
        },
        py::arg("model"), py::arg("tol") = 1e-9, py::arg("max_iters") = 1'000'000, py::arg("gauss_seidel") = false);
    m.def(
        "brute_force_solve",
        [](const Model& model, double max_policies) {
            py::gil_scoped_release release;
            return brute_force_solve(model, static_cast<long double>(max_policies));
        },
        py::arg("model"), py::arg("max_policies") = static_cast<double>(kBruteForceLimit));
    m.def("policy_evaluation", &policy_evaluation);
    m.def("policy_count", [](const Model& model) { return static_cast<double>(policy_count(model)); });

    m.def(
        "check_domination",
        [](const Model& model, const ValueTable& V, double eps) {
            return to_python(to_json(check_domination(V, model.space(), eps), model.space()));
        },
        py::arg("model"), py::arg("values"), py::arg("eps") = 1e-7);
    m.def(
        "check_build_threshold",
        [](const Model& model, const ValueTable& V, double eps_tie, bool same_inactive_set) {
            return to_python(to_json(check_build_threshold(model, V, eps_tie, same_inactive_set), model.space()));
        },
        py::arg("model"), py::arg("values"), py::arg("eps_tie") = kTieEpsilon, py::arg("same_inactive_set") = true);
    m.def("count_rejecting_states", &count_rejecting_states);
    m.def("long_run_metrics", [](const Model& model, const PolicyTable& policy) {
        const LongRunMetrics r = long_run_metrics(stationary_distribution(model, policy), model.space());
        return py::dict(py::arg("avg_active_queues") = r.avg_active_queues,
                        py::arg("avg_total_tasks") = r.avg_total_tasks);
    });

    m.def(
        "simulate",
        [](const Model& model, const PolicyTable& policy, StateIndex initial_state, int replications,
           std::uint64_t seed, unsigned threads) {
            SimConfig cfg;
            cfg.initial_state = initial_state;
            cfg.replications = replications;
            cfg.seed = seed;
            cfg.threads = threads;
            SimEstimate est;
            {
                py::gil_scoped_release release;
                est = estimate_value(model, policy, cfg);
            }
            return to_python(to_json(est, model.space()));
        },
        py::arg("model"), py::arg("policy"), py::arg("initial_state") = 0, py::arg("replications") = 1000,
        py::arg("seed") = 1, py::arg("threads") = 0);

    m.def(
        "sweep_csv",
        [](const py::dict& cfg, unsigned threads) {
            const ExperimentConfig c = parse_config(from_python(cfg));
            py::gil_scoped_release release;
            return sweep_to_csv(run_sweep(c.sweep_spec(), c.solver, threads), c.sweep->parameter);
        },
        py::arg("config"), py::arg("threads") = 0, "Runs the config's sweep section and returns the CSV text.");
    m.def("value_surface_csv",
          [](const Model& model, const ValueTable& V) { return value_surface_csv(V, model.space()); });
    m.def("value_policy_csv", [](const Model& model, const SolveResult& r) {
        return value_policy_csv(model, r.values, r.policy);
    });

    m.def("fig2_params", &fig2_params, py::arg("kappa"));
    m.def("fig3_params", &fig3_params, py::arg("h"));
    m.def("fig4_params", &fig4_params);
}
