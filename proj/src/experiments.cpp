#include "flexq/experiments.hpp"

#include "flexq/errors.hpp"
#include "flexq/format.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace flexq {

ModelParams with_parameter(const ModelParams& base, const std::string& name, double value) {
    ModelParams p = base;
    if (name == "kappa") p.kappa = value;
    else if (name == "h") p.h = value;
    else if (name == "beta") p.beta = value;
    else if (name == "psi") p.psi = value;
    else if (name == "f") p.f = value;
    else if (name == "r") p.r = value;
    else if (name == "lambda") p.lambda = value;
    else if (name == "gamma") p.gamma = value;
    else throw InvalidParams("unknown sweep parameter '" + name + "'");
    p.validate();
    return p;
}

std::vector<double> linear_grid(double start, double stop, int steps) {
    if (steps < 1) throw InvalidParams("sweep steps must be >= 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k) out.push_back(start + (stop - start) * k / steps);
    out.back() = stop;
    return out;
}

namespace {

SweepRow solve_point(const SweepSpec& spec, const SolverOptions& solver, double value) {
    SweepRow row;
    row.value = value;
    const Model model(with_parameter(spec.base, spec.parameter, value));
    SolveResult res;
    try {
        res = value_iteration(model, solver);
    } catch (const ConvergenceError& e) {
        row.converged = false;
        row.note = e.what();
        const auto& h = e.residual_history();
        row.iterations = static_cast<long>(h.size());
        row.residual = h.empty() ? 0.0 : h.back();
        return row;
    }
    row.iterations = res.iterations;
    row.residual = res.residual;
    row.rejecting_states = count_rejecting_states(res.policy);
    const SystemState ref = spec.reference_state.value_or(model.space().all_inactive());
    row.reference_value = res.values[static_cast<std::size_t>(model.space().encode(ref))];
    try {
        const StationaryDistribution dist = stationary_distribution(model, res.policy);
        const LongRunMetrics m = long_run_metrics(dist, model.space());
        row.avg_active_queues = m.avg_active_queues;
        row.avg_total_tasks = m.avg_total_tasks;
    } catch (const ConvergenceError& e) {
        row.converged = false;
        row.note = e.what();
    }
    return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SolverOptions& solver, unsigned threads) {
    if (spec.values.empty()) throw InvalidParams("sweep has no values");
    for (double v : spec.values) with_parameter(spec.base, spec.parameter, v);
    std::vector<SweepRow> rows(spec.values.size());
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, rows.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < rows.size(); k = next++) rows[k] = solve_point(spec, solver, spec.values[k]);
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows, const std::string& parameter) {
    std::ostringstream out;
    out << parameter << ",avg_active_queues,avg_total_tasks,rejecting_states,reference_value,iterations,residual,converged\n";
    for (const SweepRow& r : rows)
        out << fmt_real(r.value) << ',' << fmt_real(r.avg_active_queues) << ',' << fmt_real(r.avg_total_tasks) << ','
            << r.rejecting_states << ',' << fmt_real(r.reference_value) << ',' << r.iterations << ','
            << fmt_real(r.residual) << ',' << (r.converged ? 1 : 0) << '\n';
    return out.str();
}

std::string value_policy_csv(const Model& model, std::span<const double> V, const PolicyTable& policy) {
    std::ostringstream out;
    out << "index";
    for (int i = 0; i < model.n(); ++i) out << ",q" << i;
    out << ",value,arrival";
    for (int i = 0; i < model.n(); ++i) out << ",departure" << i;
    out << '\n';
    for (StateIndex s = 0; s < model.size(); ++s) {
        out << s;
        for (int i = 0; i < model.n(); ++i) out << ',' << model.level(s, i);
        out << ',' << fmt_real(V[static_cast<std::size_t>(s)]) << ',' << policy.arrival[static_cast<std::size_t>(s)].code();
        for (int i = 0; i < model.n(); ++i) {
            if (model.level(s, i) != 1)
                out << ",-";
            else
                out << ',' << (policy.departure_at(s, i) == DepartureAction::Destroy ? 'D' : 'K');
        }
        out << '\n';
    }
    return out.str();
}

PolicyTable read_policy_csv(const Model& model, const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw DomainError("policy CSV is empty");
    const int n = model.n();
    PolicyTable policy(model.size(), n);
    std::vector<bool> seen(static_cast<std::size_t>(model.size()), false);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != static_cast<std::size_t>(2 * n + 3)) throw DomainError("policy CSV row has wrong width: " + line);
        const StateIndex s = std::stoll(cells[0]);
        if (s < 0 || s >= model.size()) throw DomainError("policy CSV state index out of range");
        seen[static_cast<std::size_t>(s)] = true;
        policy.arrival[static_cast<std::size_t>(s)] = ArrivalAction::parse(cells[static_cast<std::size_t>(n) + 2]);
        for (int i = 0; i < n; ++i) {
            const std::string& d = cells[static_cast<std::size_t>(n + 3 + i)];
            if (d == "D") policy.departure_at(s, i) = DepartureAction::Destroy;
            else if (d != "K" && d != "-") throw DomainError("bad departure code '" + d + "'");
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw DomainError("policy CSV misses states");
    validate_policy(model, policy);
    return policy;
}

std::string value_surface_csv(std::span<const double> V, const StateSpace& space) {
    std::ostringstream out;
    out << "index";
    for (int i = 0; i < space.n(); ++i) out << ",q" << i;
    out << ",value\n";
    for (StateIndex s = 0; s < space.cardinality(); ++s) {
        out << s;
        for (int i = 0; i < space.n(); ++i) out << ',' << space.level_at(s, i);
        out << ',' << fmt_real(V[static_cast<std::size_t>(s)]) << '\n';
    }
    return out.str();
}

json to_json(const ModelParams& p) {
    return json{{"n", p.n},       {"B", p.B},       {"lambda", p.lambda}, {"mu", p.mu},
                {"r", p.r},       {"f", p.f},       {"beta", p.beta},     {"psi", p.psi},
                {"kappa", p.kappa}, {"h", p.h},     {"eta", p.eta},       {"gamma", p.gamma}};
}

json solve_summary(const Model& model, const SolveResult& result) {
    return json{{"params", to_json(model.params())},
                {"states", model.size()},
                {"iterations", result.iterations},
                {"residual", result.residual},
                {"rho", result.rho},
                {"error_bound", result.error_bound},
                {"value_bound", value_bound(model.params())},
                {"rejecting_states", count_rejecting_states(result.policy)},
                {"value_all_inactive", result.values[static_cast<std::size_t>(model.all_inactive_index())]}};
}

json to_json(const DominationReport& report, const StateSpace& space) {
    json v = json::array();
    for (const auto& x : report.violations)
        v.push_back({{"larger", space.decode(x.larger).levels},
                     {"smaller", space.decode(x.smaller).levels},
                     {"value_larger", x.value_larger},
                     {"value_smaller", x.value_smaller}});
    return json{{"checked_pairs", report.checked_pairs},
                {"epsilon", report.epsilon},
                {"violation_count", report.violations.size()},
                {"violations", v}};
}

json to_json(const ThresholdReport& report, const StateSpace& space) {
    json v = json::array();
    for (const auto& x : report.violations)
        v.push_back({{"smaller", space.decode(x.smaller).levels}, {"larger", space.decode(x.larger).levels}, {"queue", x.queue}});
    return json{{"checked_pairs", report.checked_pairs},
                {"same_inactive_set", report.same_inactive_set},
                {"epsilon", report.epsilon},
                {"violation_count", report.violations.size()},
                {"violations", v}};
}

json to_json(const SimEstimate& e, const StateSpace& space) {
    const CostBreakdown& b = e.breakdown_mean;
    return json{{"mean", e.mean},
                {"standard_error", e.standard_error},
                {"breakdown",
                 {{"build", b.build},
                  {"destroy", b.destroy},
                  {"delay", b.delay},
                  {"keep_alive", b.keep_alive},
                  {"reward", b.reward},
                  {"fine", b.fine}}},
                {"replications", e.replications},
                {"seed", e.seed},
                {"truncation_epsilon", e.truncation_epsilon},
                {"horizon", e.horizon},
                {"initial_state", space.decode(e.initial_state).levels},
                {"rng", kRngName}};
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw InvalidParams(where + " must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!allowed.contains(key)) throw InvalidParams("unknown key '" + key + "' in " + where);
}

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidParams(where + "." + key + ": " + e.what());
    }
}

template <typename T>
void get_opt(const json& j, const char* key, T& out, const std::string& where) {
    if (j.contains(key)) out = get<T>(j, key, where);
}

SystemState state_from_json(const json& j, const std::string& where) {
    try {
        return SystemState{j.get<std::vector<Level>>()};
    } catch (const json::exception& e) {
        throw InvalidParams(where + ": " + e.what());
    }
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    reject_unknown(j,
                   {"lambda", "mu", "n", "B", "r", "f", "beta", "psi", "kappa", "h", "eta", "gamma", "solver", "sim",
                    "sweep"},
                   "config");
    ExperimentConfig cfg;
    ModelParams& p = cfg.params;
    p.n = get<int>(j, "n", "config");
    p.B = get<int>(j, "B", "config");
    p.lambda = get<double>(j, "lambda", "config");
    p.gamma = get<double>(j, "gamma", "config");
    p.mu = get<std::vector<double>>(j, "mu", "config");
    p.eta.assign(static_cast<std::size_t>(std::max(p.B, 0)), 1.0);
    get_opt(j, "eta", p.eta, "config");
    get_opt(j, "r", p.r, "config");
    get_opt(j, "f", p.f, "config");
    get_opt(j, "beta", p.beta, "config");
    get_opt(j, "psi", p.psi, "config");
    get_opt(j, "kappa", p.kappa, "config");
    get_opt(j, "h", p.h, "config");
    p.validate();

    if (j.contains("solver")) {
        const json& s = j["solver"];
        reject_unknown(s, {"tol", "max_iters", "gauss_seidel"}, "solver");
        get_opt(s, "tol", cfg.solver.tol, "solver");
        get_opt(s, "max_iters", cfg.solver.max_iters, "solver");
        get_opt(s, "gauss_seidel", cfg.solver.gauss_seidel, "solver");
        if (!(cfg.solver.tol > 0.0)) throw InvalidParams("solver.tol must be positive");
        if (cfg.solver.max_iters < 1) throw InvalidParams("solver.max_iters must be >= 1");
    }
    if (j.contains("sim")) {
        const json& s = j["sim"];
        reject_unknown(s, {"initial_state", "replications", "seed", "truncation_epsilon", "horizon", "threads"}, "sim");
        SimConfig& c = cfg.sim.config;
        get_opt(s, "replications", c.replications, "sim");
        get_opt(s, "seed", c.seed, "sim");
        get_opt(s, "truncation_epsilon", c.truncation_epsilon, "sim");
        get_opt(s, "horizon", c.horizon, "sim");
        get_opt(s, "threads", c.threads, "sim");
        if (s.contains("initial_state")) cfg.sim.initial_state = state_from_json(s["initial_state"], "sim.initial_state");
        if (c.replications < 1) throw InvalidParams("sim.replications must be >= 1");
        if (c.truncation_epsilon < 0.0) throw InvalidParams("sim.truncation_epsilon must be > 0");
    }
    if (cfg.sim.initial_state) {
        const StateSpace space(p.n, p.B);
        cfg.sim.config.initial_state = space.encode(*cfg.sim.initial_state);
    }
    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        reject_unknown(s, {"parameter", "values", "start", "stop", "steps", "reference_state"}, "sweep");
        SweepSettings sw;
        sw.parameter = get<std::string>(s, "parameter", "sweep");
        if (std::find(kSweepParameters.begin(), kSweepParameters.end(), sw.parameter) == kSweepParameters.end())
            throw InvalidParams("unknown sweep parameter '" + sw.parameter + "'");
        if (s.contains("values")) {
            if (s.contains("start") || s.contains("stop") || s.contains("steps"))
                throw InvalidParams("sweep takes either values or start/stop/steps");
            sw.values = get<std::vector<double>>(s, "values", "sweep");
        } else {
            sw.values = linear_grid(get<double>(s, "start", "sweep"), get<double>(s, "stop", "sweep"),
                                    get<int>(s, "steps", "sweep"));
        }
        if (s.contains("reference_state")) {
            sw.reference_state = state_from_json(s["reference_state"], "sweep.reference_state");
            StateSpace(p.n, p.B).encode(*sw.reference_state);
        }
        for (double v : sw.values) with_parameter(p, sw.parameter, v);
        cfg.sweep = std::move(sw);
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParams("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidParams("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

SweepSpec ExperimentConfig::sweep_spec() const {
    if (!sweep) throw InvalidParams("config has no sweep section");
    return SweepSpec{sweep->parameter, sweep->values, params, sweep->reference_state};
}

// Published settings: five identical queues with mu = 1 and fine 10. The
// discount rate and the build/destroy costs are not given for these studies.
namespace {

constexpr double kPresetGamma = 0.05;
constexpr double kFig2DelayCost = 0.001;
constexpr double kFig3BuildCost = 5.0;
constexpr double kFig3DestroyCost = 5.0;

}  // namespace

ModelParams fig2_params(double kappa) {
    ModelParams p = ModelParams::uniform(5, 4, 4.0, 1.0, kPresetGamma);
    p.f = 10.0;
    p.h = kFig2DelayCost;
    p.kappa = kappa;
    p.validate();
    return p;
}

ModelParams fig3_params(double h) {
    ModelParams p = ModelParams::uniform(5, 6, 4.75, 1.0, kPresetGamma);
    p.f = 10.0;
    p.kappa = 1.0;
    p.h = h;
    p.beta = kFig3BuildCost;
    p.psi = kFig3DestroyCost;
    p.eta = {1.0, 1.8, 2.5, 3.5, 4.5, 5.5};
    p.validate();
    return p;
}

ModelParams fig4_params() {
    ModelParams p = fig3_params(1.0);
    p.beta = 0.0;
    p.psi = 0.0;
    return p;
}

SweepSpec fig2_sweep() { return SweepSpec{"kappa", linear_grid(0.0, 20.0, 80), fig2_params(0.0), std::nullopt}; }

SweepSpec fig3_sweep() { return SweepSpec{"h", linear_grid(0.0, 5.0, 50), fig3_params(0.0), std::nullopt}; }

json preset_metadata(const std::string& name) {
    json meta{{"preset", name}, {"gamma", kPresetGamma}, {"reference_state", "all inactive"}};
    if (name == "fig2") {
        meta["params"] = to_json(fig2_params(0.0));
        meta["grid"] = {{"parameter", "kappa"}, {"start", 0.0}, {"stop", 20.0}, {"steps", 80}};
        meta["notes"] = json::array({"negligible delay cost taken as h = 0.001 with eta = 1",
                                     "gamma, beta, psi not published; gamma = 0.05, beta = psi = 0",
                                     "arrival rate 4 (the delay-cost study uses 4.75)"});
    } else if (name == "fig3") {
        meta["params"] = to_json(fig3_params(0.0));
        meta["grid"] = {{"parameter", "h"}, {"start", 0.0}, {"stop", 5.0}, {"steps", 50}};
        meta["notes"] = json::array({"gamma, beta, psi not published; gamma = 0.05, beta = psi = 5",
                                     "build/destroy costs high relative to kappa keep every queue active",
                                     "arrival rate 4.75 (the keep-alive study uses 4)"});
    } else if (name == "fig4") {
        meta["params"] = to_json(fig4_params());
        meta["notes"] = json::array({"only B = 6 is published; remaining values follow the delay-cost study with h = 1"});
    } else {
        throw InvalidParams("unknown preset '" + name + "'");
    }
    return meta;
}

}  // namespace flexq
