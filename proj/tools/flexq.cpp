// Command line driver: solve, simulate, sweep, check, export.

#include "flexq/errors.hpp"
#include "flexq/experiments.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace flexq;

namespace {

struct Source {
    std::string config;
    std::string preset;
    double preset_value = -1.0;
};

void add_source(CLI::App* cmd, Source& src) {
    cmd->add_option("-c,--config", src.config, "JSON config file");
    cmd->add_option("--preset", src.preset, "built-in configuration: fig2, fig3 or fig4")
        ->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
    cmd->add_option("--value", src.preset_value, "swept parameter value for fig2 (kappa) / fig3 (h)");
}

ExperimentConfig resolve(const Source& src) {
    if (src.config.empty() == src.preset.empty()) throw InvalidParams("give exactly one of --config or --preset");
    if (!src.config.empty()) return load_config(src.config);
    ExperimentConfig cfg;
    if (src.preset == "fig2") {
        const SweepSpec spec = fig2_sweep();
        cfg.params = fig2_params(src.preset_value >= 0 ? src.preset_value : 0.0);
        cfg.sweep = SweepSettings{spec.parameter, spec.values, std::nullopt};
    } else if (src.preset == "fig3") {
        const SweepSpec spec = fig3_sweep();
        cfg.params = fig3_params(src.preset_value >= 0 ? src.preset_value : 1.0);
        cfg.sweep = SweepSettings{spec.parameter, spec.values, std::nullopt};
    } else {
        cfg.params = fig4_params();
    }
    return cfg;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flexible-queue VNF deployment MDP: solver, simulator and experiments"};
    app.require_subcommand(1);

    Source solve_src;
    std::string solve_csv, solve_summary_path;
    bool solve_gs = false;
    auto* solve = app.add_subcommand("solve", "value iteration; writes the value/policy CSV and a JSON summary");
    add_source(solve, solve_src);
    solve->add_option("--csv", solve_csv, "value/policy CSV output (default stdout)");
    solve->add_option("--summary", solve_summary_path, "JSON summary output");
    solve->add_flag("--gauss-seidel", solve_gs, "in-place sweeps");

    Source sim_src;
    std::string sim_policy, sim_out, sim_log;
    int sim_reps = 0;
    std::uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of a policy's discounted value");
    add_source(simulate, sim_src);
    simulate->add_option("--policy", sim_policy, "policy CSV from `solve` (default: solve first)");
    simulate->add_option("--replications", sim_reps, "override sim.replications");
    auto* seed_opt = simulate->add_option("--seed", sim_seed, "override sim.seed");
    simulate->add_option("--out", sim_out, "estimate JSON output (default stdout)");
    simulate->add_option("--event-log", sim_log, "CSV event log of the first replication");

    Source sweep_src;
    std::string sweep_out, sweep_meta;
    unsigned sweep_threads = 0;
    auto* sweep = app.add_subcommand("sweep", "one-parameter sweep; writes CSV rows");
    add_source(sweep, sweep_src);
    sweep->add_option("--out", sweep_out, "CSV output (default stdout)");
    sweep->add_option("--meta", sweep_meta, "JSON metadata output");
    sweep->add_option("--threads", sweep_threads, "worker threads (0 = hardware)");

    Source check_src;
    std::string check_out;
    bool check_unrestricted = false;
    auto* check = app.add_subcommand("check", "domination and build-threshold reports");
    add_source(check, check_src);
    check->add_option("--out", check_out, "JSON output (default stdout)");
    check->add_flag("--unrestricted", check_unrestricted,
                    "also report the threshold check without the same-inactive-set restriction");

    Source export_src;
    std::string export_out;
    auto* exporter = app.add_subcommand("export", "value surface CSV in state-index order");
    add_source(exporter, export_src);
    exporter->add_option("--out", export_out, "CSV output (default stdout)");

    CLI11_PARSE(app, argc, argv);
    sim_seed_set = seed_opt->count() > 0;

    try {
        if (*solve) {
            ExperimentConfig cfg = resolve(solve_src);
            if (solve_gs) cfg.solver.gauss_seidel = true;
            const Model model(cfg.params);
            const SolveResult res = value_iteration(model, cfg.solver);
            emit(solve_csv, value_policy_csv(model, res.values, res.policy));
            if (!solve_summary_path.empty()) emit(solve_summary_path, solve_summary(model, res).dump(2) + "\n");
        } else if (*simulate) {
            ExperimentConfig cfg = resolve(sim_src);
            const Model model(cfg.params);
            PolicyTable policy;
            std::optional<double> solved_value;
            if (!sim_policy.empty()) {
                policy = read_policy_csv(model, read_file(sim_policy));
            } else {
                SolveResult res = value_iteration(model, cfg.solver);
                solved_value = res.values[static_cast<std::size_t>(cfg.sim.config.initial_state)];
                policy = std::move(res.policy);
            }
            SimConfig sc = cfg.sim.config;
            if (sim_reps > 0) sc.replications = sim_reps;
            if (sim_seed_set) sc.seed = sim_seed;
            const SimEstimate est = estimate_value(model, policy, sc);
            json out = to_json(est, model.space());
            if (solved_value) out["solver_value"] = *solved_value;
            emit(sim_out, out.dump(2) + "\n");
            if (!sim_log.empty()) {
                std::vector<SimEvent> events;
                simulate_once(model, policy, sc, replication_seed(sc.seed, 0), &events);
                emit(sim_log, events_to_csv(events));
            }
        } else if (*sweep) {
            const ExperimentConfig cfg = resolve(sweep_src);
            const SweepSpec spec = cfg.sweep_spec();
            const auto rows = run_sweep(spec, cfg.solver, sweep_threads);
            emit(sweep_out, sweep_to_csv(rows, spec.parameter));
            if (!sweep_meta.empty()) {
                json meta = sweep_src.preset.empty() ? json{{"params", to_json(spec.base)}} : preset_metadata(sweep_src.preset);
                meta["parameter"] = spec.parameter;
                meta["values"] = spec.values;
                meta["solver"] = {{"tol", cfg.solver.tol}, {"max_iters", cfg.solver.max_iters}};
                emit(sweep_meta, meta.dump(2) + "\n");
            }
        } else if (*check) {
            const ExperimentConfig cfg = resolve(check_src);
            const Model model(cfg.params);
            const SolveResult res = value_iteration(model, cfg.solver);
            json out{{"solve", solve_summary(model, res)},
                     {"domination", to_json(check_domination(res.values, model.space(), 100 * cfg.solver.tol), model.space())},
                     {"build_threshold", to_json(check_build_threshold(model, res.values), model.space())}};
            if (check_unrestricted)
                out["build_threshold_unrestricted"] =
                    to_json(check_build_threshold(model, res.values, kTieEpsilon, false), model.space());
            emit(check_out, out.dump(2) + "\n");
        } else if (*exporter) {
            const ExperimentConfig cfg = resolve(export_src);
            const Model model(cfg.params);
            const SolveResult res = value_iteration(model, cfg.solver);
            emit(export_out, value_surface_csv(res.values, model.space()));
        }
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
