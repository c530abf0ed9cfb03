// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: flexq_acceptance [path-to-flexq-cli]

#include "flexq/analysis.hpp"
#include "flexq/errors.hpp"
#include "flexq/experiments.hpp"
#include "flexq/format.hpp"
#include "flexq/simulator.hpp"
#include "flexq/solver.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

using namespace flexq;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Clock {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fixed(double x, int digits = 3) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << x;
    return s.str();
}

std::string sci(double x) {
    std::ostringstream s;
    s.setf(std::ios::scientific);
    s.precision(2);
    s << x;
    return s.str();
}

// Tolerance whose a-posteriori bound rho / (1 - rho) * tol stays below `bound`.
double tol_for_bound(const Model& model, double bound) {
    const double rho = model.contraction_modulus();
    return bound * (1 - rho) / rho;
}

Outcome oracle_equivalence() {
    Clock clock;
    std::mt19937_64 g(20240601);
    double worst = 0.0;
    int instances = 0;
    for (int n : {1, 2}) {
        for (int k = 0; k < 3; ++k) {
            const Model model(flexq::testing::random_params(g, n, 2, 0.3 + 0.3 * k));
            const SolveResult res = value_iteration(model, {.tol = tol_for_bound(model, 1e-10)});
            worst = std::max(worst, flexq::testing::sup_distance(res.values, brute_force_solve(model)));
            ++instances;
        }
    }
    const double secs = clock.seconds();
    return {worst <= 1e-8 && secs < 60.0, std::to_string(instances) + " instances, max sup-norm gap " + sci(worst) +
                                              ", " + fixed(secs, 1) + " s"};
}

Outcome closed_form() {
    ModelParams p = ModelParams::uniform(5, 4, 4.0, 1.0, 1.0);
    p.f = 10.0;
    p.beta = 1e6;
    p.kappa = 1e4;
    const Model model(p);
    const double tol = 1e-9;
    const SolveResult res = value_iteration(model, {.tol = tol});
    const double v = res.values[static_cast<std::size_t>(model.all_inactive_index())];
    const double target = -p.lambda * p.f / p.gamma;
    const bool never_activates = res.policy.arrival[0] == ArrivalAction::reject();
    return {std::abs(v - target) <= 10 * tol && never_activates,
            "V(all inactive) = " + fmt_real(v) + ", target " + fmt_real(target) + ", gap " + sci(std::abs(v - target))};
}

Outcome domination_on(const SweepSpec& spec, int stride, const std::string& label) {
    Clock clock;
    int points = 0, failing = 0;
    std::size_t violations = 0;
    std::int64_t pairs = 0;
    std::string first_bad;
    for (std::size_t k = 0; k < spec.values.size(); k += static_cast<std::size_t>(stride)) {
        const Model model(with_parameter(spec.base, spec.parameter, spec.values[k]));
        const SolveResult res = value_iteration(model, {.tol = 1e-9});
        const DominationReport r = check_domination(res.values, model.space(), 100 * 1e-9);
        ++points;
        pairs += r.checked_pairs;
        violations += r.violations.size();
        if (!r.violations.empty()) {
            ++failing;
            if (first_bad.empty()) {
                const auto& v = r.violations.front();
                first_bad = "; first at " + spec.parameter + "=" + fmt_real(spec.values[k]) + ": V" +
                            to_string(model.space().decode(v.larger)) + "=" + fmt_real(v.value_larger) + " > V" +
                            to_string(model.space().decode(v.smaller)) + "=" + fmt_real(v.value_smaller);
            }
        }
    }
    return {violations == 0, label + ": " + std::to_string(points) + " grid points, " + std::to_string(pairs) +
                                 " pairs, " + std::to_string(violations) + " violations at " +
                                 std::to_string(failing) + " points" + first_bad + ", " + fixed(clock.seconds(), 1) +
                                 " s"};
}

Outcome lemma_domination() {
    const Outcome a = domination_on(fig2_sweep(), 4, "keep-alive study");
    const Outcome b = domination_on(fig3_sweep(), 5, "delay-cost study");
    return {a.pass && b.pass, a.detail + " | " + b.detail};
}

Outcome build_threshold() {
    std::mt19937_64 g(777);
    std::int64_t pairs = 0;
    std::size_t violations = 0;
    int instances = 0;
    for (int n = 1; n <= 3; ++n)
        for (int B = 2; B <= 4; ++B)
            for (int k = 0; k < 2; ++k) {
                ModelParams p = flexq::testing::random_params(g, n, B, 0.05);
                p.f += 5.0;
                const Model model(p);
                const SolveResult res = value_iteration(model, {.tol = 1e-10});
                const ThresholdReport r = check_build_threshold(model, res.values);
                pairs += r.checked_pairs;
                violations += r.violations.size();
                ++instances;
            }
    // Report only: strong discounting.
    std::size_t large_gamma = 0;
    for (int k = 0; k < 3; ++k) {
        ModelParams p = flexq::testing::random_params(g, 3, 3, 5.0);
        p.f += 5.0;
        const Model model(p);
        large_gamma += check_build_threshold(model, value_iteration(model).values).violations.size();
    }
    return {violations == 0 && pairs > 0, std::to_string(instances) + " instances, " + std::to_string(pairs) +
                                              " pairs, " + std::to_string(violations) +
                                              " violations (gamma = 5 report: " + std::to_string(large_gamma) +
                                              " violations, not asserted)"};
}

Outcome keep_alive_sweep() {
    Clock clock;
    const SweepSpec spec = fig2_sweep();
    const std::vector<SweepRow> rows = run_sweep(spec, {.tol = 1e-9});
    std::vector<std::string> problems;
    for (const SweepRow& r : rows)
        if (!r.converged) problems.push_back("not converged at kappa=" + fmt_real(r.value));
    for (std::size_t k = 1; k < rows.size(); ++k)
        if (rows[k].avg_active_queues > rows[k - 1].avg_active_queues + 1e-9)
            problems.push_back("increase at kappa=" + fmt_real(rows[k].value));
    double peak = 0.0;
    for (const SweepRow& r : rows) peak = std::max(peak, r.avg_active_queues);
    if (rows.front().avg_active_queues < 1.0) problems.push_back("starts below 1");
    if (std::abs(rows.back().avg_active_queues) > 1e-6) problems.push_back("does not end at 0");

    // Last point still >= 90% of the peak, first point at zero after it.
    std::size_t hi = 0, zero = rows.size() - 1;
    for (std::size_t k = 0; k < rows.size(); ++k)
        if (rows[k].avg_active_queues >= 0.9 * peak) hi = k;
    for (std::size_t k = rows.size(); k-- > hi;)
        if (std::abs(rows[k].avg_active_queues) <= 1e-6) zero = k;
    const double range = spec.values.back() - spec.values.front();
    const double span = (spec.values[zero] - spec.values[hi]) / range;
    if (span > 0.2) problems.push_back("transition spans " + fixed(100 * span, 1) + "% of the range");

    const auto all_states = static_cast<std::int64_t>(std::pow(spec.base.B + 2, spec.base.n));
    if (rows.back().rejecting_states != all_states)
        problems.push_back("rejecting_states " + std::to_string(rows.back().rejecting_states) + " at the high end, expected " +
                           std::to_string(all_states));
    const double secs = clock.seconds();
    if (secs > 900.0) problems.push_back("runtime over 15 min");

    std::string detail = std::to_string(rows.size()) + " points, active " + fmt_real(rows.front().avg_active_queues) +
                         " -> " + fmt_real(rows.back().avg_active_queues) + ", >=90% of peak until kappa=" +
                         fmt_real(spec.values[hi]) + ", zero from kappa=" + fmt_real(spec.values[zero]) + ", " +
                         fixed(secs, 1) + " s";
    for (const auto& p : problems) detail += "; " + p;
    return {problems.empty(), detail};
}

Outcome delay_cost_sweep() {
    Clock clock;
    const SweepSpec spec = fig3_sweep();
    const std::vector<SweepRow> rows = run_sweep(spec, {.tol = 1e-9});
    std::vector<std::string> problems;
    double worst = 0.0;
    for (const SweepRow& r : rows) {
        if (!r.converged) problems.push_back("not converged at h=" + fmt_real(r.value));
        worst = std::max(worst, std::abs(r.avg_active_queues - 5.0));
    }
    if (worst > 0.01) problems.push_back("active queues deviate from 5 by " + fmt_real(worst));
    for (std::size_t k = 1; k < rows.size(); ++k)
        if (rows[k].avg_total_tasks > rows[k - 1].avg_total_tasks + 1e-9)
            problems.push_back("tasks increase at h=" + fmt_real(rows[k].value));
    if (!(rows.back().avg_total_tasks < rows.front().avg_total_tasks)) problems.push_back("no net decrease in tasks");
    const double secs = clock.seconds();
    if (secs > 1800.0) problems.push_back("runtime over 30 min");
    std::string detail = std::to_string(rows.size()) + " points, max |active - 5| " + sci(worst) + ", tasks " +
                         fmt_real(rows.front().avg_total_tasks) + " -> " + fmt_real(rows.back().avg_total_tasks) +
                         ", " + fixed(secs, 1) + " s";
    for (const auto& p : problems) detail += "; " + p;
    return {problems.empty(), detail};
}

Outcome block_structure() {
    const Model model(fig4_params());
    const SolveResult res = value_iteration(model, {.tol = 1e-9});
    const std::string csv = value_surface_csv(res.values, model.space());

    // Re-read the export: (q0, q1) -> sum and count.
    std::map<std::pair<int, int>, std::pair<double, int>> cells;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    const int n = model.n();
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) f.push_back(c);
        const int q0 = std::stoi(f[1]), q1 = std::stoi(f[2]);
        auto& cell = cells[{q0, q1}];
        cell.first += std::stod(f[static_cast<std::size_t>(n) + 1]);
        ++cell.second;
    }
    const int B = model.B();
    std::vector<std::string> problems;
    std::vector<double> block(static_cast<std::size_t>(B + 2));
    for (int q0 = -1; q0 <= B; ++q0) {
        double sum = 0.0;
        int count = 0;
        double prev = INFINITY;
        for (int q1 = -1; q1 <= B; ++q1) {
            const auto& c = cells[{q0, q1}];
            sum += c.first;
            count += c.second;
            const double mean = c.first / c.second;
            if (mean > prev + 1e-9) problems.push_back("q1 mean rises at (" + std::to_string(q0) + "," + std::to_string(q1) + ")");
            prev = mean;
        }
        block[static_cast<std::size_t>(q0 + 1)] = sum / count;
        if (q0 > -1 && block[static_cast<std::size_t>(q0 + 1)] > block[static_cast<std::size_t>(q0)] + 1e-9)
            problems.push_back("q0 block mean rises at q0=" + std::to_string(q0));
    }
    std::string detail = std::to_string(B + 2) + " blocks of " + std::to_string(B + 2) + " sub-blocks, block means";
    for (double b : block) detail += " " + fmt_real(b);
    for (const auto& p : problems) detail += "; " + p;
    return {problems.empty(), detail};
}

Outcome simulator_agreement() {
    struct Case {
        int n, B;
        double gamma;
    };
    std::mt19937_64 g(4242);
    int cases = 0, ok = 0;
    double worst_ratio = 0.0;
    for (const Case c : {Case{2, 3, 0.5}, Case{1, 4, 0.3}, Case{3, 2, 0.5}}) {
        const Model model(flexq::testing::random_params(g, c.n, c.B, c.gamma));
        const SolveResult res = value_iteration(model, {.tol = 1e-10});
        for (StateIndex s : {model.all_inactive_index(), model.size() / 2, model.size() - 1}) {
            SimConfig cfg;
            cfg.initial_state = s;
            cfg.replications = 2000;
            cfg.seed = 1000 + static_cast<std::uint64_t>(cases);
            const SimEstimate est = estimate_value(model, res.policy, cfg);
            const double gap = std::abs(est.mean - res.values[static_cast<std::size_t>(s)]);
            const double allowed = 3 * est.standard_error + est.truncation_epsilon;
            worst_ratio = std::max(worst_ratio, gap / allowed);
            ok += gap <= allowed;
            ++cases;
        }
    }
    return {ok == cases, std::to_string(ok) + "/" + std::to_string(cases) +
                             " cases within 3 SE + truncation epsilon, worst gap/allowance " + fixed(worst_ratio)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism(const std::string& cli) {
    std::vector<std::string> problems;
    // Library level.
    {
        std::mt19937_64 g(99);
        const Model model(flexq::testing::random_params(g, 2, 3, 0.2));
        const auto csv = [&] {
            const SolveResult r = value_iteration(model);
            return value_policy_csv(model, r.values, r.policy);
        };
        if (csv() != csv()) problems.push_back("solve CSV differs");
        SweepSpec spec{"kappa", linear_grid(0.0, 2.0, 4), model.params(), std::nullopt};
        if (sweep_to_csv(run_sweep(spec, {}, 1), "kappa") != sweep_to_csv(run_sweep(spec, {}, 2), "kappa"))
            problems.push_back("sweep CSV differs");
        const PolicyTable policy = value_iteration(model).policy;
        SimConfig cfg;
        cfg.replications = 200;
        cfg.seed = 7;
        if (to_json(estimate_value(model, policy, cfg), model.space()).dump() !=
            to_json(estimate_value(model, policy, cfg), model.space()).dump())
            problems.push_back("simulate summary differs");
    }
    // CLI level.
    std::string cli_note = "CLI not given";
    if (!cli.empty()) {
        const fs::path dir = fs::temp_directory_path() / ("flexq_accept_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        std::ofstream(dir / "cfg.json") << R"({"n": 2, "B": 3, "lambda": 2.0, "gamma": 0.2, "mu": [1.0, 1.5],
            "r": 1.0, "f": 4.0, "beta": 1.0, "psi": 0.5, "kappa": 0.3, "h": 0.2, "eta": [1.0, 1.5, 2.0],
            "sim": {"replications": 300, "seed": 11},
            "sweep": {"parameter": "kappa", "start": 0.0, "stop": 2.0, "steps": 8}})";
        const std::string cfg = (dir / "cfg.json").string();
        const auto run = [&](const std::string& args) {
            const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null";
            if (std::system(cmd.c_str()) != 0) problems.push_back("command failed: " + args);
        };
        for (int k = 0; k < 2; ++k) {
            const std::string tag = std::to_string(k);
            run("solve -c " + cfg + " --csv " + (dir / ("solve" + tag + ".csv")).string() + " --summary " +
                (dir / ("solve" + tag + ".json")).string());
            run("sweep -c " + cfg + " --threads " + std::to_string(k + 1) + " --out " +
                (dir / ("sweep" + tag + ".csv")).string());
            run("simulate -c " + cfg + " --out " + (dir / ("sim" + tag + ".json")).string());
        }
        for (const char* name : {"solve", "sweep", "sim"}) {
            const std::string ext = std::string(name) == "sim" ? ".json" : ".csv";
            const auto a = slurp(dir / (std::string(name) + "0" + ext));
            const auto b = slurp(dir / (std::string(name) + "1" + ext));
            if (a.empty() || a != b) problems.push_back(std::string("CLI ") + name + " output differs");
        }
        if (slurp(dir / "solve0.json") != slurp(dir / "solve1.json")) problems.push_back("CLI solve summary differs");
        fs::remove_all(dir);
        cli_note = "CLI solve/sweep/simulate compared byte for byte";
    }
    std::string detail = "library solve/sweep/simulate repeated; " + cli_note;
    for (const auto& p : problems) detail += "; " + p;
    return {problems.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"oracle equivalence", oracle_equivalence},
        {"closed-form reject-all value", closed_form},
        {"domination of values", lemma_domination},
        {"build threshold", build_threshold},
        {"keep-alive sweep", keep_alive_sweep},
        {"delay-cost sweep", delay_cost_sweep},
        {"value surface blocks", block_structure},
        {"solver-simulator agreement", simulator_agreement},
        {"determinism", [&] { return determinism(cli); }},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << "CRITERION " << k + 1 << ' ' << (o.pass ? "PASS" : "FAIL") << " [" << criteria[k].first
                  << "] " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
