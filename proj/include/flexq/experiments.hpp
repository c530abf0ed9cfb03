#pragma once

#include "flexq/analysis.hpp"
#include "flexq/model.hpp"
#include "flexq/simulator.hpp"
#include "flexq/solver.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace flexq {

using json = nlohmann::json;

/// Parameters a sweep may vary.
inline const std::vector<std::string> kSweepParameters{"kappa", "h", "beta", "psi", "f", "r", "lambda", "gamma"};

/// Copy of `base` with one named parameter replaced, re-validated.
ModelParams with_parameter(const ModelParams& base, const std::string& name, double value);

/// start, start + (stop - start) / steps, ..., stop  (steps + 1 points).
std::vector<double> linear_grid(double start, double stop, int steps);

struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
    ModelParams base;
    std::optional<SystemState> reference_state;  // all inactive when unset
};

struct SweepRow {
    double value = 0.0;
    double avg_active_queues = 0.0;
    double avg_total_tasks = 0.0;
    std::int64_t rejecting_states = 0;
    double reference_value = 0.0;
    long iterations = 0;
    double residual = 0.0;
    bool converged = true;
    std::string note;
};

/// Solves every point, extracts the policy and computes the long-run metrics.
/// Points run concurrently; rows keep the order of spec.values.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SolverOptions& solver, unsigned threads = 0);

std::string sweep_to_csv(const std::vector<SweepRow>& rows, const std::string& parameter);

/// index, q0..q(n-1), value, arrival code, per-queue departure codes (K, D or -).
std::string value_policy_csv(const Model& model, std::span<const double> V, const PolicyTable& policy);

/// Reads the arrival/departure columns written by value_policy_csv.
PolicyTable read_policy_csv(const Model& model, const std::string& csv);

/// index, q0..q(n-1), value in index order.
std::string value_surface_csv(std::span<const double> V, const StateSpace& space);

json solve_summary(const Model& model, const SolveResult& result);
json to_json(const DominationReport& report, const StateSpace& space);
json to_json(const ThresholdReport& report, const StateSpace& space);
json to_json(const SimEstimate& estimate, const StateSpace& space);
json to_json(const ModelParams& p);

struct SimSettings {
    SimConfig config;
    std::optional<SystemState> initial_state;
};

struct SweepSettings {
    std::string parameter;
    std::vector<double> values;
    std::optional<SystemState> reference_state;
};

struct ExperimentConfig {
    ModelParams params;
    SolverOptions solver;
    SimSettings sim;
    std::optional<SweepSettings> sweep;

    SweepSpec sweep_spec() const;
};

/// Parses the JSON config; unknown keys are rejected with InvalidParams.
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);

// Reproduction settings for the three published studies. Grid choices and
// unstated parameters are recorded in preset_metadata().
ModelParams fig2_params(double kappa);
ModelParams fig3_params(double h);
ModelParams fig4_params();
SweepSpec fig2_sweep();
SweepSpec fig3_sweep();
json preset_metadata(const std::string& name);

}  // namespace flexq
