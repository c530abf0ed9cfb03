#pragma once

#include "flexq/model.hpp"
#include "flexq/policy.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flexq {

inline constexpr const char* kRngName = "mt19937_64 seeded per replication by splitmix64(seed + (rep + 1) * 0x9e3779b97f4a7c15)";

struct SimConfig {
    StateIndex initial_state = 0;
    /// Stop once value_bound * exp(-gamma t) drops below this. 0 selects 1e-6 * value_bound.
    double truncation_epsilon = 0.0;
    /// Fixed horizon overriding the truncation rule when > 0.
    double horizon = 0.0;
    int replications = 1000;
    std::uint64_t seed = 1;
    /// Worker threads for replications; 0 uses the hardware concurrency.
    unsigned threads = 0;
};

/// Discounted totals of each cost component, all nonnegative.
struct CostBreakdown {
    double build = 0.0;       // J_b
    double destroy = 0.0;     // J_d
    double delay = 0.0;       // J_h
    double keep_alive = 0.0;  // J_kappa
    double reward = 0.0;      // J_r
    double fine = 0.0;        // J_f

    double total() const { return -build - destroy - delay - keep_alive + reward - fine; }
    CostBreakdown& operator+=(const CostBreakdown& o);
    bool operator==(const CostBreakdown&) const = default;
};

struct SimEvent {
    double time = 0.0;
    std::string type;  // arrival | departure | sojourn
    int queue = -1;
    StateIndex state_after = 0;
    double increment = 0.0;
    std::string component;  // build | destroy | delay | keep_alive | reward | fine
};

double effective_truncation_epsilon(const ModelParams& p, const SimConfig& config);
double simulation_horizon(const ModelParams& p, const SimConfig& config);

/// splitmix64 finaliser applied to seed + (rep + 1) * golden gamma.
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t rep);

/// One discounted sample path. Event increments are appended to `log` when non-null.
CostBreakdown simulate_once(const Model& model, const PolicyTable& policy, const SimConfig& config,
                            std::uint64_t seed, std::vector<SimEvent>* log = nullptr);

struct SimEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    CostBreakdown breakdown_mean;
    int replications = 0;
    std::uint64_t seed = 0;
    double truncation_epsilon = 0.0;
    double horizon = 0.0;
    StateIndex initial_state = 0;
};

SimEstimate estimate_value(const Model& model, const PolicyTable& policy, const SimConfig& config);

std::string events_to_csv(const std::vector<SimEvent>& events);

}  // namespace flexq
