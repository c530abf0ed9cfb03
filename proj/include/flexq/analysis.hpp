#pragma once

#include "flexq/model.hpp"
#include "flexq/policy.hpp"
#include "flexq/solver.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace flexq {

struct DominationViolation {
    StateIndex larger;   // componentwise larger state
    StateIndex smaller;
    double value_larger;
    double value_smaller;
};

struct DominationReport {
    std::int64_t checked_pairs = 0;
    std::vector<DominationViolation> violations;
    double epsilon = 0.0;
};

/// Checks V(a) <= V(b) + eps for every a >= b componentwise with the same
/// inactive queues (distinct pairs only).
DominationReport check_domination(std::span<const double> V, const StateSpace& space, double eps);

/// V(smaller) - V(larger); requires larger >= smaller with identical inactive sets.
double compute_alpha(std::span<const double> V, const StateSpace& space, const SystemState& smaller,
                     const SystemState& larger);

struct ThresholdViolation {
    StateIndex smaller;  // activation of `queue` strictly optimal here
    StateIndex larger;   // ... but not weakly optimal here
    int queue;
};

struct ThresholdReport {
    std::int64_t checked_pairs = 0;
    std::vector<ThresholdViolation> violations;
    bool same_inactive_set = true;
    double epsilon = 0.0;
};

/// Build-threshold check over the arrival Q-values of a solved table. With
/// `same_inactive_set` false, larger states may have extra active queues.
ThresholdReport check_build_threshold(const Model& model, std::span<const double> V, double eps_tie = kTieEpsilon,
                                      bool same_inactive_set = true);

std::int64_t count_rejecting_states(const PolicyTable& policy);

using StationaryDistribution = std::vector<double>;

/// Limiting distribution of the closed-loop chain started at all-inactive,
/// by power iteration of the uniformized chain (constant lambda + sum mu).
StationaryDistribution stationary_distribution(const Model& model, const PolicyTable& policy, double tol = 1e-10,
                                               long max_iters = 5'000'000);

/// L1 distance between dist and dist * P for the uniformized closed-loop chain.
double stationary_residual(const Model& model, const PolicyTable& policy, std::span<const double> dist);

struct LongRunMetrics {
    double avg_active_queues = 0.0;
    double avg_total_tasks = 0.0;
};

LongRunMetrics long_run_metrics(std::span<const double> dist, const StateSpace& space);

}  // namespace flexq
