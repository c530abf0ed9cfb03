#pragma once

#include "flexq/model.hpp"
#include "flexq/policy.hpp"

#include <span>
#include <vector>

namespace flexq {

using ValueTable = std::vector<double>;

inline constexpr double kTieEpsilon = 1e-9;

/// Values of the arrival bracket at one state: admit values already include
/// r (and -beta on activation); reject is V(q) - f.
struct ArrivalQValues {
    double reject = 0.0;
    std::vector<ArrivalAction> options;  // feasible non-reject actions, queue order
    std::vector<double> values;          // same order as options

    double best() const;
};

ArrivalQValues arrival_q_values(const Model& model, std::span<const double> V, StateIndex s);

struct BackupResult {
    double value = 0.0;
    ArrivalAction arrival;
    std::vector<DepartureAction> departure;  // per queue, Keep unless class One and destroy wins
};

/// One application of the Bellman operator at state s.
double bellman_backup(const Model& model, std::span<const double> V, StateIndex s);

/// Same value plus the tie-broken maximisers.
BackupResult bellman_backup_full(const Model& model, std::span<const double> V, StateIndex s,
                                 double eps_tie = kTieEpsilon);

/// Applies the Bellman operator to every state.
ValueTable apply_operator(const Model& model, std::span<const double> V);

struct SolverOptions {
    double tol = 1e-9;
    long max_iters = 1'000'000;
    bool gauss_seidel = false;
    bool keep_history = true;
};

struct SolveResult {
    ValueTable values;
    PolicyTable policy;
    long iterations = 0;
    double residual = 0.0;
    double rho = 0.0;
    /// rho / (1 - rho) * residual, a sup-norm bound on the distance to the fixed point.
    double error_bound = 0.0;
    std::vector<double> residual_history;
};

/// Value iteration from V = 0. Throws ConvergenceError at max_iters.
SolveResult value_iteration(const Model& model, const SolverOptions& options = {});

/// Greedy policy with deterministic tie-breaking: admit over reject, schedule
/// over activate, then the least loaded queue, then the lowest index. Destroy
/// only wins by more than eps_tie.
PolicyTable extract_policy(const Model& model, std::span<const double> V, double eps_tie = kTieEpsilon);

/// Discounted value of following `policy` forever.
ValueTable policy_evaluation(const Model& model, const PolicyTable& policy);

/// Number of stationary deterministic feasible policies.
long double policy_count(const Model& model);

inline constexpr long double kBruteForceLimit = 1e9L;

/// Pointwise maximum over the values of every stationary deterministic policy.
/// Refuses instances with more than `max_policies` policies.
ValueTable brute_force_solve(const Model& model, long double max_policies = kBruteForceLimit);

}  // namespace flexq
