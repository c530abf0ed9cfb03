#pragma once

// Test-only reference computations, kept independent of the solver's
// value-iteration and tree-enumeration code paths.

#include "flexq/solver.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace flexq::testing {

/// Calls visit(policy) for every stationary deterministic feasible policy.
inline void for_each_policy(const Model& model, const std::function<void(const PolicyTable&)>& visit) {
    struct Choice {
        ArrivalAction arrival;
        std::uint32_t destroy_mask;
    };
    std::vector<std::vector<Choice>> choices(static_cast<std::size_t>(model.size()));
    for (StateIndex s = 0; s < model.size(); ++s) {
        std::vector<ArrivalAction> arrivals{ArrivalAction::reject()};
        std::vector<int> ones;
        for (int i = 0; i < model.n(); ++i) {
            const Level l = model.level(s, i);
            if (l == kInactive) arrivals.push_back(ArrivalAction::activate(i));
            else if (l < model.B()) arrivals.push_back(ArrivalAction::schedule(i));
            if (l == 1) ones.push_back(i);
        }
        for (ArrivalAction a : arrivals)
            for (std::uint32_t m = 0; m < (1u << ones.size()); ++m) {
                std::uint32_t mask = 0;
                for (std::size_t k = 0; k < ones.size(); ++k)
                    if (m >> k & 1u) mask |= 1u << ones[k];
                choices[static_cast<std::size_t>(s)].push_back({a, mask});
            }
    }
    std::vector<std::size_t> pick(choices.size(), 0);
    PolicyTable policy(model.size(), model.n());
    while (true) {
        for (std::size_t s = 0; s < choices.size(); ++s) {
            const Choice& c = choices[s][pick[s]];
            policy.arrival[s] = c.arrival;
            for (int i = 0; i < model.n(); ++i)
                policy.departure_at(static_cast<StateIndex>(s), i) =
                    (c.destroy_mask >> i & 1u) ? DepartureAction::Destroy : DepartureAction::Keep;
        }
        visit(policy);
        std::size_t k = 0;
        while (k < pick.size() && ++pick[k] == choices[k].size()) pick[k++] = 0;
        if (k == pick.size()) return;
    }
}

/// Pointwise maximum over every policy's exact evaluation (tiny instances only).
inline ValueTable naive_brute_force(const Model& model) {
    if (policy_count(model) > 2e5L) throw std::runtime_error("naive oracle: instance too large");
    ValueTable best(static_cast<std::size_t>(model.size()), -INFINITY);
    for_each_policy(model, [&](const PolicyTable& p) {
        const ValueTable v = policy_evaluation(model, p);
        for (std::size_t s = 0; s < v.size(); ++s) best[s] = std::max(best[s], v[s]);
    });
    return best;
}

inline double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

/// Random valid parameters for desk-scale instances.
inline ModelParams random_params(std::mt19937_64& g, int n, int B, double gamma) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    ModelParams p = ModelParams::uniform(n, B, 0.5 + 3.0 * U(g), 1.0, gamma);
    for (double& m : p.mu) m = 0.5 + 1.5 * U(g);
    p.r = 4.0 * U(g);
    p.f = 8.0 * U(g);
    p.beta = 4.0 * U(g);
    p.psi = 4.0 * U(g);
    p.kappa = 2.0 * U(g);
    p.h = U(g);
    double e = 1.0;
    for (double& x : p.eta) {
        x = e;
        e += U(g);
    }
    return p;
}

}  // namespace flexq::testing
