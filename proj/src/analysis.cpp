#include "flexq/analysis.hpp"

#include "flexq/errors.hpp"

#include <algorithm>
#include <cmath>

namespace flexq {

namespace {

// Calls fn(b) for every b with b_i in [lo_i, hi_i] (mixed-radix odometer).
template <typename Fn>
void for_each_in_box(const StateSpace& space, const SystemState& lo, const SystemState& hi, Fn&& fn) {
    SystemState b = lo;
    const int n = space.n();
    while (true) {
        fn(b);
        int i = n - 1;
        while (i >= 0) {
            auto k = static_cast<std::size_t>(i);
            if (b[k] < hi[k]) {
                ++b[k];
                break;
            }
            b[k] = lo[k];
            --i;
        }
        if (i < 0) return;
    }
}

bool same_inactive(const SystemState& a, const SystemState& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if ((a[i] == kInactive) != (b[i] == kInactive)) return false;
    return true;
}

}  // namespace

DominationReport check_domination(std::span<const double> V, const StateSpace& space, double eps) {
    if (static_cast<StateIndex>(V.size()) != space.cardinality()) throw DomainError("value table size mismatch");
    DominationReport report;
    report.epsilon = eps;
    for (StateIndex ia = 0; ia < space.cardinality(); ++ia) {
        const SystemState a = space.decode(ia);
        SystemState lo = a;
        for (auto& l : lo.levels)
            if (l != kInactive) l = 0;
        const double va = V[static_cast<std::size_t>(ia)];
        for_each_in_box(space, lo, a, [&](const SystemState& b) {
            const StateIndex ib = space.encode(b);
            if (ib == ia) return;
            ++report.checked_pairs;
            const double vb = V[static_cast<std::size_t>(ib)];
            if (va > vb + eps) report.violations.push_back({ia, ib, va, vb});
        });
    }
    return report;
}

double compute_alpha(std::span<const double> V, const StateSpace& space, const SystemState& smaller,
                     const SystemState& larger) {
    if (!space.is_valid(smaller) || !space.is_valid(larger)) throw InvalidState("invalid state in alpha");
    if (!same_inactive(smaller, larger)) throw DomainError("alpha requires identical inactive queues");
    for (std::size_t i = 0; i < smaller.size(); ++i)
        if (larger[i] < smaller[i])
            throw DomainError("alpha requires " + to_string(larger) + " to dominate " + to_string(smaller));
    return V[static_cast<std::size_t>(space.encode(smaller))] - V[static_cast<std::size_t>(space.encode(larger))];
}

ThresholdReport check_build_threshold(const Model& model, std::span<const double> V, double eps_tie,
                                      bool same_inactive_set) {
    const StateSpace& space = model.space();
    ThresholdReport report;
    report.same_inactive_set = same_inactive_set;
    report.epsilon = eps_tie;

    // Q-value margin of activating queue i at s: value(activate i) - best other.
    auto activation_margin = [&](StateIndex s, int i) {
        const ArrivalQValues q = arrival_q_values(model, V, s);
        double mine = 0.0;
        double other = q.reject;
        for (std::size_t k = 0; k < q.options.size(); ++k) {
            if (q.options[k] == ArrivalAction::activate(i))
                mine = q.values[k];
            else
                other = std::max(other, q.values[k]);
        }
        return mine - other;
    };

    for (StateIndex ia = 0; ia < space.cardinality(); ++ia) {
        const SystemState a = space.decode(ia);
        for (int i = 0; i < model.n(); ++i) {
            const auto qi = static_cast<std::size_t>(i);
            if (a[qi] != kInactive) continue;
            if (activation_margin(ia, i) <= eps_tie) continue;
            SystemState hi = a;
            for (std::size_t j = 0; j < hi.size(); ++j) {
                if (j == qi) continue;
                if (hi[j] != kInactive || !same_inactive_set) hi[j] = model.B();
            }
            for_each_in_box(space, a, hi, [&](const SystemState& b) {
                const StateIndex ib = space.encode(b);
                if (ib == ia) return;
                ++report.checked_pairs;
                if (activation_margin(ib, i) < -eps_tie) report.violations.push_back({ia, ib, i});
            });
        }
    }
    return report;
}

std::int64_t count_rejecting_states(const PolicyTable& policy) {
    return std::count_if(policy.arrival.begin(), policy.arrival.end(),
                         [](const ArrivalAction& a) { return a.kind == ArrivalAction::Kind::Reject; });
}

namespace {

// Sparse transition rows of the uniformized closed-loop chain.
struct ClosedLoopChain {
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> targets;
    std::vector<double> probs;
};

ClosedLoopChain build_chain(const Model& model, const PolicyTable& policy) {
    validate_policy(model, policy);
    const ModelParams& p = model.params();
    const double uniform_rate = p.lambda + p.total_mu();
    ClosedLoopChain chain;
    chain.offsets.push_back(0);
    for (StateIndex s = 0; s < model.size(); ++s) {
        double self = 1.0;
        auto add = [&](StateIndex t, double prob) {
            if (t == s) return;
            chain.targets.push_back(static_cast<std::size_t>(t));
            chain.probs.push_back(prob);
            self -= prob;
        };
        add(arrival_target(model, s, policy.arrival[static_cast<std::size_t>(s)]), p.lambda / uniform_rate);
        for (int i = 0; i < model.n(); ++i) {
            if (model.level(s, i) <= 0) continue;
            add(departure_target(model, s, i, policy.departure_at(s, i)), p.mu[static_cast<std::size_t>(i)] / uniform_rate);
        }
        chain.targets.push_back(static_cast<std::size_t>(s));
        chain.probs.push_back(std::max(self, 0.0));
        chain.offsets.push_back(chain.targets.size());
    }
    return chain;
}

void step(const ClosedLoopChain& chain, std::span<const double> in, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t s = 0; s + 1 < chain.offsets.size(); ++s) {
        const double mass = in[s];
        if (mass == 0.0) continue;
        for (std::size_t k = chain.offsets[s]; k < chain.offsets[s + 1]; ++k) out[chain.targets[k]] += mass * chain.probs[k];
    }
}

}  // namespace

StationaryDistribution stationary_distribution(const Model& model, const PolicyTable& policy, double tol,
                                               long max_iters) {
    const ClosedLoopChain chain = build_chain(model, policy);
    const auto N = static_cast<std::size_t>(model.size());
    std::vector<double> cur(N, 0.0);
    std::vector<double> next(N, 0.0);
    cur[static_cast<std::size_t>(model.all_inactive_index())] = 1.0;
    std::vector<double> history;
    for (long it = 0; it < max_iters; ++it) {
        step(chain, cur, next);
        double change = 0.0;
        double total = 0.0;
        for (std::size_t s = 0; s < N; ++s) {
            change += std::abs(next[s] - cur[s]);
            total += next[s];
        }
        for (double& x : next) x /= total;
        cur.swap(next);
        if (history.size() < 1000 || it % 1000 == 0) history.push_back(change);
        if (change < tol) return cur;
    }
    throw ConvergenceError("stationary distribution did not converge within " + std::to_string(max_iters) +
                               " iterations",
                           std::move(history));
}

double stationary_residual(const Model& model, const PolicyTable& policy, std::span<const double> dist) {
    const ClosedLoopChain chain = build_chain(model, policy);
    std::vector<double> next(dist.size(), 0.0);
    step(chain, dist, next);
    double l1 = 0.0;
    for (std::size_t s = 0; s < dist.size(); ++s) l1 += std::abs(next[s] - dist[s]);
    return l1;
}

LongRunMetrics long_run_metrics(std::span<const double> dist, const StateSpace& space) {
    if (static_cast<StateIndex>(dist.size()) != space.cardinality()) throw DomainError("distribution size mismatch");
    LongRunMetrics m;
    for (StateIndex s = 0; s < space.cardinality(); ++s) {
        const double p = dist[static_cast<std::size_t>(s)];
        if (p == 0.0) continue;
        const SystemState q = space.decode(s);
        m.avg_active_queues += p * active_count(q);
        m.avg_total_tasks += p * task_total(q);
    }
    return m;
}

}  // namespace flexq
