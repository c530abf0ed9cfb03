#include "flexq/simulator.hpp"

#include "flexq/errors.hpp"
#include "flexq/format.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

namespace flexq {

CostBreakdown& CostBreakdown::operator+=(const CostBreakdown& o) {
    build += o.build;
    destroy += o.destroy;
    delay += o.delay;
    keep_alive += o.keep_alive;
    reward += o.reward;
    fine += o.fine;
    return *this;
}

double effective_truncation_epsilon(const ModelParams& p, const SimConfig& config) {
    if (config.truncation_epsilon > 0.0) return config.truncation_epsilon;
    return 1e-6 * value_bound(p);
}

double simulation_horizon(const ModelParams& p, const SimConfig& config) {
    if (config.horizon > 0.0) return config.horizon;
    const double bound = value_bound(p);
    const double eps = effective_truncation_epsilon(p, config);
    if (!(bound > eps)) return 0.0;
    return std::log(bound / eps) / p.gamma;
}

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t rep) {
    std::uint64_t z = seed + (rep + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // uniform in (0, 1]
    double open_uniform() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }
    double exponential(double rate) { return -std::log(open_uniform()) / rate; }

private:
    std::mt19937_64 engine_;
};

void check(bool ok, const char* what) {
    if (!ok) throw std::logic_error(std::string("simulator invariant violated: ") + what);
}

}  // namespace

CostBreakdown simulate_once(const Model& model, const PolicyTable& policy, const SimConfig& config,
                            std::uint64_t seed, std::vector<SimEvent>* log) {
    const ModelParams& p = model.params();
    const StateSpace& space = model.space();
    if (config.initial_state < 0 || config.initial_state >= model.size())
        throw InvalidIndex("initial state index out of range");
    if (policy.size() != model.size() || policy.n != model.n()) throw DomainError("policy does not match the model");

    const double horizon = simulation_horizon(p, config);
    Rng rng(seed);
    CostBreakdown acc;
    StateIndex s = config.initial_state;
    double t = 0.0;

    auto record = [&](double time, const char* type, int queue, double inc, const char* comp) {
        if (log) log->push_back({time, type, queue, s, inc, comp});
    };

    while (t < horizon) {
        double delay = 0.0;
        double active = 0.0;
        for (int i = 0; i < model.n(); ++i) {
            const Level l = model.level(s, i);
            check(l >= kInactive && l <= model.B(), "level out of range");
            if (l >= 0) active += 1.0;
            delay += delay_rate(l, p);
        }
        const double rate = p.lambda + model.service_rate(s);
        const double t_next = t + rng.exponential(rate);
        const double end = std::min(t_next, horizon);
        const double weight = (std::exp(-p.gamma * t) - std::exp(-p.gamma * end)) / p.gamma;
        if (delay > 0.0) {
            acc.delay += delay * weight;
            record(t, "sojourn", -1, delay * weight, "delay");
        }
        if (active > 0.0 && p.kappa > 0.0) {
            acc.keep_alive += p.kappa * active * weight;
            record(t, "sojourn", -1, p.kappa * active * weight, "keep_alive");
        }
        if (t_next >= horizon) break;
        t = t_next;
        const double disc = std::exp(-p.gamma * t);

        double u = rng.open_uniform() * rate;
        if (u <= p.lambda) {
            const ArrivalAction a = policy.arrival[static_cast<std::size_t>(s)];
            check(is_feasible(model, s, a), "infeasible arrival action");
            s = arrival_target(model, s, a);
            if (a.kind == ArrivalAction::Kind::Reject) {
                acc.fine += p.f * disc;
                record(t, "arrival", -1, p.f * disc, "fine");
            } else {
                acc.reward += p.r * disc;
                record(t, "arrival", a.queue, p.r * disc, "reward");
                if (a.kind == ArrivalAction::Kind::Activate) {
                    acc.build += p.beta * disc;
                    record(t, "arrival", a.queue, p.beta * disc, "build");
                }
            }
            continue;
        }
        u -= p.lambda;
        int queue = -1;
        for (int i = 0; i < model.n(); ++i) {
            if (model.level(s, i) <= 0) continue;
            queue = i;
            u -= p.mu[static_cast<std::size_t>(i)];
            if (u <= 0.0) break;
        }
        check(queue >= 0, "departure from a system with no busy queue");
        const DepartureAction d = policy.departure_at(s, queue);
        const bool destroy = model.level(s, queue) == 1 && d == DepartureAction::Destroy;
        check(d == DepartureAction::Keep || model.level(s, queue) == 1, "destroy of a queue not emptied by this departure");
        s = departure_target(model, s, queue, d);
        check(space.level_at(s, queue) >= kInactive, "departure below inactive");
        if (destroy) {
            acc.destroy += p.psi * disc;
            record(t, "departure", queue, p.psi * disc, "destroy");
        } else {
            record(t, "departure", queue, 0.0, "none");
        }
    }
    return acc;
}

SimEstimate estimate_value(const Model& model, const PolicyTable& policy, const SimConfig& config) {
    if (config.replications < 1) throw DomainError("replications must be >= 1");
    if (config.truncation_epsilon < 0.0) throw DomainError("truncation epsilon must be > 0");
    validate_policy(model, policy);

    const auto reps = static_cast<std::size_t>(config.replications);
    std::vector<CostBreakdown> results(reps);
    unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, reps));
    auto run = [&](unsigned w) {
        for (std::size_t r = w; r < reps; r += workers)
            results[r] = simulate_once(model, policy, config, replication_seed(config.seed, r));
    };
    if (workers <= 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }

    SimEstimate est;
    est.replications = config.replications;
    est.seed = config.seed;
    est.truncation_epsilon = effective_truncation_epsilon(model.params(), config);
    est.horizon = simulation_horizon(model.params(), config);
    est.initial_state = config.initial_state;
    double sum = 0.0;
    for (const CostBreakdown& c : results) {
        sum += c.total();
        est.breakdown_mean += c;
    }
    const double R = static_cast<double>(reps);
    est.mean = sum / R;
    double ss = 0.0;
    for (const CostBreakdown& c : results) ss += (c.total() - est.mean) * (c.total() - est.mean);
    est.standard_error = reps > 1 ? std::sqrt(ss / (R - 1.0) / R) : 0.0;
    CostBreakdown& b = est.breakdown_mean;
    b.build /= R;
    b.destroy /= R;
    b.delay /= R;
    b.keep_alive /= R;
    b.reward /= R;
    b.fine /= R;
    return est;
}

std::string events_to_csv(const std::vector<SimEvent>& events) {
    std::ostringstream out;
    out << "time,event,queue,state_after,discounted_increment,component\n";
    for (const SimEvent& e : events)
        out << fmt_real(e.time) << ',' << e.type << ',' << e.queue << ',' << e.state_after << ','
            << fmt_real(e.increment) << ',' << e.component << '\n';
    return out.str();
}

}  // namespace flexq
