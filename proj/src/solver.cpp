#include "flexq/solver.hpp"

#include "flexq/errors.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

namespace flexq {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double at(std::span<const double> V, StateIndex s) { return V[static_cast<std::size_t>(s)]; }

}  // namespace

double ArrivalQValues::best() const {
    double b = reject;
    for (double v : values) b = std::max(b, v);
    return b;
}

ArrivalQValues arrival_q_values(const Model& model, std::span<const double> V, StateIndex s) {
    const ModelParams& p = model.params();
    ArrivalQValues q;
    q.reject = at(V, s) - p.f;
    for (int i = 0; i < model.n(); ++i) {
        const Level l = model.level(s, i);
        if (l == kInactive) {
            q.options.push_back(ArrivalAction::activate(i));
            q.values.push_back(at(V, s + 2 * model.stride(i)) - p.beta + p.r);
        } else if (l < model.B()) {
            q.options.push_back(ArrivalAction::schedule(i));
            q.values.push_back(at(V, s + model.stride(i)) + p.r);
        }
    }
    return q;
}

double bellman_backup(const Model& model, std::span<const double> V, StateIndex s) {
    const ModelParams& p = model.params();
    const int B = model.B();
    double service = 0.0;
    double best_admit = kNegInf;
    for (int i = 0; i < model.n(); ++i) {
        const Level l = model.level(s, i);
        const StateIndex st = model.stride(i);
        const double mu = p.mu[static_cast<std::size_t>(i)];
        if (l >= 2) {
            service += mu * at(V, s - st);
        } else if (l == 1) {
            service += mu * std::max(at(V, s - st), at(V, s - 2 * st) - p.psi);
        }
        if (l == kInactive)
            best_admit = std::max(best_admit, at(V, s + 2 * st) - p.beta);
        else if (l < B)
            best_admit = std::max(best_admit, at(V, s + st));
    }
    const double reject = at(V, s) - p.f;
    const double arrival = best_admit == kNegInf ? reject : std::max(best_admit + p.r, reject);
    return model.delta(s) * (service + p.lambda * arrival - model.holding(s));
}

BackupResult bellman_backup_full(const Model& model, std::span<const double> V, StateIndex s, double eps_tie) {
    const ModelParams& p = model.params();
    BackupResult out;
    out.value = bellman_backup(model, V, s);
    out.departure.assign(static_cast<std::size_t>(model.n()), DepartureAction::Keep);

    const ArrivalQValues q = arrival_q_values(model, V, s);
    const double best = q.best();
    std::tuple<bool, Level, int> best_key{true, std::numeric_limits<Level>::max(), model.n()};
    bool admit = false;
    for (std::size_t k = 0; k < q.options.size(); ++k) {
        if (q.values[k] < best - eps_tie) continue;
        const ArrivalAction a = q.options[k];
        const std::tuple<bool, Level, int> key{a.kind == ArrivalAction::Kind::Activate, model.level(s, a.queue),
                                               a.queue};
        if (!admit || key < best_key) {
            best_key = key;
            out.arrival = a;
            admit = true;
        }
    }
    if (!admit) out.arrival = ArrivalAction::reject();

    for (int i = 0; i < model.n(); ++i) {
        if (model.level(s, i) != 1) continue;
        const StateIndex st = model.stride(i);
        if (at(V, s - 2 * st) - p.psi > at(V, s - st) + eps_tie)
            out.departure[static_cast<std::size_t>(i)] = DepartureAction::Destroy;
    }
    return out;
}

ValueTable apply_operator(const Model& model, std::span<const double> V) {
    ValueTable out(static_cast<std::size_t>(model.size()));
    for (StateIndex s = 0; s < model.size(); ++s) out[static_cast<std::size_t>(s)] = bellman_backup(model, V, s);
    return out;
}

SolveResult value_iteration(const Model& model, const SolverOptions& options) {
    if (!(options.tol > 0.0)) throw DomainError("tolerance must be positive");
    const auto N = static_cast<std::size_t>(model.size());
    SolveResult result;
    result.rho = model.contraction_modulus();
    ValueTable V(N, 0.0);
    ValueTable next(N, 0.0);
    std::vector<double> history;

    bool converged = false;
    long it = 0;
    double residual = std::numeric_limits<double>::infinity();
    while (it < options.max_iters) {
        ++it;
        residual = 0.0;
        if (options.gauss_seidel) {
            for (std::size_t s = 0; s < N; ++s) {
                const double v = bellman_backup(model, V, static_cast<StateIndex>(s));
                residual = std::max(residual, std::abs(v - V[s]));
                V[s] = v;
            }
        } else {
            for (std::size_t s = 0; s < N; ++s) {
                next[s] = bellman_backup(model, V, static_cast<StateIndex>(s));
                residual = std::max(residual, std::abs(next[s] - V[s]));
            }
            V.swap(next);
        }
        if (options.keep_history) history.push_back(residual);
        if (residual < options.tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "value iteration did not reach tol " << options.tol << " within " << options.max_iters
            << " iterations (last residual " << residual << ")";
        throw ConvergenceError(msg.str(), std::move(history));
    }

    result.policy = extract_policy(model, V);
    result.values = std::move(V);
    result.iterations = it;
    result.residual = residual;
    result.error_bound = result.rho / (1.0 - result.rho) * residual;
    result.residual_history = std::move(history);
    return result;
}

PolicyTable extract_policy(const Model& model, std::span<const double> V, double eps_tie) {
    PolicyTable policy(model.size(), model.n());
    for (StateIndex s = 0; s < model.size(); ++s) {
        BackupResult b = bellman_backup_full(model, V, s, eps_tie);
        policy.arrival[static_cast<std::size_t>(s)] = b.arrival;
        for (int i = 0; i < model.n(); ++i) policy.departure_at(s, i) = b.departure[static_cast<std::size_t>(i)];
    }
    return policy;
}

namespace {

constexpr StateIndex kDirectSolveLimit = 4096;

ValueTable evaluate_direct(const Model& model, const PolicyTable& policy) {
    const auto N = static_cast<Eigen::Index>(model.size());
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd b(N);
    for (StateIndex s = 0; s < model.size(); ++s) {
        const PolicyRow row = policy_row(model, policy, s);
        const auto i = static_cast<Eigen::Index>(s);
        b(i) = row.constant;
        triplets.emplace_back(i, i, 1.0);
        for (const auto& [t, w] : row.terms) triplets.emplace_back(i, static_cast<Eigen::Index>(t), -w);
    }
    Eigen::SparseMatrix<double> A(N, N);
    A.setFromTriplets(triplets.begin(), triplets.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw Error("policy evaluation: singular system");
    const Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success) throw Error("policy evaluation: solve failed");
    return ValueTable(x.data(), x.data() + x.size());
}

ValueTable evaluate_iterative(const Model& model, const PolicyTable& policy) {
    const auto N = static_cast<std::size_t>(model.size());
    std::vector<PolicyRow> rows(N);
    for (std::size_t s = 0; s < N; ++s) rows[s] = policy_row(model, policy, static_cast<StateIndex>(s));
    const double rho = model.contraction_modulus();
    const double factor = rho / (1.0 - rho);
    ValueTable V(N, 0.0);
    std::vector<double> history;
    constexpr long kMaxSweeps = 10'000'000;
    for (long sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double change = 0.0;
        double scale = 1.0;
        for (std::size_t s = 0; s < N; ++s) {
            double acc = rows[s].constant;
            double self = 0.0;
            for (const auto& [t, w] : rows[s].terms) {
                if (static_cast<std::size_t>(t) == s)
                    self += w;
                else
                    acc += w * V[static_cast<std::size_t>(t)];
            }
            const double v = acc / (1.0 - self);
            change = std::max(change, std::abs(v - V[s]));
            scale = std::max(scale, std::abs(v));
            V[s] = v;
        }
        if (history.size() < 1000) history.push_back(change);
        if (factor * change < 1e-12 * scale) return V;
    }
    throw ConvergenceError("iterative policy evaluation did not converge", std::move(history));
}

}  // namespace

ValueTable policy_evaluation(const Model& model, const PolicyTable& policy) {
    validate_policy(model, policy);
    if (model.size() <= kDirectSolveLimit) return evaluate_direct(model, policy);
    return evaluate_iterative(model, policy);
}

long double policy_count(const Model& model) {
    long double count = 1.0L;
    for (StateIndex s = 0; s < model.size(); ++s) {
        int options = 1;
        int ones = 0;
        for (int i = 0; i < model.n(); ++i) {
            const Level l = model.level(s, i);
            if (l < model.B()) ++options;
            if (l == 1) ++ones;
        }
        count *= static_cast<long double>(options) * std::ldexp(1.0L, ones);
    }
    return count;
}

namespace {

// Exhaustive enumeration over the tree of per-state action choices. States are
// fixed one at a time; each fixed state's equation is solved for its own value
// in terms of the still-free states and substituted into the earlier ones, so
// every leaf is an exact direct solve of one policy's linear system.
class PolicyEnumerator {
public:
    explicit PolicyEnumerator(const Model& model) : N_(static_cast<std::size_t>(model.size())) {
        std::vector<std::vector<Row>> by_state(N_);
        for (StateIndex s = 0; s < model.size(); ++s) {
            std::vector<ArrivalAction> arrivals{ArrivalAction::reject()};
            std::uint32_t one_mask = 0;
            for (int i = 0; i < model.n(); ++i) {
                const Level l = model.level(s, i);
                if (l == kInactive) arrivals.push_back(ArrivalAction::activate(i));
                else if (l < model.B()) arrivals.push_back(ArrivalAction::schedule(i));
                if (l == 1) one_mask |= 1u << i;
            }
            for (ArrivalAction a : arrivals) {
                // enumerate every subset of the one-task queues
                std::uint32_t sub = one_mask;
                while (true) {
                    PolicyRow pr = policy_row(model, s, a, sub);
                    Row row;
                    row.constant = pr.constant;
                    for (const auto& [t, w] : pr.terms) row.terms.emplace_back(static_cast<std::size_t>(t), w);
                    by_state[static_cast<std::size_t>(s)].push_back(std::move(row));
                    if (sub == 0) break;
                    sub = (sub - 1) & one_mask;
                }
            }
        }
        order_.resize(N_);
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::stable_sort(order_.begin(), order_.end(),
                         [&](std::size_t a, std::size_t b) { return by_state[a].size() < by_state[b].size(); });
        std::vector<std::size_t> pos(N_);
        for (std::size_t k = 0; k < N_; ++k) pos[order_[k]] = k;
        rows_.resize(N_);
        for (std::size_t k = 0; k < N_; ++k) {
            rows_[k] = std::move(by_state[order_[k]]);
            for (Row& row : rows_[k])
                for (auto& term : row.terms) term.first = pos[term.first];
        }
        c_.assign((N_ + 1) * N_, 0.0);
        W_.assign((N_ + 1) * N_ * N_, 0.0);
        H_.assign(N_, 0.0);
        best_.assign(N_, kNegInf);
    }

    ValueTable run() {
        descend(0);
        ValueTable out(N_);
        for (std::size_t k = 0; k < N_; ++k) out[order_[k]] = best_[k];
        return out;
    }

private:
    struct Row {
        double constant = 0.0;
        std::vector<std::pair<std::size_t, double>> terms;
    };

    double* c(std::size_t depth) { return c_.data() + depth * N_; }
    double* W(std::size_t depth) { return W_.data() + depth * N_ * N_; }

    void descend(std::size_t d) {
        if (d + 1 == N_) {
            leaf(d);
            return;
        }
        const double* cd = c(d);
        const double* Wd = W(d);
        double* cn = c(d + 1);
        double* Wn = W(d + 1);
        for (const Row& row : rows_[d]) {
            double G = row.constant;
            std::fill(H_.begin() + static_cast<std::ptrdiff_t>(d), H_.end(), 0.0);
            for (const auto& [t, w] : row.terms) {
                if (t < d) {
                    G += w * cd[t];
                    const double* Wt = Wd + t * N_;
                    for (std::size_t u = d; u < N_; ++u) H_[u] += w * Wt[u];
                } else {
                    H_[t] += w;
                }
            }
            const double inv = 1.0 / (1.0 - H_[d]);
            const double x0 = G * inv;
            for (std::size_t u = d + 1; u < N_; ++u) H_[u] *= inv;
            for (std::size_t fx = 0; fx < d; ++fx) {
                const double wfd = Wd[fx * N_ + d];
                cn[fx] = cd[fx] + wfd * x0;
                const double* src = Wd + fx * N_;
                double* dst = Wn + fx * N_;
                for (std::size_t u = d + 1; u < N_; ++u) dst[u] = src[u] + wfd * H_[u];
            }
            cn[d] = x0;
            double* dst = Wn + d * N_;
            for (std::size_t u = d + 1; u < N_; ++u) dst[u] = H_[u];
            descend(d + 1);
        }
    }

    // Last free state: the other values are affine in its value, so the
    // maximum over its actions is reached at the extreme candidates.
    void leaf(std::size_t d) {
        const double* cd = c(d);
        const double* Wd = W(d);
        double xmin = std::numeric_limits<double>::infinity();
        double xmax = kNegInf;
        for (const Row& row : rows_[d]) {
            double G = row.constant;
            double Hd = 0.0;
            for (const auto& [t, w] : row.terms) {
                if (t < d) {
                    G += w * cd[t];
                    Hd += w * Wd[t * N_ + d];
                } else {
                    Hd += w;
                }
            }
            const double x = G / (1.0 - Hd);
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
        }
        for (std::size_t fx = 0; fx < d; ++fx) {
            const double w = Wd[fx * N_ + d];
            const double v = cd[fx] + std::max(w * xmin, w * xmax);
            if (v > best_[fx]) best_[fx] = v;
        }
        if (xmax > best_[d]) best_[d] = xmax;
    }

    std::size_t N_;
    std::vector<std::size_t> order_;
    std::vector<std::vector<Row>> rows_;
    std::vector<double> c_;
    std::vector<double> W_;
    std::vector<double> H_;
    std::vector<double> best_;
};

}  // namespace

ValueTable brute_force_solve(const Model& model, long double max_policies) {
    const long double count = policy_count(model);
    if (count > max_policies) {
        std::ostringstream msg;
        msg << "brute force refused: " << static_cast<double>(count) << " policies exceed the limit of "
            << static_cast<double>(max_policies);
        throw InstanceTooLarge(msg.str(), count);
    }
    PolicyEnumerator enumerator(model);
    return enumerator.run();
}

}  // namespace flexq
