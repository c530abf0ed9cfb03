#include "flexq/cost_model.hpp"

#include "flexq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace flexq {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidParams(msg);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void ModelParams::validate() const {
    if (n < 1) throw UnsupportedConfiguration("n must be at least 1");
    if (B < 2) throw UnsupportedConfiguration("B must be at least 2 (B = 1 makes the one/full classes overlap)");
    require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive");
    require(std::isfinite(gamma) && gamma > 0.0, "gamma must be positive");
    require(mu.size() == static_cast<std::size_t>(n), "mu must have n entries");
    for (double m : mu) require(std::isfinite(m) && m > 0.0, "every mu_i must be positive");
    require(finite_nonneg(r), "r must be >= 0");
    require(finite_nonneg(f), "f must be >= 0");
    require(finite_nonneg(beta), "beta must be >= 0");
    require(finite_nonneg(psi), "psi must be >= 0");
    require(finite_nonneg(kappa), "kappa must be >= 0");
    require(finite_nonneg(h), "h must be >= 0");
    require(eta.size() == static_cast<std::size_t>(B), "eta must have B entries");
    for (std::size_t j = 0; j < eta.size(); ++j) {
        require(std::isfinite(eta[j]) && eta[j] >= 1.0, "eta entries must be >= 1");
        if (j > 0) require(eta[j] >= eta[j - 1], "eta must be nondecreasing");
    }
}

double ModelParams::total_mu() const { return std::accumulate(mu.begin(), mu.end(), 0.0); }

ModelParams ModelParams::uniform(int n, int B, double lambda, double mu, double gamma) {
    ModelParams p;
    p.n = n;
    p.B = B;
    p.lambda = lambda;
    p.mu.assign(static_cast<std::size_t>(std::max(n, 0)), mu);
    p.eta.assign(static_cast<std::size_t>(std::max(B, 0)), 1.0);
    p.gamma = gamma;
    return p;
}

double delay_rate(Level level, const ModelParams& p) {
    if (level <= 0) return 0.0;
    return level * p.eta[static_cast<std::size_t>(level - 1)] * p.h;
}

double holding_rate(const SystemState& state, const ModelParams& p) {
    double c = 0.0;
    for (Level l : state.levels) {
        if (l == kInactive) continue;
        c += delay_rate(l, p) + p.kappa;
    }
    return c;
}

double effective_rate(const SystemState& state, int i, const ModelParams& p) {
    return state[static_cast<std::size_t>(i)] > 0 ? p.mu[static_cast<std::size_t>(i)] : 0.0;
}

double value_bound(const ModelParams& p) {
    const double max_delay = p.B > 0 ? delay_rate(p.B, p) : 0.0;
    const double max_holding = p.n * (max_delay + p.kappa);
    return (p.lambda * std::max(p.r, p.f) + max_holding + (p.lambda + p.total_mu()) * std::max(p.beta, p.psi)) /
           p.gamma;
}

}  // namespace flexq
