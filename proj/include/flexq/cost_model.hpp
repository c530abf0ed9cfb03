#pragma once

#include "flexq/state_space.hpp"

#include <vector>

namespace flexq {

/// Rates, costs and limits of the flexible-queue system.
///
/// Money units are abstract. `eta[j - 1]` is the delay multiplier applied to a
/// queue holding j tasks, so `eta` has exactly B entries.
struct ModelParams {
    int n = 1;
    int B = 2;
    double lambda = 1.0;
    std::vector<double> mu{1.0};
    double r = 0.0;      // admission reward
    double f = 0.0;      // rejection fine
    double beta = 0.0;   // build cost
    double psi = 0.0;    // destroy cost
    double kappa = 0.0;  // keep-alive cost rate per active queue
    double h = 0.0;      // base delay cost rate
    std::vector<double> eta{1.0, 1.0};
    double gamma = 1.0;  // continuous discount rate

    /// Throws InvalidParams / UnsupportedConfiguration on any broken invariant.
    void validate() const;

    double total_mu() const;

    /// Convenience constructor for identical queues with eta == 1.
    static ModelParams uniform(int n, int B, double lambda, double mu, double gamma);
};

/// Delay cost rate of one queue: level * eta(level) * h, zero when idle or empty.
double delay_rate(Level level, const ModelParams& p);

/// Keep-alive plus delay cost rate of the whole system.
double holding_rate(const SystemState& state, const ModelParams& p);

/// mu_i if queue i is active and nonempty, else 0.
double effective_rate(const SystemState& state, int i, const ModelParams& p);

/// Coarse bound on |V|, also used to truncate simulated horizons.
double value_bound(const ModelParams& p);

}  // namespace flexq
