#pragma once

#include "flexq/cost_model.hpp"
#include "flexq/state_space.hpp"

#include <cstdint>
#include <vector>

namespace flexq {

/// Validated parameters plus per-state lookup tables shared by the solver,
/// the analysis checkers and the simulator.
class Model {
public:
    explicit Model(ModelParams params);

    const ModelParams& params() const { return params_; }
    const StateSpace& space() const { return space_; }
    StateIndex size() const { return space_.cardinality(); }
    int n() const { return params_.n; }
    int B() const { return params_.B; }

    Level level(StateIndex s, int i) const {
        return levels_[static_cast<std::size_t>(s) * static_cast<std::size_t>(params_.n) + static_cast<std::size_t>(i)];
    }
    StateIndex stride(int i) const { return space_.stride(i); }

    /// Holding cost rate C(q) of state s.
    double holding(StateIndex s) const { return holding_[static_cast<std::size_t>(s)]; }
    /// 1 / (sum of effective service rates + lambda + gamma).
    double delta(StateIndex s) const { return delta_[static_cast<std::size_t>(s)]; }
    /// Sum of effective service rates at s.
    double service_rate(StateIndex s) const { return service_[static_cast<std::size_t>(s)]; }

    /// Contraction modulus (lambda + sum mu) / (lambda + sum mu + gamma).
    double contraction_modulus() const;

    StateIndex all_inactive_index() const { return 0; }

private:
    ModelParams params_;
    StateSpace space_;
    std::vector<std::int8_t> levels_;
    std::vector<double> holding_;
    std::vector<double> delta_;
    std::vector<double> service_;
};

}  // namespace flexq
