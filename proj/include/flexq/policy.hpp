#pragma once

#include "flexq/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flexq {

/// Decision taken when a task arrives.
struct ArrivalAction {
    enum class Kind : std::uint8_t { Reject, Schedule, Activate };

    Kind kind = Kind::Reject;
    int queue = -1;

    static ArrivalAction reject() { return {}; }
    static ArrivalAction schedule(int i) { return {Kind::Schedule, i}; }
    static ArrivalAction activate(int i) { return {Kind::Activate, i}; }

    bool operator==(const ArrivalAction&) const = default;

    /// "R", "S<i>" or "A<i>".
    std::string code() const;
    static ArrivalAction parse(const std::string& code);
};

/// Decision taken when the last task of a queue departs.
enum class DepartureAction : std::uint8_t { Keep = 0, Destroy = 1 };

/// Stationary deterministic policy. Departure entries are only meaningful
/// for queues holding exactly one task and are Keep elsewhere.
struct PolicyTable {
    int n = 0;
    std::vector<ArrivalAction> arrival;
    std::vector<DepartureAction> departure;  // row-major [state][queue]

    PolicyTable() = default;
    PolicyTable(StateIndex states, int queues)
        : n(queues),
          arrival(static_cast<std::size_t>(states)),
          departure(static_cast<std::size_t>(states) * static_cast<std::size_t>(queues), DepartureAction::Keep) {}

    StateIndex size() const { return static_cast<StateIndex>(arrival.size()); }

    DepartureAction departure_at(StateIndex s, int i) const {
        return departure[static_cast<std::size_t>(s) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)];
    }
    DepartureAction& departure_at(StateIndex s, int i) {
        return departure[static_cast<std::size_t>(s) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)];
    }

    bool operator==(const PolicyTable&) const = default;

    /// Rejects every arrival and keeps every queue.
    static PolicyTable reject_all(const Model& model);
};

/// True when `a` is allowed at state s.
bool is_feasible(const Model& model, StateIndex s, ArrivalAction a);

/// Throws DomainError describing the first infeasible entry.
void validate_policy(const Model& model, const PolicyTable& policy);

/// State reached after an arrival handled by `a` (s itself on reject).
StateIndex arrival_target(const Model& model, StateIndex s, ArrivalAction a);

/// State reached after a departure from queue i (which must be nonempty).
StateIndex departure_target(const Model& model, StateIndex s, int i, DepartureAction d);

/// Linear equation x_s = constant + sum coef * x_target of a fixed action at s.
struct PolicyRow {
    double constant = 0.0;
    std::vector<std::pair<StateIndex, double>> terms;
};

/// `destroy_mask` bit i selects Destroy for queue i (ignored unless queue i holds one task).
PolicyRow policy_row(const Model& model, StateIndex s, ArrivalAction a, std::uint32_t destroy_mask);
PolicyRow policy_row(const Model& model, const PolicyTable& policy, StateIndex s);

}  // namespace flexq
