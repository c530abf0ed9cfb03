#include "flexq/policy.hpp"

#include "flexq/errors.hpp"

namespace flexq {

std::string ArrivalAction::code() const {
    switch (kind) {
        case Kind::Reject: return "R";
        case Kind::Schedule: return "S" + std::to_string(queue);
        case Kind::Activate: return "A" + std::to_string(queue);
    }
    return "?";
}

ArrivalAction ArrivalAction::parse(const std::string& code) {
    if (code == "R") return reject();
    if (code.size() >= 2 && (code[0] == 'S' || code[0] == 'A')) {
        std::size_t used = 0;
        int q = -1;
        try {
            q = std::stoi(code.substr(1), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == code.size() - 1 && q >= 0) return code[0] == 'S' ? schedule(q) : activate(q);
    }
    throw DomainError("bad arrival action code '" + code + "'");
}

PolicyTable PolicyTable::reject_all(const Model& model) { return PolicyTable(model.size(), model.n()); }

bool is_feasible(const Model& model, StateIndex s, ArrivalAction a) {
    switch (a.kind) {
        case ArrivalAction::Kind::Reject: return a.queue == -1;
        case ArrivalAction::Kind::Schedule:
            if (a.queue < 0 || a.queue >= model.n()) return false;
            return model.level(s, a.queue) >= 0 && model.level(s, a.queue) < model.B();
        case ArrivalAction::Kind::Activate:
            if (a.queue < 0 || a.queue >= model.n()) return false;
            return model.level(s, a.queue) == kInactive;
    }
    return false;
}

void validate_policy(const Model& model, const PolicyTable& policy) {
    if (policy.size() != model.size() || policy.n != model.n() ||
        policy.departure.size() != static_cast<std::size_t>(model.size()) * static_cast<std::size_t>(model.n()))
        throw DomainError("policy table does not match the state space");
    for (StateIndex s = 0; s < model.size(); ++s) {
        if (!is_feasible(model, s, policy.arrival[static_cast<std::size_t>(s)]))
            throw DomainError("infeasible arrival action " + policy.arrival[static_cast<std::size_t>(s)].code() +
                              " at state " + to_string(model.space().decode(s)));
        for (int i = 0; i < model.n(); ++i)
            if (policy.departure_at(s, i) == DepartureAction::Destroy && model.level(s, i) != 1)
                throw DomainError("destroy at queue " + std::to_string(i) + " not holding one task in state " +
                                  to_string(model.space().decode(s)));
    }
}

StateIndex arrival_target(const Model& model, StateIndex s, ArrivalAction a) {
    switch (a.kind) {
        case ArrivalAction::Kind::Reject: return s;
        case ArrivalAction::Kind::Schedule: return s + model.stride(a.queue);
        case ArrivalAction::Kind::Activate: return s + 2 * model.stride(a.queue);
    }
    return s;
}

StateIndex departure_target(const Model& model, StateIndex s, int i, DepartureAction d) {
    if (model.level(s, i) == 1 && d == DepartureAction::Destroy) return s - 2 * model.stride(i);
    return s - model.stride(i);
}

PolicyRow policy_row(const Model& model, StateIndex s, ArrivalAction a, std::uint32_t destroy_mask) {
    const ModelParams& p = model.params();
    const double delta = model.delta(s);
    PolicyRow row;
    double reward = -model.holding(s);
    for (int i = 0; i < model.n(); ++i) {
        const Level l = model.level(s, i);
        if (l <= 0) continue;
        const double mu = p.mu[static_cast<std::size_t>(i)];
        const bool destroy = l == 1 && (destroy_mask >> i) & 1u;
        if (destroy) reward -= mu * p.psi;
        row.terms.emplace_back(departure_target(model, s, i, destroy ? DepartureAction::Destroy : DepartureAction::Keep),
                               delta * mu);
    }
    switch (a.kind) {
        case ArrivalAction::Kind::Reject: reward -= p.lambda * p.f; break;
        case ArrivalAction::Kind::Schedule: reward += p.lambda * p.r; break;
        case ArrivalAction::Kind::Activate: reward += p.lambda * (p.r - p.beta); break;
    }
    row.terms.emplace_back(arrival_target(model, s, a), delta * p.lambda);
    row.constant = delta * reward;
    return row;
}

PolicyRow policy_row(const Model& model, const PolicyTable& policy, StateIndex s) {
    std::uint32_t mask = 0;
    for (int i = 0; i < model.n(); ++i)
        if (policy.departure_at(s, i) == DepartureAction::Destroy) mask |= 1u << i;
    return policy_row(model, s, policy.arrival[static_cast<std::size_t>(s)], mask);
}

}  // namespace flexq
