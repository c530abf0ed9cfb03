#include "flexq/state_space.hpp"

#include "flexq/errors.hpp"

#include <limits>
#include <sstream>

namespace flexq {

std::string to_string(const SystemState& state) {
    std::ostringstream out;
    out << '(';
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (i) out << ',';
        out << state[i];
    }
    out << ')';
    return out.str();
}

const char* to_string(QueueClass c) {
    switch (c) {
        case QueueClass::Inactive: return "inactive";
        case QueueClass::Empty: return "empty";
        case QueueClass::One: return "one";
        case QueueClass::Normal: return "normal";
        case QueueClass::Full: return "full";
    }
    return "?";
}

QueueClass classify(Level level, int B) {
    if (B < 2) throw UnsupportedConfiguration("buffer size B must be at least 2, got " + std::to_string(B));
    if (level < kInactive || level > B)
        throw InvalidState("queue level " + std::to_string(level) + " outside [-1, " + std::to_string(B) + "]");
    if (level == kInactive) return QueueClass::Inactive;
    if (level == 0) return QueueClass::Empty;
    if (level == 1) return QueueClass::One;
    if (level == B) return QueueClass::Full;
    return QueueClass::Normal;
}

StateSpace::StateSpace(int n, int B) : n_(n), B_(B) {
    if (n < 1) throw UnsupportedConfiguration("queue count n must be at least 1");
    if (B < 2) throw UnsupportedConfiguration("buffer size B must be at least 2, got " + std::to_string(B));
    strides_.assign(static_cast<std::size_t>(n), 1);
    StateIndex card = 1;
    const StateIndex r = radix();
    for (int i = n - 1; i >= 0; --i) {
        strides_[static_cast<std::size_t>(i)] = card;
        if (card > std::numeric_limits<StateIndex>::max() / r)
            throw UnsupportedConfiguration("state space too large");
        card *= r;
    }
    cardinality_ = card;
}

bool StateSpace::is_valid(const SystemState& state) const {
    if (state.size() != static_cast<std::size_t>(n_)) return false;
    for (Level l : state.levels)
        if (l < kInactive || l > B_) return false;
    return true;
}

StateIndex StateSpace::encode(const SystemState& state) const {
    if (state.size() != static_cast<std::size_t>(n_))
        throw InvalidState("state has " + std::to_string(state.size()) + " queues, expected " + std::to_string(n_));
    StateIndex index = 0;
    for (int i = 0; i < n_; ++i) {
        const Level l = state[static_cast<std::size_t>(i)];
        if (l < kInactive || l > B_) throw InvalidState("invalid state " + to_string(state));
        index += static_cast<StateIndex>(l + 1) * stride(i);
    }
    return index;
}

SystemState StateSpace::decode(StateIndex index) const {
    if (index < 0 || index >= cardinality_)
        throw InvalidIndex("state index " + std::to_string(index) + " outside [0, " + std::to_string(cardinality_) + ")");
    SystemState s{std::vector<Level>(static_cast<std::size_t>(n_))};
    for (int i = n_ - 1; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = static_cast<Level>(index % radix()) - 1;
        index /= radix();
    }
    return s;
}

Level StateSpace::level_at(StateIndex index, int i) const {
    return static_cast<Level>((index / stride(i)) % radix()) - 1;
}

int active_count(const SystemState& state) {
    int count = 0;
    for (Level l : state.levels)
        if (l >= 0) ++count;
    return count;
}

int task_total(const SystemState& state) {
    int total = 0;
    for (Level l : state.levels)
        if (l > 0) total += l;
    return total;
}

}  // namespace flexq
