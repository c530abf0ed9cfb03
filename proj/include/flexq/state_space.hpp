#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flexq {

/// Queue level: -1 means inactive, 0 active and empty, up to B tasks.
using Level = int;
using StateIndex = std::int64_t;

inline constexpr Level kInactive = -1;

/// Per-queue levels of the whole system, one entry per queue slot.
struct SystemState {
    std::vector<Level> levels;

    std::size_t size() const { return levels.size(); }
    Level operator[](std::size_t i) const { return levels[i]; }
    Level& operator[](std::size_t i) { return levels[i]; }
    bool operator==(const SystemState&) const = default;
};

std::string to_string(const SystemState& state);

enum class QueueClass { Inactive, Empty, One, Normal, Full };

const char* to_string(QueueClass c);

/// Classifies a queue level. Requires B >= 2 so that One and Full are disjoint.
QueueClass classify(Level level, int B);

/// Mixed-radix indexing of [-1, B]^n with queue 0 as the most significant digit.
class StateSpace {
public:
    StateSpace(int n, int B);

    int n() const { return n_; }
    int B() const { return B_; }
    int radix() const { return B_ + 2; }
    StateIndex cardinality() const { return cardinality_; }

    /// Index offset of one level step in queue i.
    StateIndex stride(int i) const { return strides_[static_cast<std::size_t>(i)]; }

    StateIndex encode(const SystemState& state) const;
    SystemState decode(StateIndex index) const;

    /// Level of queue i at the given index without materialising the state.
    Level level_at(StateIndex index, int i) const;

    bool is_valid(const SystemState& state) const;

    SystemState all_inactive() const { return SystemState{std::vector<Level>(static_cast<std::size_t>(n_), kInactive)}; }

private:
    int n_;
    int B_;
    StateIndex cardinality_;
    std::vector<StateIndex> strides_;
};

int active_count(const SystemState& state);
int task_total(const SystemState& state);

}  // namespace flexq
