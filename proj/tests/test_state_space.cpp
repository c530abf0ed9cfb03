#include "doctest.h"

#include "flexq/errors.hpp"
#include "flexq/state_space.hpp"

#include <set>

using namespace flexq;

TEST_SUITE("state_space") {

TEST_CASE("encode places queue 0 in the most significant digit") {
    const StateSpace s22(2, 2);
    CHECK(s22.cardinality() == 16);
    CHECK(s22.encode({{-1, -1}}) == 0);
    CHECK(s22.encode({{2, 2}}) == 15);
    CHECK(s22.encode({{0, -1}}) == 4);

    const StateSpace s56(5, 6);
    CHECK(s56.cardinality() == 32768);
    CHECK(s56.encode({{-1, -1, -1, -1, 0}}) == 1);
}

TEST_CASE("decode examples") {
    const StateSpace s22(2, 2);
    CHECK(s22.decode(0) == SystemState{{-1, -1}});
    CHECK(s22.decode(5) == SystemState{{0, 0}});
    CHECK(StateSpace(1, 6).decode(7) == SystemState{{6}});
}

TEST_CASE("invalid states and indices are rejected") {
    const StateSpace s(2, 3);
    CHECK_THROWS_AS(s.encode({{4, 0}}), InvalidState);
    CHECK_THROWS_AS(s.encode({{-2, 0}}), InvalidState);
    CHECK_THROWS_AS(s.encode({{0, 0, 0}}), InvalidState);
    CHECK_THROWS_AS(s.decode(-1), InvalidIndex);
    CHECK_THROWS_AS(s.decode(25), InvalidIndex);
    CHECK_THROWS_AS(StateSpace(2, 1), UnsupportedConfiguration);
    CHECK_THROWS_AS(StateSpace(0, 3), UnsupportedConfiguration);
}

TEST_CASE("round trip and cardinality are exhaustive") {
    for (int n = 1; n <= 4; ++n) {
        for (int B = 2; B <= 5; ++B) {
            const StateSpace space(n, B);
            std::set<StateIndex> seen;
            for (StateIndex k = 0; k < space.cardinality(); ++k) {
                const SystemState q = space.decode(k);
                REQUIRE(space.is_valid(q));
                REQUIRE(space.encode(q) == k);
                for (int i = 0; i < n; ++i) REQUIRE(space.level_at(k, i) == q[static_cast<std::size_t>(i)]);
                seen.insert(k);
            }
            StateIndex expected = 1;
            for (int i = 0; i < n; ++i) expected *= B + 2;
            CHECK(space.cardinality() == expected);
            CHECK(static_cast<StateIndex>(seen.size()) == expected);
        }
    }
}

TEST_CASE("classify") {
    CHECK(classify(-1, 4) == QueueClass::Inactive);
    CHECK(classify(0, 4) == QueueClass::Empty);
    CHECK(classify(1, 4) == QueueClass::One);
    CHECK(classify(3, 4) == QueueClass::Normal);
    CHECK(classify(4, 4) == QueueClass::Full);
    CHECK(classify(2, 2) == QueueClass::Full);
    CHECK_THROWS_AS(classify(1, 1), UnsupportedConfiguration);
    CHECK_THROWS_AS(classify(5, 4), InvalidState);
}

TEST_CASE("classification partitions every level") {
    for (int B = 2; B <= 8; ++B) {
        for (Level l = -1; l <= B; ++l) {
            const int hits = (l == -1) + (l == 0) + (l == 1) + (l >= 2 && l < B) + (l == B);
            REQUIRE(hits == 1);
            const QueueClass c = classify(l, B);
            CHECK((c == QueueClass::Inactive) == (l == -1));
            CHECK((c == QueueClass::Empty) == (l == 0));
            CHECK((c == QueueClass::One) == (l == 1));
            CHECK((c == QueueClass::Full) == (l == B));
            CHECK((c == QueueClass::Normal) == (l >= 2 && l < B));
        }
    }
}

TEST_CASE("active_count and task_total") {
    CHECK(active_count({{-1, -1, -1}}) == 0);
    CHECK(task_total({{-1, -1, -1}}) == 0);
    CHECK(active_count({{0, 3, -1}}) == 2);
    CHECK(task_total({{0, 3, -1}}) == 3);
    CHECK(active_count({{4, 4, 4, 4, 4}}) == 5);
    CHECK(task_total({{4, 4, 4, 4, 4}}) == 20);
}

}
