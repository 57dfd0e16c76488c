#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "ptt/random.hpp"

using ptt::RandomSource;

TEST_CASE("identical seeds give identical streams") {
    RandomSource a(123456789);
    RandomSource b(123456789);
    for (int i = 0; i < 2000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
    RandomSource a(1);
    RandomSource b(2);
    int equal = 0;
    for (int i = 0; i < 64; ++i)
        if (a.next_u64() == b.next_u64()) ++equal;
    CHECK(equal == 0);
}

TEST_CASE("next_unit stays in [0, 1)") {
    RandomSource rng(7);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.next_unit();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("child streams depend only on (seed, stream index)") {
    RandomSource parent(42);
    RandomSource child_before = parent.child(3);
    parent.next_u64();
    parent.next_u64();
    RandomSource child_after = parent.child(3);
    for (int i = 0; i < 100; ++i) REQUIRE(child_before.next_u64() == child_after.next_u64());

    // distinct stream indices give distinct streams
    RandomSource c0 = parent.child(0);
    RandomSource c1 = parent.child(1);
    int equal = 0;
    for (int i = 0; i < 64; ++i)
        if (c0.next_u64() == c1.next_u64()) ++equal;
    CHECK(equal == 0);
}

TEST_CASE("nested children are deterministic") {
    const RandomSource master(2026);
    std::vector<std::uint64_t> first;
    for (int i = 0; i < 4; ++i) {
        RandomSource trial = master.child(1).child(i);
        first.push_back(trial.next_u64());
    }
    for (int i = 0; i < 4; ++i) {
        RandomSource trial = master.child(1).child(i);
        REQUIRE(trial.next_u64() == first[static_cast<std::size_t>(i)]);
    }
}
