#include "curator/rng.hpp"

#include <doctest.h>

#include <set>

using namespace curator;

TEST_CASE("Rng streams are reproducible and seed-sensitive") {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.next_u64();
        CHECK(va == b.next_u64());
        if (va != c.next_u64()) differs = true;
    }
    CHECK(differs);
}

TEST_CASE("next_below stays in range, next_double in [0,1)") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        CHECK(rng.next_below(17) < 17);
        const double d = rng.next_double();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
    }
}

TEST_CASE("sample_indices draws k distinct indices deterministically") {
    Rng a(5), b(5);
    const auto s1 = a.sample_indices(30, 10);
    const auto s2 = b.sample_indices(30, 10);
    CHECK(s1 == s2);
    CHECK(s1.size() == 10);
    const std::set<std::size_t> uniq(s1.begin(), s1.end());
    CHECK(uniq.size() == 10);
    for (auto v : s1) CHECK(v < 30);

    Rng c(5);
    CHECK(c.sample_indices(4, 4).size() == 4);
}

TEST_CASE("fnv1a64 is stable and input-sensitive") {
    CHECK(fnv1a64("") == 0xCBF29CE484222325ULL);
    CHECK(fnv1a64("a") != fnv1a64("b"));
    CHECK(fnv1a64("seed:1") == fnv1a64("seed:1"));
}
