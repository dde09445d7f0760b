#include <cmath>
#include <set>

#include "doctest.h"
#include "pfro/rng.hpp"

using namespace pfro;

TEST_CASE("rng: identical seeds give identical streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next() == b.next());
    Rng c(42), d(43);
    int diff = 0;
    for (int i = 0; i < 64; ++i) diff += (c.next() != d.next());
    CHECK(diff > 32); // different seeds decorrelate immediately
}

TEST_CASE("rng: uniform01 lands in [0,1) with the right moments") {
    Rng r(7);
    double sum = 0.0, sumsq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sumsq += u * u;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 0.005);        // sd of mean ~ 0.00065
    CHECK(std::abs(var - 1.0 / 12.0) < 0.005);
}

TEST_CASE("rng: exponential is positive with unit mean") {
    Rng r(11);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double e = r.exponential();
        REQUIRE(e >= 0.0);
        REQUIRE(std::isfinite(e));
        sum += e;
    }
    CHECK(std::abs(sum / n - 1.0) < 0.02); // sd of mean ~ 0.0022
}

TEST_CASE("rng: fill_uniform matches repeated uniform01") {
    Rng a(5), b(5);
    double buf[16];
    a.fill_uniform(buf, 16);
    for (int i = 0; i < 16; ++i) CHECK(buf[i] == b.uniform01());
}

TEST_CASE("rng: replicate and stream seeds are distinct and deterministic") {
    std::set<uint64_t> seen;
    for (uint32_t r = 0; r < 512; ++r) {
        const uint64_t s = replicate_seed(1234, r);
        CHECK(s == replicate_seed(1234, r));
        seen.insert(s);
    }
    CHECK(seen.size() == 512);
    CHECK(stream_seed(99, Stream::Positions) != stream_seed(99, Stream::Clock));
    // replicate streams do not collide with the base seed's streams
    CHECK(replicate_seed(99, 0) != 99);
}

TEST_CASE("rng: position streams of distinct replicates differ") {
    Rng a(stream_seed(replicate_seed(7, 0), Stream::Positions));
    Rng b(stream_seed(replicate_seed(7, 1), Stream::Positions));
    int diff = 0;
    for (int i = 0; i < 64; ++i) diff += (a.next() != b.next());
    CHECK(diff > 32);
}
