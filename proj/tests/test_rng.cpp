#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "plsh/rng.hpp"

using plsh::RandomStream;

TEST_CASE("same seed reproduces the stream") {
    RandomStream a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
    RandomStream a(1), b(2);
    int same = 0;
    for (int i = 0; i < 100; ++i)
        if (a.next_u64() == b.next_u64()) ++same;
    CHECK(same == 0);
}

TEST_CASE("child streams do not depend on sibling order") {
    RandomStream c5 = RandomStream::child(7, 5);
    // Drawing from other children first must not affect child 5.
    RandomStream c0 = RandomStream::child(7, 0);
    (void)c0.next_u64();
    RandomStream c5_again = RandomStream::child(7, 5);
    for (int i = 0; i < 100; ++i) CHECK(c5.next_u64() == c5_again.next_u64());
}

TEST_CASE("uniform ranges") {
    RandomStream rng(3);
    for (int i = 0; i < 100000; ++i) {
        const double upos = rng.uniform_unit_pos();
        CHECK(upos > 0.0);
        CHECK(upos <= 1.0);
        const double u = rng.uniform_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("gaussian moments") {
    RandomStream rng(11);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        sum += g;
        sum_sq += g * g;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);       // se ~ 0.0022
    CHECK(std::abs(var - 1.0) < 0.02);  // se ~ 0.0032
}
