#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gcalc/idempotent.hpp"

using namespace gcalc;

TEST_CASE("canonical form minimizes the period") {
    REQUIRE(Idempotent("", "1010").period() == "10");
    REQUIRE(Idempotent("", "111111").period() == "1");
    REQUIRE(Idempotent("", "011011").period() == "011");
}

TEST_CASE("preperiods are erased but germ membership is preserved") {
    const Idempotent e("0110", "10");
    // Same period tail as written: for k > 4 the original read "10" cycling.
    for (long long k = 5; k <= 64; ++k) {
        const bool original = ((k - 5) % 2 == 0);
        REQUIRE(e.bit(k) == original);
    }
    // A preperiod that only disagrees on finitely many indices is the same
    // idempotent.
    REQUIRE(Idempotent("1", "0") == Idempotent::all_zeros());
    REQUIRE(Idempotent("0011", "01") == Idempotent("", "01"));
}

TEST_CASE("boolean algebra on aligned periods") {
    const Idempotent even("", "10");  // 1 at odd k? bit(1)='1': 1-set {1,3,5,...}
    const Idempotent third("", "100");
    REQUIRE((even & ~even).is_zero());
    REQUIRE((even | ~even).is_one());
    const Idempotent both = even & third;
    for (long long k = 1; k <= 60; ++k) REQUIRE(both.bit(k) == (even.bit(k) && third.bit(k)));
    REQUIRE((even ^ even).is_zero());
}

TEST_CASE("de morgan laws hold on randomized periods") {
    std::mt19937_64 rng(7);
    auto random_idem = [&]() {
        const int n = 1 + static_cast<int>(rng() % 6);
        std::string bits;
        for (int i = 0; i < n; ++i) bits.push_back((rng() & 1) ? '1' : '0');
        return Idempotent("", bits);
    };
    for (int trial = 0; trial < 200; ++trial) {
        const Idempotent a = random_idem(), b = random_idem();
        REQUIRE(~(a & b) == (~a | ~b));
        REQUIRE(~(a | b) == (~a & ~b));
        REQUIRE((a & b) == (b & a));
        REQUIRE(((a ^ b) & (a & b)).is_zero());
    }
}

TEST_CASE("density counts ones per canonical period") {
    REQUIRE(Idempotent("", "100").density() == qq(1, 3));
    REQUIRE(Idempotent("", "1010").density() == qq(1, 2));
    REQUIRE(Idempotent::all_ones().density() == qq(1));

    // Counting oracle over a long prefix.
    const Idempotent e("", "100");
    long long ones = 0;
    const long long N = 30000;
    for (long long k = 1; k <= N; ++k) ones += e.bit(k) ? 1 : 0;
    REQUIRE(std::abs(static_cast<double>(ones) / N - 1.0 / 3.0) < 1e-4);
}

TEST_CASE("first one is a stable key inside orthogonal families") {
    const Idempotent a("", "100"), b("", "010"), c("", "001");
    REQUIRE(a.first_one() == 1);
    REQUIRE(b.first_one() == 2);
    REQUIRE(c.first_one() == 3);
    REQUIRE((a & b).is_zero());
    REQUIRE(((a | b) | c).is_one());
}
