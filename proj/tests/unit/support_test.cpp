#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gcalc/support.hpp"

using namespace gcalc;

namespace {

GeneralizedNumber oscillation(const QQ& rate, TrigKind kind = TrigKind::Sin, long long mult = 1,
                              double amp = 1.0) {
    TrigTerm t;
    t.amplitude = GaugeExpansion::constant(amp);
    t.kind = kind;
    t.multiplier = mult;
    t.rate = rate;
    return GeneralizedNumber::from_branch(Branch::oscillation(t));
}

}  // namespace

TEST_CASE("support of a bounded oscillation fills an interval") {
    const SupportSet s = support(oscillation(qq(1)));
    REQUIRE(s.points.empty());
    REQUIRE(s.intervals.size() == 1);
    REQUIRE(s.intervals[0] == Interval{-1.0, 1.0});
    REQUIRE_FALSE(s.empirical);

    // Empirical cross-check: the samples really do come close to both ends.
    Config deep;
    deep.lattice_depth = 48;
    double lo = 1.0, hi = -1.0;
    const GeneralizedNumber x = oscillation(qq(1));
    for (int k = 1; k <= deep.lattice_depth; ++k) {
        lo = std::min(lo, x.sample(k));
        hi = std::max(hi, x.sample(k));
    }
    REQUIRE(lo == Catch::Approx(-1.0).margin(1e-3));
    REQUIRE(hi == Catch::Approx(1.0).margin(1e-3));
}

TEST_CASE("sin and cos at one frequency combine into a single wave") {
    const GeneralizedNumber x =
        add(oscillation(qq(1), TrigKind::Sin, 1, 3.0), oscillation(qq(1), TrigKind::Cos, 1, 4.0));
    const SupportSet s = support(x);
    REQUIRE(s.intervals.size() == 1);
    REQUIRE(s.intervals[0].lo == Catch::Approx(-5.0).epsilon(1e-12));
    REQUIRE(s.intervals[0].hi == Catch::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("support of infinitesimals is the origin") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const QQ r = qq(1 + static_cast<long long>(rng() % 12), 1 + static_cast<long long>(rng() % 4));
        const double c = (static_cast<double>(rng() % 2000) - 1000.0) / 100.0;
        GeneralizedNumber x = GeneralizedNumber::alpha(r).scaled(c == 0.0 ? 1.0 : c);
        if (trial % 3 == 0) x = mul(x, oscillation(r));  // oscillating infinitesimals too
        const SupportSet s = support(x);
        REQUIRE(s.points == std::vector<double>{0.0});
        REQUIRE(s.intervals.empty());
    }
}

TEST_CASE("diverging nets have empty support") {
    REQUIRE(support(GeneralizedNumber::alpha(qq(-1))).is_empty());
    // Unbounded oscillation escapes every compact set as well.
    const GeneralizedNumber x = mul(GeneralizedNumber::alpha(qq(-2)), oscillation(qq(1)));
    REQUIRE(support(x).is_empty());
}

TEST_CASE("interleaved constants support both values with witnesses") {
    const Idempotent e("", "10");
    const GeneralizedNumber x = GeneralizedNumber::interleave(
        {{e, GeneralizedNumber::from_real(2.0)}, {~e, GeneralizedNumber::from_real(5.0)}});
    const SupportAnalysis a = analyze_support(x);
    REQUIRE(a.set.points == std::vector<double>({2.0, 5.0}));
    // e·x is infinitesimally close to e·q for each supported q.
    for (const auto& [w, q] : a.point_witnesses) {
        const GeneralizedNumber d =
            restrict_to(w, sub(x, GeneralizedNumber::from_real(q)));
        REQUIRE(d.is_exact_zero());
    }
}

TEST_CASE("restriction can only shrink the support or add the origin") {
    const Idempotent e("", "110");
    const GeneralizedNumber x =
        add(GeneralizedNumber::from_real(3.0), GeneralizedNumber::alpha(qq(1)));
    const SupportSet before = support(x);
    SupportSet after = support(restrict_to(e, x));
    REQUIRE(before.points == std::vector<double>{3.0});
    REQUIRE(after.points == std::vector<double>({0.0, 3.0}));
}

TEST_CASE("superposed frequencies refuse exactly and fall back when allowed") {
    // One recognizable base rate, two multipliers: sin(u) + sin(2u)/2.
    const GeneralizedNumber x =
        add(oscillation(qq(1), TrigKind::Sin, 1), oscillation(qq(1), TrigKind::Sin, 2, 0.5));
    REQUIRE_THROWS_AS(support(x), Error);
    const SupportSet s = support(x, default_config(), true);
    REQUIRE(s.empirical);
    REQUIRE(s.intervals.size() == 1);
    // Hull of sin(t) + sin(2t)/2: extrema at cos t + cos 2t = 0, i.e.
    // t = ±pi/3 up to symmetry, giving +-(3*sqrt(3)/4).
    const double extremum = 3.0 * std::sqrt(3.0) / 4.0;
    REQUIRE(s.intervals[0].lo == Catch::Approx(-extremum).margin(1e-5));
    REQUIRE(s.intervals[0].hi == Catch::Approx(extremum).margin(1e-5));
}

TEST_CASE("essential support never refuses and contains the support") {
    const GeneralizedNumber mixed =
        add(oscillation(qq(1), TrigKind::Sin, 1), oscillation(qq(1), TrigKind::Sin, 2, 0.5));
    const SupportSet ess = essential_support(mixed);
    REQUIRE_FALSE(ess.is_empty());

    const GeneralizedNumber simple =
        add(GeneralizedNumber::from_real(1.5), GeneralizedNumber::alpha(qq(2)));
    const SupportSet s = support(simple);
    const SupportSet e = essential_support(simple);
    for (double p : s.points) REQUIRE(e.contains(p, 1e-12));
}

TEST_CASE("empirical inputs get a sampled hull only on request") {
    const GeneralizedNumber x =
        add(GeneralizedNumber::from_real(4.0), GeneralizedNumber::alpha(qq(1)))
            .demoted(default_config(), "test");
    REQUIRE_THROWS_AS(support(x), Error);
    const SupportSet s = support(x, default_config(), true);
    REQUIRE(s.empirical);
    REQUIRE(s.points.size() == 1);
    REQUIRE(s.points[0] == Catch::Approx(4.0).margin(1e-6));
}

TEST_CASE("interval normalization merges and absorbs") {
    SupportSet s;
    s.intervals = {{1.0, 2.0}, {-1.0, 1.5}, {4.0, 5.0}};
    s.points = {1.2, 3.0, 4.5, 3.0};
    s.normalize();
    REQUIRE(s.intervals == std::vector<Interval>({{-1.0, 2.0}, {4.0, 5.0}}));
    REQUIRE(s.points == std::vector<double>{3.0});
}
