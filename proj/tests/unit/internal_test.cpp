#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gcalc/internal.hpp"
#include "gcalc/parse.hpp"

using namespace gcalc;

namespace {

GeneralizedNumber ev(const std::string& src) { return evaluate_number(parse_expr(src)); }

GaugeExpansion gx(double c) { return GaugeExpansion::constant(c); }

}  // namespace

TEST_CASE("membrane membership follows the tail of each branch") {
    const Membrane m = Membrane::of(Region::interval(-1.0, 1.0));
    CHECK(m.bound == Catch::Approx(2.0));

    CHECK(membrane_member(ev("1/2 + alpha(1)"), m));
    // Interior point plus any infinitesimal stays inside.
    CHECK(membrane_member(ev("-9/10 + 3*alpha(2)"), m));
    // Values drifting off to 2 leave the region even though early samples
    // may pass.
    CHECK_FALSE(membrane_member(ev("2 - alpha(1)"), m));
    // Moderate but unbounded points violate the compact-support bound.
    CHECK_FALSE(membrane_member(ev("alpha(-1)"), m));
    // A single escaping branch disqualifies the whole point.
    CHECK_FALSE(membrane_member(
        ev("interleave(idem(\"\", \"10\"), 1/2, idem(\"\", \"01\"), 5)"), m));

    CHECK_THROWS_AS(membrane_member(ev("alpha(1)").demoted(default_config(), "test"), m), Error);
}

TEST_CASE("strong membership is distance invertibility") {
    const SetNet A = SetNet::box({gx(0.0)}, {gx(1.0)});

    // Boundary point: distance zero, not invertible.
    const StrongVerdict at1 = strong_member(GeneralizedNumber::one(), A);
    CHECK_FALSE(at1.member);
    CHECK(at1.exact);
    CHECK(at1.distance.is_exact_zero());

    // Pulled inside by an infinitesimal: distance alpha(2), invertible.
    const StrongVerdict inside = strong_member(ev("1 - alpha(2)"), A);
    CHECK(inside.member);
    CHECK(inside.exact);
    CHECK(valuation(inside.distance).exact == 2);

    // Outside: clamped to zero.
    CHECK_FALSE(strong_member(ev("3/2"), A).member);

    // The moderate-horizon net (-2^(2^k c), 2^(2^k c)) contains every
    // moderate point; alpha(-r) growth is no obstacle.
    const SetNet horizon = SetNet::box({GaugeExpansion::monomial(-1.0, QQ(-6))},
                                       {GaugeExpansion::monomial(1.0, QQ(-6))});
    CHECK(strong_member(ev("alpha(-2)"), horizon).member);
    CHECK(strong_member(ev("1000"), horizon).member);
}

TEST_CASE("ball nets resolve the center distance through the square root") {
    const SetNet B = SetNet::ball({gx(0.0), gx(0.0)}, gx(1.0));

    const std::vector<GeneralizedNumber> p{ev("3/5 - alpha(1)"), ev("4/5 - alpha(1)")};
    const StrongVerdict v = strong_member(p, B);
    CHECK(v.member);
    // dist = 1 - |p| = 1 - sqrt(1 - 14/5 a + 2 a^2); leading term (7/5) a.
    CHECK(valuation(v.distance).exact == 1);

    // Exactly on the sphere: not a member.
    CHECK_FALSE(strong_member({ev("3/5"), ev("4/5")}, B).member);
    // At the center the distance is the full radius.
    const StrongVerdict c = strong_member({ev("0"), ev("0")}, B);
    CHECK(c.member);
    CHECK(c.distance == GeneralizedNumber::one());
}

TEST_CASE("openness: perturbations below the boundary distance stay members") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> U(-0.9, 0.9);
    const SetNet A = SetNet::box({gx(-1.0)}, {gx(1.0)});
    for (int i = 0; i < 50; ++i) {
        const GeneralizedNumber p = GeneralizedNumber::from_real(U(rng));
        const StrongVerdict v = strong_member(p, A);
        REQUIRE(v.member);
        const Valuation dv = valuation(v.distance);
        REQUIRE(dv.is_exact());
        const QQ deeper = dv.exact + 1;
        const GeneralizedNumber q = add(p, GeneralizedNumber::alpha(deeper), default_config());
        CHECK(strong_member(q, A).member);
    }
}

TEST_CASE("box intersection is computed exactly") {
    const SetNet A = SetNet::box({gx(0.0)}, {gx(2.0)});
    const SetNet B = SetNet::box({gx(1.0)}, {gx(3.0)});
    const InternalSet I = intersect_strong(A, B);
    REQUIRE(I.representable());
    CHECK(I.region().lo[0].eval(10) == Catch::Approx(1.0));
    CHECK(I.region().hi[0].eval(10) == Catch::Approx(2.0));

    const GeneralizedNumber p = ev("3/2");
    CHECK(strong_member(p, A).member);
    CHECK(strong_member(p, B).member);
    CHECK(strong_member({p}, I).member);

    // Disjoint boxes leave no strong members: sampled exact points all fail.
    const InternalSet empty = intersect_strong(SetNet::box({gx(0.0)}, {gx(1.0)}),
                                               SetNet::box({gx(2.0)}, {gx(3.0)}));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-4.0, 4.0);
    for (int i = 0; i < 100; ++i)
        CHECK_FALSE(strong_member({GeneralizedNumber::from_real(U(rng))}, empty).member);

    // Ball with box has no catalog formula; membership still conjoins.
    const InternalSet mixed =
        intersect_strong(SetNet::ball({gx(0.0)}, gx(2.0)), SetNet::box({gx(0.0)}, {gx(3.0)}));
    CHECK_FALSE(mixed.representable());
    CHECK_THROWS_AS(mixed.region(), Error);
    CHECK(strong_member({ev("1")}, mixed).member);
    CHECK_FALSE(strong_member({ev("-1")}, mixed).member);
}

TEST_CASE("expansion-valued box parameters shift with the index") {
    // A_k = (eps_k, 1 + eps_k): the point 1 is eventually interior.
    const SetNet A = SetNet::box({GaugeExpansion::monomial(1.0, QQ(1))},
                                 {add(gx(1.0), GaugeExpansion::monomial(1.0, QQ(1)))});
    CHECK(strong_member(GeneralizedNumber::one(), A).member);
    // The point eps sits exactly on the moving lower face.
    CHECK_FALSE(strong_member(ev("alpha(1)"), A).member);
    CHECK(strong_member(ev("2*alpha(1)"), A).member);
}

TEST_CASE("monotonicity: strong membership transfers to supersets") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    const SetNet A = SetNet::box({gx(-1.0)}, {gx(1.0)});
    const SetNet B = SetNet::box({gx(-2.0)}, {gx(2.0)});
    for (int i = 0; i < 100; ++i) {
        const GeneralizedNumber p = GeneralizedNumber::from_real(U(rng));
        if (strong_member(p, A).member) CHECK(strong_member(p, B).member);
    }
}
