#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gcalc/parse.hpp"
#include "gcalc/sharp.hpp"

using namespace gcalc;

namespace {

GeneralizedFunction fn(const std::string& src, double lo = -4.0, double hi = 4.0) {
    return GeneralizedFunction::from_expression(parse_expr(src), Region::interval(lo, hi));
}

GeneralizedNumber classical(double c) { return GeneralizedNumber::from_real(c); }

}  // namespace

TEST_CASE("difference quotient is exact on affine functions") {
    const GeneralizedFunction f = fn("3*x + 2");
    for (const QQ& r : {QQ(1, 2), QQ(1), QQ(2), QQ(8)}) {
        const GeneralizedNumber q = difference_quotient(f, classical(0.5), r);
        const Valuation v = valuation(sub(q, classical(3.0)));
        REQUIRE(v.infinite);  // exact cancellation, not merely small
    }
    // Scaling in a non-unit direction.
    const GeneralizedNumber q = difference_quotient(
        f, std::vector<GeneralizedNumber>{classical(0.5)}, QQ(1), std::vector<double>{-2.0});
    REQUIRE(valuation(sub(q, classical(-6.0))).infinite);
}

TEST_CASE("difference quotient converges to the derivative as the step shrinks") {
    const GeneralizedFunction f = fn("sin(x)");
    const double target = std::cos(0.5);
    QQ prev = -1000;
    for (const QQ& r : {QQ(1), QQ(2), QQ(4)}) {
        const GeneralizedNumber q = difference_quotient(f, classical(0.5), r);
        const Valuation v = valuation(sub(q, classical(target)));
        // Taylor remainder -sin(1/2)/2 * alpha_r leads the difference.
        REQUIRE(v.kind == Valuation::Kind::Exact);
        REQUIRE(v.exact == r);
        REQUIRE(v.exact > prev);
        prev = v.exact;
    }
}

TEST_CASE("difference quotient handles two-dimensional points") {
    const GeneralizedFunction f = GeneralizedFunction::from_expression(
        parse_expr("x*(t + alpha(1))^-1"), Region::box({-4.0, 0.25}, {4.0, 4.0}));
    const GeneralizedNumber q =
        difference_quotient(f, {classical(1.0), classical(1.0)}, QQ(1), {1.0, 0.0});
    REQUIRE(shadow(q) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("gauge-factorizable seminorm profiles are exact") {
    const GeneralizedFunction f =
        fn("alpha(2)*sin(x)");  // every x-derivative keeps the alpha(2) factor
    const SeminormProfile p = seminorm_profile(f, 1, 3);
    REQUIRE(p.valuation.size() == 4);
    for (int j = 0; j <= 3; ++j) {
        REQUIRE(p.exact[static_cast<std::size_t>(j)]);
        REQUIRE(p.valuation[static_cast<std::size_t>(j)] == 2.0);
    }
    // A classical function sits at valuation zero, exactly.
    const SeminormProfile q = seminorm_profile(fn("sin(x)"), 1, 1);
    REQUIRE(q.valuation[0] == 0.0);
    REQUIRE(q.exact[0]);
    // The zero function has every seminorm identically zero.
    const SeminormProfile z = seminorm_profile(fn("0"), 2, 2);
    for (double v : z.valuation) REQUIRE(std::isinf(v));
}

TEST_CASE("kernel-scaled profiles come from lattice regression") {
    const GeneralizedFunction d = GeneralizedFunction::embed_distribution(
        make_delta(0, make_var(0)), 6, Region::interval(-2.0, 2.0));
    const SeminormProfile p = seminorm_profile(d, 1, 0);
    REQUIRE_FALSE(p.exact[0]);
    // sup |(1/eps) rho(x/eps)| grows like 2^k: valuation -1.
    REQUIRE(p.valuation[0] == Catch::Approx(-1.0).margin(1e-6));
}

TEST_CASE("oscillation profiles resolve the gauge-frequency exponent") {
    // alpha(2) * sin(x*alpha(-5)): order 0 decays like 2^(-2k), the first
    // derivative grows like 2^(3k).
    const GeneralizedFunction f = fn("alpha(2)*sin(x*alpha(-5))", -2.0, 2.0);
    const SeminormProfile p = seminorm_profile(f, 1, 1);
    REQUIRE_FALSE(p.exact[0]);
    REQUIRE(p.valuation[0] == Catch::Approx(2.0).margin(0.05));
    REQUIRE(p.valuation[1] == Catch::Approx(-3.0).margin(0.05));
}

TEST_CASE("down-sequencing verdicts") {
    // PASS: every seminorm is exactly 3, threshold 4^2 * (1/8) = 2.
    const DsaReport pass = dsa_check(fn("alpha(3)*sin(x)"), 1, 2, QQ(1, 8));
    REQUIRE(pass.verdict == DsaReport::Verdict::Pass);
    REQUIRE(pass.offending == -1);

    // VACUOUS: order-0 seminorm sits at 0, below the threshold 4.
    const DsaReport vac = dsa_check(fn("sin(x)"), 1, 1, QQ(1));
    REQUIRE(vac.verdict == DsaReport::Verdict::Vacuous);

    // VIOLATION: order-0 valuation 2 clears threshold 1, but the first
    // derivative drops to 2-5 = -3, far below r = 1/4.
    Config cfg;
    for (int depth : {32, 48}) {
        cfg.lattice_depth = depth;
        const DsaReport bad =
            dsa_check(fn("alpha(2)*sin(x*alpha(-5))", -2.0, 2.0), 1, 1, QQ(1, 4), cfg);
        REQUIRE(bad.verdict == DsaReport::Verdict::Violation);
        REQUIRE(bad.offending == 1);
    }
}

TEST_CASE("grid distance separates classical functions at unit distance") {
    const GeneralizedFunction s = fn("sin(x)");
    const GeneralizedFunction c = fn("cos(x)");
    REQUIRE(grid_distance(s, c) == 1.0);
    REQUIRE(grid_distance(s, s) == 0.0);

    const GeneralizedFunction shifted =
        s.with_expression(make_add({s.expression(), make_gauge()}));
    REQUIRE(grid_distance(s, shifted) == std::exp(-1.0));
    // Symmetry.
    REQUIRE(grid_distance(shifted, s) == std::exp(-1.0));
}

TEST_CASE("squared slow-scale arctangent has positive valuation and classical velocity") {
    // w(t) = atan(t/eps); w^2 evaluated on the infinitesimal ray t0*alpha(2).
    const GeneralizedFunction w = GeneralizedFunction::from_expression(
        parse_expr("atan(alpha(-1)*t)"), Region::interval(-4.0, 4.0));
    const GeneralizedFunction w2 = fn_mul(w, w);
    const GeneralizedFunction dw2 = sharp_derivative(w2, 1);
    for (double t0 : {0.5, 1.0, 2.0}) {
        const GeneralizedNumber p =
            mul(classical(t0), GeneralizedNumber::alpha(QQ(2)));
        const Valuation v = valuation(evaluate(w2, p));
        REQUIRE(v.kind == Valuation::Kind::Exact);
        REQUIRE(v.exact == QQ(2));
        REQUIRE(shadow(evaluate(dw2, p)) == Catch::Approx(2.0 * t0).margin(1e-4));
    }
}
