#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gcalc/gauge.hpp"

using namespace gcalc;

namespace {

// Independent lattice oracle: evaluates a term list directly, bypassing the
// expansion arithmetic under test.
double lattice_value(const std::vector<std::pair<double, double>>& terms, int k) {
    double acc = 0.0;
    for (auto [c, e] : terms) acc += c * std::exp2(-k * e);
    return acc;
}

}  // namespace

TEST_CASE("gauge powers multiply by adding exponents") {
    const QQ rs[] = {qq(-3), qq(-3, 2), qq(0), qq(1, 2), qq(2)};
    for (const QQ& r : rs)
        for (const QQ& s : rs) {
            const GaugeExpansion p = mul(GaugeExpansion::alpha(r), GaugeExpansion::alpha(s));
            REQUIRE(p == GaugeExpansion::alpha(r + s));
        }
}

TEST_CASE("additive cancellation is exact") {
    const GaugeExpansion a = GaugeExpansion::alpha(qq(1));
    REQUIRE(add(a, -a).is_exact_zero());

    const GaugeExpansion x = add(GaugeExpansion::constant(3.0), GaugeExpansion::alpha(qq(1, 2)));
    const GaugeExpansion y = sub(x, GaugeExpansion::constant(3.0));
    REQUIRE(y == GaugeExpansion::alpha(qq(1, 2)));
}

TEST_CASE("evaluation matches the direct lattice formula") {
    GaugeExpansion x = add(GaugeExpansion::monomial(2.5, qq(-1)), GaugeExpansion::monomial(-0.75, qq(3, 2)));
    x = add(x, GaugeExpansion::constant(1.0));
    for (int k = 1; k <= 20; ++k) {
        const double expected = lattice_value({{2.5, -1.0}, {-0.75, 1.5}, {1.0, 0.0}}, k);
        REQUIRE(x.eval(k) == Catch::Approx(expected).epsilon(1e-15));
    }
}

TEST_CASE("monomial inverse is exact") {
    const GaugeExpansion inv = invert(GaugeExpansion::alpha(qq(5, 2)));
    REQUIRE(inv == GaugeExpansion::alpha(qq(-5, 2)));
    REQUIRE(inv.order().is_infinite());
}

TEST_CASE("series inverse multiplies back to one within the order window") {
    const Config cfg;
    const GaugeExpansion x = add(GaugeExpansion::one(), GaugeExpansion::alpha(qq(1)));
    const GaugeExpansion inv = invert(x, cfg);
    const GaugeExpansion residual = sub(mul(x, inv, cfg), GaugeExpansion::one(), cfg);
    REQUIRE(residual.is_zero_like());
    REQUIRE(residual.order() >= RatInf(cfg.order_window - 1));

    // Alternating geometric coefficients, checked against the closed form.
    REQUIRE(inv.coeff_at(qq(0)) == 1.0);
    REQUIRE(inv.coeff_at(qq(1)) == -1.0);
    REQUIRE(inv.coeff_at(qq(7)) == -1.0);
    REQUIRE(inv.coeff_at(qq(12)) == 1.0);
}

TEST_CASE("inverse of a zero-like expansion is refused") {
    REQUIRE_THROWS_AS(invert(GaugeExpansion::zero()), Error);
    const GaugeExpansion trunc = GaugeExpansion::truncated_zero(RatInf(qq(4)));
    REQUIRE_THROWS_AS(invert(trunc), Error);
}

TEST_CASE("products propagate truncation orders") {
    // x known to order 3, y has leading exponent 1: the product is unknown
    // from exponent 4 on, even though the term would formally exist.
    GaugeExpansion x = GaugeExpansion::one().truncated(RatInf(qq(3)));
    GaugeExpansion y = GaugeExpansion::alpha(qq(1));
    const GaugeExpansion p = mul(x, y);
    REQUIRE(p.order() == RatInf(qq(4)));
    REQUIRE(p.coeff_at(qq(1)) == 1.0);
}

TEST_CASE("term cap folds the dropped tail into the order") {
    Config cfg;
    cfg.term_cap = 8;
    GaugeExpansion x = GaugeExpansion::zero();
    for (int i = 0; i < 20; ++i)
        x = add(x, GaugeExpansion::monomial(1.0, qq(i)), cfg);
    REQUIRE(static_cast<int>(x.terms().size()) == 8);
    REQUIRE(x.order() == RatInf(qq(8)));
}

TEST_CASE("valuation lower bounds") {
    REQUIRE(GaugeExpansion::alpha(qq(2)).valuation_lower_bound() == RatInf(qq(2)));
    REQUIRE(GaugeExpansion::zero().valuation_lower_bound().is_infinite());
    const GaugeExpansion trunc = GaugeExpansion::truncated_zero(RatInf(qq(16)));
    REQUIRE(trunc.valuation_lower_bound() == RatInf(qq(16)));
    REQUIRE(!trunc.valuation_is_exact());
}
