#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "gcalc/eval.hpp"
#include "gcalc/parse.hpp"

using namespace gcalc;

namespace {

GeneralizedNumber ev(const std::string& src) { return evaluate_number(parse_expr(src)); }

GeneralizedNumber ev_at(const std::string& src, GeneralizedNumber xv) {
    EvalEnv env;
    env.x = std::move(xv);
    return evaluate(parse_expr(src), env);
}

bool has_warning(const GeneralizedNumber& v, const std::string& needle) {
    for (const auto& w : v.warnings())
        if (w.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("gauge arithmetic evaluates exactly") {
    const GeneralizedNumber one = ev("alpha(1)*alpha(-1)");
    CHECK(one == GeneralizedNumber::one());
    CHECK(norm(one) == Catch::Approx(1.0).margin(1e-15));
    CHECK(valuation(one).exact == 0);

    CHECK(ev("alpha(1/2)^3") == GeneralizedNumber::alpha(qq(3, 2)));
    CHECK(ev("2*alpha(2) - alpha(2) - alpha(2)").is_exact_zero());
}

TEST_CASE("series composition matches pointwise evaluation") {
    struct Case {
        std::string src;
        double (*fn)(double);
        double (*arg)(int);
    };
    const auto exp_arg = [](int k) { return 0.5 + std::exp2(-k); };
    const auto sin_arg = [](int k) { return 1.0 / 3.0 + std::exp2(-0.5 * k); };
    const auto atan_arg = [](int k) { return -2.0 + 3.0 * std::exp2(-2.0 * k); };

    const GeneralizedNumber e1 = ev("exp(1/2 + alpha(1))");
    REQUIRE(e1.is_exact_tier());
    for (int k = 4; k <= 40; ++k)
        CHECK(e1.sample(k) == Catch::Approx(std::exp(exp_arg(k))).epsilon(1e-12));

    const GeneralizedNumber s1 = ev("sin(1/3 + alpha(1/2))");
    REQUIRE(s1.is_exact_tier());
    for (int k = 4; k <= 40; ++k)
        CHECK(s1.sample(k) == Catch::Approx(std::sin(sin_arg(k))).epsilon(1e-10));

    const GeneralizedNumber a1 = ev("atan(-2 + 3*alpha(2))");
    REQUIRE(a1.is_exact_tier());
    for (int k = 4; k <= 40; ++k)
        CHECK(a1.sample(k) == Catch::Approx(std::atan(atan_arg(k))).epsilon(1e-12));
}

TEST_CASE("atan of a divergent argument folds to pi/2 minus a series") {
    const GeneralizedNumber a = ev("atan(alpha(-1))");
    REQUIRE(a.is_exact_tier());
    const auto sh = shadow(a);
    REQUIRE(sh.has_value());
    CHECK(*sh == Catch::Approx(std::numbers::pi / 2).margin(1e-14));
    // Truncation at the order window bounds the series tail by 2^(-17k).
    for (int k = 2; k <= 40; ++k)
        CHECK(a.sample(k) ==
              Catch::Approx(std::atan(std::exp2(k))).margin(std::exp2(-17.0 * k) + 2e-12));

    const GeneralizedNumber b = ev("atan(-2*alpha(-2) + 1)");
    for (int k = 2; k <= 30; ++k)
        CHECK(b.sample(k) ==
              Catch::Approx(std::atan(-2.0 * std::exp2(2.0 * k) + 1.0)).epsilon(1e-10));
}

TEST_CASE("exp separates negligible decay from unbounded growth") {
    CHECK(ev("exp(-alpha(-1))").is_exact_zero());
    CHECK(ev("exp(-3*alpha(-2) + alpha(-1))").is_exact_zero());

    CHECK_THROWS_AS(ev("exp(alpha(-1))"), Error);
    try {
        ev("exp(alpha(-1))");
    } catch (const Error& e) {
        CHECK(std::string(e.code()) == err_not_alpha_bounded);
    }
    // Oscillatory phase at a divergent scale is unbounded along subsequences.
    CHECK_THROWS_AS(ev("exp(alpha(-1)*sin(alpha(-1)))"), Error);
}

TEST_CASE("trig of an integer-coefficient divergent monomial stays exact") {
    const GeneralizedNumber s = ev("sin(alpha(-1) + 1/4)");
    REQUIRE(s.is_exact_tier());
    const Branch& b = s.parts().front().branch;
    REQUIRE(b.trig().size() == 2);
    for (int k = 1; k <= 44; ++k)
        CHECK(s.sample(k) == Catch::Approx(std::sin(std::exp2(k) + 0.25)).margin(1e-11));

    const GeneralizedNumber c = ev("cos(-2*alpha(-1))");
    REQUIRE(c.is_exact_tier());
    for (int k = 1; k <= 44; ++k)
        CHECK(c.sample(k) == Catch::Approx(std::cos(-2.0 * std::exp2(k))).margin(1e-11));

    // Non-integer coefficient: the phase leaves the shared lattice and the
    // result is sampled instead.
    const GeneralizedNumber d = ev("sin(2/3*alpha(-1))");
    CHECK(d.tier() == Tier::Empirical);
    CHECK(has_warning(d, "outside the exact composition catalog"));
    for (int k = 1; k <= 40; ++k)
        CHECK(d.sample(k) == Catch::Approx(std::sin(2.0 / 3.0 * std::exp2(k))).margin(1e-12));
}

TEST_CASE("step kernel at the origin reproduces the half-point values") {
    const GeneralizedNumber h = ev_at("heaviside(x)", GeneralizedNumber::zero());
    const auto sh = shadow(h);
    REQUIRE(sh.has_value());
    CHECK(*sh == Catch::Approx(0.5).margin(1e-15));

    const GeneralizedNumber r = ev_at("heaviside(x)*heaviside(x) - heaviside(x)",
                                      GeneralizedNumber::zero());
    const auto sh2 = shadow(r);
    REQUIRE(sh2.has_value());
    CHECK(*sh2 == Catch::Approx(-0.25).margin(1e-12));
}

TEST_CASE("delta vanishes away from the origin and scales like 1/eps at it") {
    // At a fixed nonzero point the Gaussian tail is negligible: exact zero.
    CHECK(ev_at("delta(x)", GeneralizedNumber::from_real(0.7)).is_exact_zero());

    // At the origin the value is rho(0)/eps.
    const GeneralizedNumber d0 = ev_at("delta(x)", GeneralizedNumber::zero());
    const double rho0 = KernelTable::get(default_config().mollifier_order).family().rho0;
    const Valuation v = valuation(d0);
    CHECK(v.exact == -1);
    for (int k = 2; k <= 30; ++k)
        CHECK(d0.sample(k) == Catch::Approx(rho0 * std::exp2(k)).epsilon(1e-12));

    // x * delta(x) at the moving point x0 * eps has shadow x0 rho(x0).
    for (const double x0 : {0.5, 1.0, 2.0}) {
        const GeneralizedNumber p =
            ev_at("x*delta(x)", mul(GeneralizedNumber::from_real(x0), GeneralizedNumber::alpha(1)));
        const auto sh = shadow(p);
        REQUIRE(sh.has_value());
        const double want = x0 * KernelTable::get(6).eval({KernelBase::Rho, 0, 6}, x0);
        CHECK(*sh == Catch::Approx(want).margin(1e-12));
    }
}

TEST_CASE("abs embedding recovers the exact absolute value on signed branches") {
    const GeneralizedNumber a = ev_at("abs(x)", ev("-3 + alpha(1)"));
    CHECK(a == ev("3 - alpha(1)"));

    // Around an oscillating argument only the sampled tier can follow; the
    // kernel stays within eps of |u| uniformly.
    const GeneralizedNumber u = ev("sin(alpha(-1))");
    const GeneralizedNumber au = ev_at("abs(x)", u);
    CHECK(au.tier() == Tier::Empirical);
    for (int k = 4; k <= 40; ++k)
        CHECK(std::fabs(au.sample(k) - std::fabs(u.sample(k))) <= 2.0 * std::exp2(-k));
}

TEST_CASE("quanta and the inversion map act through the valuation") {
    CHECK(quanta_eval(ev("alpha(3/2)")) == GeneralizedNumber::alpha(QQ(3)));
    CHECK(quanta_eval(ev("5*alpha(-2)")) == GeneralizedNumber::alpha(QQ(-4)));
    CHECK(quanta_eval(GeneralizedNumber::zero()).is_exact_zero());
    CHECK_THROWS_AS(quanta_eval(ev("alpha(2)").demoted(default_config(), "test")), Error);

    const GeneralizedNumber x = ev("3*alpha(2) + alpha(3)");
    const GeneralizedNumber fx = inversion_map(x);
    CHECK(norm(x) * norm(fx) == Catch::Approx(1.0).margin(1e-12));
    // The map is an involution on invertible elements.
    CHECK(inversion_map(fx) == x);
}

TEST_CASE("rational powers") {
    CHECK(ev("(4*alpha(2))^1/2") == ev("2*alpha(1)"));
    CHECK(ev("(8*alpha(-3))^1/3") == ev("2*alpha(-1)"));

    const GeneralizedNumber r = ev("(1 + alpha(1))^1/2");
    REQUIRE(r.is_exact_tier());
    for (int k = 4; k <= 40; ++k)
        CHECK(r.sample(k) == Catch::Approx(std::sqrt(1.0 + std::exp2(-k))).epsilon(1e-12));

    const GeneralizedNumber inv2 = ev("(2 + alpha(1))^-2");
    for (int k = 4; k <= 40; ++k) {
        const double w = 2.0 + std::exp2(-k);
        CHECK(inv2.sample(k) == Catch::Approx(1.0 / (w * w)).epsilon(1e-10));
    }

    CHECK(number_pow(GeneralizedNumber::zero(), QQ(2)).is_exact_zero());
    CHECK_THROWS_AS(number_pow(GeneralizedNumber::zero(), QQ(-1)), Error);
    CHECK_THROWS_AS(ev("(-1 + alpha(1))^1/2"), Error);
}

TEST_CASE("embedded distribution trees print within the grammar") {
    const ExprPtr d = embed_expr(parse_expr("delta(x)"), 6);
    const std::string printed = print_expr(d);
    CHECK(printed == "alpha(-1)*rho(alpha(-1)*x)");
    CHECK(expr_equal(parse_expr(printed), d));

    const ExprPtr h = embed_expr(parse_expr("heaviside(x - 1)"), 6);
    CHECK(expr_equal(parse_expr(print_expr(h)), h));

    const ExprPtr a = embed_expr(parse_expr("abs(x)*sign(x)"), 6);
    CHECK(expr_equal(parse_expr(print_expr(a)), a));
}

TEST_CASE("free variables are rejected in number context") {
    CHECK_THROWS_AS(evaluate_number(parse_expr("x + 1")), Error);
    try {
        evaluate_number(parse_expr("t^2"));
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("free variable 't'") != std::string::npos);
    }
}

TEST_CASE("kernel composition follows the family pointwise") {
    const GeneralizedNumber r = ev_at("Rho(x)", ev("alpha(1)"));
    REQUIRE(r.is_exact_tier());
    const auto& table = KernelTable::get(6);
    for (int k = 2; k <= 40; ++k)
        CHECK(r.sample(k) ==
              Catch::Approx(table.eval({KernelBase::Step, 0, 6}, std::exp2(-k))).epsilon(1e-9));

    // Divergent arguments saturate the step.
    CHECK(ev_at("Rho(x)", ev("alpha(-1)")) == GeneralizedNumber::one());
    CHECK(ev_at("Rho(x)", ev("-alpha(-1)")).is_exact_zero());
}

TEST_CASE("interleave evaluation merges tiers when needed") {
    const GeneralizedNumber m = ev(
        "interleave(idem(\"\", \"10\"), alpha(1), idem(\"\", \"01\"), sin(2/3*alpha(-1)))");
    CHECK(m.tier() == Tier::Empirical);
    const Idempotent e("", "10");
    for (int k = 1; k <= 40; ++k) {
        const double want =
            e.bit(k) ? std::exp2(-k) : std::sin(2.0 / 3.0 * std::exp2(k));
        CHECK(m.sample(k) == Catch::Approx(want).margin(1e-12));
    }
}
