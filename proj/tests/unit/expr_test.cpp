#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include "gcalc/expr.hpp"
#include "gcalc/parse.hpp"

using namespace gcalc;

namespace {

ExprPtr rt(const std::string& src) { return parse_expr(src); }

void check_roundtrip(const std::string& src) {
    INFO("source: " << src);
    const ExprPtr e = rt(src);
    const std::string printed = print_expr(e);
    INFO("printed: " << printed);
    const ExprPtr back = parse_expr(printed);
    CHECK(expr_equal(e, back));
}

}  // namespace

TEST_CASE("sums and products merge like terms") {
    CHECK(expr_equal(rt("x + x"), rt("2*x")));
    CHECK(expr_equal(rt("x - x"), make_num(0.0)));
    CHECK(expr_equal(rt("x*x"), rt("x^2")));
    CHECK(expr_equal(rt("x*x*x - x^3"), make_num(0.0)));
    CHECK(expr_equal(rt("2*x + 3*x - 5*x"), make_num(0.0)));
    CHECK(expr_equal(rt("(x + t)*(x + t)"), rt("(t + x)^2")));
    CHECK(expr_equal(rt("x/t"), rt("x*t^-1")));
    CHECK(expr_equal(rt("3 + x + 4"), rt("7 + x")));
    CHECK(expr_equal(rt("2*3*x"), rt("6*x")));
    CHECK(expr_equal(rt("0*sin(x)"), make_num(0.0)));
    CHECK(expr_equal(rt("sin(x)^0"), make_num(1.0)));
}

TEST_CASE("gauge powers collapse") {
    CHECK(expr_equal(rt("alpha(1)*alpha(-1)"), make_num(1.0)));
    CHECK(expr_equal(rt("eps*eps"), rt("alpha(2)")));
    CHECK(expr_equal(rt("alpha(1/2)*alpha(3/2)"), rt("alpha(2)")));
    CHECK(expr_equal(rt("alpha(2)^3"), rt("alpha(6)")));
    CHECK(expr_equal(rt("1/alpha(2)"), rt("alpha(-2)")));
    CHECK(expr_equal(rt("eps"), make_gauge()));
}

TEST_CASE("exponent rationals are greedy") {
    CHECK(expr_equal(rt("x^2/3"), make_pow(make_var(0), qq(2, 3))));
    CHECK(expr_equal(rt("(x^2)/3"), make_mul({make_num(1.0 / 3.0), make_pow(make_var(0), QQ(2))})));
    CHECK(expr_equal(rt("x^2/t"), rt("x^2*t^-1")));  // '/t' is division, not exponent
    CHECK(expr_equal(rt("x^-1/2"), make_pow(make_var(0), qq(-1, 2))));
}

TEST_CASE("derivatives follow the calculus rules") {
    const ExprPtr x = make_var(0);
    CHECK(expr_equal(derivative(rt("sin(x)"), 0), rt("cos(x)")));
    CHECK(expr_equal(derivative(rt("cos(x)"), 0), rt("-sin(x)")));
    CHECK(expr_equal(derivative(rt("exp(2*x)"), 0), rt("2*exp(2*x)")));
    CHECK(expr_equal(derivative(rt("atan(x)"), 0), rt("1/(1 + x^2)")));
    CHECK(expr_equal(derivative(rt("x^3"), 0), rt("3*x^2")));
    CHECK(expr_equal(derivative(rt("x*t"), 0), rt("t")));
    CHECK(expr_equal(derivative(rt("x*t"), 1), rt("x")));
    CHECK(expr_equal(derivative(rt("x^1/2"), 0), make_mul({make_num(0.5), make_pow(x, qq(-1, 2))})));
    CHECK(expr_equal(derivative(rt("t"), 0), make_num(0.0)));
}

TEST_CASE("distribution nodes differentiate within the catalog") {
    CHECK(expr_equal(derivative(rt("heaviside(x)"), 0), rt("delta(x)")));
    CHECK(expr_equal(derivative(rt("delta(x)"), 0), rt("delta(x, 1)")));
    CHECK(expr_equal(derivative(rt("delta(x, 1)"), 0), rt("delta(x, 2)")));
    CHECK(expr_equal(derivative(rt("abs(x)"), 0), rt("sign(x)")));
    CHECK(expr_equal(derivative(rt("sign(x)"), 0), rt("2*delta(x)")));
    CHECK(expr_equal(derivative(rt("quanta(x)"), 0), make_num(0.0)));
    // Chain rule through a composite argument.
    CHECK(expr_equal(derivative(rt("heaviside(x*t)"), 0), rt("t*delta(x*t)")));
}

TEST_CASE("embedded kernels differentiate within the family") {
    // step'(u) = rho(u), rho'(u) advances the derivative count, and the
    // |.|-kernel differentiates to the smoothed sign.
    const ExprPtr u = rt("x/eps");
    const ExprPtr step = make_kernel({KernelBase::Step, 0, 6}, u);
    const ExprPtr want = make_mul({make_alpha(QQ(-1)), make_kernel({KernelBase::Rho, 0, 6}, u)});
    CHECK(expr_equal(derivative(step, 0), want));

    const ExprPtr rho1 = derivative(make_kernel({KernelBase::Rho, 0, 6}, u), 0);
    CHECK(expr_equal(rho1, make_mul({make_alpha(QQ(-1)), make_kernel({KernelBase::Rho, 1, 6}, u)})));

    const ExprPtr absd = derivative(make_kernel({KernelBase::Abs, 0, 6}, u), 0);
    CHECK(expr_equal(absd, make_mul({make_alpha(QQ(-1)),
                                     make_add({make_mul({make_num(2.0), step}), make_num(-1.0)})})));
}

TEST_CASE("transport residual cancels symbolically") {
    // u(t, x) = x / (t + eps) solves u_t + u u_x = 0 exactly, including the
    // gauge shift in the denominator.
    const ExprPtr u = rt("x/(t + eps)");
    const ExprPtr residual =
        make_add({derivative(u, 1), make_mul({u, derivative(u, 0)})});
    CHECK(expr_equal(residual, make_num(0.0)));

    // Same collapse for a shifted variant.
    const ExprPtr v = rt("(x - 1)/(t + alpha(2))");
    const ExprPtr res2 = make_add({derivative(v, 1), make_mul({v, derivative(v, 0)})});
    CHECK(expr_equal(res2, make_num(0.0)));
}

TEST_CASE("print and parse round-trip") {
    const std::vector<std::string> cases = {
        "x",
        "t",
        "eps",
        "alpha(3/2)",
        "alpha(-2)",
        "x + t",
        "x - t",
        "-x",
        "2*x + 3",
        "x^2/3",
        "x^-1/2",
        "x/(t + eps)",
        "x/t/eps",
        "(x + 1)*(t - 2)",
        "sin(x)*cos(t)",
        "exp(-x^2)",
        "atan(alpha(-1)*t)",
        "delta(x)",
        "delta(x, 3)",
        "heaviside(x - 1/2*t)",
        "sign(x)",
        "abs(x)",
        "quanta(alpha(2))",
        "rho(x/eps)",
        "rho(x/eps, 2)",
        "Rho(x*alpha(-1))",
        "abskernel(x/eps)",
        "idem(\"\", \"10\")",
        "interleave(idem(\"\", \"10\"), x, idem(\"\", \"01\"), t)",
        "x*delta(x)",
        "(x^2 + t^2)^1/2",
        "1/(1 + x^2)",
        "x^2*t^-3 + 1/2",
        "3.25e-4*x + 0.5",
    };
    for (const auto& s : cases) check_roundtrip(s);
}

TEST_CASE("printed derivatives round-trip too") {
    const std::vector<std::string> seeds = {
        "sin(x*t)", "x/(t + eps)", "heaviside(x)*x", "rho(x/eps)", "exp(-x^2)*atan(x)",
    };
    for (const auto& s : seeds) {
        const ExprPtr d = derivative(rt(s), 0);
        const ExprPtr back = parse_expr(print_expr(d));
        INFO("seed: " << s << "  derivative: " << print_expr(d));
        CHECK(expr_equal(d, back));
    }
}

TEST_CASE("parse errors carry location and expectation") {
    auto expect_fail = [](const std::string& src, int line, int col, const std::string& needle) {
        try {
            parse_expr(src);
            FAIL("expected parse error for: " << src);
        } catch (const ParseError& e) {
            INFO("message: " << e.what());
            CHECK(e.line() == line);
            CHECK(e.column() == col);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_fail("x +", 1, 4, "expected a number, identifier or '('");
    expect_fail("(x", 1, 3, "expected ')'");
    expect_fail("foo(x)", 1, 1, "unknown identifier 'foo'");
    expect_fail("x ^ t", 1, 5, "integer numerator");
    expect_fail("sin(x, t)", 1, 1, "takes 1 argument");
    expect_fail("idem(\"\", \"2\")", 1, 1, "idempotent");
    expect_fail("1 +\n@", 2, 1, "unexpected character '@'");
    expect_fail("x 3", 1, 3, "end of input");
    expect_fail("interleave(x, t)", 1, 1, "idempotent literal");
    expect_fail("x^(1/2)", 1, 3, "integer numerator");  // exponent is a bare rational token
}

TEST_CASE("division by a zero literal is rejected at construction") {
    try {
        parse_expr("1/0");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.code()) == err_not_invertible);
    }
}
