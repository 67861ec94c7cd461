#pragma once

#include <cstddef>
#include <cstdio>
#include <utility>
#include <vector>

#include "gcalc/error.hpp"
#include "gcalc/real.hpp"

namespace gcalc {

/// Gauss–Legendre rule on [-1, 1]. Nodes are produced at the precision of R
/// by Newton iteration on the Legendre recurrence, so the same code serves
/// double and quad without tabulated constants.
template <class R>
struct GaussRule {
    std::vector<R> nodes;
    std::vector<R> weights;

    static GaussRule make(int n) {
        GaussRule rule;
        rule.nodes.resize(static_cast<std::size_t>(n));
        rule.weights.resize(static_cast<std::size_t>(n));
        const R one = R(1);
        for (int i = 0; i < (n + 1) / 2; ++i) {
            // Chebyshev-flavored initial guess, then Newton in full precision.
            double guess = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            R x = R(guess);
            R dp = R(0);
            for (int it = 0; it < 200; ++it) {
                R p0 = one, p1 = x;
                for (int j = 1; j < n; ++j) {
                    const R p2 = ((R(2 * j + 1) * x * p1) - R(j) * p0) / R(j + 1);
                    p0 = p1;
                    p1 = p2;
                }
                dp = R(n) * (x * p1 - p0) / (x * x - one);
                const R dx = p1 / dp;
                x -= dx;
                if (rm::fabs(dx) <= R(4) * real_traits<R>::epsilon() * (rm::fabs(x) + R(1)))
                    break;
            }
            const R w = R(2) / ((one - x * x) * dp * dp);
            rule.nodes[static_cast<std::size_t>(i)] = x;
            rule.weights[static_cast<std::size_t>(i)] = w;
            rule.nodes[static_cast<std::size_t>(n - 1 - i)] = -x;
            rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
        }
        return rule;
    }

    template <class F>
    R apply(F&& f, R a, R b) const {
        const R half = (b - a) / R(2);
        const R mid = (a + b) / R(2);
        R acc = R(0);
        for (std::size_t i = 0; i < nodes.size(); ++i)
            acc += weights[i] * f(mid + half * nodes[i]);
        return acc * half;
    }
};

namespace detail {

template <class R>
const GaussRule<R>& coarse_rule() {
    static const GaussRule<R> rule = GaussRule<R>::make(15);
    return rule;
}

template <class R>
const GaussRule<R>& fine_rule() {
    static const GaussRule<R> rule = GaussRule<R>::make(31);
    return rule;
}

template <class R, class F>
R integrate_segment(F& f, R a, R b, R tol, int depth, int max_depth) {
    const R lo = coarse_rule<R>().apply(f, a, b);
    const R hi = fine_rule<R>().apply(f, a, b);
    const R err = rm::fabs(hi - lo);
    if (!rm::isfinite(err)) {
        throw Error(err_quadrature, "non-finite integrand between the quadrature nodes");
    }
    if (err > tol) {
        // Roundoff floor: the two estimates cannot agree better than the
        // rule's own noise, which scales with the local mass of |f|.
        const R mass = fine_rule<R>().apply([&](R x) { return rm::fabs(f(x)); }, a, b);
        if (err > R(64) * real_traits<R>::epsilon() * rm::fabs(mass)) {
            if (depth >= max_depth) {
                char msg[160];
                std::snprintf(msg, sizeof msg,
                              "quadrature did not converge: error estimate %.3g over "
                              "subinterval [%.6g, %.6g]",
                              static_cast<double>(err), static_cast<double>(a),
                              static_cast<double>(b));
                throw Error(err_quadrature, msg);
            }
            const R mid = (a + b) / R(2);
            return integrate_segment(f, a, mid, tol / R(2), depth + 1, max_depth) +
                   integrate_segment(f, mid, b, tol / R(2), depth + 1, max_depth);
        }
    }
    return hi;
}

}  // namespace detail

/// Adaptive integral of a smooth function over [a, b]: bisects until the
/// nested 15/31-point estimates agree to the absolute tolerance.
template <class R, class F>
R integrate(F&& f, R a, R b, R abs_tol, int max_depth = 48) {
    if (a == b) return R(0);
    return detail::integrate_segment(f, a, b, abs_tol, 0, max_depth);
}

}  // namespace gcalc
