#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "gcalc/error.hpp"
#include "gcalc/real.hpp"

namespace gcalc {

/// Dense univariate polynomial with ascending coefficients; empty = zero.
template <class R>
struct Poly {
    std::vector<R> c;

    static Poly zero() { return Poly{}; }
    static Poly constant(R v) { return v == R(0) ? Poly{} : Poly{{v}}; }
    static Poly monomial(R v, int n) {
        Poly p;
        if (v == R(0)) return p;
        p.c.assign(static_cast<std::size_t>(n) + 1, R(0));
        p.c.back() = v;
        return p;
    }

    bool is_zero() const { return c.empty(); }
    int degree() const { return static_cast<int>(c.size()) - 1; }

    R eval(R u) const {
        R acc = R(0);
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * u + c[i];
        return acc;
    }

    void trim() {
        while (!c.empty() && c.back() == R(0)) c.pop_back();
    }

    Poly derivative() const {
        Poly d;
        for (std::size_t i = 1; i < c.size(); ++i) d.c.push_back(R(static_cast<int>(i)) * c[i]);
        d.trim();
        return d;
    }

    Poly antiderivative() const {
        Poly a;
        if (c.empty()) return a;
        a.c.assign(c.size() + 1, R(0));
        for (std::size_t i = 0; i < c.size(); ++i) a.c[i + 1] = c[i] / R(static_cast<int>(i) + 1);
        a.trim();
        return a;
    }

    Poly scaled(R s) const {
        Poly p = *this;
        for (R& v : p.c) v *= s;
        p.trim();
        return p;
    }

    /// Multiplication by u (degree shift).
    Poly times_u() const {
        Poly p;
        if (c.empty()) return p;
        p.c.assign(c.size() + 1, R(0));
        for (std::size_t i = 0; i < c.size(); ++i) p.c[i + 1] = c[i];
        return p;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly r = a;
        if (r.c.size() < b.c.size()) r.c.resize(b.c.size(), R(0));
        for (std::size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
        r.trim();
        return r;
    }

    friend Poly operator-(const Poly& a, const Poly& b) { return a + b.scaled(R(-1)); }

    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r;
        if (a.is_zero() || b.is_zero()) return r;
        r.c.assign(a.c.size() + b.c.size() - 1, R(0));
        for (std::size_t i = 0; i < a.c.size(); ++i)
            for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
        r.trim();
        return r;
    }
};

/// Function of the form A(u)·e^(−u²) + B(u)·Φ(u) + C(u) with polynomial
/// A, B, C and Φ the Gaussian distribution kernel (1 + erf)/2. The family
/// is closed under differentiation and antidifferentiation, which is what
/// the mollifier pipeline needs: every kernel in play lives here.
template <class R>
struct MollFun {
    Poly<R> A, B, C;

    R eval(R u) const {
        R acc = C.eval(u);
        if (!A.is_zero()) acc += A.eval(u) * rm::exp(-u * u);
        // erfc(-u)/2 == (1+erf(u))/2 with no cancellation on either side.
        if (!B.is_zero()) acc += B.eval(u) * (rm::erfc(-u) / R(2));
        return acc;
    }

    bool is_zero() const { return A.is_zero() && B.is_zero() && C.is_zero(); }

    MollFun scaled(R s) const { return MollFun{A.scaled(s), B.scaled(s), C.scaled(s)}; }

    friend MollFun operator+(const MollFun& f, const MollFun& g) {
        return MollFun{f.A + g.A, f.B + g.B, f.C + g.C};
    }

    MollFun derivative() const {
        MollFun d;
        d.A = A.derivative() - A.times_u().scaled(R(2)) + B.scaled(R(1) / sqrt_pi<R>());
        d.B = B.derivative();
        d.C = C.derivative();
        return d;
    }

    /// An antiderivative within the family (integration constant zero in the
    /// C slot). Gaussian-weighted powers reduce degree by parts; constants
    /// against the Gaussian become Φ terms; Φ terms integrate by parts back
    /// into the Gaussian slot.
    MollFun antiderivative() const {
        MollFun F;
        Poly<R> a = A;
        a.trim();
        while (!a.is_zero()) {
            const int n = a.degree();
            const R top = a.c[static_cast<std::size_t>(n)];
            if (n == 0) {
                F.B = F.B + Poly<R>::constant(top * sqrt_pi<R>());
                break;
            }
            F.A = F.A + Poly<R>::monomial(-top / R(2), n - 1);
            a.c[static_cast<std::size_t>(n)] = R(0);
            if (n >= 2) a.c[static_cast<std::size_t>(n - 2)] += R(n - 1) * top / R(2);
            a.trim();
        }
        if (!B.is_zero()) {
            const Poly<R> bi = B.antiderivative();
            F.B = F.B + bi;
            MollFun rest;
            rest.A = bi.scaled(R(-1) / sqrt_pi<R>());
            F = F + rest.antiderivative();
        }
        F.C = F.C + C.antiderivative();
        return F;
    }
};

/// Mollifier of order q: ρ(x) = (Σ aᵢ x^{2i})·e^(−x²) with unit mass and
/// vanishing moments up to order q, together with its antiderivative (the
/// smoothed step) and the second-order kernel that embeds |x|.
template <class R>
struct Mollifier {
    int q = 0;
    std::vector<R> even_coeffs;  // aᵢ multiplying x^{2i}
    MollFun<R> rho;              // pure Gaussian slot
    MollFun<R> step;             // antiderivative, 0 at −∞, 1 at +∞
    MollFun<R> abs_kernel;       // asymptotic to |u|
    R rho0 = R(0);

    static Mollifier build(int q) {
        if (q < 0) throw Error(err_bad_argument, "mollifier order must be nonnegative");
        if (q > 12)
            throw Error(err_ill_conditioned_order,
                        "mollifier order above the conditioning bound (12)");
        const int h = q / 2;  // unknowns a_0..a_h; odd moments vanish by parity
        // Gaussian even moments: ∫ x^{2t} e^{−x²} dx = √π·(2t−1)!!/2^t.
        std::vector<R> mom(static_cast<std::size_t>(2 * h + 1));
        mom[0] = sqrt_pi<R>();
        for (int t = 1; t <= 2 * h; ++t)
            mom[static_cast<std::size_t>(t)] =
                mom[static_cast<std::size_t>(t - 1)] * R(2 * t - 1) / R(2);
        // Row j: Σ_i a_i·mom[i+j] = δ_{j0}  (the x^{2j} moment of ρ).
        const int m = h + 1;
        std::vector<std::vector<R>> aug(static_cast<std::size_t>(m),
                                        std::vector<R>(static_cast<std::size_t>(m) + 1, R(0)));
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < m; ++i)
                aug[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                    mom[static_cast<std::size_t>(i + j)];
            aug[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)] = j == 0 ? R(1) : R(0);
        }
        for (int col = 0; col < m; ++col) {
            int pivot = col;
            for (int row = col + 1; row < m; ++row)
                if (rm::fabs(aug[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)]) >
                    rm::fabs(aug[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)]))
                    pivot = row;
            std::swap(aug[static_cast<std::size_t>(col)], aug[static_cast<std::size_t>(pivot)]);
            const R d = aug[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
            for (int row = col + 1; row < m; ++row) {
                const R factor =
                    aug[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] / d;
                for (int k = col; k <= m; ++k)
                    aug[static_cast<std::size_t>(row)][static_cast<std::size_t>(k)] -=
                        factor * aug[static_cast<std::size_t>(col)][static_cast<std::size_t>(k)];
            }
        }
        std::vector<R> a(static_cast<std::size_t>(m));
        for (int row = m - 1; row >= 0; --row) {
            R acc = aug[static_cast<std::size_t>(row)][static_cast<std::size_t>(m)];
            for (int k = row + 1; k < m; ++k)
                acc -= aug[static_cast<std::size_t>(row)][static_cast<std::size_t>(k)] *
                       a[static_cast<std::size_t>(k)];
            a[static_cast<std::size_t>(row)] =
                acc / aug[static_cast<std::size_t>(row)][static_cast<std::size_t>(row)];
        }

        Mollifier out;
        out.q = q;
        out.even_coeffs = a;
        for (int i = 0; i <= h; ++i)
            out.rho.A = out.rho.A + Poly<R>::monomial(a[static_cast<std::size_t>(i)], 2 * i);
        out.rho0 = out.rho.eval(R(0));
        out.step = out.rho.antiderivative();
        // Smoothed sign, then one more antiderivative for |x|. For even ρ
        // the construction is already asymptotic to |u| with no constant to
        // fix (checked by the unit suite at u = ±8).
        MollFun<R> sgn = out.step.scaled(R(2));
        sgn.C = sgn.C - Poly<R>::constant(R(1));
        out.abs_kernel = sgn.antiderivative();
        return out;
    }

    /// step(u) − heaviside(u), computed without subtracting near-equal
    /// O(1) quantities: the Φ slot turns into ∓erfc/2 on each side.
    R step_minus_heaviside(R u) const {
        R acc = step.C.eval(u);
        if (!step.A.is_zero()) acc += step.A.eval(u) * rm::exp(-u * u);
        const R b = step.B.eval(u);
        if (u > R(0)) {
            acc += -b * rm::erfc(u) / R(2) + (b - R(1));
        } else {
            acc += b * rm::erfc(-u) / R(2);
        }
        return acc;
    }
};

}  // namespace gcalc
