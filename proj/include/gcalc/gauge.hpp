#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gcalc/config.hpp"
#include "gcalc/error.hpp"
#include "gcalc/rational.hpp"

namespace gcalc {

/// One signed monomial c * eps^e of a gauge expansion.
struct GaugeTerm {
    double coeff;
    QQ exp;
};

/// Finite expansion sum_i c_i * eps^(e_i) with strictly increasing exact
/// rational exponents, plus a truncation order: nothing is known about the
/// element at or beyond eps^order. Infinite order means the expansion is
/// exact. The empty expansion with infinite order is the zero element; with
/// finite order it is merely indistinguishable from zero at that precision.
class GaugeExpansion {
public:
    GaugeExpansion() : order_(RatInf::infinity()) {}

    static GaugeExpansion zero() { return GaugeExpansion(); }

    static GaugeExpansion constant(double c) { return monomial(c, QQ(0)); }

    static GaugeExpansion one() { return constant(1.0); }

    static GaugeExpansion monomial(double c, QQ e) {
        GaugeExpansion x;
        if (c != 0.0) x.terms_.push_back({c, std::move(e)});
        return x;
    }

    /// alpha_r = eps^r, the gauge power scale.
    static GaugeExpansion alpha(const QQ& r) { return monomial(1.0, r); }

    static GaugeExpansion truncated_zero(RatInf order) {
        GaugeExpansion x;
        x.order_ = std::move(order);
        return x;
    }

    const std::vector<GaugeTerm>& terms() const { return terms_; }
    const RatInf& order() const { return order_; }

    bool has_terms() const { return !terms_.empty(); }
    bool is_exact_zero() const { return terms_.empty() && order_.is_infinite(); }
    /// True when no nonzero term is known (exact zero or zero up to order).
    bool is_zero_like() const { return terms_.empty(); }

    const GaugeTerm& leading() const {
        if (terms_.empty()) throw Error(err_zero_element, "leading term of a zero expansion");
        return terms_.front();
    }

    /// Largest r with |x| <= C * eps^r certain from the representation:
    /// the leading exponent, or the truncation order when no term is known.
    RatInf valuation_lower_bound() const {
        return terms_.empty() ? order_ : RatInf(terms_.front().exp);
    }

    /// The lower bound is the exact valuation unless truncation hid the tail.
    bool valuation_is_exact() const { return !terms_.empty() || order_.is_infinite(); }

    double eval(int k) const {
        double acc = 0.0;
        for (const auto& t : terms_) acc += t.coeff * std::exp2(-static_cast<double>(k) * to_double(t.exp));
        return acc;
    }

    /// Coefficient at an exact exponent (0.0 when absent).
    double coeff_at(const QQ& e) const {
        for (const auto& t : terms_) {
            if (t.exp == e) return t.coeff;
            if (t.exp > e) break;
        }
        return 0.0;
    }

    friend bool operator==(const GaugeExpansion& a, const GaugeExpansion& b) {
        if (a.order_ != b.order_ || a.terms_.size() != b.terms_.size()) return false;
        for (std::size_t i = 0; i < a.terms_.size(); ++i)
            if (a.terms_[i].coeff != b.terms_[i].coeff || a.terms_[i].exp != b.terms_[i].exp) return false;
        return true;
    }

    GaugeExpansion operator-() const {
        GaugeExpansion r = *this;
        for (auto& t : r.terms_) t.coeff = -t.coeff;
        return r;
    }

    GaugeExpansion scaled(double c) const {
        if (c == 0.0) return zero();
        GaugeExpansion r = *this;
        for (auto& t : r.terms_) t.coeff *= c;
        r.normalize(default_config());
        return r;
    }

    /// Multiplies by eps^delta: shifts every exponent and the order.
    GaugeExpansion shifted(const QQ& delta) const {
        GaugeExpansion r = *this;
        for (auto& t : r.terms_) t.exp += delta;
        if (r.order_.is_finite()) r.order_ = RatInf(r.order_.value() + delta);
        return r;
    }

    /// Forgets information at or beyond eps^bound.
    GaugeExpansion truncated(const RatInf& bound) const {
        GaugeExpansion r = *this;
        r.order_ = min(r.order_, bound);
        r.clamp_to_order();
        return r;
    }

    friend GaugeExpansion add(const GaugeExpansion&, const GaugeExpansion&, const Config&);
    friend GaugeExpansion sub(const GaugeExpansion&, const GaugeExpansion&, const Config&);
    friend GaugeExpansion mul(const GaugeExpansion&, const GaugeExpansion&, const Config&);
    friend GaugeExpansion invert(const GaugeExpansion&, const Config&);

private:
    void sort_merge() {
        std::sort(terms_.begin(), terms_.end(),
                  [](const GaugeTerm& s, const GaugeTerm& t) { return s.exp < t.exp; });
        std::vector<GaugeTerm> out;
        out.reserve(terms_.size());
        for (const auto& t : terms_) {
            if (!out.empty() && out.back().exp == t.exp) {
                out.back().coeff += t.coeff;
                if (out.back().coeff == 0.0) out.pop_back();
            } else if (t.coeff != 0.0) {
                out.push_back(t);
            }
        }
        terms_ = std::move(out);
    }

    void clamp_to_order() {
        if (order_.is_infinite()) return;
        while (!terms_.empty() && terms_.back().exp >= order_.value()) terms_.pop_back();
    }

    void normalize(const Config& cfg) {
        clamp_to_order();
        if (static_cast<int>(terms_.size()) > cfg.term_cap) {
            // The dropped tail becomes an unknown: lower the order to the
            // first exponent we refuse to carry.
            order_ = min(order_, RatInf(terms_[static_cast<std::size_t>(cfg.term_cap)].exp));
            terms_.resize(static_cast<std::size_t>(cfg.term_cap));
        }
    }

    std::vector<GaugeTerm> terms_;  // strictly increasing exponents, nonzero coeffs
    RatInf order_;
};

inline GaugeExpansion add(const GaugeExpansion& a, const GaugeExpansion& b,
                          const Config& cfg = default_config()) {
    GaugeExpansion r;
    r.order_ = min(a.order_, b.order_);
    r.terms_.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
        if (j == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].exp < b.terms_[j].exp)) {
            r.terms_.push_back(a.terms_[i++]);
        } else if (i == a.terms_.size() || b.terms_[j].exp < a.terms_[i].exp) {
            r.terms_.push_back(b.terms_[j++]);
        } else {
            const double c = a.terms_[i].coeff + b.terms_[j].coeff;
            if (c != 0.0) r.terms_.push_back({c, a.terms_[i].exp});
            ++i;
            ++j;
        }
    }
    r.normalize(cfg);
    return r;
}

inline GaugeExpansion sub(const GaugeExpansion& a, const GaugeExpansion& b,
                          const Config& cfg = default_config()) {
    return add(a, -b, cfg);
}

inline GaugeExpansion mul(const GaugeExpansion& a, const GaugeExpansion& b,
                          const Config& cfg = default_config()) {
    GaugeExpansion r;
    // Unknown tails limit the product: x*y is determined only below
    // min(lob(x) + order(y), lob(y) + order(x)).
    r.order_ = min(a.valuation_lower_bound() + b.order_, b.valuation_lower_bound() + a.order_);
    for (const auto& ta : a.terms_)
        for (const auto& tb : b.terms_) {
            const double c = ta.coeff * tb.coeff;
            if (c != 0.0) r.terms_.push_back({c, ta.exp + tb.exp});
        }
    r.sort_merge();
    r.normalize(cfg);
    return r;
}

inline GaugeExpansion pow_n(const GaugeExpansion& a, unsigned n,
                            const Config& cfg = default_config()) {
    GaugeExpansion acc = GaugeExpansion::one();
    GaugeExpansion base = a;
    unsigned m = n;
    while (m > 0) {
        if (m & 1u) acc = mul(acc, base, cfg);
        m >>= 1u;
        if (m) base = mul(base, base, cfg);
    }
    return acc;
}

/// Multiplicative inverse. The leading monomial inverts exactly; the
/// rest enters through a geometric series truncated at the configured
/// order window beyond the inverse's leading exponent.
inline GaugeExpansion invert(const GaugeExpansion& x, const Config& cfg = default_config()) {
    if (x.terms_.empty()) {
        if (x.order_.is_infinite()) throw Error(err_zero_element, "inverse of zero");
        throw Error(err_undecidable_exact,
                    "inverse of an element indistinguishable from zero at order eps^" +
                        x.order_.value().str());
    }
    const QQ a = x.terms_.front().exp;
    const double c = x.terms_.front().coeff;
    const QQ window = cfg.order_window;

    // u = x / (c eps^a) - 1 has positive valuation; only its part below
    // eps^window can influence the inverse inside the window.
    GaugeExpansion u = x.scaled(1.0 / c).shifted(-a);
    u = sub(u, GaugeExpansion::one(), cfg);
    const bool monomial_case = u.is_exact_zero();
    u = u.truncated(RatInf(window));

    GaugeExpansion series = GaugeExpansion::one();
    if (!u.is_zero_like()) {
        GaugeExpansion power = GaugeExpansion::one();
        const GaugeExpansion neg_u = -u;
        RatInf achieved{window};
        for (int n = 1; n <= 4 * cfg.term_cap; ++n) {
            power = mul(power, neg_u, cfg).truncated(RatInf(window));
            if (power.is_zero_like()) {
                achieved = min(achieved, power.order_);
                break;
            }
            series = add(series, power, cfg);
            // Valuation of the first omitted power, in case the loop
            // budget runs out before the window is reached.
            achieved = power.valuation_lower_bound() + u.valuation_lower_bound();
        }
        series = series.truncated(min(RatInf(window), achieved));
    }
    GaugeExpansion r = series.scaled(1.0 / c).shifted(-a);
    // Knowledge of x stops at its order; perturbing x there moves 1/x at
    // order - 2a. The series truncation independently stops the window.
    RatInf from_operand =
        x.order_.is_finite() ? RatInf(x.order_.value() - 2 * a) : RatInf::infinity();
    RatInf from_series = monomial_case ? RatInf::infinity() : RatInf(window - a);
    r.order_ = min(r.order_, min(from_operand, from_series));
    r.clamp_to_order();
    return r;
}

}  // namespace gcalc
