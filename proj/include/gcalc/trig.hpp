#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "gcalc/config.hpp"
#include "gcalc/error.hpp"
#include "gcalc/gauge.hpp"
#include "gcalc/rational.hpp"

namespace gcalc {

enum class TrigKind { Sin, Cos };

/// amplitude(k) * sin_or_cos(multiplier * 2^(k*rate)): an oscillation whose
/// phase runs along the gauge. Integer multipliers over one shared base rate
/// keep products inside the catalog via product-to-sum.
struct TrigTerm {
    GaugeExpansion amplitude;
    TrigKind kind = TrigKind::Sin;
    long long multiplier = 1;  // >= 1
    QQ rate = 1;               // > 0

    double eval(int k) const {
        const double theta =
            static_cast<double>(multiplier) * std::exp2(static_cast<double>(k) * to_double(rate));
        return amplitude.eval(k) * (kind == TrigKind::Sin ? std::sin(theta) : std::cos(theta));
    }
};

/// Eventual sign of a net for large k.
enum class Sign { Zero, Positive, Negative, Indeterminate };

/// One branch of a generalized number: a gauge expansion plus trig terms
/// sharing a single base rate. Values at index k are
/// poly(k) + sum_t amplitude_t(k) * trig(m_t * 2^(k*rate)).
class Branch {
public:
    Branch() = default;
    explicit Branch(GaugeExpansion poly) : poly_(std::move(poly)) {}

    static Branch zero() { return Branch(); }
    static Branch constant(double c) { return Branch(GaugeExpansion::constant(c)); }
    static Branch alpha(const QQ& r) { return Branch(GaugeExpansion::alpha(r)); }

    static Branch oscillation(TrigTerm term, const Config& cfg = default_config()) {
        if (term.multiplier < 1) throw Error(err_bad_argument, "trig multiplier must be >= 1");
        if (term.rate <= 0) throw Error(err_bad_argument, "trig base rate must be positive");
        Branch b;
        b.trig_.push_back(std::move(term));
        b.canonicalize(cfg);
        return b;
    }

    const GaugeExpansion& poly() const { return poly_; }
    const std::vector<TrigTerm>& trig() const { return trig_; }
    bool has_trig() const { return !trig_.empty(); }

    bool is_exact_zero() const { return trig_.empty() && poly_.is_exact_zero(); }
    bool is_zero_like() const { return trig_.empty() && poly_.is_zero_like(); }
    const RatInf& order() const { return poly_.order(); }

    /// Base rate shared by all trig terms, when any are present.
    std::optional<QQ> rate() const {
        if (trig_.empty()) return std::nullopt;
        return trig_.front().rate;
    }

    double eval(int k) const {
        double acc = poly_.eval(k);
        for (const auto& t : trig_) acc += t.eval(k);
        return acc;
    }

    /// Largest r certain from the representation with |x| <= C * eps^r; a
    /// bounded trig factor contributes the valuation of its amplitude.
    RatInf valuation_lower_bound() const {
        RatInf v = poly_.valuation_lower_bound();
        for (const auto& t : trig_) v = min(v, t.amplitude.valuation_lower_bound());
        return v;
    }

    /// Whether the lower bound is the exact valuation (some component attains
    /// it with an exact leading term, rather than a truncation bound).
    bool valuation_is_exact() const {
        const RatInf v = valuation_lower_bound();
        if (poly_.valuation_is_exact() && poly_.valuation_lower_bound() == v) return true;
        if (poly_.is_exact_zero() && trig_.empty()) return true;
        for (const auto& t : trig_)
            if (t.amplitude.valuation_is_exact() && t.amplitude.valuation_lower_bound() == v) return true;
        return false;
    }

    friend bool operator==(const Branch& a, const Branch& b) {
        if (!(a.poly_ == b.poly_) || a.trig_.size() != b.trig_.size()) return false;
        for (std::size_t i = 0; i < a.trig_.size(); ++i) {
            const auto& s = a.trig_[i];
            const auto& t = b.trig_[i];
            if (s.kind != t.kind || s.multiplier != t.multiplier || s.rate != t.rate ||
                !(s.amplitude == t.amplitude))
                return false;
        }
        return true;
    }

    Branch operator-() const {
        Branch r = *this;
        r.poly_ = -r.poly_;
        for (auto& t : r.trig_) t.amplitude = -t.amplitude;
        return r;
    }

    Branch scaled(double c, const Config& cfg = default_config()) const {
        Branch r = *this;
        r.poly_ = r.poly_.scaled(c);
        for (auto& t : r.trig_) t.amplitude = t.amplitude.scaled(c);
        r.canonicalize(cfg);
        return r;
    }

    /// Forgets branch information at or beyond eps^bound (amplitudes are
    /// bounded envelopes, so truncating them truncates the branch).
    Branch truncated(const RatInf& bound, const Config& cfg = default_config()) const {
        Branch r = *this;
        r.poly_ = r.poly_.truncated(bound);
        for (auto& t : r.trig_) t.amplitude = t.amplitude.truncated(bound);
        r.canonicalize(cfg);
        return r;
    }

    /// nullopt when the two sides oscillate at distinct base rates (the sum
    /// leaves the exact catalog).
    static std::optional<Branch> add(const Branch& a, const Branch& b,
                                     const Config& cfg = default_config()) {
        if (!compatible_rate(a, b)) return std::nullopt;
        Branch r;
        r.poly_ = gcalc::add(a.poly_, b.poly_, cfg);
        r.trig_ = a.trig_;
        r.trig_.insert(r.trig_.end(), b.trig_.begin(), b.trig_.end());
        r.canonicalize(cfg);
        return r;
    }

    static std::optional<Branch> mul(const Branch& a, const Branch& b,
                                     const Config& cfg = default_config()) {
        if (!compatible_rate(a, b)) return std::nullopt;
        Branch r;
        r.poly_ = gcalc::mul(a.poly_, b.poly_, cfg);
        for (const auto& t : b.trig_) push_scaled(r, t, a.poly_, cfg);
        for (const auto& t : a.trig_) push_scaled(r, t, b.poly_, cfg);
        for (const auto& s : a.trig_)
            for (const auto& t : b.trig_) push_product(r, s, t, cfg);
        r.canonicalize(cfg);
        return r;
    }

    /// Eventual sign for large k, decided from the leading exponent: an
    /// oscillation at the leading scale with budget >= |leading coefficient|
    /// makes the sign indeterminate, as does an unknown truncation tail at or
    /// below the leading scale.
    Sign eventual_sign() const {
        if (is_exact_zero()) return Sign::Zero;
        bool have_known = false;
        QQ known_exp;     // min exponent with a known term
        RatInf unknown = RatInf::infinity();  // min truncation bound
        auto see_known = [&](const QQ& e) {
            if (!have_known || e < known_exp) {
                known_exp = e;
                have_known = true;
            }
        };
        if (poly_.has_terms()) see_known(poly_.leading().exp);
        if (poly_.order().is_finite()) unknown = min(unknown, poly_.order());
        for (const auto& t : trig_) {
            if (t.amplitude.has_terms()) see_known(t.amplitude.leading().exp);
            if (t.amplitude.order().is_finite()) unknown = min(unknown, t.amplitude.order());
        }
        if (!have_known) return Sign::Indeterminate;           // only truncation bounds
        if (unknown <= RatInf(known_exp)) return Sign::Indeterminate;  // hidden tail could lead
        const double c0 = poly_.coeff_at(known_exp);
        double osc = 0.0;
        for (const auto& t : trig_) osc += std::fabs(t.amplitude.coeff_at(known_exp));
        if (osc == 0.0) return c0 > 0 ? Sign::Positive : Sign::Negative;
        if (std::fabs(c0) > osc) return c0 > 0 ? Sign::Positive : Sign::Negative;
        return Sign::Indeterminate;
    }

private:
    static bool compatible_rate(const Branch& a, const Branch& b) {
        if (a.trig_.empty() || b.trig_.empty()) return true;
        return a.trig_.front().rate == b.trig_.front().rate;
    }

    static void push_scaled(Branch& r, const TrigTerm& t, const GaugeExpansion& factor,
                            const Config& cfg) {
        TrigTerm out = t;
        out.amplitude = gcalc::mul(t.amplitude, factor, cfg);
        r.trig_.push_back(std::move(out));
    }

    /// Product-to-sum: trig(m1 u) * trig(m2 u) splits into terms at
    /// multipliers m1 + m2 and |m1 - m2|; the difference at multiplier zero
    /// folds into the expansion part (cos) or vanishes (sin).
    static void push_product(Branch& r, const TrigTerm& s, const TrigTerm& t, const Config& cfg) {
        const GaugeExpansion amp = gcalc::mul(s.amplitude, t.amplitude, cfg).scaled(0.5);
        const long long sum = s.multiplier + t.multiplier;
        const long long diff = s.multiplier - t.multiplier;
        auto emit = [&](TrigKind kind, long long m, double sign_factor) {
            if (m == 0) {
                if (kind == TrigKind::Cos)
                    r.poly_ = gcalc::add(r.poly_, amp.scaled(sign_factor), cfg);
                return;  // sin(0) = 0
            }
            TrigTerm out;
            out.kind = kind;
            out.rate = s.rate;
            if (m < 0) {
                out.multiplier = -m;
                if (kind == TrigKind::Sin) sign_factor = -sign_factor;
            } else {
                out.multiplier = m;
            }
            out.amplitude = amp.scaled(sign_factor);
            r.trig_.push_back(std::move(out));
        };
        if (s.kind == TrigKind::Sin && t.kind == TrigKind::Sin) {
            emit(TrigKind::Cos, diff, 1.0);
            emit(TrigKind::Cos, sum, -1.0);
        } else if (s.kind == TrigKind::Cos && t.kind == TrigKind::Cos) {
            emit(TrigKind::Cos, diff, 1.0);
            emit(TrigKind::Cos, sum, 1.0);
        } else if (s.kind == TrigKind::Sin && t.kind == TrigKind::Cos) {
            emit(TrigKind::Sin, sum, 1.0);
            emit(TrigKind::Sin, diff, 1.0);
        } else {  // cos * sin
            emit(TrigKind::Sin, sum, 1.0);
            emit(TrigKind::Sin, diff, -1.0);
        }
    }

    /// Sorts and merges trig terms, drops terms with no known amplitude
    /// (folding their truncation bound into the expansion's order, since the
    /// branch is only determined up to that scale).
    void canonicalize(const Config& cfg) {
        std::sort(trig_.begin(), trig_.end(), [](const TrigTerm& a, const TrigTerm& b) {
            if (a.multiplier != b.multiplier) return a.multiplier < b.multiplier;
            return a.kind < b.kind;
        });
        std::vector<TrigTerm> out;
        out.reserve(trig_.size());
        for (auto& t : trig_) {
            if (!out.empty() && out.back().multiplier == t.multiplier && out.back().kind == t.kind) {
                out.back().amplitude = gcalc::add(out.back().amplitude, t.amplitude, cfg);
            } else {
                out.push_back(std::move(t));
            }
        }
        trig_.clear();
        for (auto& t : out) {
            if (t.amplitude.is_zero_like()) {
                if (t.amplitude.order().is_finite()) poly_ = poly_.truncated(t.amplitude.order());
            } else {
                trig_.push_back(std::move(t));
            }
        }
    }

    GaugeExpansion poly_;
    std::vector<TrigTerm> trig_;  // sorted by (multiplier, kind), shared rate
};

}  // namespace gcalc
