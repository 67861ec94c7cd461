#pragma once
// Internal sets over nets of boxes and balls: membranes of compactly
// supported points, strong membership decided by invertibility of the
// distance to the complement, and exact intersection where the region
// catalog allows it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "gcalc/eval.hpp"
#include "gcalc/number.hpp"

namespace gcalc {

/// Classical constant region: axis-aligned box or euclidean ball. Used for
/// membrane bases and function domains, where nothing varies with the index.
struct Region {
    enum class Kind { Box, Ball };
    Kind kind = Kind::Box;
    std::vector<double> lo, hi;  // Box
    std::vector<double> center;  // Ball
    double radius = 0.0;         // Ball

    static Region box(std::vector<double> lo, std::vector<double> hi) {
        if (lo.size() != hi.size() || lo.empty())
            throw Error(err_bad_argument, "box needs matching lo/hi coordinate lists");
        Region r;
        r.kind = Kind::Box;
        r.lo = std::move(lo);
        r.hi = std::move(hi);
        return r;
    }
    static Region ball(std::vector<double> center, double radius) {
        if (center.empty() || !(radius > 0.0))
            throw Error(err_bad_argument, "ball needs a center and a positive radius");
        Region r;
        r.kind = Kind::Ball;
        r.center = std::move(center);
        r.radius = radius;
        return r;
    }
    static Region interval(double a, double b) { return box({a}, {b}); }

    std::size_t dim() const { return kind == Kind::Box ? lo.size() : center.size(); }

    bool contains(const std::vector<double>& q) const {
        if (q.size() != dim()) return false;
        if (kind == Kind::Box) {
            for (std::size_t i = 0; i < q.size(); ++i)
                if (q[i] < lo[i] || q[i] > hi[i]) return false;
            return true;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) s += (q[i] - center[i]) * (q[i] - center[i]);
        return s <= radius * radius;
    }

    /// Radius of the smallest origin-independent enclosing ball; used for the
    /// default compact-support bound.
    double circumradius() const {
        if (kind == Kind::Ball) {
            double c = 0.0;
            for (double v : center) c += v * v;
            return std::sqrt(c) + radius;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < lo.size(); ++i)
            s += std::max(lo[i] * lo[i], hi[i] * hi[i]);
        return std::sqrt(s);
    }
};

/// Base region plus the compact-support bound: a point belongs to the
/// membrane when its branches eventually stay in the region and its 1-norm
/// stays below the bound.
struct Membrane {
    std::vector<Region> pieces;  // finite union
    double bound = 0.0;          // L

    static Membrane of(Region base) {
        Membrane m;
        m.bound = base.circumradius() + 1.0;
        m.pieces.push_back(std::move(base));
        return m;
    }
    static Membrane of(std::vector<Region> pieces, double bound) {
        if (pieces.empty()) throw Error(err_bad_argument, "membrane needs at least one region");
        Membrane m;
        m.pieces = std::move(pieces);
        m.bound = bound;
        return m;
    }

    std::size_t dim() const { return pieces.front().dim(); }
    bool contains(const std::vector<double>& q) const {
        for (const auto& r : pieces)
            if (r.contains(q)) return true;
        return false;
    }
};

/// Net of regions: box or ball whose parameters are gauge expansions
/// (constant expansions give the classical case).
struct SetNet {
    enum class Kind { Box, Ball };
    Kind kind = Kind::Box;
    std::vector<GaugeExpansion> lo, hi;  // Box
    std::vector<GaugeExpansion> center;  // Ball
    GaugeExpansion radius;               // Ball

    static SetNet box(std::vector<GaugeExpansion> lo, std::vector<GaugeExpansion> hi) {
        if (lo.size() != hi.size() || lo.empty())
            throw Error(err_bad_argument, "box needs matching lo/hi coordinate lists");
        SetNet s;
        s.kind = Kind::Box;
        s.lo = std::move(lo);
        s.hi = std::move(hi);
        return s;
    }
    static SetNet ball(std::vector<GaugeExpansion> center, GaugeExpansion radius) {
        if (center.empty()) throw Error(err_bad_argument, "ball needs a center");
        SetNet s;
        s.kind = Kind::Ball;
        s.center = std::move(center);
        s.radius = std::move(radius);
        return s;
    }
    static SetNet constant(const Region& r) {
        auto lift = [](const std::vector<double>& v) {
            std::vector<GaugeExpansion> out;
            out.reserve(v.size());
            for (double c : v) out.push_back(GaugeExpansion::constant(c));
            return out;
        };
        if (r.kind == Region::Kind::Box) return box(lift(r.lo), lift(r.hi));
        return ball(lift(r.center), GaugeExpansion::constant(r.radius));
    }

    std::size_t dim() const { return kind == Kind::Box ? lo.size() : center.size(); }

    bool contains(const std::vector<double>& q, int k) const {
        if (q.size() != dim()) return false;
        if (kind == Kind::Box) {
            for (std::size_t i = 0; i < q.size(); ++i)
                if (q[i] < lo[i].eval(k) || q[i] > hi[i].eval(k)) return false;
            return true;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double d = q[i] - center[i].eval(k);
            s += d * d;
        }
        const double rad = radius.eval(k);
        return s <= rad * rad;
    }
};

namespace setdet {

/// Larger-index tail of the lattice used for "eventually" checks.
inline int tail_start(const Config& cfg) { return cfg.window_start(); }

inline GeneralizedNumber from_expansion(const GaugeExpansion& g) {
    return GeneralizedNumber::from_branch(Branch(g));
}

/// Minimum of two numbers under the eventual partial order. Comparable pairs
/// stay on the exact tier; genuinely incomparable ones fall back to the
/// sampled pointwise minimum (flagged through `exact`).
inline GeneralizedNumber eventual_min(const GeneralizedNumber& a, const GeneralizedNumber& b,
                                      bool& exact, const Config& cfg) {
    switch (compare(a, b, cfg)) {
        case Compare::EQ:
        case Compare::LE: return a;
        case Compare::GE: return b;
        case Compare::INCOMPARABLE: break;
    }
    exact = false;
    std::vector<double> s(static_cast<std::size_t>(cfg.lattice_depth));
    for (int k = 1; k <= cfg.lattice_depth; ++k)
        s[static_cast<std::size_t>(k - 1)] = std::min(a.sample(k), b.sample(k));
    return GeneralizedNumber::from_samples(s, {"incomparable distances; minimum sampled"});
}

/// max(x, 0) under the eventual order; used to clamp signed boundary
/// distances at the complement.
inline GeneralizedNumber clamp_nonnegative(const GeneralizedNumber& x, bool& exact,
                                           const Config& cfg) {
    switch (compare(x, GeneralizedNumber::zero(), cfg)) {
        case Compare::EQ:
        case Compare::GE: return x;
        case Compare::LE: return GeneralizedNumber::zero();
        case Compare::INCOMPARABLE: break;
    }
    if (x.is_exact_tier()) {
        // Branch-dependent sign: clamp part by part when each branch has a
        // determinate eventual sign.
        std::vector<std::pair<Idempotent, GeneralizedNumber>> parts;
        bool decidable = true;
        for (const auto& p : x.parts()) {
            const Sign s = p.branch.eventual_sign();
            if (s == Sign::Indeterminate) {
                decidable = false;
                break;
            }
            parts.emplace_back(p.idem, s == Sign::Positive
                                           ? GeneralizedNumber::from_branch(p.branch)
                                           : GeneralizedNumber::zero());
        }
        if (decidable) return GeneralizedNumber::interleave(parts, cfg);
    }
    exact = false;
    std::vector<double> s(static_cast<std::size_t>(cfg.lattice_depth));
    for (int k = 1; k <= cfg.lattice_depth; ++k)
        s[static_cast<std::size_t>(k - 1)] = std::max(x.sample(k), 0.0);
    return GeneralizedNumber::from_samples(s, {"indeterminate boundary sign; distance sampled"});
}

}  // namespace setdet

/// True iff every branch of p eventually lies in the membrane's region and
/// the 1-norm stays below the compact-support bound. Exact tier only: for a
/// sampled net nothing distinguishes a tail excursion from noise.
inline bool membrane_member(const std::vector<GeneralizedNumber>& p, const Membrane& m,
                            const Config& cfg = default_config()) {
    if (p.size() != m.dim())
        throw Error(err_bad_argument, "point dimension does not match the membrane");
    for (const auto& c : p)
        if (!c.is_exact_tier())
            throw Error(err_undecidable_exact,
                        "membrane membership of an empirical point: tail behavior undecidable");
    std::vector<double> q(p.size());
    for (int k = setdet::tail_start(cfg); k <= cfg.lattice_depth; ++k) {
        double n1 = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            q[i] = p[i].sample(k);
            n1 += std::fabs(q[i]);
        }
        if (!m.contains(q) || n1 > m.bound) return false;
    }
    return true;
}

inline bool membrane_member(const GeneralizedNumber& p, const Membrane& m,
                            const Config& cfg = default_config()) {
    return membrane_member(std::vector<GeneralizedNumber>{p}, m, cfg);
}

/// Outcome of a strong-membership query: the verdict, the distance to the
/// complement it was decided on, and whether that distance is exact-tier
/// closed form or a flagged sampled fallback.
struct StrongVerdict {
    bool member = false;
    bool exact = true;
    GeneralizedNumber distance;
};

/// dist(p, complement of A) as a generalized number. Closed form for boxes
/// (min of signed face distances) and balls (radius minus the euclidean
/// distance to the center); negative excursions clamp to zero, so boundary
/// and exterior points get a non-invertible distance.
inline StrongVerdict distance_to_complement(const std::vector<GeneralizedNumber>& p,
                                            const SetNet& A,
                                            const Config& cfg = default_config()) {
    if (p.size() != A.dim())
        throw Error(err_bad_argument, "point dimension does not match the region net");
    for (const auto& c : p)
        if (!c.is_exact_tier())
            throw Error(err_undecidable_exact,
                        "strong membership of an empirical point: tail behavior undecidable");
    StrongVerdict v;
    GeneralizedNumber signed_dist;
    if (A.kind == SetNet::Kind::Box) {
        bool first = true;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const GeneralizedNumber lo = setdet::from_expansion(A.lo[i]);
            const GeneralizedNumber hi = setdet::from_expansion(A.hi[i]);
            for (const GeneralizedNumber& cand : {sub(p[i], lo, cfg), sub(hi, p[i], cfg)}) {
                signed_dist = first ? cand : setdet::eventual_min(signed_dist, cand, v.exact, cfg);
                first = false;
            }
        }
    } else {
        GeneralizedNumber s2 = GeneralizedNumber::zero();
        for (std::size_t i = 0; i < p.size(); ++i) {
            const GeneralizedNumber d = sub(p[i], setdet::from_expansion(A.center[i]), cfg);
            s2 = add(s2, mul(d, d, cfg), cfg);
        }
        GeneralizedNumber dist_center;
        if (s2.is_zero_like()) {
            dist_center = GeneralizedNumber::zero();
        } else {
            try {
                dist_center = number_pow(s2, qq(1, 2), cfg);
            } catch (const Error&) {
                // Leading-term sign prevents the exact square root: sample.
                v.exact = false;
                std::vector<double> s(static_cast<std::size_t>(cfg.lattice_depth));
                for (int k = 1; k <= cfg.lattice_depth; ++k)
                    s[static_cast<std::size_t>(k - 1)] = std::sqrt(std::max(s2.sample(k), 0.0));
                dist_center = GeneralizedNumber::from_samples(
                    s, {"center distance outside the exact catalog; sampled"});
            }
        }
        signed_dist = sub(setdet::from_expansion(A.radius), dist_center, cfg);
    }
    v.distance = setdet::clamp_nonnegative(signed_dist, v.exact, cfg);
    if (!v.distance.warnings().empty()) v.exact = false;
    return v;
}

/// Strong membership: the distance to the complement is invertible.
inline StrongVerdict strong_member(const std::vector<GeneralizedNumber>& p, const SetNet& A,
                                   const Config& cfg = default_config()) {
    StrongVerdict v = distance_to_complement(p, A, cfg);
    v.member = is_invertible(v.distance, cfg);
    return v;
}

inline StrongVerdict strong_member(const GeneralizedNumber& p, const SetNet& A,
                                   const Config& cfg = default_config()) {
    return strong_member(std::vector<GeneralizedNumber>{p}, A, cfg);
}

/// Intersection of region nets. Box with box stays a region formula; other
/// combinations have no catalog shape, so the result keeps both conjuncts
/// and decides membership as the conjunction (flagged via representable()).
class InternalSet {
public:
    explicit InternalSet(SetNet region) { conjuncts_.push_back(std::move(region)); }
    InternalSet(SetNet a, SetNet b) {
        conjuncts_.push_back(std::move(a));
        conjuncts_.push_back(std::move(b));
    }

    bool representable() const { return conjuncts_.size() == 1; }
    const SetNet& region() const {
        if (!representable())
            throw Error(err_not_representable,
                        "intersection has no region formula; membership-level object");
        return conjuncts_.front();
    }
    const std::vector<SetNet>& conjuncts() const { return conjuncts_; }

private:
    std::vector<SetNet> conjuncts_;
};

inline StrongVerdict strong_member(const std::vector<GeneralizedNumber>& p, const InternalSet& A,
                                   const Config& cfg = default_config()) {
    StrongVerdict out;
    out.member = true;
    bool first = true;
    for (const auto& net : A.conjuncts()) {
        StrongVerdict v = strong_member(p, net, cfg);
        out.member = out.member && v.member;
        out.exact = out.exact && v.exact;
        out.distance =
            first ? v.distance : setdet::eventual_min(out.distance, v.distance, out.exact, cfg);
        first = false;
    }
    return out;
}

namespace setdet {

/// Eventual max/min of two expansions via the sign of the difference;
/// nullopt when the order is indeterminate at the truncation.
inline std::optional<GaugeExpansion> expansion_max(const GaugeExpansion& a,
                                                   const GaugeExpansion& b) {
    switch (Branch(sub(a, b)).eventual_sign()) {
        case Sign::Zero:
        case Sign::Positive: return a;
        case Sign::Negative: return b;
        case Sign::Indeterminate: return std::nullopt;
    }
    return std::nullopt;
}

inline std::optional<GaugeExpansion> expansion_min(const GaugeExpansion& a,
                                                   const GaugeExpansion& b) {
    switch (Branch(sub(a, b)).eventual_sign()) {
        case Sign::Zero:
        case Sign::Negative: return a;
        case Sign::Positive: return b;
        case Sign::Indeterminate: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace setdet

inline InternalSet intersect_strong(const SetNet& A, const SetNet& B) {
    if (A.dim() != B.dim())
        throw Error(err_bad_argument, "intersection needs matching dimensions");
    if (A.kind == SetNet::Kind::Box && B.kind == SetNet::Kind::Box) {
        std::vector<GaugeExpansion> lo, hi;
        bool ok = true;
        for (std::size_t i = 0; i < A.dim() && ok; ++i) {
            const auto l = setdet::expansion_max(A.lo[i], B.lo[i]);
            const auto h = setdet::expansion_min(A.hi[i], B.hi[i]);
            if (l && h) {
                lo.push_back(*l);
                hi.push_back(*h);
            } else {
                ok = false;
            }
        }
        if (ok) return InternalSet(SetNet::box(std::move(lo), std::move(hi)));
    }
    return InternalSet(A, B);
}

}  // namespace gcalc
