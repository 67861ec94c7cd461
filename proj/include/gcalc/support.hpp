#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "gcalc/number.hpp"

namespace gcalc {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    friend bool operator==(const Interval& a, const Interval& b) {
        return a.lo == b.lo && a.hi == b.hi;
    }
};

/// Closure of the set of classical values a net keeps returning to: finitely
/// many isolated values plus closed intervals (one-dimensional case), or
/// isolated vectors (higher dimensions). `empirical` marks results obtained
/// by sampling rather than from the representation.
struct SupportSet {
    std::vector<double> points;
    std::vector<Interval> intervals;
    std::vector<std::vector<double>> vector_points;
    bool empirical = false;

    bool is_empty() const { return points.empty() && intervals.empty() && vector_points.empty(); }

    static SupportSet empty_set() { return SupportSet{}; }

    static SupportSet single(double q) {
        SupportSet s;
        s.points.push_back(q);
        return s;
    }

    bool contains(double q, double tol = 0.0) const {
        for (double p : points)
            if (std::fabs(p - q) <= tol) return true;
        for (const auto& iv : intervals)
            if (q >= iv.lo - tol && q <= iv.hi + tol) return true;
        return false;
    }

    /// Sorts, merges overlapping intervals, and drops points covered by an
    /// interval, so that equal sets have equal representations.
    void normalize() {
        std::sort(intervals.begin(), intervals.end(),
                  [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        std::vector<Interval> merged;
        for (const auto& iv : intervals) {
            if (!merged.empty() && iv.lo <= merged.back().hi) {
                merged.back().hi = std::max(merged.back().hi, iv.hi);
            } else {
                merged.push_back(iv);
            }
        }
        intervals = std::move(merged);
        std::sort(points.begin(), points.end());
        points.erase(std::unique(points.begin(), points.end()), points.end());
        std::erase_if(points, [&](double p) {
            return std::any_of(intervals.begin(), intervals.end(),
                               [&](const Interval& iv) { return p >= iv.lo && p <= iv.hi; });
        });
        std::sort(vector_points.begin(), vector_points.end());
        vector_points.erase(std::unique(vector_points.begin(), vector_points.end()),
                            vector_points.end());
    }

    friend bool operator==(const SupportSet& a, const SupportSet& b) {
        return a.points == b.points && a.intervals == b.intervals &&
               a.vector_points == b.vector_points;
    }
};

namespace detail {

/// Cluster set of a single branch in the large-k limit.
struct BranchCluster {
    enum class Kind { Empty, Point, Interval, NeedsSampling } kind = Kind::Empty;
    double value = 0.0;  // point value, or interval center
    double radius = 0.0;
};

/// Decides what values a branch accumulates at: positive-valuation parts
/// vanish, the exponent-zero slice survives, and any genuinely negative
/// exponent sends the branch off every compact set.
inline BranchCluster classify_cluster(const Branch& b) {
    BranchCluster out;
    const RatInf lb = b.valuation_lower_bound();
    if (lb.is_finite() && lb.value() < 0 && b.valuation_is_exact()) {
        out.kind = BranchCluster::Kind::Empty;
        return out;
    }
    if (b.order() <= RatInf(QQ(0))) {
        // The representation is blind at the constant scale.
        out.kind = BranchCluster::Kind::NeedsSampling;
        return out;
    }
    const double c = b.poly().coeff_at(QQ(0));
    // Surviving oscillation: amplitude slices at exponent zero, grouped by
    // multiplier. sin and cos at the same multiplier combine to one phase-
    // shifted wave of amplitude hypot(a, b).
    std::vector<std::pair<long long, std::pair<double, double>>> waves;  // m -> (sin, cos)
    for (const auto& t : b.trig()) {
        const double a0 = t.amplitude.coeff_at(QQ(0));
        if (a0 == 0.0) continue;
        if (waves.empty() || waves.back().first != t.multiplier)
            waves.push_back({t.multiplier, {0.0, 0.0}});
        (t.kind == TrigKind::Sin ? waves.back().second.first : waves.back().second.second) += a0;
    }
    std::erase_if(waves, [](const auto& w) {
        return w.second.first == 0.0 && w.second.second == 0.0;
    });
    if (waves.empty()) {
        out.kind = BranchCluster::Kind::Point;
        out.value = c;
        return out;
    }
    if (waves.size() == 1) {
        out.kind = BranchCluster::Kind::Interval;
        out.value = c;
        out.radius = std::hypot(waves[0].second.first, waves[0].second.second);
        return out;
    }
    out.kind = BranchCluster::Kind::NeedsSampling;
    return out;
}

/// Hull of the branch's limiting profile c + sum of waves over a dense phase
/// grid. Used only as the flagged fallback for superposed frequencies.
inline Interval sampled_cluster_hull(const Branch& b, int grid = 4096) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    const double c = b.poly().coeff_at(QQ(0));
    for (int i = 0; i < grid; ++i) {
        const double theta = 2.0 * std::acos(-1.0) * static_cast<double>(i) / grid;
        double v = c;
        for (const auto& t : b.trig()) {
            const double a0 = t.amplitude.coeff_at(QQ(0));
            if (a0 == 0.0) continue;
            const double phase = static_cast<double>(t.multiplier) * theta;
            v += a0 * (t.kind == TrigKind::Sin ? std::sin(phase) : std::cos(phase));
        }
        if (first || v < lo) lo = v;
        if (first || v > hi) hi = v;
        first = false;
    }
    return Interval{lo, hi};
}

inline Interval sampled_tail_hull(const GeneralizedNumber& x, const Config& cfg) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (int k = cfg.window_start(); k <= cfg.lattice_depth; ++k) {
        const double v = x.sample(k);
        if (first || v < lo) lo = v;
        if (first || v > hi) hi = v;
        first = false;
    }
    return Interval{lo, hi};
}

}  // namespace detail

/// Support with the idempotent witnessing each isolated value: restricting
/// the number by the witness leaves something infinitesimally close to the
/// value.
struct SupportAnalysis {
    SupportSet set;
    std::vector<std::pair<Idempotent, double>> point_witnesses;
};

/// Union over branches of what the branch keeps returning to. Exact tier
/// only, unless `allow_empirical` accepts sampled hulls (flagged in the
/// result) for superposed frequencies or empirical inputs.
inline SupportAnalysis analyze_support(const GeneralizedNumber& x, const Config& cfg = default_config(),
                                       bool allow_empirical = false) {
    SupportAnalysis out;
    if (x.tier() == Tier::Empirical) {
        if (!allow_empirical)
            throw Error(err_support_exact_tier, "support not computable in exact tier");
        const Valuation v = valuation(x, cfg);
        if (!v.infinite && v.estimate < -cfg.valuation_tol) {
            // Diverging net: escapes every compact set.
        } else if (const std::optional<double> sh = shadow(x, cfg)) {
            out.set.points.push_back(*sh);
        } else {
            out.set.intervals.push_back(detail::sampled_tail_hull(x, cfg));
        }
        out.set.empirical = true;
        out.set.normalize();
        return out;
    }
    for (const auto& part : x.parts()) {
        const detail::BranchCluster c = detail::classify_cluster(part.branch);
        switch (c.kind) {
            case detail::BranchCluster::Kind::Empty:
                break;
            case detail::BranchCluster::Kind::Point:
                out.set.points.push_back(c.value);
                out.point_witnesses.push_back({part.idem, c.value});
                break;
            case detail::BranchCluster::Kind::Interval:
                out.set.intervals.push_back(Interval{c.value - c.radius, c.value + c.radius});
                break;
            case detail::BranchCluster::Kind::NeedsSampling: {
                if (!allow_empirical)
                    throw Error(err_support_exact_tier, "support not computable in exact tier");
                out.set.intervals.push_back(detail::sampled_cluster_hull(part.branch));
                out.set.empirical = true;
                break;
            }
        }
    }
    out.set.normalize();
    return out;
}

inline SupportSet support(const GeneralizedNumber& x, const Config& cfg = default_config(),
                          bool allow_empirical = false) {
    return analyze_support(x, cfg, allow_empirical).set;
}

/// Closure of the tail cluster set. Same branch analysis as support, but it
/// never refuses: superposed frequencies fall back to a flagged sampled
/// hull. Always a superset of the support.
inline SupportSet essential_support(const GeneralizedNumber& x,
                                    const Config& cfg = default_config()) {
    return analyze_support(x, cfg, true).set;
}

}  // namespace gcalc
