#pragma once
// Sharp-topology measurements over generalized functions: difference
// quotients against the gauge, sup-seminorm valuation profiles on compact
// exhaustion levels, the down-sequencing diagnostic, and the grid distance
// between embedded classical objects.

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "gcalc/function.hpp"

namespace gcalc {

/// (f(p + α_r·u) − f(p))·α_{−r} for a direction u of classical components.
inline GeneralizedNumber difference_quotient(const GeneralizedFunction& f,
                                             const std::vector<GeneralizedNumber>& p, const QQ& r,
                                             const std::vector<double>& u,
                                             const Config& cfg = default_config()) {
    if (u.size() != p.size())
        throw Error(err_bad_argument, "direction dimension does not match the point");
    std::vector<GeneralizedNumber> shifted;
    shifted.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        shifted.push_back(add(
            p[i], GeneralizedNumber::from_branch(Branch(GaugeExpansion::monomial(u[i], r))), cfg));
    const GeneralizedNumber num = sub(evaluate(f, shifted, cfg), evaluate(f, p, cfg), cfg);
    return mul(num, GeneralizedNumber::alpha(-r), cfg);
}

inline GeneralizedNumber difference_quotient(const GeneralizedFunction& f,
                                             const GeneralizedNumber& p, const QQ& r,
                                             const Config& cfg = default_config()) {
    return difference_quotient(f, std::vector<GeneralizedNumber>{p}, r, {1.0}, cfg);
}

namespace sharpdet {

/// Splits e = α_s · rest with rest free of the gauge; nullopt when the gauge
/// appears in any other position. The split makes sup-norm valuations exact:
/// sup |α_s·rest| = 2^(−ks)·sup|rest| with the second factor k-independent.
inline std::optional<std::pair<QQ, ExprPtr>> gauge_split(const ExprPtr& e) {
    if (e->kind == ExprKind::Gauge) return std::make_pair(QQ(1), make_num(1.0));
    if (e->kind == ExprKind::Pow && e->kids[0]->kind == ExprKind::Gauge)
        return std::make_pair(e->exponent, make_num(1.0));
    if (e->kind == ExprKind::Mul) {
        QQ s = 0;
        std::vector<ExprPtr> rest;
        for (const auto& kid : e->kids) {
            if (kid->kind == ExprKind::Gauge) {
                s += 1;
            } else if (kid->kind == ExprKind::Pow && kid->kids[0]->kind == ExprKind::Gauge) {
                s += kid->exponent;
            } else if (contains_kind(kid, ExprKind::Gauge)) {
                return std::nullopt;
            } else {
                rest.push_back(kid);
            }
        }
        return std::make_pair(s, make_mul(std::move(rest)));
    }
    if (contains_kind(e, ExprKind::Gauge)) return std::nullopt;
    return std::make_pair(QQ(0), e);
}

/// Sup of |expr| over the level grid at lattice index k.
inline double grid_sup(const ExprPtr& e, const Region& dom, double level, int k,
                       const Config& cfg) {
    // 2^12 points per dimension in one dimension; a reduced per-axis budget
    // keeps two-dimensional grids tractable.
    const int pts = dom.dim() > 1 ? 65 : 4097;
    const fndet::AxisGrids grids = fndet::axis_grids(e, dom, level, pts);
    double sup = 0.0;
    for (double xv : grids.x)
        for (double tv : grids.t) {
            const double v = std::fabs(point_eval(e, xv, tv, k, cfg));
            if (std::isnan(v)) throw Error(err_domain, "expression not evaluable on the level grid");
            if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
            sup = std::max(sup, v);
        }
    return sup;
}

}  // namespace sharpdet

/// Valuations of ‖∂^j f‖ on Ω_l for j = 0..maxorder. Gauge-factorizable
/// expressions get exact entries; everything else is a lattice regression.
struct SeminormProfile {
    int level = 0;
    std::vector<double> valuation;  // +inf marks an identically zero derivative
    std::vector<bool> exact;
};

inline SeminormProfile seminorm_profile(const GeneralizedFunction& f, int level, int maxorder,
                                        const Config& cfg = default_config()) {
    if (maxorder < 0 || level <= 0)
        throw Error(err_bad_argument, "seminorm profile needs level > 0 and maxorder >= 0");
    SeminormProfile out;
    out.level = level;
    ExprPtr e = f.expression();
    for (int j = 0; j <= maxorder; ++j) {
        if (j > 0) e = derivative(e, 0);
        if (const auto split = sharpdet::gauge_split(e)) {
            const double sup = sharpdet::grid_sup(split->second, f.domain(),
                                                  static_cast<double>(level), 1, cfg);
            out.valuation.push_back(sup == 0.0 ? std::numeric_limits<double>::infinity()
                                               : to_double(split->first));
            out.exact.push_back(true);
            continue;
        }
        std::vector<double> sups(static_cast<std::size_t>(cfg.lattice_depth));
        for (int k = 1; k <= cfg.lattice_depth; ++k)
            sups[static_cast<std::size_t>(k - 1)] =
                sharpdet::grid_sup(e, f.domain(), static_cast<double>(level), k, cfg);
        const SlopeEstimate est = estimate_decay(sups, cfg.window_start(), cfg.lattice_depth);
        if (est.all_zero) {
            out.valuation.push_back(std::numeric_limits<double>::infinity());
        } else if (!est.ok) {
            throw Error(err_domain, "sup-norm regression failed on the level grid");
        } else {
            out.valuation.push_back(est.exponent);
        }
        out.exact.push_back(false);
    }
    return out;
}

/// Down-sequencing diagnostic: does smallness of the order-0 seminorm at
/// threshold 4^k·r propagate to all derivatives up to k at threshold r?
/// Reported, never asserted.
struct DsaReport {
    enum class Verdict { Pass, Vacuous, Violation };
    Verdict verdict = Verdict::Pass;
    int offending = -1;  // derivative order for Violation
    double threshold = 0.0;  // 4^k · r
    SeminormProfile profile;
};

inline DsaReport dsa_check(const GeneralizedFunction& f, int level, int order, const QQ& r,
                           const Config& cfg = default_config()) {
    DsaReport rep;
    rep.profile = seminorm_profile(f, level, order, cfg);
    const double rd = to_double(r);
    rep.threshold = std::pow(4.0, order) * rd;
    // Comparison slack: empirical entries carry regression noise.
    const double slack = cfg.valuation_tol;
    if (!(rep.profile.valuation[0] >= rep.threshold - slack)) {
        rep.verdict = DsaReport::Verdict::Vacuous;
        return rep;
    }
    for (int j = 1; j <= order; ++j) {
        if (!(rep.profile.valuation[static_cast<std::size_t>(j)] >= rd - slack)) {
            rep.verdict = DsaReport::Verdict::Violation;
            rep.offending = j;
            return rep;
        }
    }
    rep.verdict = DsaReport::Verdict::Pass;
    return rep;
}

/// Sharp distance e^(−v₀(f−g)) between embedded classical objects at a
/// level. Gauge-factorizable differences (including the classical case,
/// factor α_0) are exact; distinct classical inputs give exactly 1.
inline double grid_distance(const GeneralizedFunction& f, const GeneralizedFunction& g,
                            int level = 1, const Config& cfg = default_config()) {
    const ExprPtr diff = make_sub(f.expression(), g.expression());
    if (diff->kind == ExprKind::Num && diff->num == 0.0) return 0.0;
    if (const auto split = sharpdet::gauge_split(diff)) {
        const double sup =
            sharpdet::grid_sup(split->second, f.domain(), static_cast<double>(level), 1, cfg);
        if (sup == 0.0) return 0.0;
        return std::exp(-to_double(split->first));
    }
    std::vector<double> sups(static_cast<std::size_t>(cfg.lattice_depth));
    for (int k = 1; k <= cfg.lattice_depth; ++k)
        sups[static_cast<std::size_t>(k - 1)] =
            sharpdet::grid_sup(diff, f.domain(), static_cast<double>(level), k, cfg);
    const SlopeEstimate est = estimate_decay(sups, cfg.window_start(), cfg.lattice_depth);
    if (est.all_zero) return 0.0;
    if (!est.ok) throw Error(err_domain, "sup-norm regression failed on the level grid");
    return std::exp(-est.exponent);
}

}  // namespace gcalc
