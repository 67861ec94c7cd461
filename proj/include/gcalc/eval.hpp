#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gcalc/config.hpp"
#include "gcalc/expr.hpp"
#include "gcalc/mollifier.hpp"
#include "gcalc/number.hpp"

namespace gcalc {

// ===== shared kernel family ==================================================

/// Per-order mollifier family with the derivative chain of rho extended on
/// demand. Family members are addressed by KernelSpec; taylor() returns the
/// coefficients f^(j)(c)/j! needed for series composition.
class KernelTable {
public:
    static const KernelTable& get(int q) {
        static std::map<int, std::unique_ptr<KernelTable>> tables;
        static std::mutex mu;
        std::scoped_lock lk(mu);
        auto& slot = tables[q];
        if (!slot) slot.reset(new KernelTable(q));
        return *slot;
    }

    const Mollifier<double>& family() const { return moll_; }

    double eval(const KernelSpec& s, double u) const { return member_eval(s, 0, u); }

    std::vector<double> taylor(const KernelSpec& s, double c, int n) const {
        std::vector<double> out(static_cast<std::size_t>(n) + 1);
        long double fact = 1.0L;
        for (int j = 0; j <= n; ++j) {
            if (j > 0) fact *= j;
            out[static_cast<std::size_t>(j)] =
                static_cast<double>(static_cast<long double>(member_eval(s, j, c)) / fact);
        }
        return out;
    }

private:
    explicit KernelTable(int q) : moll_(Mollifier<double>::build(q)) {
        chain_.push_back(std::make_unique<MollFun<double>>(moll_.rho));
        sign_ = moll_.step.scaled(2.0);
        sign_.C = sign_.C + Poly<double>::constant(-1.0);
    }

    // Pointees are heap-allocated so references stay valid while the chain
    // grows from another thread.
    const MollFun<double>& rho_deriv(int d) const {
        std::scoped_lock lk(mu_);
        while (static_cast<int>(chain_.size()) <= d)
            chain_.push_back(std::make_unique<MollFun<double>>(chain_.back()->derivative()));
        return *chain_[static_cast<std::size_t>(d)];
    }

    // j-th derivative of the member named by s, evaluated at u.
    double member_eval(const KernelSpec& s, int j, double u) const {
        switch (s.base) {
            case KernelBase::Rho:
                return rho_deriv(s.deriv + j).eval(u);
            case KernelBase::Step:
                return j == 0 ? moll_.step.eval(u) : rho_deriv(j - 1).eval(u);
            case KernelBase::Abs:
                if (j == 0) return moll_.abs_kernel.eval(u);
                if (j == 1) return sign_.eval(u);
                return 2.0 * rho_deriv(j - 2).eval(u);
        }
        return 0.0;
    }

    Mollifier<double> moll_;
    MollFun<double> sign_;  // 2 * step - 1
    mutable std::vector<std::unique_ptr<MollFun<double>>> chain_;  // rho, rho', ...
    mutable std::mutex mu_;
};

// ===== scalar views of the catalog functions =================================

namespace evaldet {

/// Pointwise double evaluation of a Fun or Kernel node at a sample value.
inline double fun_pointwise(const Expr& node, double v) {
    if (node.kind == ExprKind::Fun) {
        switch (node.fun) {
            case FunTag::Sin: return std::sin(v);
            case FunTag::Cos: return std::cos(v);
            case FunTag::Exp: return std::exp(v);
            case FunTag::Atan: return std::atan(v);
        }
    }
    if (node.kind == ExprKind::Kernel) return KernelTable::get(node.kernel.q).eval(node.kernel, v);
    throw Error(err_bad_argument, "pointwise evaluation on a non-function node");
}

/// Taylor coefficients f^(j)(c)/j!, j = 0..n, of a Fun or Kernel node.
inline std::vector<double> taylor_coeffs(const Expr& node, double c, int n) {
    std::vector<double> out(static_cast<std::size_t>(n) + 1);
    if (node.kind == ExprKind::Kernel) return KernelTable::get(node.kernel.q).taylor(node.kernel, c, n);
    switch (node.fun) {
        case FunTag::Sin:
        case FunTag::Cos: {
            const double s = std::sin(c), co = std::cos(c);
            const double cyc_sin[4] = {s, co, -s, -co};
            const double cyc_cos[4] = {co, -s, -co, s};
            const double* cyc = node.fun == FunTag::Sin ? cyc_sin : cyc_cos;
            long double fact = 1.0L;
            for (int j = 0; j <= n; ++j) {
                if (j > 0) fact *= j;
                out[static_cast<std::size_t>(j)] =
                    static_cast<double>(static_cast<long double>(cyc[j % 4]) / fact);
            }
            return out;
        }
        case FunTag::Exp: {
            if (c > 709.0)
                throw Error(err_not_representable, "exp overflows the double coefficient range");
            out[0] = std::exp(c);
            for (int j = 1; j <= n; ++j)
                out[static_cast<std::size_t>(j)] = out[static_cast<std::size_t>(j - 1)] / j;
            return out;
        }
        case FunTag::Atan: {
            // atan'(x) = 1/((x-i)(x+i)); the shifted geometric series gives
            // the h^m coefficient of atan'(c+h) as (-1)^m Im(z^(m+1)) with
            // z = 1/(c-i), |z| <= 1, so the recurrence is stable.
            out[0] = std::atan(c);
            const std::complex<double> z = 1.0 / std::complex<double>(c, -1.0);
            std::complex<double> p = z;
            for (int m = 0; m < n; ++m) {
                const double sign = (m % 2 == 0) ? 1.0 : -1.0;
                out[static_cast<std::size_t>(m) + 1] = sign * p.imag() / (m + 1);
                p *= z;
            }
            return out;
        }
    }
    throw Error(err_bad_argument, "taylor coefficients on a non-analytic node");
}

// ===== branch decomposition ==================================================

/// How a branch sits relative to series composition: a constant plus a
/// positive-valuation balance (Taylor), content diverging as k grows
/// (Divergent), or structure only the sampled tier can follow (Demote).
struct BranchSplit {
    enum class Case { Taylor, Divergent, Demote };
    Case kind = Case::Demote;

    // Taylor:
    double c = 0.0;
    Branch v;

    // Divergent:
    std::optional<QQ> poly_neg;    // least poly exponent < 0, if any
    double poly_coeff = 0.0;       // coefficient at poly_neg
    int n_poly_neg = 0;            // number of negative-exponent poly terms
    std::optional<QQ> trig_neg;    // least negative trig amplitude exponent
};

inline BranchSplit split_branch(const Branch& b, const Config& cfg) {
    BranchSplit s;

    // A finite truncation order <= 0 hides terms of order one or larger;
    // nothing exact can be said then.
    const RatInf& po = b.poly().order();
    if (po.is_finite() && po.value() <= 0) return s;

    bool trig_at_zero = false;
    for (const auto& t : b.trig()) {
        const RatInf& ao = t.amplitude.order();
        if (ao.is_finite() && ao.value() <= 0) return s;
        for (const auto& term : t.amplitude.terms()) {
            if (term.exp < 0) {
                if (!s.trig_neg || term.exp < *s.trig_neg) s.trig_neg = term.exp;
            } else if (term.exp == 0) {
                trig_at_zero = true;
            }
        }
    }
    for (const auto& term : b.poly().terms()) {
        if (term.exp < 0) {
            ++s.n_poly_neg;
            if (!s.poly_neg || term.exp < *s.poly_neg) {
                s.poly_neg = term.exp;
                s.poly_coeff = term.coeff;
            }
        }
    }
    if (s.poly_neg || s.trig_neg) {
        s.kind = BranchSplit::Case::Divergent;
        return s;
    }
    if (trig_at_zero) return s;  // order-one oscillation: sampling only

    s.kind = BranchSplit::Case::Taylor;
    s.c = b.poly().coeff_at(QQ(0));
    auto balance = Branch::add(b, Branch::constant(-s.c), cfg);
    s.v = *balance;  // same rate family: never disengages
    return s;
}

/// Series composition f(c + v) for a positive-valuation balance v. Returns
/// nullopt when the branch is not in Taylor position.
inline std::optional<Branch> taylor_apply(const Expr& node, const Branch& b, const Config& cfg) {
    BranchSplit s = split_branch(b, cfg);
    if (s.kind != BranchSplit::Case::Taylor) return std::nullopt;

    const RatInf vlb = s.v.valuation_lower_bound();
    if (vlb.is_infinite()) {
        const auto coeffs = taylor_coeffs(node, s.c, 0);
        return Branch::constant(coeffs[0]);
    }
    const QQ vmin = vlb.value();  // > 0 by construction
    int n = static_cast<int>(std::ceil(to_double(cfg.order_window / vmin)));
    if (n < 1) n = 1;
    if (n > 150) n = 150;  // factorial range; the truncation order records the cut

    const auto coeffs = taylor_coeffs(node, s.c, n);
    Branch acc = Branch::constant(coeffs[static_cast<std::size_t>(n)]);
    for (int j = n - 1; j >= 0; --j) {
        acc = *Branch::mul(acc, s.v, cfg);
        acc = *Branch::add(acc, Branch::constant(coeffs[static_cast<std::size_t>(j)]), cfg);
    }
    // Taylor remainder is O(v^(n+1)).
    return acc.truncated(RatInf(vmin * (n + 1)), cfg);
}

/// Exact-tier application of a Fun or Kernel node to one branch. nullopt
/// requests demotion to the sampled tier.
inline std::optional<Branch> apply_branch(const Expr& node, const Branch& b, const Config& cfg) {
    BranchSplit s = split_branch(b, cfg);
    switch (s.kind) {
        case BranchSplit::Case::Demote:
            return std::nullopt;
        case BranchSplit::Case::Taylor:
            return taylor_apply(node, b, cfg);
        case BranchSplit::Case::Divergent:
            break;
    }

    if (node.kind == ExprKind::Fun && node.fun == FunTag::Exp) {
        if (s.poly_neg && (!s.trig_neg || *s.poly_neg < *s.trig_neg)) {
            // The monomial dominates; its sign decides between a negligible
            // value and a net that outruns every gauge power.
            if (s.poly_coeff < 0) return Branch::zero();
            throw Error(err_not_alpha_bounded,
                        "exp of a positively divergent argument exceeds every gauge power");
        }
        throw Error(err_not_alpha_bounded,
                    "exp of an oscillatory divergent argument is unbounded along a subsequence");
    }
    // Remaining rules need a definite eventual sign, which an oscillatory
    // leading term does not provide.
    if (s.trig_neg) return std::nullopt;
    const QQ a = *s.poly_neg;
    const int sgn = s.poly_coeff > 0 ? 1 : -1;

    if (node.kind == ExprKind::Fun && (node.fun == FunTag::Sin || node.fun == FunTag::Cos)) {
        // sin(m 2^(kr) + w) stays in the catalog when the divergent part is
        // one monomial with an integer coefficient: expand against the
        // angle-addition identities with Taylor series of the balance w.
        if (b.has_trig() || s.n_poly_neg != 1) return std::nullopt;
        const double mr = std::nearbyint(s.poly_coeff);
        if (mr != s.poly_coeff || mr == 0.0 || std::fabs(mr) > 1e15) return std::nullopt;
        const long long m = static_cast<long long>(mr);
        const double sm = m < 0 ? -1.0 : 1.0;
        const long long mabs = m < 0 ? -m : m;

        Branch w = *Branch::add(b, Branch(GaugeExpansion::monomial(-s.poly_coeff, a)), cfg);
        Expr fsin, fcos;
        fsin.kind = fcos.kind = ExprKind::Fun;
        fsin.fun = FunTag::Sin;
        fcos.fun = FunTag::Cos;
        const auto sin_w = taylor_apply(fsin, w, cfg);
        const auto cos_w = taylor_apply(fcos, w, cfg);
        if (!sin_w || !cos_w) return std::nullopt;

        const QQ rate = -a;
        auto osc = [&](const GaugeExpansion& amp, TrigKind kind) {
            TrigTerm t;
            t.amplitude = amp;
            t.kind = kind;
            t.multiplier = mabs;
            t.rate = rate;
            return Branch::oscillation(std::move(t), cfg);
        };
        if (node.fun == FunTag::Sin) {
            // sin(m phi + w) = sign(m) sin(|m| phi) cos(w) + cos(|m| phi) sin(w)
            return Branch::add(osc(cos_w->poly().scaled(sm), TrigKind::Sin),
                               osc(sin_w->poly(), TrigKind::Cos), cfg);
        }
        // cos(m phi + w) = cos(|m| phi) cos(w) - sign(m) sin(|m| phi) sin(w)
        return Branch::add(osc(cos_w->poly(), TrigKind::Cos),
                           osc(sin_w->poly().scaled(-sm), TrigKind::Sin), cfg);
    }

    if (node.kind == ExprKind::Fun && node.fun == FunTag::Atan) {
        // atan(u) = sign(u) pi/2 - atan(1/u) with 1/u of positive valuation.
        if (b.has_trig()) return std::nullopt;
        const GaugeExpansion inv = invert(b.poly(), cfg);
        Expr fatan;
        fatan.kind = ExprKind::Fun;
        fatan.fun = FunTag::Atan;
        const auto tail = taylor_apply(fatan, Branch(inv), cfg);
        if (!tail) return std::nullopt;
        return Branch::add(Branch::constant(sgn * std::numbers::pi / 2.0), -*tail, cfg);
    }

    if (node.kind == ExprKind::Kernel) {
        switch (node.kernel.base) {
            case KernelBase::Rho:
                // Gaussian decay makes every rho derivative negligible at a
                // divergent argument, even with lower-order ripples on top.
                return b.has_trig() ? std::nullopt : std::optional<Branch>(Branch::zero());
            case KernelBase::Step:
                if (b.has_trig()) return std::nullopt;
                return sgn > 0 ? Branch::constant(1.0) : Branch::zero();
            case KernelBase::Abs:
                // The |.|-kernel agrees with |u| up to a negligible tail, and
                // the sign of a divergent branch is eventually constant.
                return b.scaled(sgn, cfg);
        }
    }
    return std::nullopt;
}

}  // namespace evaldet

// ===== number-level function application =====================================

namespace evaldet {

inline GeneralizedNumber apply_sampled(const Expr& node, const GeneralizedNumber& u,
                                       const Config& cfg, const char* reason) {
    const GeneralizedNumber d = u.demoted(cfg, reason);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(cfg.lattice_depth));
    for (int k = 1; k <= cfg.lattice_depth; ++k) {
        const double val = fun_pointwise(node, d.sample(k));
        if (!std::isfinite(val)) {
            if (node.kind == ExprKind::Fun && node.fun == FunTag::Exp)
                throw Error(err_not_alpha_bounded, "exp overflows along the sampled net");
            throw Error(err_domain, "non-finite sample under pointwise application");
        }
        out.push_back(val);
    }
    return GeneralizedNumber::from_samples(std::move(out), d.warnings());
}

inline constexpr const char* demote_reason =
    "argument outside the exact composition catalog; result demoted to empirical tier";

}  // namespace evaldet

/// Applies a catalog function (Fun or Kernel node) to a generalized number:
/// exact series composition where the argument allows it, sampled fallback
/// with a warning otherwise.
inline GeneralizedNumber apply_node_fn(const Expr& node, const GeneralizedNumber& u,
                                       const Config& cfg = default_config()) {
    if (u.tier() == Tier::Empirical) return evaldet::apply_sampled(node, u, cfg, "");
    std::vector<std::pair<Idempotent, GeneralizedNumber>> parts;
    for (const auto& p : u.parts()) {
        auto r = evaldet::apply_branch(node, p.branch, cfg);
        if (!r) return evaldet::apply_sampled(node, u, cfg, evaldet::demote_reason);
        parts.push_back({p.idem, GeneralizedNumber::from_branch(std::move(*r))});
    }
    GeneralizedNumber out =
        parts.size() == 1 ? parts[0].second : GeneralizedNumber::interleave(parts, cfg);
    for (const auto& w : u.warnings()) out.add_warning(w);
    return out;
}

/// u^e for rational e: repeated squaring for integers, leading-monomial
/// factorization with a binomial series for fractional exponents.
inline GeneralizedNumber number_pow(const GeneralizedNumber& u, const QQ& e,
                                    const Config& cfg = default_config()) {
    if (e == 0) return GeneralizedNumber::one();
    if (e == 1) return u;
    if (denominator(e) == 1) {
        const long long n = floor_ll(e);
        GeneralizedNumber base = n < 0 ? invert(u, cfg) : u;
        unsigned long long m = static_cast<unsigned long long>(n < 0 ? -n : n);
        GeneralizedNumber acc = GeneralizedNumber::one();
        while (m) {
            if (m & 1ULL) acc = mul(acc, base, cfg);
            m >>= 1;
            if (m) base = mul(base, base, cfg);
        }
        for (const auto& w : u.warnings()) acc.add_warning(w);
        return acc;
    }

    const double s = to_double(e);
    auto sampled = [&](const GeneralizedNumber& v) {
        const GeneralizedNumber d = v.demoted(cfg, evaldet::demote_reason);
        std::vector<double> out;
        for (int k = 1; k <= cfg.lattice_depth; ++k) {
            const double val = std::pow(d.sample(k), s);
            if (!std::isfinite(val))
                throw Error(err_domain, "fractional power of a negative or singular sample");
            out.push_back(val);
        }
        return GeneralizedNumber::from_samples(std::move(out), d.warnings());
    };
    if (u.tier() == Tier::Empirical) return sampled(u);

    std::vector<std::pair<Idempotent, GeneralizedNumber>> parts;
    for (const auto& p : u.parts()) {
        const Branch& b = p.branch;
        if (b.has_trig()) return sampled(u);
        const GaugeExpansion& poly = b.poly();
        if (!poly.has_terms()) {
            if (e < 0) throw Error(err_not_invertible, "negative power of a zero-like element");
            // (O(eps^o))^e stays O(eps^(o*e)).
            Branch z;
            if (poly.order().is_finite())
                z = Branch(GaugeExpansion::truncated_zero(RatInf(poly.order().value() * e)));
            parts.push_back({p.idem, GeneralizedNumber::from_branch(std::move(z))});
            continue;
        }
        const QQ a = poly.terms().front().exp;
        const double c = poly.terms().front().coeff;
        if (c < 0)
            throw Error(err_domain, "fractional power of a negative leading coefficient");
        // u = c eps^a (1 + v): binomial series in v.
        GaugeExpansion unit = poly.shifted(-a).scaled(1.0 / c);
        GaugeExpansion v = sub(unit, GaugeExpansion::one(), cfg);
        GaugeExpansion series = GaugeExpansion::one();
        if (!v.is_exact_zero()) {
            const QQ vmin = v.valuation_lower_bound().value();
            int n = static_cast<int>(std::ceil(to_double(cfg.order_window / vmin)));
            if (n < 1) n = 1;
            if (n > 150) n = 150;
            std::vector<double> bin(static_cast<std::size_t>(n) + 1, 1.0);
            for (int j = 1; j <= n; ++j)
                bin[static_cast<std::size_t>(j)] =
                    bin[static_cast<std::size_t>(j - 1)] * (s - (j - 1)) / j;
            series = GaugeExpansion::constant(bin[static_cast<std::size_t>(n)]);
            for (int j = n - 1; j >= 0; --j) {
                series = mul(series, v, cfg);
                series = add(series, GaugeExpansion::constant(bin[static_cast<std::size_t>(j)]), cfg);
            }
            series = series.truncated(RatInf(vmin * (n + 1)));
        }
        GaugeExpansion result = series.scaled(std::pow(c, s)).shifted(a * e);
        parts.push_back({p.idem, GeneralizedNumber::from_branch(Branch(std::move(result)))});
    }
    GeneralizedNumber out =
        parts.size() == 1 ? parts[0].second : GeneralizedNumber::interleave(parts, cfg);
    for (const auto& w : u.warnings()) out.add_warning(w);
    return out;
}

// ===== pointwise sharp maps ==================================================

/// quanta(x) = alpha(2 V(x)), with quanta(0) = 0. Needs the valuation
/// exactly; a regression estimate cannot pin the output exponent.
inline GeneralizedNumber quanta_eval(const GeneralizedNumber& x,
                                     const Config& cfg = default_config()) {
    if (x.is_zero_like()) return GeneralizedNumber::zero();
    const Valuation v = valuation(x, cfg);
    if (v.kind == Valuation::Kind::Empirical)
        throw Error(err_valuation_not_exact,
                    "quanta needs an exact valuation; the argument only has a regression estimate");
    if (!v.is_exact())
        throw Error(err_valuation_not_exact,
                    "quanta needs an exact valuation; truncation hides the leading term");
    if (v.infinite) return GeneralizedNumber::zero();
    return GeneralizedNumber::alpha(2 * v.exact);
}

/// F(x) = x * alpha(-2 V(x)), the norm-inverting involution: it maps the
/// valuation of x to -V(x), so |x| |F(x)| = 1 for invertible x.
inline GeneralizedNumber inversion_map(const GeneralizedNumber& x,
                                       const Config& cfg = default_config()) {
    if (x.is_zero_like()) return GeneralizedNumber::zero();
    const Valuation v = valuation(x, cfg);
    if (v.kind == Valuation::Kind::Empirical)
        throw Error(err_valuation_not_exact,
                    "the inversion map needs an exact valuation; the argument only has a "
                    "regression estimate");
    if (!v.is_exact())
        throw Error(err_valuation_not_exact,
                    "the inversion map needs an exact valuation; truncation hides the leading term");
    if (v.infinite) return GeneralizedNumber::zero();
    return mul(x, GeneralizedNumber::alpha(-2 * v.exact), cfg);
}

// ===== distribution embedding at the expression level ========================

/// Rewrites distribution nodes into their mollified forms at order q:
/// delta(u, m) -> alpha(-1-m) rho(u/eps, m), heaviside -> Rho(u/eps),
/// sign -> 2 Rho(u/eps) - 1, abs -> eps * abskernel(u/eps).
inline ExprPtr embed_expr(const ExprPtr& e, int q) {
    std::vector<ExprPtr> kids;
    kids.reserve(e->kids.size());
    for (const auto& k : e->kids) kids.push_back(embed_expr(k, q));

    auto scaled_arg = [&](const ExprPtr& u) { return make_mul({u, make_alpha(QQ(-1))}); };
    switch (e->kind) {
        case ExprKind::Delta:
            return make_mul({make_alpha(QQ(-1 - e->delta_order)),
                             make_kernel({KernelBase::Rho, e->delta_order, q}, scaled_arg(kids[0]))});
        case ExprKind::Heaviside:
            return make_kernel({KernelBase::Step, 0, q}, scaled_arg(kids[0]));
        case ExprKind::SignFn:
            return make_add({make_mul({make_num(2.0),
                                       make_kernel({KernelBase::Step, 0, q}, scaled_arg(kids[0]))}),
                             make_num(-1.0)});
        case ExprKind::AbsFn:
            return make_mul({make_alpha(QQ(1)),
                             make_kernel({KernelBase::Abs, 0, q}, scaled_arg(kids[0]))});
        case ExprKind::Add:
            return make_add(std::move(kids));
        case ExprKind::Mul:
            return make_mul(std::move(kids));
        case ExprKind::Pow:
            return make_pow(kids[0], e->exponent);
        case ExprKind::Fun:
            return make_fun(e->fun, kids[0]);
        case ExprKind::Kernel:
            return make_kernel(e->kernel, kids[0]);
        case ExprKind::Quanta:
            return make_node(ExprKind::Quanta, kids[0]);
        case ExprKind::Interleave:
            return make_interleave(std::move(kids));
        default:
            return e;
    }
}

// ===== evaluation ============================================================

/// Values bound to the spatial variables during evaluation.
struct EvalEnv {
    std::optional<GeneralizedNumber> x;  // axis 0
    std::optional<GeneralizedNumber> t;  // axis 1
    Config cfg = default_config();

    const GeneralizedNumber& var(int axis) const {
        const auto& slot = axis == 0 ? x : t;
        if (!slot)
            throw Error(err_bad_argument, std::string("free variable '") +
                                              (axis == 0 ? "x" : "t") +
                                              "' in a number context");
        return *slot;
    }
};

inline GeneralizedNumber evaluate(const ExprPtr& e, const EvalEnv& env) {
    const Config& cfg = env.cfg;
    switch (e->kind) {
        case ExprKind::Num:
            return GeneralizedNumber::from_real(e->num);
        case ExprKind::Gauge:
            return GeneralizedNumber::alpha(QQ(1));
        case ExprKind::Var:
            return env.var(e->axis);
        case ExprKind::Add: {
            GeneralizedNumber acc = evaluate(e->kids[0], env);
            for (std::size_t i = 1; i < e->kids.size(); ++i)
                acc = add(acc, evaluate(e->kids[i], env), cfg);
            return acc;
        }
        case ExprKind::Mul: {
            GeneralizedNumber acc = evaluate(e->kids[0], env);
            for (std::size_t i = 1; i < e->kids.size(); ++i)
                acc = mul(acc, evaluate(e->kids[i], env), cfg);
            return acc;
        }
        case ExprKind::Pow:
            return number_pow(evaluate(e->kids[0], env), e->exponent, cfg);
        case ExprKind::Fun:
        case ExprKind::Kernel:
            return apply_node_fn(*e, evaluate(e->kids[0], env), cfg);
        case ExprKind::Delta:
        case ExprKind::Heaviside:
        case ExprKind::SignFn:
        case ExprKind::AbsFn:
            return evaluate(embed_expr(e, cfg.mollifier_order), env);
        case ExprKind::Quanta:
            return quanta_eval(evaluate(e->kids[0], env), cfg);
        case ExprKind::IdemLit:
            return GeneralizedNumber::from_idem(e->idem);
        case ExprKind::Interleave: {
            std::vector<std::pair<Idempotent, GeneralizedNumber>> parts;
            bool all_exact = true;
            for (std::size_t i = 0; i < e->kids.size(); i += 2) {
                GeneralizedNumber v = evaluate(e->kids[i + 1], env);
                all_exact = all_exact && v.is_exact_tier();
                parts.push_back({e->kids[i]->idem, std::move(v)});
            }
            if (all_exact) return GeneralizedNumber::interleave(parts, cfg);
            // Mixed tiers: merge samplewise, checking the family covers every
            // index exactly once.
            std::vector<double> out;
            std::vector<std::string> warnings;
            for (const auto& [idem, v] : parts)
                for (const auto& w : v.warnings())
                    if (std::find(warnings.begin(), warnings.end(), w) == warnings.end())
                        warnings.push_back(w);
            for (int k = 1; k <= cfg.lattice_depth; ++k) {
                int active = 0;
                double val = 0.0;
                for (const auto& [idem, v] : parts) {
                    if (idem.bit(k)) {
                        ++active;
                        val = v.sample(k);
                    }
                }
                if (active != 1)
                    throw Error(err_family_incomplete,
                                "interleave family must cover every index exactly once");
                out.push_back(val);
            }
            return GeneralizedNumber::from_samples(std::move(out), std::move(warnings));
        }
    }
    throw Error(err_bad_argument, "evaluate: unhandled expression node");
}

/// Evaluates an expression with no free spatial variables.
inline GeneralizedNumber evaluate_number(const ExprPtr& e, const Config& cfg = default_config()) {
    EvalEnv env;
    env.cfg = cfg;
    return evaluate(e, env);
}

}  // namespace gcalc
