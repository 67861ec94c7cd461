#pragma once
// Generalized functions: an expression net over the lattice together with a
// domain and an empirically checked growth witness. Covers the smooth
// embedding, the distribution catalog (delta derivatives, step, sign, abs),
// pointwise algebra and composition, and evaluation at generalized points.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gcalc/eval.hpp"
#include "gcalc/fit.hpp"
#include "gcalc/internal.hpp"

namespace gcalc {

/// Classical value of the expression at lattice index k with x, t plugged
/// in. Abstract distribution nodes take their kernel meaning at the config's
/// mollifier order. Quanta has no pointwise meaning and is rejected.
inline double point_eval(const ExprPtr& e, double x, double t, int k,
                         const Config& cfg = default_config()) {
    switch (e->kind) {
        case ExprKind::Num: return e->num;
        case ExprKind::Gauge: return epsilon_at(k);
        case ExprKind::Var: return e->axis == 0 ? x : t;
        case ExprKind::Add: {
            double s = 0.0;
            for (const auto& kid : e->kids) s += point_eval(kid, x, t, k, cfg);
            return s;
        }
        case ExprKind::Mul: {
            double p = 1.0;
            for (const auto& kid : e->kids) p *= point_eval(kid, x, t, k, cfg);
            return p;
        }
        case ExprKind::Pow: {
            const double b = point_eval(e->kids[0], x, t, k, cfg);
            if (denominator(e->exponent) == 1) {
                const long long n = static_cast<long long>(numerator(e->exponent));
                return std::pow(b, static_cast<double>(n));
            }
            return std::pow(b, to_double(e->exponent));
        }
        case ExprKind::Fun: {
            const double u = point_eval(e->kids[0], x, t, k, cfg);
            return evaldet::fun_pointwise(*e, u);
        }
        case ExprKind::Kernel: {
            const double u = point_eval(e->kids[0], x, t, k, cfg);
            return KernelTable::get(e->kernel.q).eval(e->kernel, u);
        }
        case ExprKind::Delta: {
            const double u = point_eval(e->kids[0], x, t, k, cfg);
            const int q = cfg.mollifier_order;
            const double s = std::exp2(static_cast<double>(k));
            return std::pow(s, 1.0 + e->delta_order) *
                   KernelTable::get(q).eval({KernelBase::Rho, e->delta_order, q}, u * s);
        }
        case ExprKind::Heaviside: {
            const double u = point_eval(e->kids[0], x, t, k, cfg);
            const int q = cfg.mollifier_order;
            return KernelTable::get(q).eval({KernelBase::Step, 0, q},
                                            u * std::exp2(static_cast<double>(k)));
        }
        case ExprKind::SignFn: {
            const double u = point_eval(e->kids[0], x, t, k, cfg);
            const int q = cfg.mollifier_order;
            return 2.0 * KernelTable::get(q).eval({KernelBase::Step, 0, q},
                                                  u * std::exp2(static_cast<double>(k))) -
                   1.0;
        }
        case ExprKind::AbsFn: {
            const double u = point_eval(e->kids[0], x, t, k, cfg);
            const int q = cfg.mollifier_order;
            const double s = std::exp2(static_cast<double>(k));
            return KernelTable::get(q).eval({KernelBase::Abs, 0, q}, u * s) / s;
        }
        case ExprKind::Quanta:
            throw Error(err_bad_argument, "quanta has no pointwise sample; it needs the whole net");
        case ExprKind::IdemLit: return e->idem.bit(k) ? 1.0 : 0.0;
        case ExprKind::Interleave: {
            for (std::size_t i = 0; i + 1 < e->kids.size(); i += 2)
                if (e->kids[i]->idem.bit(k)) return point_eval(e->kids[i + 1], x, t, k, cfg);
            return 0.0;
        }
    }
    throw Error(err_bad_argument, "unhandled expression node");
}

/// Replaces every occurrence of the axis variable, rebuilding through the
/// canonical factories.
inline ExprPtr substitute(const ExprPtr& e, int axis, const ExprPtr& repl) {
    switch (e->kind) {
        case ExprKind::Num:
        case ExprKind::Gauge:
        case ExprKind::IdemLit: return e;
        case ExprKind::Var: return e->axis == axis ? repl : e;
        default: break;
    }
    std::vector<ExprPtr> kids;
    kids.reserve(e->kids.size());
    for (const auto& k : e->kids) kids.push_back(substitute(k, axis, repl));
    switch (e->kind) {
        case ExprKind::Add: return make_add(std::move(kids));
        case ExprKind::Mul: return make_mul(std::move(kids));
        case ExprKind::Pow: return make_pow(kids[0], e->exponent);
        case ExprKind::Fun: return make_fun(e->fun, kids[0]);
        case ExprKind::Kernel: return make_kernel(e->kernel, kids[0]);
        case ExprKind::Delta: return make_delta(e->delta_order, kids[0]);
        case ExprKind::Heaviside:
        case ExprKind::SignFn:
        case ExprKind::AbsFn:
        case ExprKind::Quanta: return make_node(e->kind, kids[0]);
        case ExprKind::Interleave: return make_interleave(std::move(kids));
        default: break;
    }
    throw Error(err_bad_argument, "unhandled expression node");
}

inline void collect_axes(const ExprPtr& e, bool& has_x, bool& has_t) {
    if (e->kind == ExprKind::Var) (e->axis == 0 ? has_x : has_t) = true;
    for (const auto& k : e->kids) collect_axes(k, has_x, has_t);
}

inline bool contains_kind(const ExprPtr& e, ExprKind k) {
    if (e->kind == k) return true;
    for (const auto& kid : e->kids)
        if (contains_kind(kid, k)) return true;
    return false;
}

/// Which single catalog distribution the function embeds, when it does; the
/// pairing uses this for the high-precision substituted quadrature path.
struct CatalogTag {
    enum class Kind { Delta, Heaviside, Sign, Abs };
    Kind kind = Kind::Delta;
    int order = 0;  // derivative order for Delta
};

namespace fndet {

inline std::optional<CatalogTag> match_catalog(const ExprPtr& t) {
    if (t->kids.size() != 1 || t->kids[0]->kind != ExprKind::Var || t->kids[0]->axis != 0)
        return std::nullopt;
    switch (t->kind) {
        case ExprKind::Delta: return CatalogTag{CatalogTag::Kind::Delta, t->delta_order};
        case ExprKind::Heaviside: return CatalogTag{CatalogTag::Kind::Heaviside, 0};
        case ExprKind::SignFn: return CatalogTag{CatalogTag::Kind::Sign, 0};
        case ExprKind::AbsFn: return CatalogTag{CatalogTag::Kind::Abs, 0};
        default: return std::nullopt;
    }
}

struct AxisGrids {
    std::vector<double> x{0.0}, t{0.0};
};

/// Grid over Omega_m = (closed sup-ball of radius m) ∩ domain, per axis.
inline std::vector<double> level_grid(const Region& dom, std::size_t axis, double m, int points) {
    double lo, hi;
    if (dom.kind == Region::Kind::Box) {
        lo = std::max(dom.lo[axis], -m);
        hi = std::min(dom.hi[axis], m);
    } else {
        lo = std::max(dom.center[axis] - dom.radius, -m);
        hi = std::min(dom.center[axis] + dom.radius, m);
    }
    std::vector<double> g;
    if (lo > hi) return g;
    const int n = std::max(points, 2);
    g.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return g;
}

/// Grids matched to the axes the expression uses: a one-dimensional domain
/// serves whichever single variable appears; two-dimensional domains bind
/// coordinate 0 to x and coordinate 1 to t.
inline AxisGrids axis_grids(const ExprPtr& e, const Region& dom, double level, int points) {
    bool has_x = false, has_t = false;
    collect_axes(e, has_x, has_t);
    AxisGrids g;
    if (has_x) g.x = level_grid(dom, 0, level, points);
    if (has_t) g.t = level_grid(dom, has_x && dom.dim() > 1 ? 1 : 0, level, points);
    if (has_x && has_t && dom.dim() < 2)
        throw Error(err_bad_argument, "two free variables need a two-dimensional domain");
    return g;
}

}  // namespace fndet

class GeneralizedFunction {
public:
    const ExprPtr& expression() const { return expr_; }
    const Region& domain() const { return domain_; }
    bool is_smooth_embedding() const { return !order_.has_value(); }
    std::optional<int> embedding_order() const { return order_; }
    const std::optional<CatalogTag>& catalog() const { return catalog_; }
    /// Declared growth exponents r(m) for levels m = 1..3: the sampled sup of
    /// |f| and |grad f| over Omega_m stays below 2^(k*r(m)).
    const std::vector<double>& growth_exponents() const { return growth_; }

    /// Net constant in the gauge: plain smooth expressions only.
    static GeneralizedFunction embed_smooth(const ExprPtr& f, Region domain,
                                            const Config& cfg = default_config()) {
        for (ExprKind k : {ExprKind::Kernel, ExprKind::Delta, ExprKind::Heaviside,
                           ExprKind::SignFn, ExprKind::AbsFn, ExprKind::Quanta})
            if (contains_kind(f, k))
                throw Error(err_bad_argument,
                            "non-smooth construct in a smooth embedding; use embed_distribution");
        if (contains_kind(f, ExprKind::Gauge))
            throw Error(err_bad_argument,
                        "gauge-dependent expression in a smooth embedding; use from_expression");
        return GeneralizedFunction(f, std::move(domain), std::nullopt, std::nullopt, cfg);
    }

    /// Catalog embedding at mollifier order q: delta derivatives become
    /// scaled kernel derivatives, step/sign/abs go through the antiderivative
    /// chain; smooth parts pass through unchanged.
    static GeneralizedFunction embed_distribution(const ExprPtr& t, int q, Region domain,
                                                  const Config& cfg = default_config()) {
        return GeneralizedFunction(embed_expr(t, q), std::move(domain), q,
                                   fndet::match_catalog(t), cfg);
    }

    /// Generic constructor for expression nets that already mention the gauge
    /// or kernels. The embedding-order tag is inferred from kernel nodes.
    static GeneralizedFunction from_expression(const ExprPtr& f, Region domain,
                                               const Config& cfg = default_config()) {
        std::optional<int> q;
        walk_kernels(f, q);
        return GeneralizedFunction(f, std::move(domain), q, std::nullopt, cfg);
    }

    /// Same data with a different expression; growth witness re-measured.
    GeneralizedFunction with_expression(const ExprPtr& f, const Config& cfg = default_config()) const {
        return GeneralizedFunction(f, domain_, order_, std::nullopt, cfg);
    }

private:
    GeneralizedFunction(ExprPtr f, Region domain, std::optional<int> order,
                        std::optional<CatalogTag> tag, const Config& cfg)
        : expr_(std::move(f)), domain_(std::move(domain)), order_(order), catalog_(tag) {
        measure_growth(cfg);
    }

    static void walk_kernels(const ExprPtr& e, std::optional<int>& q) {
        if (e->kind == ExprKind::Kernel) q = q ? std::min(*q, e->kernel.q) : e->kernel.q;
        if (e->kind == ExprKind::Delta || e->kind == ExprKind::Heaviside ||
            e->kind == ExprKind::SignFn || e->kind == ExprKind::AbsFn)
            if (!q) q = default_config().mollifier_order;
        for (const auto& kid : e->kids) walk_kernels(kid, q);
    }

    /// Samples |f| and the gradient over Omega_m grids across the lattice and
    /// declares r(m) as the smallest integer exponent the sup stays under.
    /// Unbounded-in-k growth (required exponent past 64) is not alpha-bounded.
    void measure_growth(const Config& cfg) {
        bool has_x = false, has_t = false;
        collect_axes(expr_, has_x, has_t);
        std::vector<ExprPtr> derivs;
        if (has_x) derivs.push_back(derivative(expr_, 0));
        if (has_t) derivs.push_back(derivative(expr_, 1));

        const int points = 33;
        growth_.clear();
        for (int m = 1; m <= 3; ++m) {
            const fndet::AxisGrids grids =
                fndet::axis_grids(expr_, domain_, static_cast<double>(m), points);
            const std::vector<double>& gx = grids.x;
            const std::vector<double>& gt = grids.t;
            double required = 0.0;
            for (int k = 6; k <= 26; k += 4) {
                double sup = 0.0;
                auto see = [&](double v) {
                    if (std::isnan(v))
                        throw Error(err_domain, "expression not evaluable over the domain lattice");
                    sup = std::max(sup, std::fabs(v));
                };
                for (double xv : gx)
                    for (double tv : gt) {
                        see(point_eval(expr_, xv, tv, k, cfg));
                        for (const auto& d : derivs) see(point_eval(d, xv, tv, k, cfg));
                    }
                if (!std::isfinite(sup))
                    throw Error(err_not_alpha_bounded, "expression is not alpha-bounded");
                if (sup > 1.0)
                    required = std::max(required, std::log2(sup) / static_cast<double>(k));
            }
            if (required > 64.0)
                throw Error(err_not_alpha_bounded, "expression is not alpha-bounded");
            growth_.push_back(std::ceil(required - 1e-9) + 1.0);
        }
    }

    ExprPtr expr_;
    Region domain_;
    std::optional<int> order_;
    std::optional<CatalogTag> catalog_;
    std::vector<double> growth_;
};

/// The combined embedding-order tag (min of the operand tags) re-infers from
/// kernel nodes of the combined expression, so the algebra goes through
/// from_expression.
inline GeneralizedFunction fn_add(const GeneralizedFunction& f, const GeneralizedFunction& g,
                                  const Config& cfg = default_config()) {
    if (f.domain().dim() != g.domain().dim())
        throw Error(err_bad_argument, "adding functions over different dimensions");
    return GeneralizedFunction::from_expression(make_add({f.expression(), g.expression()}),
                                                f.domain(), cfg);
}

inline GeneralizedFunction fn_mul(const GeneralizedFunction& f, const GeneralizedFunction& g,
                                  const Config& cfg = default_config()) {
    if (f.domain().dim() != g.domain().dim())
        throw Error(err_bad_argument, "multiplying functions over different dimensions");
    return GeneralizedFunction::from_expression(make_mul({f.expression(), g.expression()}),
                                                f.domain(), cfg);
}

/// f after g: substitutes g's expression for the x of f. The inner image is
/// sampled over the lattice; it must stay inside a compact subset of f's
/// domain or the composition is rejected.
inline GeneralizedFunction fn_compose(const GeneralizedFunction& f, const GeneralizedFunction& g,
                                      const Config& cfg = default_config()) {
    const fndet::AxisGrids grids = fndet::axis_grids(g.expression(), g.domain(), 1e30, 65);
    for (int k = 4; k <= cfg.lattice_depth; k += 4)
        for (double xv : grids.x)
            for (double tv : grids.t) {
                const double v = point_eval(g.expression(), xv, tv, k, cfg);
                std::vector<double> probe{v};
                if (!std::isfinite(v) || !f.domain().contains(probe))
                    throw Error(err_image_not_compact, "image not compactly supported");
            }
    return GeneralizedFunction::from_expression(substitute(f.expression(), 0, g.expression()),
                                                f.domain(), cfg);
}

/// Symbolic partial derivative with the gauge held fixed. Commutes with the
/// catalog embedding by construction of the kernel chain.
inline GeneralizedFunction sharp_derivative(const GeneralizedFunction& f, int axis = 0,
                                            const Config& cfg = default_config()) {
    return f.with_expression(derivative(f.expression(), axis), cfg);
}

/// Evaluation at a vector of generalized coordinates, bound to the free
/// axes in (x, t) order. The point must lie in the domain membrane.
inline GeneralizedNumber evaluate(const GeneralizedFunction& f,
                                  const std::vector<GeneralizedNumber>& p,
                                  const Config& cfg = default_config()) {
    bool has_x = false, has_t = false;
    collect_axes(f.expression(), has_x, has_t);
    const std::size_t arity = static_cast<std::size_t>(has_x) + static_cast<std::size_t>(has_t);
    EvalEnv env;
    env.cfg = cfg;
    if (arity > 0) {
        if (p.size() != arity)
            throw Error(err_bad_argument, "point dimension does not match the free variables");
        if (p.size() == f.domain().dim() &&
            !membrane_member(p, Membrane::of(f.domain()), cfg))
            throw Error(err_domain, "point outside the domain membrane");
        if (has_x) env.x = p[0];
        if (has_t) env.t = p[has_x ? 1 : 0];
    }
    return evaluate(f.expression(), env);
}

inline GeneralizedNumber evaluate(const GeneralizedFunction& f, const GeneralizedNumber& p,
                                  const Config& cfg = default_config()) {
    return evaluate(f, std::vector<GeneralizedNumber>{p}, cfg);
}

}  // namespace gcalc
