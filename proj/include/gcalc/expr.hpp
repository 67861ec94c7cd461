#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gcalc/error.hpp"
#include "gcalc/idempotent.hpp"
#include "gcalc/rational.hpp"

namespace gcalc {

/// Expression trees over the spatial variables, the gauge symbol eps, and
/// the distribution/mollifier catalog. Construction goes through the
/// factory functions below, which normalize as they build: sums and
/// products are flattened and like terms merged, so syntactically different
/// spellings of the same combination compare equal.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprKind {
    Num,        // double constant
    Gauge,      // the symbol eps
    Var,        // spatial variable by axis: 0 = x, 1 = t
    Add,        // n-ary sum
    Mul,        // n-ary product
    Pow,        // rational power
    Fun,        // sin / cos / exp / atan
    Kernel,     // mollifier kernel family member (embedded form)
    Delta,      // m-th derivative of the Dirac delta (un-embedded)
    Heaviside,  // un-embedded step
    SignFn,     // un-embedded sign
    AbsFn,      // un-embedded absolute value
    Quanta,     // the quanta map applied pointwise
    IdemLit,    // idempotent literal
    Interleave  // interleave(e1, a1, e2, a2, ...)
};

enum class FunTag { Sin, Cos, Exp, Atan };

enum class KernelBase { Rho, Step, Abs };

/// Which member of the mollifier family: d-th derivative of rho, the
/// smoothed step, or the |x| kernel. The order q is bound at embedding time.
struct KernelSpec {
    KernelBase base = KernelBase::Rho;
    int deriv = 0;  // only for base == Rho
    int q = 6;

    friend bool operator==(const KernelSpec& a, const KernelSpec& b) {
        return a.base == b.base && a.deriv == b.deriv && a.q == b.q;
    }
};

struct Expr {
    ExprKind kind = ExprKind::Num;
    double num = 0.0;
    int axis = 0;
    FunTag fun = FunTag::Sin;
    KernelSpec kernel;
    int delta_order = 0;
    QQ exponent;
    Idempotent idem = Idempotent::all_ones();
    std::vector<ExprPtr> kids;
};

// --- ordering and equality -------------------------------------------------

namespace exprdet {

inline int kind_rank(ExprKind k) { return static_cast<int>(k); }

inline int cmp(const ExprPtr& a, const ExprPtr& b) {
    if (a.get() == b.get()) return 0;
    if (a->kind != b->kind) return kind_rank(a->kind) < kind_rank(b->kind) ? -1 : 1;
    switch (a->kind) {
        case ExprKind::Num:
            return a->num < b->num ? -1 : (a->num > b->num ? 1 : 0);
        case ExprKind::Gauge:
            return 0;
        case ExprKind::Var:
            return a->axis < b->axis ? -1 : (a->axis > b->axis ? 1 : 0);
        case ExprKind::Fun:
            if (a->fun != b->fun) return a->fun < b->fun ? -1 : 1;
            break;
        case ExprKind::Kernel:
            if (a->kernel.base != b->kernel.base) return a->kernel.base < b->kernel.base ? -1 : 1;
            if (a->kernel.deriv != b->kernel.deriv) return a->kernel.deriv < b->kernel.deriv ? -1 : 1;
            if (a->kernel.q != b->kernel.q) return a->kernel.q < b->kernel.q ? -1 : 1;
            break;
        case ExprKind::Delta:
            if (a->delta_order != b->delta_order) return a->delta_order < b->delta_order ? -1 : 1;
            break;
        case ExprKind::Pow:
            if (a->exponent != b->exponent) return a->exponent < b->exponent ? -1 : 1;
            break;
        case ExprKind::IdemLit:
            if (!(a->idem == b->idem)) return a->idem.period() < b->idem.period() ? -1 : 1;
            return 0;
        default:
            break;
    }
    if (a->kids.size() != b->kids.size()) return a->kids.size() < b->kids.size() ? -1 : 1;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (int c = cmp(a->kids[i], b->kids[i])) return c;
    return 0;
}

}  // namespace exprdet

inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) { return exprdet::cmp(a, b) == 0; }

// --- factories ---------------------------------------------------------------

inline ExprPtr make_num(double c) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Num;
    e->num = c == 0.0 ? 0.0 : c;  // normalize -0.0
    return e;
}

inline ExprPtr make_gauge() {
    static const ExprPtr g = [] {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Gauge;
        return e;
    }();
    return g;
}

inline ExprPtr make_var(int axis) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Var;
    e->axis = axis;
    return e;
}

inline bool is_num(const ExprPtr& e, double v) { return e->kind == ExprKind::Num && e->num == v; }

ExprPtr make_add(std::vector<ExprPtr> kids);
ExprPtr make_mul(std::vector<ExprPtr> kids);

inline ExprPtr make_pow(ExprPtr base, const QQ& exp) {
    if (exp == 0) return make_num(1.0);
    if (exp == 1) return base;
    if (base->kind == ExprKind::Num) {
        if (base->num == 0.0 && exp < 0)
            throw Error(err_not_invertible, "division by a zero literal");
        // Fold integer powers of constants; fractional powers of positive
        // constants fold through std::pow.
        if (denominator(exp) == 1) {
            const long long n = floor_ll(exp);
            double acc = 1.0, b = base->num;
            long long m = n < 0 ? -n : n;
            while (m) {
                if (m & 1) acc *= b;
                b *= b;
                m >>= 1;
            }
            return make_num(n < 0 ? 1.0 / acc : acc);
        }
        if (base->num > 0.0) return make_num(std::pow(base->num, to_double(exp)));
    }
    // (b^m)^s = b^(m*s) holds unconditionally for the positive gauge and
    // for integer s; a fractional s over an even m would lose the sign.
    if (base->kind == ExprKind::Pow &&
        (base->kids[0]->kind == ExprKind::Gauge || denominator(exp) == 1))
        return make_pow(base->kids[0], base->exponent * exp);
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Pow;
    e->exponent = exp;
    e->kids.push_back(std::move(base));
    return e;
}

inline ExprPtr make_alpha(const QQ& r) { return make_pow(make_gauge(), r); }

inline ExprPtr make_fun(FunTag f, ExprPtr arg) {
    if (arg->kind == ExprKind::Num) {
        switch (f) {
            case FunTag::Sin: return make_num(std::sin(arg->num));
            case FunTag::Cos: return make_num(std::cos(arg->num));
            case FunTag::Exp: return make_num(std::exp(arg->num));
            case FunTag::Atan: return make_num(std::atan(arg->num));
        }
    }
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Fun;
    e->fun = f;
    e->kids.push_back(std::move(arg));
    return e;
}

inline ExprPtr make_kernel(KernelSpec spec, ExprPtr arg) {
    // Step and Abs never carry a derivative count: their derivatives
    // rewrite into other family members at derivative time.
    if (spec.base != KernelBase::Rho) spec.deriv = 0;
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Kernel;
    e->kernel = spec;
    e->kids.push_back(std::move(arg));
    return e;
}

inline ExprPtr make_node(ExprKind kind, ExprPtr arg) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->kids.push_back(std::move(arg));
    return e;
}

inline ExprPtr make_delta(int order, ExprPtr arg) {
    if (order < 0) throw Error(err_bad_argument, "delta derivative order must be nonnegative");
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Delta;
    e->delta_order = order;
    e->kids.push_back(std::move(arg));
    return e;
}

inline ExprPtr make_idem(Idempotent i) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::IdemLit;
    e->idem = std::move(i);
    return e;
}

inline ExprPtr make_interleave(std::vector<ExprPtr> kids) {
    if (kids.size() < 2 || kids.size() % 2 != 0)
        throw Error(err_bad_argument,
                    "interleave takes idempotent/value pairs: interleave(e1, a1, e2, a2, ...)");
    for (std::size_t i = 0; i < kids.size(); i += 2)
        if (kids[i]->kind != ExprKind::IdemLit)
            throw Error(err_bad_argument, "interleave argument " + std::to_string(i + 1) +
                                              " must be an idempotent literal");
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Interleave;
    e->kids = std::move(kids);
    return e;
}

// Sum normalization: flatten, split each term into coefficient x core,
// merge equal cores, fold constants.
inline ExprPtr make_add(std::vector<ExprPtr> kids) {
    std::vector<std::pair<double, ExprPtr>> terms;  // coefficient, core (nullptr = constant)
    double constant = 0.0;
    auto absorb = [&](const ExprPtr& k, auto&& self) -> void {
        if (k->kind == ExprKind::Add) {
            for (const auto& kk : k->kids) self(kk, self);
            return;
        }
        if (k->kind == ExprKind::Num) {
            constant += k->num;
            return;
        }
        double coeff = 1.0;
        ExprPtr core = k;
        if (k->kind == ExprKind::Mul && !k->kids.empty() && k->kids[0]->kind == ExprKind::Num) {
            coeff = k->kids[0]->num;
            std::vector<ExprPtr> rest(k->kids.begin() + 1, k->kids.end());
            core = rest.size() == 1 ? rest[0] : [&] {
                auto m = std::make_shared<Expr>();
                m->kind = ExprKind::Mul;
                m->kids = rest;
                return ExprPtr(m);
            }();
        }
        if (core->kind == ExprKind::Add) {
            // Scalar multiple of a sum: distribute so like terms can cancel.
            for (const auto& kk : core->kids) self(make_mul({make_num(coeff), kk}), self);
            return;
        }
        for (auto& [c, t] : terms) {
            if (expr_equal(t, core)) {
                c += coeff;
                return;
            }
        }
        terms.push_back({coeff, core});
    };
    for (const auto& k : kids) absorb(k, absorb);
    std::vector<ExprPtr> out;
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return exprdet::cmp(a.second, b.second) < 0; });
    for (auto& [c, t] : terms) {
        if (c == 0.0) continue;
        out.push_back(c == 1.0 ? t : make_mul({make_num(c), t}));
    }
    if (constant != 0.0) out.insert(out.begin(), make_num(constant));
    if (out.empty()) return make_num(0.0);
    if (out.size() == 1) return out[0];
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Add;
    e->kids = std::move(out);
    return e;
}

// Product normalization: flatten, fold the numeric coefficient, group
// powers of equal bases, sort factors.
inline ExprPtr make_mul(std::vector<ExprPtr> kids) {
    double coeff = 1.0;
    std::vector<std::pair<ExprPtr, QQ>> factors;  // base, exponent
    auto absorb = [&](const ExprPtr& k, auto&& self) -> void {
        if (k->kind == ExprKind::Mul) {
            for (const auto& kk : k->kids) self(kk, self);
            return;
        }
        if (k->kind == ExprKind::Num) {
            coeff *= k->num;
            return;
        }
        ExprPtr base = k;
        QQ exp = 1;
        if (k->kind == ExprKind::Pow) {
            base = k->kids[0];
            exp = k->exponent;
        }
        for (auto& [b, x] : factors) {
            if (expr_equal(b, base)) {
                x += exp;
                return;
            }
        }
        factors.push_back({base, exp});
    };
    for (const auto& k : kids) absorb(k, absorb);
    if (coeff == 0.0) return make_num(0.0);
    std::vector<ExprPtr> out;
    std::sort(factors.begin(), factors.end(),
              [](const auto& a, const auto& b) { return exprdet::cmp(a.first, b.first) < 0; });
    for (auto& [b, x] : factors) {
        ExprPtr f = make_pow(b, x);
        if (f->kind == ExprKind::Num) {
            coeff *= f->num;
            continue;
        }
        out.push_back(f);
    }
    if (coeff == 0.0) return make_num(0.0);
    if (out.empty()) return make_num(coeff);
    if (coeff != 1.0) out.insert(out.begin(), make_num(coeff));
    if (out.size() == 1) return out[0];
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Mul;
    e->kids = std::move(out);
    return e;
}

inline ExprPtr make_sub(ExprPtr a, ExprPtr b) {
    return make_add({std::move(a), make_mul({make_num(-1.0), std::move(b)})});
}

inline ExprPtr make_div(ExprPtr a, ExprPtr b) {
    return make_mul({std::move(a), make_pow(std::move(b), QQ(-1))});
}

// --- symbolic derivative ------------------------------------------------------

/// Partial derivative along a spatial axis; the gauge symbol is a constant.
inline ExprPtr derivative(const ExprPtr& e, int axis) {
    switch (e->kind) {
        case ExprKind::Num:
        case ExprKind::Gauge:
        case ExprKind::IdemLit:
            return make_num(0.0);
        case ExprKind::Var:
            return make_num(e->axis == axis ? 1.0 : 0.0);
        case ExprKind::Add: {
            std::vector<ExprPtr> kids;
            for (const auto& k : e->kids) kids.push_back(derivative(k, axis));
            return make_add(std::move(kids));
        }
        case ExprKind::Mul: {
            std::vector<ExprPtr> terms;
            for (std::size_t i = 0; i < e->kids.size(); ++i) {
                std::vector<ExprPtr> fs = e->kids;
                fs[i] = derivative(e->kids[i], axis);
                terms.push_back(make_mul(std::move(fs)));
            }
            return make_add(std::move(terms));
        }
        case ExprKind::Pow: {
            const ExprPtr& b = e->kids[0];
            return make_mul({make_num(to_double(e->exponent)), make_pow(b, e->exponent - 1),
                             derivative(b, axis)});
        }
        case ExprKind::Fun: {
            const ExprPtr& u = e->kids[0];
            const ExprPtr du = derivative(u, axis);
            switch (e->fun) {
                case FunTag::Sin: return make_mul({make_fun(FunTag::Cos, u), du});
                case FunTag::Cos:
                    return make_mul({make_num(-1.0), make_fun(FunTag::Sin, u), du});
                case FunTag::Exp: return make_mul({e, du});
                case FunTag::Atan:
                    return make_mul(
                        {du, make_pow(make_add({make_num(1.0), make_pow(u, QQ(2))}), QQ(-1))});
            }
            break;
        }
        case ExprKind::Kernel: {
            const ExprPtr& u = e->kids[0];
            const ExprPtr du = derivative(u, axis);
            KernelSpec spec = e->kernel;
            switch (spec.base) {
                case KernelBase::Rho:
                    ++spec.deriv;
                    return make_mul({make_kernel(spec, u), du});
                case KernelBase::Step:
                    spec.base = KernelBase::Rho;
                    spec.deriv = 0;
                    return make_mul({make_kernel(spec, u), du});
                case KernelBase::Abs: {
                    // d/du |.|-kernel = smoothed sign = 2*step - 1.
                    KernelSpec st = spec;
                    st.base = KernelBase::Step;
                    return make_mul({make_add({make_mul({make_num(2.0), make_kernel(st, u)}),
                                               make_num(-1.0)}),
                                     du});
                }
            }
            break;
        }
        case ExprKind::Delta: {
            const ExprPtr& u = e->kids[0];
            return make_mul({make_delta(e->delta_order + 1, u), derivative(u, axis)});
        }
        case ExprKind::Heaviside: {
            const ExprPtr& u = e->kids[0];
            return make_mul({make_delta(0, u), derivative(u, axis)});
        }
        case ExprKind::SignFn: {
            const ExprPtr& u = e->kids[0];
            return make_mul({make_num(2.0), make_delta(0, u), derivative(u, axis)});
        }
        case ExprKind::AbsFn: {
            const ExprPtr& u = e->kids[0];
            return make_mul({make_node(ExprKind::SignFn, u), derivative(u, axis)});
        }
        case ExprKind::Quanta:
            // The quanta map has vanishing sharp derivative everywhere.
            return make_num(0.0);
        case ExprKind::Interleave: {
            std::vector<ExprPtr> kids;
            for (std::size_t i = 0; i < e->kids.size(); i += 2) {
                kids.push_back(e->kids[i]);
                kids.push_back(derivative(e->kids[i + 1], axis));
            }
            return make_interleave(std::move(kids));
        }
    }
    throw Error(err_bad_argument, "derivative: unhandled expression node");
}

// --- printing -----------------------------------------------------------------

namespace exprdet {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_qq(const QQ& r) {
    return denominator(r) == 1 ? numerator(r).str()
                               : numerator(r).str() + "/" + denominator(r).str();
}

// Precedence levels: additive 0, multiplicative 1, power 2, atom 3.
std::string print_prec(const ExprPtr& e, int parent_prec);

inline std::string print_call(const std::string& name, const std::vector<ExprPtr>& args,
                              std::size_t from = 0) {
    std::string s = name + "(";
    for (std::size_t i = from; i < args.size(); ++i) {
        if (i > from) s += ", ";
        s += print_prec(args[i], 0);
    }
    return s + ")";
}

inline std::string print_prec(const ExprPtr& e, int parent_prec) {
    auto wrap = [&](int prec, const std::string& s) {
        return prec < parent_prec ? "(" + s + ")" : s;
    };
    switch (e->kind) {
        case ExprKind::Num: {
            const std::string s = fmt_double(e->num);
            return e->num < 0 ? wrap(1, s) : s;
        }
        case ExprKind::Gauge:
            return "eps";
        case ExprKind::Var:
            return e->axis == 0 ? "x" : "t";
        case ExprKind::Add: {
            std::string s;
            for (std::size_t i = 0; i < e->kids.size(); ++i) {
                const ExprPtr& k = e->kids[i];
                if (i == 0) {
                    s += print_prec(k, 0);
                    continue;
                }
                // Render negative coefficients with a minus sign.
                if (k->kind == ExprKind::Num && k->num < 0) {
                    s += " - " + fmt_double(-k->num);
                } else if (k->kind == ExprKind::Mul && k->kids[0]->kind == ExprKind::Num &&
                           k->kids[0]->num < 0) {
                    std::vector<ExprPtr> rest = k->kids;
                    if (k->kids[0]->num == -1.0) {
                        rest.erase(rest.begin());
                    } else {
                        rest[0] = make_num(-k->kids[0]->num);
                    }
                    s += " - " + print_prec(make_mul(std::move(rest)), 1);
                } else {
                    s += " + " + print_prec(k, 1);
                }
            }
            return wrap(0, s);
        }
        case ExprKind::Mul: {
            std::string nums, dens;
            bool first = true;
            for (const auto& k : e->kids) {
                if (k->kind == ExprKind::Pow && k->exponent < 0 &&
                    k->kids[0]->kind != ExprKind::Gauge) {
                    // Successive "/piece" segments re-flatten on parse; a
                    // single parenthesized product would not.
                    dens += "/" + print_prec(make_pow(k->kids[0], -k->exponent), 2);
                    continue;
                }
                if (first && k->kind == ExprKind::Num) {
                    // The leading coefficient keeps its sign: the prefix
                    // position is unambiguous, and -1 prints as bare '-'.
                    nums = k->num == -1.0 ? "-" : fmt_double(k->num);
                    first = false;
                    continue;
                }
                if (!first && nums != "-") nums += "*";
                nums += print_prec(k, 2);
                first = false;
            }
            if (nums.empty()) nums = "1";
            if (nums == "-") nums = "-1";
            return wrap(1, nums + dens);
        }
        case ExprKind::Pow: {
            if (e->kids[0]->kind == ExprKind::Gauge) return "alpha(" + fmt_qq(e->exponent) + ")";
            return wrap(2, print_prec(e->kids[0], 3) + "^" + fmt_qq(e->exponent));
        }
        case ExprKind::Fun: {
            const char* name = e->fun == FunTag::Sin   ? "sin"
                               : e->fun == FunTag::Cos ? "cos"
                               : e->fun == FunTag::Exp ? "exp"
                                                       : "atan";
            return print_call(name, e->kids);
        }
        case ExprKind::Kernel: {
            const KernelSpec& k = e->kernel;
            if (k.base == KernelBase::Step) return print_call("Rho", e->kids);
            if (k.base == KernelBase::Abs) return print_call("abskernel", e->kids);
            if (k.deriv == 0) return print_call("rho", e->kids);
            return "rho(" + print_prec(e->kids[0], 0) + ", " + std::to_string(k.deriv) + ")";
        }
        case ExprKind::Delta:
            if (e->delta_order == 0) return print_call("delta", e->kids);
            return "delta(" + print_prec(e->kids[0], 0) + ", " +
                   std::to_string(e->delta_order) + ")";
        case ExprKind::Heaviside:
            return print_call("heaviside", e->kids);
        case ExprKind::SignFn:
            return print_call("sign", e->kids);
        case ExprKind::AbsFn:
            return print_call("abs", e->kids);
        case ExprKind::Quanta:
            return print_call("quanta", e->kids);
        case ExprKind::IdemLit:
            return "idem(\"\", \"" + e->idem.period() + "\")";
        case ExprKind::Interleave:
            return print_call("interleave", e->kids);
    }
    return "?";
}

}  // namespace exprdet

inline std::string print_expr(const ExprPtr& e) { return exprdet::print_prec(e, 0); }

}  // namespace gcalc
