#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gcalc/config.hpp"
#include "gcalc/error.hpp"
#include "gcalc/fit.hpp"
#include "gcalc/gauge.hpp"
#include "gcalc/idempotent.hpp"
#include "gcalc/rational.hpp"
#include "gcalc/trig.hpp"

namespace gcalc {

enum class Tier { Exact, Empirical };

/// Valuation V(x) = sup{ r : |x| < eps^r eventually }, reported either
/// exactly (rational or +infinity), as a certified lower bound (truncation
/// hid the tail), or as a regression estimate on the empirical tier.
struct Valuation {
    enum class Kind { Exact, LowerBound, Empirical };
    Kind kind = Kind::Exact;
    bool infinite = false;
    QQ exact = 0;            // meaningful when !infinite && kind != Empirical
    double estimate = 0.0;   // double view in every case
    double tolerance = 0.0;  // reported tolerance of empirical estimates

    bool is_exact() const { return kind == Kind::Exact; }

    static Valuation exactly(QQ v) {
        Valuation r;
        r.kind = Kind::Exact;
        r.exact = std::move(v);
        r.estimate = to_double(r.exact);
        return r;
    }
    static Valuation exactly_infinite() {
        Valuation r;
        r.kind = Kind::Exact;
        r.infinite = true;
        r.estimate = std::numeric_limits<double>::infinity();
        return r;
    }
    static Valuation lower_bound(QQ v) {
        Valuation r = exactly(std::move(v));
        r.kind = Kind::LowerBound;
        return r;
    }
    static Valuation empirical(double est, double tol) {
        Valuation r;
        r.kind = Kind::Empirical;
        r.estimate = est;
        r.tolerance = tol;
        return r;
    }
    static Valuation empirical_infinite(double tol) {
        Valuation r = empirical(std::numeric_limits<double>::infinity(), tol);
        r.infinite = true;
        return r;
    }
};

enum class Compare { EQ, LE, GE, INCOMPARABLE };

struct Part {
    Idempotent idem;
    Branch branch;
};

/// Element of the ring of generalized reals: a complete orthogonal
/// interleaving of branches indexed by idempotents. Purely symbolic inputs
/// stay on the exact tier; operations that leave the exact catalog demote
/// the result to a sampled net over k = 1..depth with a warning.
class GeneralizedNumber {
public:
    GeneralizedNumber() { parts_.push_back({Idempotent::all_ones(), Branch::zero()}); }

    static GeneralizedNumber zero() { return GeneralizedNumber(); }
    static GeneralizedNumber from_branch(Branch b) {
        GeneralizedNumber x;
        x.parts_.clear();
        x.parts_.push_back({Idempotent::all_ones(), std::move(b)});
        return x;
    }
    static GeneralizedNumber from_real(double c) { return from_branch(Branch::constant(c)); }
    static GeneralizedNumber one() { return from_real(1.0); }
    static GeneralizedNumber alpha(const QQ& r) { return from_branch(Branch::alpha(r)); }
    /// Characteristic net of e: 1 on the 1-set of e, 0 elsewhere.
    static GeneralizedNumber from_idem(const Idempotent& e) {
        if (e.is_zero()) return zero();
        if (e.is_one()) return one();
        GeneralizedNumber x;
        x.parts_.clear();
        x.parts_.push_back({e, Branch::constant(1.0)});
        x.parts_.push_back({~e, Branch::zero()});
        x.canonicalize();
        return x;
    }
    static GeneralizedNumber from_samples(std::vector<double> samples,
                                          std::vector<std::string> warnings = {}) {
        GeneralizedNumber x;
        x.parts_.clear();
        x.tier_ = Tier::Empirical;
        x.samples_ = std::move(samples);
        x.warnings_ = std::move(warnings);
        return x;
    }

    Tier tier() const { return tier_; }
    bool is_exact_tier() const { return tier_ == Tier::Exact; }
    const std::vector<Part>& parts() const { return parts_; }
    const std::vector<double>& samples() const { return samples_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    void add_warning(const std::string& w) {
        if (std::find(warnings_.begin(), warnings_.end(), w) == warnings_.end())
            warnings_.push_back(w);
    }

    /// Net value at lattice index k (exact tier evaluates the branch active
    /// at k; empirical tier reads the stored sample).
    double sample(int k) const {
        if (tier_ == Tier::Empirical) {
            if (k < 1 || k > static_cast<int>(samples_.size()))
                throw Error(err_bad_argument, "sample index outside stored range");
            return samples_[static_cast<std::size_t>(k - 1)];
        }
        for (const auto& p : parts_)
            if (p.idem.bit(k)) return p.branch.eval(k);
        return 0.0;
    }

    std::vector<double> sample_net(int depth) const {
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(depth));
        for (int k = 1; k <= depth; ++k) out.push_back(sample(k));
        return out;
    }

    /// Forgets the symbolic representation: sampled net plus warning flag.
    GeneralizedNumber demoted(const Config& cfg, const std::string& reason) const {
        if (tier_ == Tier::Empirical) return *this;
        GeneralizedNumber x = from_samples(sample_net(cfg.lattice_depth), warnings_);
        x.add_warning(reason);
        return x;
    }

    bool is_exact_zero() const {
        if (tier_ != Tier::Exact) return false;
        for (const auto& p : parts_)
            if (!p.branch.is_exact_zero()) return false;
        return true;
    }

    /// No nonzero term is known on any branch (zero or hidden by truncation).
    bool is_zero_like() const {
        if (tier_ != Tier::Exact) return false;
        for (const auto& p : parts_)
            if (!p.branch.is_zero_like()) return false;
        return true;
    }

    /// Smallest truncation order across branches (infinite for exact data).
    RatInf order() const {
        RatInf o = RatInf::infinity();
        for (const auto& p : parts_) o = min(o, p.branch.order());
        return o;
    }

    bool single_branch() const { return tier_ == Tier::Exact && parts_.size() == 1; }
    const Branch& only_branch() const {
        if (!single_branch()) throw Error(err_bad_argument, "number is not single-branch");
        return parts_.front().branch;
    }

    friend bool operator==(const GeneralizedNumber& a, const GeneralizedNumber& b) {
        if (a.tier_ != b.tier_) return false;
        if (a.tier_ == Tier::Empirical) return a.samples_ == b.samples_;
        if (a.parts_.size() != b.parts_.size()) return false;
        for (std::size_t i = 0; i < a.parts_.size(); ++i)
            if (!(a.parts_[i].idem == b.parts_[i].idem) || !(a.parts_[i].branch == b.parts_[i].branch))
                return false;
        return true;
    }

    GeneralizedNumber operator-() const {
        GeneralizedNumber r = *this;
        if (r.tier_ == Tier::Empirical) {
            for (double& v : r.samples_) v = -v;
        } else {
            for (auto& p : r.parts_) p.branch = -p.branch;
        }
        return r;
    }

    friend GeneralizedNumber add(const GeneralizedNumber& a, const GeneralizedNumber& b,
                                 const Config& cfg = default_config()) {
        return binary_op(a, b, cfg, BinOp::Add);
    }
    friend GeneralizedNumber sub(const GeneralizedNumber& a, const GeneralizedNumber& b,
                                 const Config& cfg = default_config()) {
        return binary_op(a, -b, cfg, BinOp::Add);
    }
    friend GeneralizedNumber mul(const GeneralizedNumber& a, const GeneralizedNumber& b,
                                 const Config& cfg = default_config()) {
        return binary_op(a, b, cfg, BinOp::Mul);
    }

    GeneralizedNumber scaled(double c, const Config& cfg = default_config()) const {
        GeneralizedNumber r = *this;
        if (r.tier_ == Tier::Empirical) {
            for (double& v : r.samples_) v *= c;
        } else {
            for (auto& p : r.parts_) p.branch = p.branch.scaled(c, cfg);
            r.canonicalize();
        }
        return r;
    }

    friend Valuation valuation(const GeneralizedNumber& x, const Config& cfg = default_config()) {
        if (x.tier_ == Tier::Empirical) {
            const int depth = static_cast<int>(x.samples_.size());
            Config window_cfg = cfg;
            window_cfg.lattice_depth = depth;
            const SlopeEstimate est =
                estimate_decay(x.samples_, window_cfg.window_start(), depth);
            if (est.all_zero) return Valuation::empirical_infinite(cfg.valuation_tol);
            if (!est.ok) throw Error(err_valuation_not_exact, "too few usable samples for regression");
            return Valuation::empirical(est.exponent, cfg.valuation_tol);
        }
        RatInf v = RatInf::infinity();
        bool exact = true;
        for (const auto& p : x.parts_) {
            const RatInf lb = p.branch.valuation_lower_bound();
            if (lb < v) {
                v = lb;
                exact = p.branch.valuation_is_exact();
            } else if (lb == v && !exact) {
                exact = p.branch.valuation_is_exact();
            }
        }
        if (v.is_infinite()) return Valuation::exactly_infinite();
        return exact ? Valuation::exactly(v.value()) : Valuation::lower_bound(v.value());
    }

    /// Ultrametric norm e^(-V(x)); 0 for the zero element.
    friend double norm(const GeneralizedNumber& x, const Config& cfg = default_config()) {
        const Valuation v = valuation(x, cfg);
        if (v.infinite) return 0.0;
        return std::exp(-v.estimate);
    }

    friend Compare compare(const GeneralizedNumber& a, const GeneralizedNumber& b,
                           const Config& cfg = default_config()) {
        const GeneralizedNumber d = sub(a, b, cfg);
        bool le = true, ge = true, eq = true;
        if (d.tier_ == Tier::Empirical) {
            Config window_cfg = cfg;
            window_cfg.lattice_depth = static_cast<int>(d.samples_.size());
            for (int k = window_cfg.window_start(); k <= window_cfg.lattice_depth; ++k) {
                const double v = d.samples_[static_cast<std::size_t>(k - 1)];
                if (v != 0.0) eq = false;
                if (v > 0.0) le = false;
                if (v < 0.0) ge = false;
            }
            if (eq) return Compare::EQ;
        } else {
            eq = false;
            if (d.is_exact_zero()) return Compare::EQ;
            for (const auto& p : d.parts_) {
                switch (p.branch.eventual_sign()) {
                    case Sign::Zero: break;
                    case Sign::Positive: le = false; break;
                    case Sign::Negative: ge = false; break;
                    case Sign::Indeterminate: le = ge = false; break;
                }
            }
        }
        if (le && ge) return Compare::EQ;
        if (ge) return Compare::GE;
        if (le) return Compare::LE;
        return Compare::INCOMPARABLE;
    }

    /// x and y share shadow-scale behavior: V(x - y) > 0.
    friend bool associated(const GeneralizedNumber& a, const GeneralizedNumber& b,
                           const Config& cfg = default_config()) {
        const Valuation v = valuation(sub(a, b, cfg), cfg);
        if (v.infinite) return true;
        if (v.kind == Valuation::Kind::Empirical) return v.estimate > v.tolerance;
        if (v.exact > 0) return true;  // exact or certified lower bound above zero
        if (v.kind == Valuation::Kind::Exact) return false;
        throw Error(err_undecidable_exact, "association undecidable at this truncation order");
    }

    friend bool is_infinitesimal(const GeneralizedNumber& x, const Config& cfg = default_config()) {
        return associated(x, zero(), cfg);
    }

    /// Some branch grows without bound (negative exact leading exponent).
    friend bool is_infinite_element(const GeneralizedNumber& x,
                                    const Config& cfg = default_config()) {
        if (x.tier_ == Tier::Empirical) {
            const Valuation v = valuation(x, cfg);
            return !v.infinite && v.estimate < -v.tolerance;
        }
        for (const auto& p : x.parts_) {
            const RatInf lb = p.branch.valuation_lower_bound();
            if (lb.is_finite() && lb.value() < 0 && p.branch.valuation_is_exact()) return true;
        }
        return false;
    }

    /// Classical limit of the net when it exists: every branch must converge
    /// and all limits must agree.
    friend std::optional<double> shadow(const GeneralizedNumber& x,
                                        const Config& cfg = default_config()) {
        if (x.tier_ == Tier::Empirical) {
            const Valuation v = valuation(x, cfg);
            if (v.infinite || v.estimate > v.tolerance) return 0.0;
            if (v.estimate < -v.tolerance) return std::nullopt;
            // Valuation near zero: either convergence to a nonzero limit or
            // a bounded oscillation. Convergent iff deviations from the
            // deepest sample still decay.
            Config window_cfg = cfg;
            window_cfg.lattice_depth = static_cast<int>(x.samples_.size());
            const double last = x.samples_.back();
            std::vector<double> deviation;
            for (double s : x.samples_) deviation.push_back(s - last);
            const SlopeEstimate dev = estimate_decay(deviation, window_cfg.window_start(),
                                                     window_cfg.lattice_depth - 1);
            if (!dev.all_zero && !(dev.ok && dev.exponent > v.tolerance)) return std::nullopt;
            double acc = 0.0;
            int n = 0;
            for (int k = window_cfg.window_start(); k <= window_cfg.lattice_depth; ++k, ++n)
                acc += x.samples_[static_cast<std::size_t>(k - 1)];
            return n ? std::optional<double>(acc / n) : std::nullopt;
        }
        std::optional<double> agreed;
        for (const auto& p : x.parts_) {
            const std::optional<double> lim = branch_limit(p.branch);
            if (!lim) return std::nullopt;
            if (agreed && *agreed != *lim) return std::nullopt;
            agreed = lim;
        }
        return agreed;
    }

    // --- invertibility and the idempotent decomposition ---

    enum class BranchClass { Zero, TruncatedZero, Invertible, Oscillatory };

    static BranchClass classify_branch(const Branch& b) {
        if (b.is_exact_zero()) return BranchClass::Zero;
        if (b.is_zero_like()) return BranchClass::TruncatedZero;
        if (!b.poly().has_terms()) return BranchClass::Oscillatory;
        const QQ lead = b.poly().leading().exp;
        for (const auto& t : b.trig())
            if (t.amplitude.valuation_lower_bound() <= RatInf(lead)) return BranchClass::Oscillatory;
        return BranchClass::Invertible;
    }

    /// True iff every branch has a nonzero expansion leading coefficient and
    /// no oscillation at or below it. Oscillatory leading behavior is
    /// refused rather than guessed.
    friend bool is_invertible(const GeneralizedNumber& x, const Config& cfg = default_config()) {
        if (x.tier_ == Tier::Empirical)
            throw Error(err_undecidable_exact, "invertibility requires the exact tier");
        (void)cfg;
        bool all = true;
        for (const auto& p : x.parts_) {
            switch (classify_branch(p.branch)) {
                case BranchClass::Invertible: break;
                case BranchClass::Zero: all = false; break;
                case BranchClass::TruncatedZero:
                    throw Error(err_undecidable_exact,
                                "branch indistinguishable from zero at its truncation order");
                case BranchClass::Oscillatory:
                    throw Error(err_undecidable_exact,
                                "oscillatory leading part: invertibility undecidable in exact tier");
            }
        }
        return all;
    }

    /// Union of the exactly-zero branches: a witness e != 0 with e*x = 0,
    /// when one exists.
    friend std::optional<Idempotent> zero_divisor_witness(const GeneralizedNumber& x) {
        if (x.tier_ == Tier::Empirical)
            throw Error(err_undecidable_exact, "witness extraction requires the exact tier");
        Idempotent e = Idempotent::all_zeros();
        for (const auto& p : x.parts_)
            if (classify_branch(p.branch) == BranchClass::Zero) e = e | p.idem;
        if (e.is_zero()) return std::nullopt;
        return e;
    }

    /// Union of the invertible branches: the largest e with e*x invertible
    /// inside e*R.
    friend Idempotent invertible_part(const GeneralizedNumber& x) {
        if (x.tier_ == Tier::Empirical)
            throw Error(err_undecidable_exact, "witness extraction requires the exact tier");
        Idempotent e = Idempotent::all_zeros();
        for (const auto& p : x.parts_)
            if (classify_branch(p.branch) == BranchClass::Invertible) e = e | p.idem;
        return e;
    }

    friend GeneralizedNumber invert(const GeneralizedNumber& x, const Config& cfg = default_config()) {
        if (x.tier_ == Tier::Empirical)
            throw Error(err_undecidable_exact, "inversion requires the exact tier");
        GeneralizedNumber r = x;
        for (auto& p : r.parts_) {
            switch (classify_branch(p.branch)) {
                case BranchClass::Invertible: p.branch = invert_branch(p.branch, cfg); break;
                case BranchClass::Zero:
                    throw Error(err_not_invertible,
                                "zero branch on idempotent with period " + p.idem.period());
                case BranchClass::TruncatedZero:
                    throw Error(err_undecidable_exact,
                                "branch indistinguishable from zero at its truncation order");
                case BranchClass::Oscillatory:
                    throw Error(err_undecidable_exact,
                                "oscillatory leading part: invertibility undecidable in exact tier");
            }
        }
        r.canonicalize();
        return r;
    }

    /// e*x: keeps x on the 1-set of e and is zero elsewhere.
    friend GeneralizedNumber restrict_to(const Idempotent& e, const GeneralizedNumber& x,
                                         const Config& cfg = default_config()) {
        return mul(from_idem(e), x, cfg);
    }

    /// Puts inverses on the invertible branches and zero elsewhere; the
    /// element y with x*y = invertible_part(x).
    friend GeneralizedNumber partial_inverse(const GeneralizedNumber& x,
                                             const Config& cfg = default_config()) {
        if (x.tier_ == Tier::Empirical)
            throw Error(err_undecidable_exact, "inversion requires the exact tier");
        GeneralizedNumber r = x;
        for (auto& p : r.parts_) {
            if (classify_branch(p.branch) == BranchClass::Invertible)
                p.branch = invert_branch(p.branch, cfg);
            else
                p.branch = Branch::zero();
        }
        r.canonicalize();
        return r;
    }

    /// Sum over a complete orthogonal family of (idempotent, value) parts.
    static GeneralizedNumber interleave(const std::vector<std::pair<Idempotent, GeneralizedNumber>>& parts,
                                        const Config& cfg = default_config()) {
        validate_family_of(parts);
        GeneralizedNumber acc = zero();
        for (const auto& [e, v] : parts) acc = add(acc, restrict_to(e, v, cfg), cfg);
        return acc;
    }

private:
    enum class BinOp { Add, Mul };

    static GeneralizedNumber binary_op(const GeneralizedNumber& a, const GeneralizedNumber& b,
                                       const Config& cfg, BinOp op) {
        if (a.tier_ == Tier::Empirical || b.tier_ == Tier::Empirical) return sampled_op(a, b, cfg, op);
        GeneralizedNumber r;
        r.parts_.clear();
        for (const auto& pa : a.parts_)
            for (const auto& pb : b.parts_) {
                Idempotent g = pa.idem & pb.idem;
                if (g.is_zero()) continue;
                std::optional<Branch> combined =
                    op == BinOp::Add ? Branch::add(pa.branch, pb.branch, cfg)
                                     : Branch::mul(pa.branch, pb.branch, cfg);
                if (!combined) {
                    GeneralizedNumber s = sampled_op(a, b, cfg, op);
                    s.add_warning("incompatible trig base rates; result demoted to empirical tier");
                    return s;
                }
                r.parts_.push_back({std::move(g), std::move(*combined)});
            }
        r.warnings_ = merge_warnings(a.warnings_, b.warnings_);
        r.canonicalize();
        return r;
    }

    static GeneralizedNumber sampled_op(const GeneralizedNumber& a, const GeneralizedNumber& b,
                                        const Config& cfg, BinOp op) {
        int depth = cfg.lattice_depth;
        if (a.tier_ == Tier::Empirical) depth = std::min(depth, static_cast<int>(a.samples_.size()));
        if (b.tier_ == Tier::Empirical) depth = std::min(depth, static_cast<int>(b.samples_.size()));
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(depth));
        for (int k = 1; k <= depth; ++k) {
            const double va = a.sample(k), vb = b.sample(k);
            out.push_back(op == BinOp::Add ? va + vb : va * vb);
        }
        return from_samples(std::move(out), merge_warnings(a.warnings_, b.warnings_));
    }

    static std::vector<std::string> merge_warnings(const std::vector<std::string>& a,
                                                   const std::vector<std::string>& b) {
        std::vector<std::string> out = a;
        for (const auto& w : b)
            if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
        return out;
    }

    static std::optional<double> branch_limit(const Branch& b) {
        const RatInf lb = b.valuation_lower_bound();
        if (lb.is_infinite()) return 0.0;
        if (lb.value() > 0) return 0.0;  // certified decay, even if only a bound
        if (!b.valuation_is_exact())
            return std::nullopt;  // unknown tail at or below the constant scale
        if (lb.value() < 0) return std::nullopt;
        // Valuation exactly zero: a constant term plus decay, unless an
        // oscillation survives at the constant scale.
        for (const auto& t : b.trig())
            if (t.amplitude.valuation_lower_bound() == RatInf(QQ(0))) return std::nullopt;
        return b.poly().coeff_at(QQ(0));
    }

    static Branch invert_branch(const Branch& b, const Config& cfg) {
        const QQ a = b.poly().leading().exp;
        const double c = b.poly().leading().coeff;
        const QQ window = cfg.order_window;
        const Branch unit_inv(GaugeExpansion::monomial(1.0 / c, -a));
        Branch u = *Branch::mul(b, unit_inv, cfg);
        u = *Branch::add(u, Branch::constant(-1.0), cfg);
        const bool monomial_case = u.is_exact_zero();
        u = u.truncated(RatInf(window));

        Branch series = Branch::constant(1.0);
        if (!u.is_zero_like()) {
            Branch power = Branch::constant(1.0);
            const Branch neg_u = -u;
            RatInf achieved{window};
            for (int n = 1; n <= 4 * cfg.term_cap; ++n) {
                power = Branch::mul(power, neg_u, cfg)->truncated(RatInf(window));
                if (power.is_zero_like()) {
                    achieved = min(achieved, power.order());
                    break;
                }
                series = *Branch::add(series, power, cfg);
                achieved = power.valuation_lower_bound() + u.valuation_lower_bound();
            }
            series = series.truncated(min(RatInf(window), achieved));
        }
        Branch out = *Branch::mul(series, unit_inv, cfg);
        RatInf from_operand = b.order().is_finite() ? RatInf(b.order().value() - 2 * a)
                                                    : RatInf::infinity();
        RatInf from_series = monomial_case ? RatInf::infinity() : RatInf(cfg.order_window - a);
        return out.truncated(min(from_operand, from_series));
    }

    /// Merges parts with identical branches, drops empty idempotents, and
    /// sorts by first 1-index (unique within an orthogonal family).
    void canonicalize() {
        std::vector<Part> out;
        for (auto& p : parts_) {
            if (p.idem.is_zero()) continue;
            bool merged = false;
            for (auto& q : out)
                if (q.branch == p.branch) {
                    q.idem = q.idem | p.idem;
                    merged = true;
                    break;
                }
            if (!merged) out.push_back(std::move(p));
        }
        if (out.empty()) out.push_back({Idempotent::all_ones(), Branch::zero()});
        std::sort(out.begin(), out.end(),
                  [](const Part& a, const Part& b) { return a.idem.first_one() < b.idem.first_one(); });
        parts_ = std::move(out);
    }

    static void validate_family_of(const std::vector<std::pair<Idempotent, GeneralizedNumber>>& parts) {
        Idempotent acc = Idempotent::all_zeros();
        for (std::size_t i = 0; i < parts.size(); ++i) {
            for (std::size_t j = i + 1; j < parts.size(); ++j)
                if (!(parts[i].first & parts[j].first).is_zero())
                    throw Error(err_family_incomplete, "idempotent family is not orthogonal");
            acc = acc | parts[i].first;
        }
        if (!acc.is_one()) throw Error(err_family_incomplete, "idempotent family does not cover the lattice");
    }

    Tier tier_ = Tier::Exact;
    std::vector<Part> parts_;        // exact tier: complete orthogonal family
    std::vector<double> samples_;    // empirical tier: k = 1..size
    std::vector<std::string> warnings_;
};

/// Validates completeness and orthogonality, then reports the transition
/// measure nu(e) = asymptotic density of each 1-set. Densities sum to 1.
inline std::vector<QQ> transition_measure(const std::vector<Idempotent>& family) {
    Idempotent acc = Idempotent::all_zeros();
    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = i + 1; j < family.size(); ++j)
            if (!(family[i] & family[j]).is_zero())
                throw Error(err_family_incomplete, "idempotent family is not orthogonal");
        acc = acc | family[i];
    }
    if (!acc.is_one()) throw Error(err_family_incomplete, "idempotent family does not cover the lattice");
    std::vector<QQ> out;
    out.reserve(family.size());
    for (const auto& e : family) out.push_back(e.density());
    return out;
}

}  // namespace gcalc
