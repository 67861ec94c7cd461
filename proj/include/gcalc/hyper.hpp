#pragma once
// Hypernaturals (index formulas over the lattice), hypersequence convergence
// witnesses, and the contraction fixed-point solver with its per-index
// iteration budget.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "gcalc/fit.hpp"
#include "gcalc/number.hpp"

namespace gcalc {

/// n(k) formula for one branch of a hypernatural. Affine is the catalog
/// shape max(1, ceil(a·k + b)); Pow2 covers witnesses that must outrun a
/// geometric target, n(k) = ceil(2^(a·k)) + b.
struct IndexFormula {
    enum class Kind { Affine, Pow2 };
    Kind kind = Kind::Affine;
    QQ a = QQ(0);
    QQ b = QQ(1);

    static constexpr std::uint64_t cap = std::uint64_t(1) << 62;

    std::uint64_t eval(int k) const {
        if (kind == Kind::Affine) {
            const QQ v = a * k + b;
            if (v > static_cast<long long>(cap)) return cap;
            const long long q = -floor_ll(-v);  // exact ceil
            return q < 1 ? 1 : static_cast<std::uint64_t>(q);
        }
        const double expo = to_double(a) * k;
        if (expo >= 62.0) return cap;
        return static_cast<std::uint64_t>(std::ceil(std::exp2(expo))) +
               static_cast<std::uint64_t>(floor_ll(b));
    }
};

/// Generalized number with natural representatives: an interleaving of index
/// formulas. Moderate by construction (the evaluation is capped).
class HyperNatural {
public:
    HyperNatural() { parts_.push_back({Idempotent::all_ones(), IndexFormula{}}); }

    static HyperNatural affine(const QQ& a, const QQ& b) {
        if (a < 0) throw Error(err_bad_argument, "affine index formula needs a >= 0");
        HyperNatural n;
        n.parts_[0].second = IndexFormula{IndexFormula::Kind::Affine, a, b};
        return n;
    }
    static HyperNatural pow2(const QQ& rate, long long plus) {
        if (!(rate > 0) || plus < 0)
            throw Error(err_bad_argument, "power index formula needs rate > 0 and plus >= 0");
        HyperNatural n;
        n.parts_[0].second = IndexFormula{IndexFormula::Kind::Pow2, rate, QQ(plus)};
        return n;
    }
    static HyperNatural constant(long long n0) { return affine(QQ(0), QQ(n0)); }
    static HyperNatural interleave(std::vector<std::pair<Idempotent, IndexFormula>> parts) {
        if (parts.empty()) throw Error(err_bad_argument, "hypernatural needs at least one part");
        HyperNatural n;
        n.parts_ = std::move(parts);
        return n;
    }

    std::uint64_t operator()(int k) const {
        for (const auto& [e, f] : parts_)
            if (e.bit(k)) return f.eval(k);
        return 1;
    }

    const std::vector<std::pair<Idempotent, IndexFormula>>& parts() const { return parts_; }
    bool affine_only() const {
        for (const auto& [e, f] : parts_)
            if (f.kind != IndexFormula::Kind::Affine) return false;
        return true;
    }

private:
    std::vector<std::pair<Idempotent, IndexFormula>> parts_;
};

/// Hypersequence of numbers presented by samples: element n at lattice
/// index k.
using HyperSequence = std::function<double(std::uint64_t, int)>;

namespace hyperdet {

/// |s(n)(k) − limit(k)| ≤ 2^(−rk) for every k in the tested range and every
/// frontier multiple of n₀.
inline bool witness_verifies(const HyperSequence& s, const std::function<double(int)>& limit,
                             const QQ& r, const HyperNatural& n0, const Config& cfg) {
    const double rd = to_double(r);
    for (int k = 1; k <= cfg.lattice_depth; ++k) {
        const std::uint64_t base = n0(k);
        const double bound = std::exp2(-rd * k);
        for (const std::uint64_t n :
             {base, base + 1, base * 2, base * 4, base * 16, base * 256}) {
            const std::uint64_t nn = n < base ? IndexFormula::cap : n;  // overflow clamp
            if (!(std::fabs(s(nn, k) - limit(k)) <= bound)) return false;
        }
    }
    return true;
}

/// Smallest n whose whole probe frontier stays within the bound at index k.
inline std::uint64_t required_index(const HyperSequence& s, const std::function<double(int)>& limit,
                                    double bound, int k) {
    auto good = [&](std::uint64_t n) {
        for (const std::uint64_t p : {n, n + 1, 2 * n, 4 * n})
            if (!(std::fabs(s(p < n ? IndexFormula::cap : p, k) - limit(k)) <= bound))
                return false;
        return true;
    };
    std::uint64_t hi = 1;
    while (!good(hi)) {
        if (hi >= IndexFormula::cap / 4) return IndexFormula::cap;
        hi *= 2;
    }
    std::uint64_t lo = hi / 2;  // lo fails (or is 0), hi passes
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (good(mid) ? hi : lo) = mid;
    }
    return hi;
}

inline QQ rational_above(double v, long long den = 1 << 16) {
    return QQ(static_cast<long long>(std::ceil(v * static_cast<double>(den))), den);
}

}  // namespace hyperdet

/// Finds a hypernatural n₀ past which the tested frontier of the sequence
/// stays inside V_r of the limit. Candidates are fitted to the measured
/// required indices: constant, affine in k, then the power form; each is
/// verified before being returned.
inline HyperNatural hyperseq_limit(const HyperSequence& s, const std::function<double(int)>& limit,
                                   const QQ& r, const Config& cfg = default_config()) {
    const double rd = to_double(r);
    std::vector<double> ks, reqs;
    std::uint64_t max_req = 1;
    for (int k = 2; k <= cfg.lattice_depth; k += 2) {
        const std::uint64_t need =
            hyperdet::required_index(s, limit, std::exp2(-rd * k), k);
        max_req = std::max(max_req, need);
        ks.push_back(static_cast<double>(k));
        reqs.push_back(static_cast<double>(need));
    }

    std::vector<HyperNatural> candidates;
    candidates.push_back(HyperNatural::constant(static_cast<long long>(
        std::min<std::uint64_t>(max_req + 1, 1'000'000))));
    {  // affine majorant of the required indices
        double slope = 0.0;
        for (std::size_t i = 0; i < ks.size(); ++i)
            slope = std::max(slope, reqs[i] / ks[i]);
        if (slope < 1e12)
            candidates.push_back(
                HyperNatural::affine(hyperdet::rational_above(slope), QQ(2)));
    }
    {  // geometric growth: fit log2(required) against k
        std::vector<double> lg;
        for (double v : reqs) lg.push_back(std::log2(std::max(v, 1.0)));
        const LineFit f = fit_line(ks, lg);
        if (f.ok && f.slope > 1e-3) {
            const QQ rate = hyperdet::rational_above(f.slope * 1.02);
            candidates.push_back(HyperNatural::pow2(rate, 2));
        }
    }
    for (const auto& cand : candidates)
        if (hyperdet::witness_verifies(s, limit, r, cand, cfg)) return cand;
    throw Error(err_no_witness, "no convergence witness up to the search bound");
}

/// Fixed point of a per-index λ-contraction. Iterates exactly
/// n₀(k) = 2·floor((t/|ln λ|)·k·ln 2) times at index k, so λ^(n₀(k)) is
/// within 2^(−2kt): successive frontier iterates land inside V_t.
struct FixedPointResult {
    GeneralizedNumber point;
    HyperNatural witness;      // affine majorant of the executed iteration counts
    double lambda = 0.0;
    QQ t = QQ(1);
};

/// Exact iteration budget at index k.
inline std::uint64_t contraction_steps(double lambda, const QQ& t, int k) {
    const double raw =
        (to_double(t) / std::fabs(std::log(lambda))) * static_cast<double>(k) * std::log(2.0);
    return 2 * static_cast<std::uint64_t>(std::floor(raw));
}

inline FixedPointResult fixed_point_solve(const std::function<double(double, int)>& T,
                                          double lambda, const QQ& t, double seed,
                                          const Config& cfg = default_config()) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw Error(err_bad_argument, "contraction factor must lie in (0,1)");
    if (!(t > 0)) throw Error(err_bad_argument, "neighborhood exponent must be positive");

    // Contraction spot-check on sampled pairs around the seed.
    for (const int k : {8, cfg.lattice_depth / 2, cfg.lattice_depth}) {
        const double probes[] = {seed - 0.5, seed - 0.1, seed, seed + 0.3, seed + 0.5};
        for (double x : probes)
            for (double y : probes) {
                if (x == y) continue;
                const double lhs = std::fabs(T(x, k) - T(y, k));
                if (!(lhs <= lambda * std::fabs(x - y) * (1.0 + 1e-9)))
                    throw Error(err_bad_argument,
                                "contraction spot-check failed on sampled pairs");
            }
    }

    const std::uint64_t budget = 100'000'000;
    std::vector<double> samples(static_cast<std::size_t>(cfg.lattice_depth));
    for (int k = 1; k <= cfg.lattice_depth; ++k) {
        const std::uint64_t n = std::max<std::uint64_t>(contraction_steps(lambda, t, k), 1);
        if (n > budget) throw Error(err_bad_argument, "iteration budget exceeded");
        double x = seed;
        for (std::uint64_t i = 0; i < n; ++i) x = T(x, k);
        if (!std::isfinite(x))
            throw Error(err_domain, "iteration left the representable range");
        samples[static_cast<std::size_t>(k - 1)] = x;
    }

    FixedPointResult out;
    out.point = GeneralizedNumber::from_samples(samples, {});
    out.lambda = lambda;
    out.t = t;
    const double a = 2.0 * to_double(t) * std::log(2.0) / std::fabs(std::log(lambda));
    out.witness = HyperNatural::affine(hyperdet::rational_above(a), QQ(0));
    return out;
}

/// Membership test for the sharp neighborhood V_t around 0, applied to a
/// sampled difference. The certification floors at the double-precision
/// roundoff of the supplied scale: samples cannot witness decay below it.
inline bool within_v(const GeneralizedNumber& d, const QQ& t, double scale = 1.0,
                     const Config& cfg = default_config()) {
    const double td = to_double(t);
    const double floor_ = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, scale);
    for (int k = 1; k <= cfg.lattice_depth; ++k)
        if (!(std::fabs(d.sample(k)) <= std::max(std::exp2(-td * k), floor_))) return false;
    return true;
}

}  // namespace gcalc
