#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "gcalc/error.hpp"
#include "gcalc/rational.hpp"

namespace gcalc {

/// Characteristic net of an eventually periodic index set, i.e. an
/// idempotent of the ring. Only germ behavior matters (agreement for all
/// sufficiently large k), so the canonical form has an empty preperiod: a
/// minimal period aligned so that index k reads period[(k-1) mod n]. The
/// preperiod argument exists for input convenience and is erased on
/// canonicalization.
class Idempotent {
public:
    Idempotent() : period_("0") {}

    Idempotent(const std::string& preperiod, const std::string& period) {
        validate_bits(preperiod);
        validate_bits(period);
        if (period.empty()) throw Error(err_bad_argument, "idempotent with empty period");
        period_ = align(preperiod, period);
        minimize();
    }

    static Idempotent all_ones() { return Idempotent("", "1"); }
    static Idempotent all_zeros() { return Idempotent("", "0"); }

    /// Membership of lattice index k >= 1.
    bool bit(long long k) const {
        const auto n = static_cast<long long>(period_.size());
        return period_[static_cast<std::size_t>((k - 1) % n)] == '1';
    }

    const std::string& period() const { return period_; }

    bool is_zero() const { return period_ == "0"; }
    bool is_one() const { return period_ == "1"; }
    /// Both the 1-set and the 0-set are infinite.
    bool is_nontrivial() const { return !is_zero() && !is_one(); }

    /// Smallest k >= 1 with bit(k) = 1, or 0 when the idempotent is zero.
    /// Distinct members of an orthogonal family have distinct values, which
    /// makes this a deterministic sort key for interleavings.
    long long first_one() const {
        for (std::size_t i = 0; i < period_.size(); ++i)
            if (period_[i] == '1') return static_cast<long long>(i) + 1;
        return 0;
    }

    /// Asymptotic density of the 1-set: exact share of ones per period.
    QQ density() const {
        long long ones = 0;
        for (char c : period_)
            if (c == '1') ++ones;
        return QQ(ones, static_cast<long long>(period_.size()));
    }

    friend bool operator==(const Idempotent& a, const Idempotent& b) { return a.period_ == b.period_; }

    friend Idempotent operator&(const Idempotent& a, const Idempotent& b) {
        return combine(a, b, [](bool x, bool y) { return x && y; });
    }
    friend Idempotent operator|(const Idempotent& a, const Idempotent& b) {
        return combine(a, b, [](bool x, bool y) { return x || y; });
    }
    friend Idempotent operator^(const Idempotent& a, const Idempotent& b) {
        return combine(a, b, [](bool x, bool y) { return x != y; });
    }
    Idempotent operator~() const {
        Idempotent r = *this;
        for (char& c : r.period_) c = (c == '1') ? '0' : '1';
        return r;
    }

private:
    static void validate_bits(const std::string& s) {
        for (char c : s)
            if (c != '0' && c != '1') throw Error(err_bad_argument, "idempotent bits must be 0 or 1");
    }

    /// Extends the periodic tail backwards over the preperiod so that index
    /// k reads period[(k-1) mod n] for every k, not just large k.
    static std::string align(const std::string& pre, const std::string& per) {
        const auto n = static_cast<long long>(per.size());
        const auto p = static_cast<long long>(pre.size());
        std::string aligned(per.size(), '0');
        for (long long j = 0; j < n; ++j) {
            long long src = (j - p) % n;
            if (src < 0) src += n;
            aligned[static_cast<std::size_t>(j)] = per[static_cast<std::size_t>(src)];
        }
        return aligned;
    }

    /// Shrinks to the minimal period (which divides every other period of a
    /// purely periodic infinite word).
    void minimize() {
        const auto n = period_.size();
        for (std::size_t d = 1; d <= n / 2; ++d) {
            if (n % d != 0) continue;
            bool periodic = true;
            for (std::size_t j = d; j < n && periodic; ++j) periodic = period_[j] == period_[j % d];
            if (periodic) {
                period_.resize(d);
                return;
            }
        }
    }

    template <typename F>
    static Idempotent combine(const Idempotent& a, const Idempotent& b, F op) {
        const auto na = static_cast<long long>(a.period_.size());
        const auto nb = static_cast<long long>(b.period_.size());
        const long long n = std::lcm(na, nb);
        std::string bits(static_cast<std::size_t>(n), '0');
        for (long long k = 1; k <= n; ++k)
            bits[static_cast<std::size_t>(k - 1)] = op(a.bit(k), b.bit(k)) ? '1' : '0';
        return Idempotent("", bits);
    }

    std::string period_;  // canonical: minimal, aligned to k = 1
};

}  // namespace gcalc
