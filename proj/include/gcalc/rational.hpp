#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <string>

#include "gcalc/error.hpp"

namespace gcalc {

/// Exact rational scalar used wherever a comparison must not suffer
/// floating-point noise: gauge exponents, valuations, truncation orders,
/// idempotent densities.
using QQ = boost::multiprecision::cpp_rational;

inline double to_double(const QQ& q) { return q.template convert_to<double>(); }

inline QQ qq(long long num, long long den = 1) {
    if (den == 0) throw Error(err_bad_argument, "rational with zero denominator");
    return QQ(num, den);
}

/// Renders as "num/den" with the sign on the numerator; denominator always
/// present so serialized exponents stay unambiguous ("3/1", "-5/2").
inline std::string to_string(const QQ& q) {
    return numerator(q).str() + "/" + denominator(q).str();
}

/// Parses "p", "p/q", with optional leading '-'.
inline QQ parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return QQ(boost::multiprecision::cpp_int(text));
        boost::multiprecision::cpp_int num(text.substr(0, slash));
        boost::multiprecision::cpp_int den(text.substr(slash + 1));
        if (den == 0) throw Error(err_bad_argument, "rational with zero denominator");
        return QQ(num, den);
    } catch (const std::exception&) {
        throw Error(err_bad_argument, "malformed rational '" + text + "'");
    }
}

inline long long floor_ll(const QQ& q) {
    boost::multiprecision::cpp_int n = numerator(q), d = denominator(q);
    boost::multiprecision::cpp_int f = n / d;
    if (n < 0 && f * d != n) --f;
    return f.template convert_to<long long>();
}

/// Rational extended with +infinity, used for truncation orders and
/// valuations. -infinity never occurs, so it is not representable.
class RatInf {
public:
    RatInf() : finite_(true), value_(0) {}
    RatInf(QQ v) : finite_(true), value_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
    RatInf(long long v) : finite_(true), value_(v) {}      // NOLINT(google-explicit-constructor)

    static RatInf infinity() {
        RatInf r;
        r.finite_ = false;
        return r;
    }

    bool is_infinite() const { return !finite_; }
    bool is_finite() const { return finite_; }

    const QQ& value() const {
        if (!finite_) throw Error(err_bad_argument, "value() on infinite bound");
        return value_;
    }

    friend bool operator==(const RatInf& a, const RatInf& b) {
        if (a.finite_ != b.finite_) return false;
        return !a.finite_ || a.value_ == b.value_;
    }
    friend bool operator<(const RatInf& a, const RatInf& b) {
        if (!a.finite_) return false;
        if (!b.finite_) return true;
        return a.value_ < b.value_;
    }
    friend bool operator<=(const RatInf& a, const RatInf& b) { return a < b || a == b; }
    friend bool operator>(const RatInf& a, const RatInf& b) { return b < a; }
    friend bool operator>=(const RatInf& a, const RatInf& b) { return b <= a; }

    friend RatInf operator+(const RatInf& a, const RatInf& b) {
        if (!a.finite_ || !b.finite_) return infinity();
        return RatInf(a.value_ + b.value_);
    }
    friend RatInf min(const RatInf& a, const RatInf& b) { return a < b ? a : b; }
    friend RatInf max(const RatInf& a, const RatInf& b) { return a < b ? b : a; }

    double to_double_lossy() const {
        return finite_ ? gcalc::to_double(value_) : std::numeric_limits<double>::infinity();
    }

    /// "num/den" for finite values, "inf" otherwise (the serialized form of
    /// truncation orders).
    std::string str() const { return finite_ ? gcalc::to_string(value_) : std::string("inf"); }

private:
    bool finite_;
    QQ value_;
};

}  // namespace gcalc
