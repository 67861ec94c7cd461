#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include <quadmath.h>

namespace gcalc {

/// Extended-precision scalar for the mollifier and pairing internals, where
/// double's 53 bits cannot reach the advertised residual bounds.
using quad = __float128;

/// Overload set shared by code templated on the scalar type. Call as
/// rm::exp(x) etc.; the right precision is picked by the argument.
namespace rm {

inline double exp(double x) { return std::exp(x); }
inline quad exp(quad x) { return ::expq(x); }
inline double sin(double x) { return std::sin(x); }
inline quad sin(quad x) { return ::sinq(x); }
inline double cos(double x) { return std::cos(x); }
inline quad cos(quad x) { return ::cosq(x); }
inline double atan(double x) { return std::atan(x); }
inline quad atan(quad x) { return ::atanq(x); }
inline double erf(double x) { return std::erf(x); }
inline quad erf(quad x) { return ::erfq(x); }
inline double erfc(double x) { return std::erfc(x); }
inline quad erfc(quad x) { return ::erfcq(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline quad sqrt(quad x) { return ::sqrtq(x); }
inline double log(double x) { return std::log(x); }
inline quad log(quad x) { return ::logq(x); }
inline double fabs(double x) { return std::fabs(x); }
inline quad fabs(quad x) { return ::fabsq(x); }
inline double exp2(double x) { return std::exp2(x); }
inline quad exp2(quad x) { return ::exp2q(x); }
inline bool isfinite(double x) { return std::isfinite(x); }
inline bool isfinite(quad x) { return !::isnanq(x) && !::isinfq(x); }

}  // namespace rm

template <class R>
struct real_traits;

template <>
struct real_traits<double> {
    static double pi() { return std::numbers::pi; }
    static double epsilon() { return std::numeric_limits<double>::epsilon(); }
    static const char* name() { return "double"; }
};

template <>
struct real_traits<quad> {
    // Computed rather than taken from quadmath.h macros: those are Q
    // literals, unavailable without GNU extensions.
    static quad pi() {
        static const quad v = ::atanq(quad(1)) * quad(4);
        return v;
    }
    static quad epsilon() { return ::scalbnq(quad(1), -112); }
    static const char* name() { return "quad"; }
};

template <class R>
R sqrt_pi() {
    static const R v = rm::sqrt(real_traits<R>::pi());
    return v;
}

inline std::string quad_to_string(quad x, int digits = 36) {
    char buf[128];
    ::quadmath_snprintf(buf, sizeof buf, "%.*Qe", digits, x);
    return buf;
}

}  // namespace gcalc
