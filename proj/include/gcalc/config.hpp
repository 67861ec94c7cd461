#pragma once

#include <cmath>

#include "gcalc/error.hpp"
#include "gcalc/rational.hpp"

namespace gcalc {

/// Knobs shared by every operation that samples the index lattice or
/// truncates an expansion. All defaults are part of the external contract;
/// identical inputs and config must reproduce identical outputs.
struct Config {
    /// Deepest lattice index sampled on the empirical tier (k = 1..depth).
    int lattice_depth = 48;

    /// Fraction of the deepest indices used by regression estimates; the
    /// window is [ceil(depth * (1 - fraction)), depth].
    double window_fraction = 0.5;

    /// Moments 1..q of the mollifier vanish; q <= 12.
    int mollifier_order = 6;

    /// Absolute tolerance for adaptive quadrature.
    double quadrature_tol = 1e-10;

    /// Reported tolerance of regression-based valuation estimates.
    double valuation_tol = 0.05;

    /// Maximum number of terms per gauge expansion; excess tail terms are
    /// folded into the truncation order.
    int term_cap = 64;

    /// Width of the exponent window kept beyond the leading exponent by
    /// inversion and series composition.
    QQ order_window = 16;

    void validate() const {
        if (lattice_depth < 8)
            throw Error(err_bad_argument, "lattice depth must be at least 8");
        if (!(window_fraction > 0.0 && window_fraction <= 1.0))
            throw Error(err_bad_argument, "window fraction must lie in (0, 1]");
        if (mollifier_order < 0 || mollifier_order > 12)
            throw Error(err_ill_conditioned_order, "mollifier order must lie in [0, 12]");
        if (quadrature_tol <= 0) throw Error(err_bad_argument, "quadrature tolerance must be positive");
        if (term_cap < 4) throw Error(err_bad_argument, "term cap must be at least 4");
        if (order_window <= 0) throw Error(err_bad_argument, "order window must be positive");
    }

    /// First index of the regression window.
    int window_start() const {
        int start = static_cast<int>(std::ceil(lattice_depth * (1.0 - window_fraction)));
        if (start < 1) start = 1;
        if (start > lattice_depth) start = lattice_depth;
        return start;
    }
};

inline const Config& default_config() {
    static const Config cfg{};
    return cfg;
}

/// eps_k = 2^(-k), the gauge evaluated at lattice index k.
inline double epsilon_at(int k) { return std::exp2(-static_cast<double>(k)); }

}  // namespace gcalc
