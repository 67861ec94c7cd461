#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace gcalc {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    bool ok = false;  // false when fewer than two usable points
};

/// Ordinary least squares through (x_i, y_i).
inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    LineFit f;
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n) return f;
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.ok = true;
    return f;
}

struct SlopeEstimate {
    bool all_zero = false;   // every sample in the window vanished
    bool ok = false;         // regression had enough nonzero samples
    double exponent = 0.0;   // estimated valuation: |x_k| ~ C * 2^(-k*exponent)
    double coefficient = 0.0;  // estimated |C|
};

/// Fits log|x_k| against k*log 2 over k in [first_k, last_k] (1-based lattice
/// indices into samples). Samples below the floor are treated as exact zeros
/// and skipped; an all-zero window reports all_zero instead of a slope.
inline SlopeEstimate estimate_decay(const std::vector<double>& samples, int first_k, int last_k,
                                    double zero_floor = 1e-300) {
    SlopeEstimate est;
    std::vector<double> xs, ys;
    int seen = 0;
    for (int k = first_k; k <= last_k && k <= static_cast<int>(samples.size()); ++k) {
        ++seen;
        const double v = std::fabs(samples[static_cast<std::size_t>(k - 1)]);
        if (!(v > zero_floor)) continue;
        xs.push_back(static_cast<double>(k) * std::log(2.0));
        ys.push_back(std::log(v));
    }
    if (seen > 0 && xs.empty()) {
        est.all_zero = true;
        return est;
    }
    const LineFit f = fit_line(xs, ys);
    if (!f.ok) return est;
    est.ok = true;
    est.exponent = -f.slope;  // log|x_k| = log C - V * (k log 2), abscissa is k log 2
    est.coefficient = std::exp(f.intercept);
    return est;
}

}  // namespace gcalc
