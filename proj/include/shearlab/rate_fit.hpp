#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace shearlab {

struct RateFit {
    std::vector<std::pair<double, double>> series;  // (t, value) inside the window
    double exponent = NAN;
    double residual = NAN;  // RMS of the log-log fit
    double window_lo = 0, window_hi = 0;
    bool ok = false;
};

// Least-squares slope of log(value) against log(t) over samples with t in
// [lo, hi].
inline RateFit decay_fit(const std::vector<std::pair<double, double>>& series, double lo, double hi) {
    RateFit fit;
    fit.window_lo = lo;
    fit.window_hi = hi;
    for (auto& [t, v] : series) {
        if (t < lo || t > hi) continue;
        if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument("decay_fit: non-positive value in window");
        fit.series.emplace_back(t, v);
    }
    std::size_t n = fit.series.size();
    if (n < 8) throw std::invalid_argument("decay_fit: fewer than 8 samples in window");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [t, v] : fit.series) {
        double x = std::log(t), y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double mx = sx / n, my = sy / n;
    double var = sxx / n - mx * mx;
    if (!(var > 0)) throw std::invalid_argument("decay_fit: degenerate time window");
    fit.exponent = (sxy / n - mx * my) / var;
    double intercept = my - fit.exponent * mx;
    double ss = 0;
    for (auto& [t, v] : fit.series) {
        double r = std::log(v) - (intercept + fit.exponent * std::log(t));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    fit.ok = true;
    return fit;
}

inline std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = n == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
    if (n > 1) out.back() = hi;
    return out;
}

}  // namespace shearlab
