#pragma once

// Time-dependent Fourier multipliers: the resonance weight Theta, the
// interval weight g, the ghost weight B, the Gevrey radius lambda(t) and the
// composite multipliers J, M, A. Everything is evaluated in the log domain;
// the multipliers leave double range long before the frequencies a solver
// grid can hold.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>


#include "shearlab/common.hpp"
#include "shearlab/quadrature.hpp"
#include "shearlab/weight_params.hpp"

namespace shearlab {

inline std::int64_t integer_part(double eta) {
    if (eta < 0 || std::isnan(eta)) throw std::invalid_argument("integer_part: negative input");
    return static_cast<std::int64_t>(std::floor(eta));
}

struct ResonanceInterval {
    std::int64_t k = 0;
    double eta = 0;
    bool empty = true;
    double t_minus = 0, t_plus = 0;
    double bar_lo = 0, bar_hi = 0;

    double center() const { return std::abs(eta) / std::abs(static_cast<double>(k)); }
    bool contains(double t) const { return !empty && t >= t_minus && t < t_plus; }
    bool inside_bar() const { return !empty && t_minus >= bar_lo && t_plus <= bar_hi; }
};

inline ResonanceInterval critical_interval(std::int64_t k, double eta) {
    if (k == 0) throw std::invalid_argument("critical_interval: k = 0");
    ResonanceInterval I;
    I.k = k;
    I.eta = eta;
    double ak = std::abs(static_cast<double>(k));
    double ae = std::abs(eta);
    if (eta * static_cast<double>(k) < 0 || static_cast<std::int64_t>(ak) > floor_cbrt(ae)) return I;
    I.empty = false;
    I.t_minus = ae / ak - ae / (2 * ak * ak * ak);
    I.t_plus = ae / ak + ae / (2 * ak * ak * ak);
    I.bar_lo = 2 * ae / (2 * ak + 1);
    I.bar_hi = 2 * ae / (2 * ak - 1);
    return I;
}

enum class Regime { NR, R, pre_window, post_window };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::NR: return "NR";
        case Regime::R: return "R";
        case Regime::pre_window: return "pre-window";
        case Regime::post_window: return "post-window";
    }
    return "?";
}

struct WeightEvaluation {
    double log_value = 0;
    double d_log_dt = 0;
    Regime regime = Regime::post_window;
    double value() const { return std::exp(log_value); }
};

namespace detail {

// Theta for eta >= 1 and t < 2 eta. With resonant_k > 0 the resonant branch
// is used on I_{resonant_k, eta}. The non-resonant weight is the product of
// one factor per interval; a factor is 1 right of t^+_j, grows by (eta/j^3)^c
// across I^R, by eta/j^3 across I^L, and stays frozen at (j^3/eta)^{1+2c}
// to the left of t^-_j.
inline WeightEvaluation theta_positive(double t, std::int64_t resonant_k, double eta, const WeightParams& p) {
    const double c = p.theta_exponent();
    const std::int64_t N = floor_cbrt(eta);
    WeightEvaluation w;
    w.regime = Regime::NR;
    for (std::int64_t j = 1; j <= N; ++j) {
        double jd = static_cast<double>(j);
        double r = jd * jd * jd / eta;
        double center = eta / jd;
        double half = eta / (2 * jd * jd * jd);
        double tp = center + half, tm = center - half;
        if (t >= tp) continue;
        double a = 2 * (1 - r);
        double lr = std::log(r);
        if (t < tm) {
            w.log_value += (1 + 2 * c) * lr;
            continue;
        }
        double tau = t - center;
        double grow = std::log1p(a * std::abs(tau));
        double rate = a / (1 + a * std::abs(tau));
        if (tau >= 0) {
            w.log_value += c * (lr + grow);
            w.d_log_dt += c * rate;
        } else {
            w.log_value += c * lr - (1 + c) * grow;
            w.d_log_dt += (1 + c) * rate;
        }
        if (j == resonant_k) {
            w.regime = Regime::R;
            w.log_value += lr + grow;
            w.d_log_dt += tau >= 0 ? rate : -rate;
        }
    }
    double t_last = 2 * eta / (2 * N + 1);
    double freeze = std::min(t_last, eta / N - eta / (2.0 * N * N * N));
    if (t < freeze) w.regime = Regime::pre_window;
    return w;
}

}  // namespace detail

inline WeightEvaluation theta_weight(double t, std::int64_t k, double eta, const WeightParams& p) {
    double ae = std::abs(eta);
    if (ae < 1 || t >= 2 * ae) return {};
    std::int64_t resonant = eta * static_cast<double>(k) > 0 ? std::abs(k) : 0;
    return detail::theta_positive(t, resonant, ae, p);
}

// Non-resonant Theta_NR(t, |eta|).
inline WeightEvaluation theta_nonresonant(double t, double eta, const WeightParams& p) {
    return theta_weight(t, 0, eta, p);
}

// Interval weight g(t, eta): grows across each bar interval
// [2 eta/(2k+1), 2 eta/(2k-1)], k <= E(eta^{2/3}), with rate
// w_k / (delta_L (1 + (t - eta/k)^2)), w_k = 1 for k <= E(eta^{1/3}) and
// eta/k^3 beyond.
inline WeightEvaluation g_weight(double t, double eta, const WeightParams& p) {
    double ae = std::abs(eta);
    WeightEvaluation w;
    if (ae < 1 || t >= 2 * ae) return w;
    const std::int64_t N1 = floor_cbrt(ae);
    const std::int64_t N2 = floor_two_thirds(ae);
    double t_floor = 2 * ae / (2.0 * N2 + 1);
    double te = std::max(t, t_floor);
    w.regime = t < t_floor ? Regime::pre_window : Regime::NR;
    double inv_delta = 1.0 / p.delta_L;
    for (std::int64_t k = 1; k <= N2; ++k) {
        double kd = static_cast<double>(k);
        double hi = 2 * ae / (2 * kd - 1);
        if (te >= hi) continue;
        double lo = 2 * ae / (2 * kd + 1);
        double center = ae / kd;
        double weight = k <= N1 ? 1.0 : ae / (kd * kd * kd);
        double from = std::max(te, lo);
        w.log_value -= inv_delta * weight * (std::atan(hi - center) - std::atan(from - center));
        if (te >= lo && t >= t_floor) {
            w.d_log_dt = inv_delta * weight / (1 + (te - center) * (te - center));
            if (k <= N1 && std::abs(te - center) < ae / (2 * kd * kd * kd)) w.regime = Regime::R;
        }
    }
    return w;
}

// Smooth cutoffs with C^2 quintic bridges.
inline double smootherstep(double x) {
    if (x <= 0) return 0;
    if (x >= 1) return 1;
    return x * x * x * (x * (6 * x - 15) + 10);
}

// 1 on |x| <= 8, 0 on |x| >= 10.
inline double cutoff_outer(double x) {
    double a = std::abs(x);
    return 1 - smootherstep((a - 8) / 2);
}

// 1 on [1/2, 3/2], 0 outside (1/3, 5/2).
inline double cutoff_band(double x) {
    if (x <= 1.0 / 3.0 || x >= 2.5) return 0;
    if (x < 0.5) return smootherstep((x - 1.0 / 3.0) * 6);
    if (x <= 1.5) return 1;
    return 1 - smootherstep(x - 1.5);
}

inline double b_cutoff(double t, std::int64_t k, double eta) {
    if (t <= 0 || k == 0) return 0;
    double kd = static_cast<double>(k);
    return cutoff_outer(100 / t) * cutoff_outer(eta / (t * t * t)) * cutoff_outer(eta / (kd * kd * kd)) *
           cutoff_band(eta / (kd * t));
}

// log B_k(t, eta) = delta_B^{-1} int_0^t b / (1 + (s - eta/k)^2) ds.
inline double log_B_multiplier(double t, std::int64_t k, double eta, const WeightParams& p) {
    if (k == 0 || t <= 0) return 0;
    double kd = static_cast<double>(k);
    double ratio = eta / kd;
    if (ratio <= 0 || std::abs(eta / (kd * kd * kd)) >= 10) return 0;
    double lo = std::max({10.0, std::cbrt(std::abs(eta) / 10), ratio / 2.5});
    double hi = std::min(t, 3 * ratio);
    if (lo >= hi) return 0;
    std::array<double, 6> cuts{12.5, std::cbrt(std::abs(eta) / 8), 2 * ratio, 2 * ratio / 3, ratio,
                               std::cbrt(std::abs(eta) / 10)};
    std::vector<double> nodes{lo, hi};
    for (double c : cuts)
        if (c > lo && c < hi) nodes.push_back(c);
    std::sort(nodes.begin(), nodes.end());
    auto integrand = [&](double s) { return b_cutoff(s, k, eta) / (1 + (s - ratio) * (s - ratio)); };
    double total = 0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (nodes[i + 1] <= nodes[i]) continue;
        total += integrate_gk(integrand, nodes[i], nodes[i + 1]);
    }
    return total / p.delta_B;
}

inline double B_multiplier(double t, std::int64_t k, double eta, const WeightParams& p) {
    return std::exp(log_B_multiplier(t, k, eta, p));
}

inline double d_log_B_dt(double t, std::int64_t k, double eta, const WeightParams& p) {
    if (k == 0) return 0;
    double tau = t - eta / static_cast<double>(k);
    return b_cutoff(t, k, eta) / (p.delta_B * (1 + tau * tau));
}

inline double lambda_of_t(double t, const WeightParams& p) {
    if (t < 0) throw std::invalid_argument("lambda_of_t: negative time");
    double l1 = lambda_at_one(p);
    if (t <= 1) return l1;
    return (1 + l1) * std::exp(-p.delta_lambda * bracket_power_integral(1.0, t, p.q_tilde)) - 1;
}

inline double lambda_dot(double t, const WeightParams& p) {
    if (t <= 1) return 0;
    return -p.delta_lambda * std::pow(1 + t * t, -p.q_tilde) * (1 + lambda_of_t(t, p));
}

// Pieces of the composite multiplier at one (t, k, eta).
struct MultiplierParts {
    double log_A = 0;
    double log_J = 0;
    double log_M = 0;
    double log_B = 0;
    WeightEvaluation theta;
    WeightEvaluation g;
    double lambda = 0;
    double eta_cbrt = 0;  // |eta|^{1/3}
};

inline double log_J_multiplier(const WeightEvaluation& theta, std::int64_t k, double eta, const WeightParams& p) {
    return log_add(p.mu * std::cbrt(std::abs(eta)) - theta.log_value,
                   p.mu * std::cbrt(std::abs(static_cast<double>(k))));
}

inline double log_M_multiplier(const WeightEvaluation& g, std::int64_t k, double eta, const WeightParams& p) {
    double c = 4 * pi / p.delta_L;
    return log_add(c * std::cbrt(std::abs(eta)) - g.log_value, c * std::cbrt(std::abs(static_cast<double>(k))));
}

inline MultiplierParts multiplier_parts(double t, std::int64_t k, double eta, const WeightParams& p,
                                        double lambda) {
    MultiplierParts m;
    m.lambda = lambda;
    m.eta_cbrt = std::cbrt(std::abs(eta));
    m.theta = theta_weight(t, k, eta, p);
    m.g = g_weight(t, eta, p);
    m.log_J = log_J_multiplier(m.theta, k, eta, p);
    m.log_M = log_M_multiplier(m.g, k, eta, p);
    m.log_B = log_B_multiplier(t, k, eta, p);
    double n = freq_norm(static_cast<double>(k), eta);
    m.log_A = lambda * std::pow(n, p.s) + p.sigma * std::log(bracket(n)) + m.log_J + m.log_M + m.log_B;
    return m;
}

inline MultiplierParts multiplier_parts(double t, std::int64_t k, double eta, const WeightParams& p) {
    return multiplier_parts(t, k, eta, p, lambda_of_t(t, p));
}

inline double log_J(double t, std::int64_t k, double eta, const WeightParams& p) {
    return log_J_multiplier(theta_weight(t, k, eta, p), k, eta, p);
}
inline double log_M(double t, std::int64_t k, double eta, const WeightParams& p) {
    return log_M_multiplier(g_weight(t, eta, p), k, eta, p);
}
inline double log_A(double t, std::int64_t k, double eta, const WeightParams& p) {
    return multiplier_parts(t, k, eta, p).log_A;
}

inline double J_multiplier(double t, std::int64_t k, double eta, const WeightParams& p) {
    return std::exp(log_J(t, k, eta, p));
}
inline double M_multiplier(double t, std::int64_t k, double eta, const WeightParams& p) {
    return std::exp(log_M(t, k, eta, p));
}
inline double A_multiplier(double t, std::int64_t k, double eta, const WeightParams& p) {
    return std::exp(log_A(t, k, eta, p));
}

}  // namespace shearlab
