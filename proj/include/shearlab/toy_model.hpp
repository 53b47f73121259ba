#pragma once

// Two-component resonance toy model across one critical interval and the
// truncated frequency chain it is distilled from.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "shearlab/rate_fit.hpp"
#include "shearlab/weights.hpp"

namespace shearlab {

struct ToyState {
    double rho_R = 1;
    double rho_NR = 0;
    int k = 1;
    double eta = 0;
    double kappa = 0.01;
};

struct ToyResult {
    ToyState final;
    double amplification = 1;  // |final| / |initial|, Euclidean
};

// d rho_R / dt  = kappa k^5 / eta^3 rho_NR
// d rho_NR / dt = kappa eta k / (k^2 + (eta - k t)^2)^2 rho_R
inline std::array<double, 2> toy_rhs(const ToyState& s, double t) {
    double k = s.k;
    double e = s.eta - k * t;
    double p = k * k + e * e;
    return {s.kappa * std::pow(k, 5) / std::pow(s.eta, 3) * s.rho_NR, s.kappa * s.eta * k / (p * p) * s.rho_R};
}

inline ToyResult integrate_toy(const ToyState& s0, const ResonanceInterval& I, double rtol = 1e-12) {
    if (I.empty) throw std::invalid_argument("integrate_toy: empty interval");
    using V = std::array<double, 2>;
    namespace ode = boost::numeric::odeint;
    ToyState s = s0;
    auto rhs = [&](const V& x, V& dx, double t) {
        ToyState cur = s;
        cur.rho_R = x[0];
        cur.rho_NR = x[1];
        dx = toy_rhs(cur, t);
    };
    V x{s.rho_R, s.rho_NR};
    // Integrate the two halves separately so the peak at eta/k is a node.
    for (auto [a, b] : {std::pair{I.t_minus, I.center()}, std::pair{I.center(), I.t_plus}}) {
        auto stepper = ode::make_controlled(rtol * 1e-6, rtol, ode::runge_kutta_dopri5<V>());
        ode::integrate_adaptive(stepper, rhs, x, a, b, std::min(1e-2, (b - a) / 100));
    }
    ToyResult r;
    r.final = s;
    r.final.rho_R = x[0];
    r.final.rho_NR = x[1];
    r.amplification = std::hypot(x[0], x[1]) / std::hypot(s0.rho_R, s0.rho_NR);
    return r;
}

// ---- frequency chain ----

struct ChainState {
    double eta = 0;
    int L = 1;
    double t = 0;
    // amplitudes[i] belongs to mode index_to_mode(i): -L..-1, 1..L
    std::vector<cplx> amplitudes;

    static int index_to_mode(int L, int i) { return i < L ? i - L : i - L + 1; }
    static int mode_to_index(int L, int l) { return l < 0 ? l + L : l + L - 1; }
    cplx& at(int l) { return amplitudes[mode_to_index(L, l)]; }
    cplx at(int l) const { return amplitudes[mode_to_index(L, l)]; }
};

// Unit amplitude on the resonant band 1 <= |l| <= E(|eta|^{1/3}), zero on
// the modes beyond it, so widening L only adds initially quiet modes.
inline ChainState make_chain(double eta, int L) {
    if (L < 1) throw std::invalid_argument("make_chain: L >= 1 required");
    ChainState c;
    c.eta = eta;
    c.L = L;
    c.amplitudes.assign(2 * L, 0.0);
    std::int64_t N = floor_cbrt(std::abs(eta));
    for (int l = 1; l <= L && l <= N; ++l) c.at(l) = c.at(-l) = 1.0;
    return c;
}

// rho_lo(m), Gaussian in m with the given total mass over the integers.
inline std::function<cplx(int)> gaussian_profile(double width = 1.0, double mass = 1.0) {
    double norm = 0;
    for (int m = -200; m <= 200; ++m) norm += std::exp(-0.5 * m * m / (width * width));
    return [=](int m) { return cplx{mass * std::exp(-0.5 * m * m / (width * width)) / norm, 0}; };
}

struct ChainInterval {
    int l = 0;  // the bar interval [2 eta/(2l+1), 2 eta/(2l-1)]
    double t_lo = 0, t_hi = 0;
    int dominant_mode = 0;  // source mode with the largest time-integrated transfer
    double growth = 1;      // |rho(t_hi)| / |rho(t_lo)|
};

struct ChainResult {
    ChainState final;
    double total_growth = 1;
    std::vector<ChainInterval> intervals;
    bool overflow = false;
    double overflow_time = NAN;
};

struct ChainOptions {
    double gamma_sq = 1;
    double rtol = 1e-11;
    double overflow_threshold = 1e250;
    int samples_per_interval = 64;
};

namespace detail {

inline double chain_coefficient(double eta, int l, double t) {
    double e = eta - l * t;
    double p = double(l) * l + e * e;
    return eta * l / (p * p);
}

}  // namespace detail

// d rho(k)/dt = (i gamma^2 / 2 pi) sum_{l != 0} eta l (k - l) / (l^2 + (eta - l t)^2)^2 rho(l) rho_lo(k - l)
// integrated from state.t to T (T < state.t integrates backward).
inline ChainResult integrate_chain(const ChainState& s0, const std::function<cplx(int)>& rho_lo, double T,
                                   const ChainOptions& opt = {}) {
    const int L = s0.L;
    const int n = 2 * L;
    const double eta = s0.eta;
    std::vector<cplx> lo(4 * L + 1);
    for (int m = -2 * L; m <= 2 * L; ++m) lo[m + 2 * L] = rho_lo(m);
    const cplx pref = I_unit * opt.gamma_sq / (2 * pi);

    using V = std::vector<double>;
    auto rhs = [&](const V& x, V& dx, double t) {
        std::vector<cplx> src(n);
        for (int j = 0; j < n; ++j) {
            int l = ChainState::index_to_mode(L, j);
            src[j] = detail::chain_coefficient(eta, l, t) * cplx{x[2 * j], x[2 * j + 1]};
        }
        for (int i = 0; i < n; ++i) {
            int k = ChainState::index_to_mode(L, i);
            cplx acc{};
            for (int j = 0; j < n; ++j) {
                int l = ChainState::index_to_mode(L, j);
                if (l == k) continue;
                acc += double(k - l) * src[j] * lo[k - l + 2 * L];
            }
            acc *= pref;
            dx[2 * i] = acc.real();
            dx[2 * i + 1] = acc.imag();
        }
    };
    auto norm_of = [&](const V& x) {
        double s = 0;
        for (double v : x) s += v * v;
        return std::sqrt(s);
    };

    V x(2 * n);
    for (int j = 0; j < n; ++j) {
        x[2 * j] = s0.amplitudes[j].real();
        x[2 * j + 1] = s0.amplitudes[j].imag();
    }
    const double n0 = norm_of(x);

    // Checkpoints: the bar-interval ends inside the integration range plus
    // sample points inside each, so dominance can be measured.
    const std::int64_t N = floor_cbrt(std::abs(eta));
    ChainResult res;
    std::vector<double> marks{s0.t, T};
    const double lo_t = std::min(s0.t, T), hi_t = std::max(s0.t, T);
    for (int l = 1; l <= N; ++l) {
        ChainInterval ci;
        ci.l = l;
        ci.t_lo = 2 * eta / (2 * l + 1);
        ci.t_hi = 2 * eta / (2 * l - 1);
        if (ci.t_lo < lo_t || ci.t_hi > hi_t) continue;
        res.intervals.push_back(ci);
        for (int q = 0; q <= opt.samples_per_interval; ++q)
            marks.push_back(ci.t_lo + (ci.t_hi - ci.t_lo) * q / opt.samples_per_interval);
    }
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    if (T < s0.t) std::reverse(marks.begin(), marks.end());

    std::vector<V> states;
    states.reserve(marks.size());
    states.push_back(x);
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(opt.rtol * 1e-6, opt.rtol, ode::runge_kutta_dopri5<V>());
    double t_reached = s0.t;
    for (std::size_t i = 1; i < marks.size(); ++i) {
        double a = marks[i - 1], b = marks[i];
        double h = (b - a) / 8;
        ode::integrate_adaptive(stepper, rhs, x, a, b, h);
        t_reached = b;
        states.push_back(x);
        if (!(norm_of(x) < opt.overflow_threshold)) {
            res.overflow = true;
            res.overflow_time = b;
            break;
        }
    }

    for (auto& ci : res.intervals) {
        std::vector<double> weight(n, 0.0);
        double first = NAN, last = NAN;
        for (std::size_t i = 0; i < states.size() && i < marks.size(); ++i) {
            double t = marks[i];
            if (t < ci.t_lo || t > ci.t_hi) continue;
            for (int j = 0; j < n; ++j) {
                int l = ChainState::index_to_mode(L, j);
                weight[j] += std::abs(detail::chain_coefficient(eta, l, t)) *
                             std::hypot(states[i][2 * j], states[i][2 * j + 1]);
            }
            double nn = norm_of(states[i]);
            if (t == ci.t_lo) first = nn;
            if (t == ci.t_hi) last = nn;
        }
        int best = int(std::max_element(weight.begin(), weight.end()) - weight.begin());
        ci.dominant_mode = std::abs(ChainState::index_to_mode(L, best));
        ci.growth = last / first;
    }

    res.final = s0;
    res.final.t = t_reached;
    for (int j = 0; j < n; ++j) res.final.amplitudes[j] = {x[2 * j], x[2 * j + 1]};
    res.total_growth = norm_of(x) / n0;
    return res;
}

// ---- growth across one interval ----

struct ToyGrowthRow {
    double eta = 0;
    int k = 1;
    double t_minus = 0, t_plus = 0;
    double amplification = 0;         // toy system, started from (rho_R, rho_NR) = (1, 0)
    double designed_theta_ratio = 0;  // (eta/k^3)^{1 + 2 C kappa}
    double ratio_of_ratios = 0;
};

struct ToyGrowthReport {
    std::vector<ToyGrowthRow> rows;
    RateFit fit;  // log amplification against log(eta/k^3)
    double expected_exponent = 0;
};

inline ToyGrowthReport toy_growth_sweep(const std::vector<double>& etas, int k, double kappa, double C_theta,
                                        double rtol = 1e-12) {
    if (etas.size() < 8) throw std::invalid_argument("toy_growth_sweep: need at least 8 eta values");
    ToyGrowthReport rep;
    rep.expected_exponent = 2 * C_theta * kappa + 1;
    std::vector<std::pair<double, double>> series;
    for (double eta : etas) {
        auto I = critical_interval(k, eta);
        if (I.empty) throw std::invalid_argument("toy_growth_sweep: k outside the resonant range of eta");
        ToyState s{1, 0, k, eta, kappa};
        auto r = integrate_toy(s, I, rtol);
        ToyGrowthRow row;
        row.eta = eta;
        row.k = k;
        row.t_minus = I.t_minus;
        row.t_plus = I.t_plus;
        row.amplification = r.amplification;
        double x = eta / (double(k) * k * k);
        row.designed_theta_ratio = std::pow(x, rep.expected_exponent);
        row.ratio_of_ratios = row.amplification / row.designed_theta_ratio;
        rep.rows.push_back(row);
        series.emplace_back(x, r.amplification);
    }
    double lo = series.front().first, hi = series.front().first;
    for (auto& [x, v] : series) lo = std::min(lo, x), hi = std::max(hi, x);
    rep.fit = decay_fit(series, lo, hi);
    return rep;
}

}  // namespace shearlab
