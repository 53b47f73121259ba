#pragma once

// Numerical checks of the growth and ratio estimates satisfied by the
// multipliers in weights.hpp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "shearlab/weights.hpp"

namespace shearlab {

// ---- growth of 1/Theta(0, eta) ----

struct GrowthRow {
    double eta = 0;
    double log_inv_theta0 = 0;
    double ratio = 0;           // [1/Theta(0,eta)] / [eta^{-mu/12} e^{mu eta^{1/3}/2}]
    double stirling_ratio = 0;  // [eta^N/(N!)^3] / [e^{3 eta^{1/3}} / ((2 pi)^{3/2} sqrt(eta))]
};

struct GrowthReport {
    std::vector<GrowthRow> rows;
    double band_lo = 1.0 / 50, band_hi = 50;
    double min_ratio = 0, max_ratio = 0;
    double max_drift = 0;  // largest ratio between successive etas (>= 1)
    bool stirling_ok = true;
    bool pass = false;
};

inline double log_growth_product(double eta) {
    std::int64_t N = floor_cbrt(eta);
    return N * std::log(eta) - 3 * std::lgamma(static_cast<double>(N) + 1);
}

inline GrowthReport verify_growth_lemma(const std::vector<double>& etas, const WeightParams& p) {
    if (etas.empty()) throw config_error("verify_growth_lemma: empty eta list");
    GrowthReport rep;
    for (double eta : etas) {
        if (!(eta > 1)) throw config_error("verify_growth_lemma: eta must exceed 1");
        GrowthRow row;
        row.eta = eta;
        row.log_inv_theta0 = -theta_weight(0.0, 1, eta, p).log_value;
        double model = -p.mu / 12 * std::log(eta) + p.mu / 2 * std::cbrt(eta);
        row.ratio = std::exp(row.log_inv_theta0 - model);
        double stirling = 3 * std::cbrt(eta) - 0.5 * std::log(eta) - 1.5 * std::log(2 * pi);
        row.stirling_ratio = std::exp(log_growth_product(eta) - stirling);
        if (eta >= 100 && (row.stirling_ratio > 10 || row.stirling_ratio < 0.1)) rep.stirling_ok = false;
        rep.rows.push_back(row);
    }
    rep.min_ratio = rep.max_ratio = rep.rows.front().ratio;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        rep.min_ratio = std::min(rep.min_ratio, rep.rows[i].ratio);
        rep.max_ratio = std::max(rep.max_ratio, rep.rows[i].ratio);
        if (i > 0) {
            double d = rep.rows[i].ratio / rep.rows[i - 1].ratio;
            rep.max_drift = std::max(rep.max_drift, std::max(d, 1 / d));
        }
    }
    rep.pass = rep.min_ratio >= rep.band_lo && rep.max_ratio <= rep.band_hi && rep.max_drift < 2 && rep.stirling_ok;
    return rep;
}

// ---- g at the bottom of its construction, summed interval by interval ----

// log(1/g(t_{E(eta^{2/3})}, eta)) as the double arctan sum.
inline double g_bottom_log_inverse(double eta, const WeightParams& p) {
    double ae = std::abs(eta);
    if (ae < 1) return 0;
    std::int64_t N1 = floor_cbrt(ae), N2 = floor_two_thirds(ae);
    double inner = 0, outer = 0;
    for (std::int64_t k = 1; k <= N2; ++k) {
        double kd = static_cast<double>(k);
        double term = std::atan(ae / (kd * (2 * kd + 1))) + std::atan(ae / (kd * (2 * kd - 1)));
        if (k <= N1)
            inner += term;
        else
            outer += ae / (kd * kd * kd) * term;
    }
    return (inner + outer) / p.delta_L;
}

// ---- fitted constants ----

// Smallest C >= 0 with lhs <= C * base * exp(C * d), all logs.
inline double fit_constant(double log_lhs, double log_base, double d) {
    double y = log_lhs - log_base;
    if (d <= 0) return std::exp(y);
    auto f = [&](double C) { return std::log(C) + C * d; };
    double hi = 1;
    while (f(hi) < y) hi *= 2;
    double lo = hi / 2;
    while (lo > 1e-300 && f(lo) >= y) lo /= 2;
    if (lo <= 1e-300) return 0;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
        double mid = 0.5 * (lo + hi);
        (f(mid) < y ? lo : hi) = mid;
    }
    return hi;
}

struct LemmaFit {
    std::string lemma_id;
    std::size_t sample_count = 0;
    double fitted_constant = 0;
    std::string worst_case_inputs;
    bool pass = false;
};

struct LemmaSampleSpec {
    std::size_t count = 10000;
    std::uint64_t seed = 1;
    double eta_min = 1, eta_max = 1e4;  // |eta|, |xi| drawn log-uniformly
    std::int64_t k_max = 100;           // |k|, |l| for the commutator lemmas
};

namespace detail {

struct Sampler {
    std::mt19937_64 rng;
    explicit Sampler(std::uint64_t seed) : rng(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
    double sign() { return uniform(0, 1) < 0.5 ? -1.0 : 1.0; }
    std::int64_t integer(std::int64_t a, std::int64_t b) {
        return std::uniform_int_distribution<std::int64_t>(a, b)(rng);
    }
    // Half the draws are independent, half sit close to eta so the
    // diagonal, where the bounds are tight, is resolved.
    double partner(double eta, double lo, double hi) {
        if (uniform(0, 1) < 0.5) return sign() * log_uniform(lo, hi);
        return eta + sign() * std::abs(eta) * log_uniform(1e-9, 1.0);
    }
};

struct Sample {
    double log_lhs, log_base, d;
    std::string inputs;
};

inline LemmaFit fit_samples(const std::string& id, std::size_t n, const std::function<Sample()>& draw) {
    LemmaFit fit;
    fit.lemma_id = id;
    fit.sample_count = n;
    for (std::size_t i = 0; i < n; ++i) {
        Sample s = draw();
        double C = fit_constant(s.log_lhs, s.log_base, s.d);
        if (i == 0 || C > fit.fitted_constant || std::isnan(C)) {
            fit.fitted_constant = C;
            fit.worst_case_inputs = s.inputs;
        }
    }
    fit.pass = std::isfinite(fit.fitted_constant);
    return fit;
}

inline std::string describe(std::initializer_list<std::pair<const char*, double>> kv) {
    std::ostringstream os;
    os.precision(10);
    bool first = true;
    for (auto& [k, v] : kv) {
        os << (first ? "" : " ") << k << "=" << v;
        first = false;
    }
    return os.str();
}

// log |exp(x) - 1| for the commutator forms.
inline double log_abs_expm1(double x) {
    if (x == 0) return neg_inf;
    if (x > 30) return x;
    return std::log(std::abs(std::expm1(x)));
}

}  // namespace detail

inline std::vector<LemmaFit> verify_ratio_lemmas(const LemmaSampleSpec& spec, const WeightParams& p) {
    std::vector<LemmaFit> out;
    const double inv_dl = 1 / p.delta_L;
    detail::Sampler S(spec.seed);

    // g(t,xi)/g(t,eta) + g(t,eta)/g(t,xi) <= C exp(C delta_L^{-1} |eta - xi|^{1/3})
    out.push_back(detail::fit_samples("g_ratio", spec.count, [&] {
        double eta = S.sign() * S.log_uniform(spec.eta_min, spec.eta_max);
        double xi = S.partner(eta, spec.eta_min, spec.eta_max);
        double t = S.uniform(0, 2.2 * std::max(std::abs(eta), std::abs(xi)));
        double lg = g_weight(t, eta, p).log_value, lx = g_weight(t, xi, p).log_value;
        double lhs = log_add(lx - lg, lg - lx);
        return detail::Sample{lhs, 0, inv_dl * std::cbrt(std::abs(eta - xi)),
                              detail::describe({{"t", t}, {"eta", eta}, {"xi", xi}})};
    }));

    // Theta_NR(t,eta)/Theta_NR(t,xi) <= C exp(mu |eta - xi|^{1/3})
    out.push_back(detail::fit_samples("theta_nr_ratio", spec.count, [&] {
        double eta = S.sign() * S.log_uniform(spec.eta_min, spec.eta_max);
        double xi = S.partner(eta, spec.eta_min, spec.eta_max);
        double t = S.uniform(0, 2.2 * std::max(std::abs(eta), std::abs(xi)));
        double lhs = theta_nonresonant(t, eta, p).log_value - theta_nonresonant(t, xi, p).log_value;
        return detail::Sample{lhs, p.mu * std::cbrt(std::abs(eta - xi)), 0,
                              detail::describe({{"t", t}, {"eta", eta}, {"xi", xi}})};
    }));

    auto draw_pair = [&](std::int64_t& k, std::int64_t& l, double& eta, double& xi) {
        k = S.integer(-spec.k_max, spec.k_max);
        eta = S.sign() * S.log_uniform(spec.eta_min, spec.eta_max);
        xi = S.partner(eta, spec.eta_min, spec.eta_max);
        l = std::abs(xi - eta) < std::abs(eta) ? k + S.integer(-2, 2) : S.integer(-spec.k_max, spec.k_max);
    };
    auto denom = [](double a, double b, double c, double d, double power) {
        return power * std::log(std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d));
    };

    // |M_k(t,eta)/M_l(t,xi) - 1| <= C <k-l, xi-eta> / (|k|+|l|+|eta|+|xi|)^{2/3}
    //                               * exp(C delta_L^{-1} |k-l, xi-eta|^{1/3}),
    // t <= min(|xi|, |eta|)^{1/3} / 2
    out.push_back(detail::fit_samples("M_ratio_minus_one", spec.count, [&] {
        std::int64_t k, l;
        double eta, xi;
        draw_pair(k, l, eta, xi);
        double t = S.uniform(0, 0.5 * std::cbrt(std::min(std::abs(eta), std::abs(xi))));
        double x = log_M(t, k, eta, p) - log_M(t, l, xi, p);
        double dist = freq_norm(static_cast<double>(k - l), xi - eta);
        double base = std::log(bracket(dist)) - denom(k, l, eta, xi, 2.0 / 3);
        return detail::Sample{detail::log_abs_expm1(x), base, inv_dl * std::cbrt(dist),
                              detail::describe({{"t", t}, {"k", double(k)}, {"l", double(l)}, {"eta", eta}, {"xi", xi}})};
    }));

    // |M_k(t,eta)/M_k(t,xi) - 1| <= C <xi-eta> / (|k|+|eta|+|xi|)^{1/3} exp(C delta_L^{-1} |xi-eta|^{1/3}),
    // t <= min(|xi|, |eta|)^{2/3} / 2
    out.push_back(detail::fit_samples("M_commutator_same_k", spec.count, [&] {
        std::int64_t k, l;
        double eta, xi;
        draw_pair(k, l, eta, xi);
        double t = S.uniform(0, 0.5 * std::pow(std::min(std::abs(eta), std::abs(xi)), 2.0 / 3));
        double x = log_M(t, k, eta, p) - log_M(t, k, xi, p);
        double dist = std::abs(xi - eta);
        double base = std::log(bracket(dist)) - denom(k, 0, eta, xi, 1.0 / 3);
        return detail::Sample{detail::log_abs_expm1(x), base, inv_dl * std::cbrt(dist),
                              detail::describe({{"t", t}, {"k", double(k)}, {"eta", eta}, {"xi", xi}})};
    }));

    // |J_k(t,eta)/J_l(t,xi) - 1| <= C <k-l, xi-eta> / (|k|+|l|+|eta|+|xi|)^{2/3} exp(C mu |k-l, xi-eta|^{1/3}),
    // t <= min(|xi|, |eta|)^{2/3} / 2
    out.push_back(detail::fit_samples("J_commutator", spec.count, [&] {
        std::int64_t k, l;
        double eta, xi;
        draw_pair(k, l, eta, xi);
        double t = S.uniform(0, 0.5 * std::pow(std::min(std::abs(eta), std::abs(xi)), 2.0 / 3));
        double x = log_J(t, k, eta, p) - log_J(t, l, xi, p);
        double dist = freq_norm(static_cast<double>(k - l), xi - eta);
        double base = std::log(bracket(dist)) - denom(k, l, eta, xi, 2.0 / 3);
        return detail::Sample{detail::log_abs_expm1(x), base, p.mu * std::cbrt(dist),
                              detail::describe({{"t", t}, {"k", double(k)}, {"l", double(l)}, {"eta", eta}, {"xi", xi}})};
    }));
    return out;
}

// ---- continuity of Theta at the ends of each critical interval ----

struct JunctionReport {
    std::size_t checked = 0;
    double max_log_jump = 0;
    std::string worst;
    bool pass = false;
};

// Compares the resonant and non-resonant branches at t^- and t^+ for every
// admissible k and each eta.
inline JunctionReport verify_junctions(const std::vector<double>& etas, const WeightParams& p, double tol = 1e-12) {
    JunctionReport rep;
    for (double eta : etas) {
        std::int64_t N = floor_cbrt(std::abs(eta));
        for (std::int64_t k = 1; k <= N; ++k) {
            auto I = critical_interval(k, eta);
            // The resonant branch is active on [t^-, t^+); its right limit is
            // taken one ulp below t^+.
            double left = I.t_minus, right = std::nextafter(I.t_plus, 0.0);
            for (double t : {left, right}) {
                double res = theta_weight(t, k, eta, p).log_value;
                double nr = theta_nonresonant(t, eta, p).log_value;
                double jump = std::abs(res - nr) / std::max(1.0, std::abs(nr));
                ++rep.checked;
                if (jump > rep.max_log_jump) {
                    rep.max_log_jump = jump;
                    rep.worst = detail::describe({{"eta", eta}, {"k", double(k)}, {"t", t}});
                }
            }
        }
    }
    rep.pass = rep.max_log_jump <= tol;
    return rep;
}

}  // namespace shearlab
