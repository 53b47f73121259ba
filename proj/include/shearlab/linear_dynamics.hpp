#pragma once

// Single Fourier modes of the Boussinesq system linearized around Couette
// flow, written in the moving frame z = x - t y:
//   df/dt   = -gamma^2 i k rho - nu p(t) f
//   drho/dt =  gamma1 i k phi,    phi = -f / p(t),   p(t) = k^2 + (eta - k t)^2

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "shearlab/common.hpp"
#include "shearlab/quadrature.hpp"
#include "shearlab/rate_fit.hpp"

namespace shearlab {

struct LinearParams {
    double nu = 1.0;
    double gamma_sq = 1.0;
    double gamma1 = 1.0;  // 1: density is transported by the perturbation velocity, 0: it is not
};

inline void validate(const LinearParams& p) {
    if (!(p.nu >= 0) || !(p.gamma_sq >= 0)) throw std::invalid_argument("LinearParams: nu and gamma_sq must be >= 0");
}

struct LinearModeState {
    int k = 1;
    double eta = 0;
    cplx f{};
    cplx rho{};
    double t = 0;
};

inline double laplacian_symbol(int k, double eta, double t) {
    double e = eta - k * t;
    return double(k) * k + e * e;
}

// Integral of the symbol over [t0, t1]; written so that it stays accurate
// when both ends are large.
inline double symbol_integral(int k, double eta, double t0, double t1) {
    double a = k * t0 - eta, b = k * t1 - eta, d = t1 - t0;
    return d * (double(k) * k + (a * a + a * b + b * b) / 3);
}

inline cplx good_unknown(const LinearModeState& s, const LinearParams& p) {
    return -p.gamma_sq * I_unit * double(s.k) * s.rho - laplacian_symbol(s.k, s.eta, s.t) * s.f;
}

struct ModeDerivative {
    cplx df, drho;
};

inline ModeDerivative mode_rhs(const LinearModeState& s, const LinearParams& p) {
    if (s.k == 0) throw std::invalid_argument("mode_rhs: k = 0");
    double sym = laplacian_symbol(s.k, s.eta, s.t);
    cplx phi = -s.f / sym;
    return {-p.gamma_sq * I_unit * double(s.k) * s.rho - p.nu * sym * s.f, p.gamma1 * I_unit * double(s.k) * phi};
}

// dK/dt along mode_rhs. For nu = gamma1 = 1 this is
// -p K - gamma^2 k^2 f / p + 2k(eta - kt) f.
inline cplx good_unknown_evolution(const LinearModeState& s, const LinearParams& p) {
    if (s.k == 0) throw std::invalid_argument("good_unknown_evolution: k = 0");
    double sym = laplacian_symbol(s.k, s.eta, s.t);
    double kd = s.k;
    cplx K = good_unknown(s, p);
    return -p.nu * sym * K + (1 - p.nu) * p.gamma_sq * I_unit * kd * sym * s.rho +
           2 * kd * (s.eta - kd * s.t) * s.f - p.gamma1 * p.gamma_sq * kd * kd / sym * s.f;
}

// Exact solution for gamma1 = 0: rho stays put and
// f(t) = e^{-P(t)} f_in - gamma^2 i k rho_in int_0^t e^{-(P(t) - P(s))} ds.
inline LinearModeState closed_form_viscous(int k, double eta, cplx f_in, cplx rho_in, double t, double nu,
                                           double gamma_sq) {
    if (k == 0) throw std::invalid_argument("closed_form_viscous: k = 0");
    LinearModeState out{k, eta, {}, rho_in, t};
    double decay = nu * symbol_integral(k, eta, 0, t);
    out.f = std::exp(-decay) * f_in;
    if (rho_in == cplx{} || t <= 0) return out;

    // Integrate in the lag u = t - s so the kernel is computed without
    // cancellation. It is concentrated within ~1/p(t) of u = 0; the nodes
    // resolve each scale.
    const double b = k * t - eta;
    auto decay_over_lag = [&](double u) {
        double a = b - k * u;
        return nu * u * (double(k) * k + (a * a + a * b + b * b) / 3);
    };
    auto kernel = [&](double u) { return std::exp(-decay_over_lag(u)); };
    double width = 1 / std::max(nu * laplacian_symbol(k, eta, t), 1e-3);
    std::vector<double> nodes{0, t};
    for (double w = width; w < t; w *= 4) nodes.push_back(w);
    double center_lag = t - eta / k;
    if (center_lag > 0 && center_lag < t) nodes.push_back(center_lag);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    double integral = 0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (decay_over_lag(nodes[i]) > 45) break;
        integral += integrate_gk(kernel, nodes[i], nodes[i + 1]);
    }
    out.f -= gamma_sq * I_unit * double(k) * rho_in * integral;
    return out;
}

namespace detail {

using mode_vec = std::array<double, 4>;

inline mode_vec pack(cplx a, cplx b) { return {a.real(), a.imag(), b.real(), b.imag()}; }

// One stretch of the integrating-factor formulation. F = e^{P(t) - P(t0)} f
// removes the viscous stiffness; the stretch is kept short enough that the
// factor stays moderate.
inline void advance_stretch(LinearModeState& s, const LinearParams& p, double t1, double rtol) {
    const double t0 = s.t;
    const int k = s.k;
    const double eta = s.eta;
    auto rhs = [&](const mode_vec& x, mode_vec& dx, double t) {
        double grow = p.nu > 0 ? std::exp(p.nu * symbol_integral(k, eta, t0, t)) : 1.0;
        cplx F{x[0], x[1]}, rho{x[2], x[3]};
        cplx dF = -grow * p.gamma_sq * I_unit * double(k) * rho;
        cplx drho = -p.gamma1 * I_unit * double(k) * F / (grow * laplacian_symbol(k, eta, t));
        dx = pack(dF, drho);
    };
    mode_vec x = pack(s.f, s.rho);
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(rtol * 1e-3, rtol, ode::runge_kutta_dopri5<mode_vec>());
    double dt0 = std::min(1e-3, (t1 - t0) / 16);
    if (t1 > t0) ode::integrate_adaptive(stepper, rhs, x, t0, t1, dt0);
    double shrink = p.nu > 0 ? std::exp(-p.nu * symbol_integral(k, eta, t0, t1)) : 1.0;
    s.f = cplx{x[0], x[1]} * shrink;
    s.rho = cplx{x[2], x[3]};
    s.t = t1;
}

}  // namespace detail

// Adaptive Dormand-Prince integration of mode_rhs from s.t to t_end.
inline LinearModeState integrate_mode(LinearModeState s, const LinearParams& p, double t_end, double rtol = 1e-10) {
    if (s.k == 0) throw std::invalid_argument("integrate_mode: k = 0");
    while (s.t < t_end) {
        double t1 = t_end;
        if (p.nu > 0 && p.nu * symbol_integral(s.k, s.eta, s.t, t1) > 20) {
            double lo = s.t, hi = t1;
            for (int i = 0; i < 60; ++i) {
                double mid = 0.5 * (lo + hi);
                (p.nu * symbol_integral(s.k, s.eta, s.t, mid) > 20 ? hi : lo) = mid;
            }
            t1 = std::max(lo, s.t + 1e-12 * std::max(1.0, s.t));
        }
        detail::advance_stretch(s, p, t1, rtol);
    }
    return s;
}

// Mode states at each of the (increasing) times.
inline std::vector<LinearModeState> integrate_mode_at(LinearModeState s, const LinearParams& p,
                                                      const std::vector<double>& times, double rtol = 1e-10) {
    std::vector<LinearModeState> out;
    out.reserve(times.size());
    for (double t : times) {
        if (t < s.t) throw std::invalid_argument("integrate_mode_at: times must increase");
        s = integrate_mode(s, p, t, rtol);
        out.push_back(s);
    }
    return out;
}

// ---- inviscid decay rates ----

struct ModeIndex {
    int k;
    double eta;
};

enum class RateDataPolicy {
    // Data on the dominant large-time branch rho ~ tau^m, m = -1/2 + sqrt(1/4 - gamma^2),
    // tau = t - eta/k, obtained by integrating back from a far-future seed.
    dominant_branch,
    // The given initial values on every mode.
    initial_data,
};

struct RateScanOptions {
    RateDataPolicy policy = RateDataPolicy::dominant_branch;
    cplx f_in{1.0, 0.0};
    cplx rho_in{0.0, 0.0};
    std::size_t samples = 48;
    double rtol = 1e-11;
};

struct RateScanRow {
    std::string quantity;  // u1, u2, theta, omega
    RateFit fit;
    double expected = NAN;
};

// Large-time exponents of (u1, u2, theta, omega) for the inviscid system.
// density_zero: theta vanishes identically (gamma1 = 0 with rho_in = 0).
inline std::array<double, 4> expected_inviscid_exponents(const LinearParams& p, bool density_zero = false) {
    if (density_zero) return {-1, -2, NAN, 0};
    if (p.gamma_sq == 0) return {-1, -2, 0, 0};
    if (p.gamma1 == 0) return {0, -1, 0, 1};
    double disc = 0.25 - p.gamma_sq;
    double m = -0.5 + (disc > 0 ? std::sqrt(disc) : 0.0);
    return {m, m - 1, m, m + 1};
}

inline LinearModeState dominant_branch_data(int k, double eta, const LinearParams& p, double seed_time,
                                            double rtol) {
    double disc = 0.25 - p.gamma_sq;
    cplx m = disc >= 0 ? cplx{-0.5 + std::sqrt(disc), 0} : cplx{-0.5, std::sqrt(-disc)};
    double tau = seed_time - eta / k;
    cplx rho = std::pow(cplx{tau, 0}, m);
    cplx drho = m * rho / tau;
    LinearModeState s{k, eta, I_unit * laplacian_symbol(k, eta, seed_time) * drho / double(k), rho, seed_time};
    // Backward in time: integrate the time-reversed system in s = -t.
    namespace ode = boost::numeric::odeint;
    using V = detail::mode_vec;
    auto rhs = [&](const V& x, V& dx, double minus_t) {
        LinearModeState st{k, eta, {x[0], x[1]}, {x[2], x[3]}, -minus_t};
        auto d = mode_rhs(st, p);
        dx = detail::pack(-d.df, -d.drho);
    };
    V x = detail::pack(s.f, s.rho);
    auto stepper = ode::make_controlled(rtol * 1e-3, rtol, ode::runge_kutta_dopri5<V>());
    ode::integrate_adaptive(stepper, rhs, x, -seed_time, 0.0, 1e-3);
    return {k, eta, {x[0], x[1]}, {x[2], x[3]}, 0.0};
}

inline std::vector<RateScanRow> yang_lin_rate_scan(const LinearParams& p, const std::vector<ModeIndex>& modes,
                                                   double T, const RateScanOptions& opt = {}) {
    if (p.nu != 0) throw std::invalid_argument("yang_lin_rate_scan: inviscid system only (nu = 0)");
    if (modes.empty()) throw std::invalid_argument("yang_lin_rate_scan: empty mode set");
    validate(p);
    bool branch = opt.policy == RateDataPolicy::dominant_branch && p.gamma_sq > 0 && p.gamma1 == 1;
    auto times = log_spaced(T / 10, T, opt.samples);
    std::vector<std::array<double, 4>> sq(times.size(), {0, 0, 0, 0});
    for (const auto& m : modes) {
        LinearModeState s = branch ? dominant_branch_data(m.k, m.eta, p, 10 * T, opt.rtol)
                                   : LinearModeState{m.k, m.eta, opt.f_in, opt.rho_in, 0.0};
        auto states = integrate_mode_at(s, p, times, opt.rtol);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const auto& st = states[i];
            double sym = laplacian_symbol(st.k, st.eta, st.t);
            double psi = std::abs(st.f) / sym;
            double shifted = st.eta - st.k * st.t;
            sq[i][0] += shifted * shifted * psi * psi;
            sq[i][1] += double(st.k) * st.k * psi * psi;
            sq[i][2] += std::norm(st.rho);
            sq[i][3] += std::norm(st.f);
        }
    }
    bool density_zero = !branch && opt.rho_in == cplx{} && p.gamma1 == 0;
    auto expected = expected_inviscid_exponents(p, density_zero);
    const char* names[4] = {"u1", "u2", "theta", "omega"};
    std::vector<RateScanRow> rows;
    for (int q = 0; q < 4; ++q) {
        RateScanRow row;
        row.quantity = names[q];
        row.expected = expected[q];
        row.fit.window_lo = T / 10;
        row.fit.window_hi = T;
        std::vector<std::pair<double, double>> series;
        for (std::size_t i = 0; i < times.size(); ++i) series.emplace_back(times[i], std::sqrt(sq[i][q]));
        try {
            row.fit = decay_fit(series, T / 10, T);
        } catch (const std::invalid_argument&) {
            row.fit.series = series;
        }
        rows.push_back(row);
    }
    return rows;
}

// ---- viscous bound ----

struct ViscousBoundRow {
    int k = 1;
    double eta = 0;
    double t = 0;
    std::string data;  // which initial datum
    double ratio = 0;  // |f(t)| / (e^{-int p}|f_in| + k/((kt-eta)^2+k^2) |rho_in|)
};

struct ViscousBoundReport {
    std::vector<ViscousBoundRow> rows;
    double constant = 0;  // max ratio
    std::string worst;
};

// Sweeps the closed-form viscous solution (gamma1 = 0) over the modes and a
// uniform time grid on [0, T], for unit vorticity data, unit density data
// and both together.
inline ViscousBoundReport viscous_bound_sweep(const std::vector<int>& ks, const std::vector<double>& etas, double T,
                                              std::size_t samples, double nu = 1, double gamma_sq = 1) {
    if (ks.empty() || etas.empty()) throw std::invalid_argument("viscous_bound_sweep: empty mode set");
    if (!(T > 0) || samples < 2) throw std::invalid_argument("viscous_bound_sweep: need T > 0 and >= 2 samples");
    struct Datum {
        const char* name;
        cplx f, rho;
    };
    const Datum data[] = {{"vorticity", {1, 0}, {0, 0}}, {"density", {0, 0}, {1, 0}}, {"both", {1, 0}, {0, 1}}};
    ViscousBoundReport rep;
    for (int k : ks) {
        if (k == 0) throw std::invalid_argument("viscous_bound_sweep: k = 0");
        for (double eta : etas) {
            for (const auto& d : data) {
                for (std::size_t i = 0; i < samples; ++i) {
                    double t = T * double(i) / double(samples - 1);
                    auto cf = closed_form_viscous(k, eta, d.f, d.rho, t, nu, gamma_sq);
                    double kd = std::abs(double(k)), sh = k * t - eta;
                    double bound = std::exp(-nu * symbol_integral(k, eta, 0, t)) * std::abs(d.f) +
                                   kd / (sh * sh + kd * kd) * std::abs(d.rho);
                    ViscousBoundRow row{k, eta, t, d.name, std::abs(cf.f) / bound};
                    if (row.ratio > rep.constant) {
                        rep.constant = row.ratio;
                        std::ostringstream w;
                        w << "k=" << k << " eta=" << eta << " t=" << t << " data=" << d.name;
                        rep.worst = w.str();
                    }
                    rep.rows.push_back(row);
                }
            }
        }
    }
    return rep;
}

// Largest |integrated - closed form| / |closed form| for f over the modes at
// the given increasing times (gamma1 = 0, rho_in != 0 so f stays away from 0).
inline double closed_form_integrator_gap(const std::vector<ModeIndex>& modes, const std::vector<double>& times,
                                         double nu, double gamma_sq, cplx f_in, cplx rho_in, double rtol = 1e-10) {
    if (rho_in == cplx{}) throw std::invalid_argument("closed_form_integrator_gap: rho_in must be nonzero");
    LinearParams lp{nu, gamma_sq, 0};
    double worst = 0;
    for (const auto& m : modes) {
        auto states = integrate_mode_at(LinearModeState{m.k, m.eta, f_in, rho_in, 0}, lp, times, rtol);
        for (std::size_t i = 0; i < times.size(); ++i) {
            auto cf = closed_form_viscous(m.k, m.eta, f_in, rho_in, times[i], nu, gamma_sq);
            worst = std::max(worst, std::abs(states[i].f - cf.f) / std::abs(cf.f));
        }
    }
    return worst;
}

}  // namespace shearlab
