#pragma once

// Weights of the exponential fourth-order Runge-Kutta step (Cox-Matthews
// form) for y' = -nu p(t) y + N(t, y), p(t) = k^2 + (eta - k t)^2. The
// phi-functions become integrals of the exact propagator
// exp(-nu int_s^te p) against polynomials in s, taken by composite
// Gauss-Legendre in the lag u = te - s.

#include <algorithm>
#include <array>
#include <cmath>

#include "shearlab/linear_dynamics.hpp"

namespace shearlab::spectral {

struct ExpRK4Weights {
    double e_first = 1, e_second = 1, e_full = 1;  // propagators over [t0,t0+h/2], [t0+h/2,t0+h], [t0,t0+h]
    double phi_first = 0, phi_second = 0;          // int of the propagator over each half
    double w_start = 0, w_mid = 0, w_end = 0;      // full-step weights for N0, (Na + Nb)/2 pairs, Nc
};

namespace detail {

inline constexpr std::array<double, 4> gl8_x{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                             0.9602898564975363};
inline constexpr std::array<double, 4> gl8_w{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                             0.1012285362903763};

// Calls acc(u, weight * kernel(u)) on quadrature nodes covering [0, H]; the
// kernel exp(-nu int_{te-u}^{te} p) is dropped once its exponent passes 50.
template <class Acc>
void lag_quadrature(int k, double eta, double te, double H, double nu, Acc&& acc) {
    const double b = k * te - eta;
    const double kk = double(k) * k;
    const double lo = te - H;
    double p_hi = laplacian_symbol(k, eta, te), p_lo = laplacian_symbol(k, eta, lo);
    double p_min = std::min(p_hi, p_lo);
    if (k != 0) {
        double tc = eta / k;
        if (tc > lo && tc < te) p_min = kk;
    }
    double r_min = nu * p_min, r_max = nu * std::max(p_hi, p_lo);
    double span = r_min * H > 50 ? 50 / r_min : H;
    int pieces = std::clamp(int(std::ceil(r_max * span / 4)), 1, 512);
    double len = span / pieces;
    for (int q = 0; q < pieces; ++q) {
        double mid = (q + 0.5) * len, half = 0.5 * len;
        for (int m = 0; m < 4; ++m)
            for (int sgn = -1; sgn <= 1; sgn += 2) {
                double u = mid + sgn * half * gl8_x[m];
                double a = b - k * u;
                double kern = std::exp(-nu * u * (kk + (a * a + a * b + b * b) / 3));
                acc(u, half * gl8_w[m] * kern);
            }
    }
}

}  // namespace detail

inline ExpRK4Weights exp_rk4_weights(int k, double eta, double t0, double h, double nu) {
    ExpRK4Weights w;
    if (nu == 0) {
        w.phi_first = w.phi_second = h / 2;
        w.w_start = w.w_mid = w.w_end = h / 6;
        return w;
    }
    const double tm = t0 + h / 2, te = t0 + h;
    w.e_first = std::exp(-nu * symbol_integral(k, eta, t0, tm));
    w.e_second = std::exp(-nu * symbol_integral(k, eta, tm, te));
    w.e_full = std::exp(-nu * symbol_integral(k, eta, t0, te));
    detail::lag_quadrature(k, eta, tm, h / 2, nu, [&](double, double wk) { w.phi_first += wk; });
    detail::lag_quadrature(k, eta, te, h / 2, nu, [&](double, double wk) { w.phi_second += wk; });
    detail::lag_quadrature(k, eta, te, h, nu, [&](double u, double wk) {
        double s = 1 - u / h;  // position of the source time inside the step
        w.w_start += wk * (1 - s) * (1 - 2 * s);
        w.w_mid += wk * s * (1 - s);
        w.w_end += wk * s * (2 * s - 1);
    });
    return w;
}

}  // namespace shearlab::spectral
