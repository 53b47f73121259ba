#pragma once

// Norms, weighted energies, CK terms, zero-mode coordinate quantities,
// the shift Phi(t, y) and the scattering residual, computed from snapshots.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "shearlab/rate_fit.hpp"
#include "shearlab/spectral/fft.hpp"
#include "shearlab/spectral/snapshot.hpp"
#include "shearlab/spectral/solver.hpp"
#include "shearlab/weights.hpp"

namespace shearlab {

using spectral::Grid;
using spectral::SimConfig;
using spectral::SimState;
using spectral::SpectralField;

// ---- Gevrey norms ----

// log of sum_{k,eta} |f|^2 e^{2 lambda |k,eta|^s} <k,eta>^{2 sigma} / Ly.
// Coefficients below floor * max|f| are left out.
inline double log_gevrey_sum(const Grid& g, const SpectralField& f, double lambda, double sigma, double s,
                             double floor = 0, int* worst_i = nullptr, int* worst_j = nullptr) {
    double cut = 0;
    if (floor > 0) {
        for (auto& v : f.c) cut = std::max(cut, std::abs(v));
        cut *= floor;
    }
    LogSum sum;
    double best = neg_inf;
    for (int i = 0; i < g.Nx; ++i)
        for (int j = 0; j < g.Ny; ++j) {
            double a = std::abs(f(i, j));
            if (a == 0 || a < cut) continue;
            double n = freq_norm(g.k_of(i), g.eta_of(j));
            double term = 2 * std::log(a) + 2 * lambda * std::pow(n, s) + 2 * sigma * std::log(bracket(n));
            if (term > best && worst_i) {
                best = term;
                *worst_i = i;
                *worst_j = j;
            }
            sum.add_log(term);
        }
    return sum.log() + std::log(g.lattice_weight());
}

inline double gevrey_norm(const Grid& g, const SpectralField& f, double lambda, double sigma, double s,
                          double floor = 0) {
    if (!(lambda >= 0)) throw std::invalid_argument("gevrey_norm: lambda >= 0 required");
    int wi = 0, wj = 0;
    double l = log_gevrey_sum(g, f, lambda, sigma, s, floor, &wi, &wj);
    double v = std::exp(0.5 * l);
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "gevrey_norm overflows; largest term at k=" << g.k_of(wi) << " eta=" << g.eta_of(wj);
        throw numerical_error(os.str());
    }
    return v;
}

// ---- zero-mode (x-averaged) series ----

// Coefficient histories over the eta lattice of the k = 0 row.
struct ZeroModeSeries {
    int Ny = 0;
    double Ly = 0;
    std::vector<double> t;
    std::vector<std::vector<cplx>> c;
};

inline double zero_mode_eta(int Ny, double Ly, int j) { return (j < Ny / 2 ? j : j - Ny) / Ly; }

// L^2 norm over the box of a y-only function, sum |f^|^2 / Ly.
inline double zero_mode_norm(const std::vector<cplx>& c, double Ly) {
    double s = 0;
    for (auto& v : c) s += std::norm(v);
    return std::sqrt(s / Ly);
}

// Values at y_j = -pi Ly + j 2 pi Ly / Ny (direct sum).
inline std::vector<double> zero_mode_values(const std::vector<cplx>& c, double Ly) {
    int Ny = int(c.size());
    std::vector<double> out(Ny);
    for (int j = 0; j < Ny; ++j) {
        double y = -pi * Ly + j * 2 * pi * Ly / Ny;
        cplx acc{};
        for (int q = 0; q < Ny; ++q) acc += c[q] * std::exp(I_unit * (zero_mode_eta(Ny, Ly, q) * y));
        out[j] = acc.real() / (2 * pi * Ly);
    }
    return out;
}

// <u^x> = -d_y psi_0 with psi_0 = -omega_0 / eta^2, i.e. i omega_0 / eta.
inline ZeroModeSeries ux_zero_history(const spectral::ZeroModeHistory& h) {
    ZeroModeSeries out{h.Ny, h.Ly, h.t, {}};
    for (auto& w : h.omega0) {
        std::vector<cplx> u(h.Ny);
        for (int j = 1; j < h.Ny; ++j) u[j] = I_unit * w[j] / zero_mode_eta(h.Ny, h.Ly, j);
        out.c.push_back(std::move(u));
    }
    return out;
}

inline ZeroModeSeries zero_history_from_snapshots(const Grid& g, const std::vector<SimState>& snaps) {
    spectral::ZeroModeHistory h;
    for (auto& s : snaps) h.record(g, s);
    return {h.Ny, h.Ly, h.t, h.omega0};
}

// Phi(t) = int_0^t <u^x> by the trapezoid rule on the recorded times.
// Non-increasing times or a spacing above max_gap_factor times the median
// spacing are rejected.
inline ZeroModeSeries shift_profile(const ZeroModeSeries& ux, double max_gap_factor = 4) {
    std::size_t n = ux.t.size();
    if (n == 0) throw config_error("shift_profile: empty history");
    std::vector<double> gaps;
    for (std::size_t i = 1; i < n; ++i) {
        double d = ux.t[i] - ux.t[i - 1];
        if (!(d > 0)) throw config_error("shift_profile: times must increase");
        gaps.push_back(d);
    }
    if (!gaps.empty()) {
        auto sorted = gaps;
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
        double med = sorted[sorted.size() / 2];
        for (std::size_t i = 0; i < gaps.size(); ++i)
            if (gaps[i] > max_gap_factor * med) {
                std::ostringstream os;
                os << "shift_profile: gap in history between t=" << ux.t[i] << " and t=" << ux.t[i + 1];
                throw config_error(os.str());
            }
    }
    ZeroModeSeries phi{ux.Ny, ux.Ly, ux.t, {}};
    std::vector<cplx> acc(ux.Ny);
    phi.c.push_back(acc);
    for (std::size_t i = 1; i < n; ++i) {
        double d = ux.t[i] - ux.t[i - 1];
        for (int j = 0; j < ux.Ny; ++j) acc[j] += 0.5 * d * (ux.c[i - 1][j] + ux.c[i][j]);
        phi.c.push_back(acc);
    }
    return phi;
}

inline std::size_t find_time(const std::vector<double>& ts, double t) {
    auto it = std::lower_bound(ts.begin(), ts.end(), t - 1e-9 * std::max(1.0, std::abs(t)));
    if (it == ts.end() || std::abs(*it - t) > 1e-9 * std::max(1.0, std::abs(t)))
        throw config_error("time " + std::to_string(t) + " not present in zero-mode history");
    return std::size_t(it - ts.begin());
}

// ---- coordinate quantities ----

struct CoordinateState {
    double t = 0;
    std::vector<cplx> h;        // d_y v - 1 = d_y Phi / t
    std::vector<cplx> g_shift;  // d_t v = <u^x>/t - Phi/t^2
    std::vector<cplx> f0;       // x-averaged vorticity
    std::vector<cplx> psi0;     // x-averaged stream function
    double consistency = 0;     // ||d_t(t h) + omega_0|| / ||omega_0||, central difference
};

inline std::vector<CoordinateState> coordinate_quantities(const spectral::ZeroModeHistory& hist) {
    const int Ny = hist.Ny;
    const double Ly = hist.Ly;
    auto ux = ux_zero_history(hist);
    auto phi = shift_profile(ux);
    std::size_t n = hist.size();
    std::vector<CoordinateState> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& cs = out[i];
        double t = hist.t[i];
        cs.t = t;
        cs.h.assign(Ny, 0.0);
        cs.g_shift.assign(Ny, 0.0);
        cs.f0 = hist.omega0[i];
        cs.psi0.assign(Ny, 0.0);
        for (int j = 1; j < Ny; ++j) {
            double eta = zero_mode_eta(Ny, Ly, j);
            cs.psi0[j] = -hist.omega0[i][j] / (eta * eta);
            if (t > 0) {
                cs.h[j] = I_unit * eta * phi.c[i][j] / t;
                cs.g_shift[j] = ux.c[i][j] / t - phi.c[i][j] / (t * t);
            }
        }
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double dt = hist.t[i + 1] - hist.t[i - 1];
        std::vector<cplx> r(Ny);
        for (int j = 0; j < Ny; ++j)
            r[j] = (out[i + 1].t * out[i + 1].h[j] - out[i - 1].t * out[i - 1].h[j]) / dt + hist.omega0[i][j];
        double ref = zero_mode_norm(hist.omega0[i], Ly);
        out[i].consistency = ref > 0 ? zero_mode_norm(r, Ly) / ref : 0.0;
    }
    return out;
}

// ---- weighted energies and CK terms ----

struct DiagnosticsOptions {
    double noise_floor = 1e-12;  // relative to the largest coefficient of the field
    double fit_lo = NAN, fit_hi = NAN;  // default [T/10, T]
    int threads = 1;
};

// Good unknown -gamma^2 d_z theta + Delta_L omega at frozen t.
inline SpectralField good_unknown_field(const Grid& g, const SimState& s, double gamma) {
    SpectralField K(g);
    for (int i = 0; i < g.Nx; ++i) {
        int k = g.k_of(i);
        for (int j = 0; j < g.Ny; ++j) {
            double es = g.eta_of(j) - k * s.t;
            K(i, j) = -gamma * gamma * I_unit * double(k) * s.theta(i, j) - (double(k) * k + es * es) * s.omega(i, j);
        }
    }
    return K;
}

// Same with Delta_t = d_zz + (1+h)^2 (d_y - t d_z)^2 + h_y (d_y - t d_z),
// h a function of y only.
inline SpectralField good_unknown_field_corrected(const Grid& g, spectral::Transform& fft, const SimState& s,
                                                  double gamma, const std::vector<cplx>& h_hat) {
    SpectralField zz(g), d1(g), d2(g), hf(g), hy(g);
    for (int i = 0; i < g.Nx; ++i) {
        int k = g.k_of(i);
        for (int j = 0; j < g.Ny; ++j) {
            double es = g.eta_of(j) - k * s.t;
            zz(i, j) = -double(k) * k * s.omega(i, j);
            d1(i, j) = I_unit * es * s.omega(i, j);
            d2(i, j) = -es * es * s.omega(i, j);
        }
    }
    for (int j = 0; j < g.Ny; ++j) {
        hf(0, j) = h_hat[j];
        hy(0, j) = I_unit * g.eta_of(j) * h_hat[j];
    }
    std::vector<double> pzz, p1, p2, ph, phy;
    fft.to_physical(zz, pzz);
    fft.to_physical(d1, p1);
    fft.to_physical(d2, p2);
    fft.to_physical(hf, ph);
    fft.to_physical(hy, phy);
    for (std::size_t a = 0; a < pzz.size(); ++a) {
        double v = 1 + ph[a];
        pzz[a] += v * v * p2[a] + phy[a] * p1[a];
    }
    SpectralField K(g);
    fft.to_spectral(pzz, K);
    spectral::apply_dealias(g, K);
    for (int i = 0; i < g.Nx; ++i)
        for (int j = 0; j < g.Ny; ++j) K(i, j) -= gamma * gamma * I_unit * double(g.k_of(i)) * s.theta(i, j);
    return K;
}

struct WeightedSums {
    double log_A2 = neg_inf;  // log sum |A phi|^2 / Ly
    double log_ck_lambda = neg_inf, log_ck_theta = neg_inf, log_ck_M = neg_inf, log_ck_B = neg_inf;
    int negative_terms = 0;
};

// All terms for one field at time t.
inline WeightedSums weighted_sums(const Grid& g, const SpectralField& f, double t, const WeightParams& p,
                                  double floor) {
    double cut = 0;
    for (auto& v : f.c) cut = std::max(cut, std::abs(v));
    cut *= floor;
    const double lambda = lambda_of_t(t, p);
    const double ldot = lambda_dot(t, p);
    const double cM = 4 * pi / p.delta_L;
    const double lw = std::log(g.lattice_weight());
    LogSum a2, ckl, ckt, ckm, ckb;
    int negative = 0;
    for (int i = 0; i < g.Nx; ++i)
        for (int j = 0; j < g.Ny; ++j) {
            double amp = std::abs(f(i, j));
            if (amp == 0 || amp < cut) continue;
            int k = g.k_of(i);
            double eta = g.eta_of(j);
            auto m = multiplier_parts(t, k, eta, p, lambda);
            double base = 2 * m.log_A + 2 * std::log(amp) + lw;
            a2.add_log(base);
            double n = freq_norm(k, eta);
            if (ldot < 0 && n > 0) ckl.add_log(std::log(-ldot) + p.s * std::log(n) + base);
            if (m.theta.d_log_dt > 0)
                ckt.add_log(std::log(m.theta.d_log_dt) + p.mu * m.eta_cbrt - m.theta.log_value - m.log_J + base);
            if (m.g.d_log_dt > 0)
                ckm.add_log(std::log(m.g.d_log_dt) + cM * m.eta_cbrt - m.g.log_value - m.log_M + base);
            double db = d_log_B_dt(t, k, eta, p);
            if (db > 0) ckb.add_log(std::log(db) + base);
            if (m.theta.d_log_dt < 0 || m.g.d_log_dt < 0 || db < 0) ++negative;
        }
    return {a2.log(), ckl.log(), ckt.log(), ckm.log(), ckb.log(), negative};
}

// ln E with E = (|A K|^2 + |A rho|^2) / 2.
inline double log_main_energy(const Grid& g, const SpectralField& K, const SpectralField& rho, double t,
                              const WeightParams& p, double floor = 1e-12) {
    return log_add(weighted_sums(g, K, t, p, floor).log_A2, weighted_sums(g, rho, t, p, floor).log_A2) -
           std::log(2.0);
}

// ---- scattering ----

// theta(t, x + t y + Phi(t, y), y) from the sheared field: each y row is
// shifted in z by Phi(t, y).
inline SpectralField scattering_profile(const Grid& g, spectral::Transform& fft, const SpectralField& theta,
                                        const std::vector<cplx>& phi_hat) {
    auto phi = zero_mode_values(phi_hat, g.Ly);
    std::vector<cplx> mixed(g.size());
    fft.y_to_physical(theta.c.data(), mixed.data());
    for (int i = 0; i < g.Nx; ++i) {
        int k = g.k_of(i);
        if (k == 0) continue;
        for (int j = 0; j < g.Ny; ++j) mixed[g.index(i, j)] *= std::exp(I_unit * (double(k) * phi[j]));
    }
    SpectralField out(g);
    fft.y_to_spectral(mixed.data(), out.c.data());
    return out;
}

// Energy fraction outside the retained band.
inline double out_of_band_fraction(const Grid& g, const SpectralField& f) {
    double in = 0, out = 0;
    for (int i = 0; i < g.Nx; ++i)
        for (int j = 0; j < g.Ny; ++j) (g.in_band(i, j) ? in : out) += std::norm(f(i, j));
    return in + out > 0 ? out / (in + out) : 0.0;
}

// ---- records ----

struct DiagnosticsRecord {
    double t = 0;
    double log_energy = neg_inf;            // ln E, linear-frame K
    double log_energy_corrected = neg_inf;  // ln E with the Delta_t good unknown
    double log_energy_d = neg_inf;          // ln E_d
    double log_energy_lo_f0 = neg_inf, log_energy_lo_h = neg_inf;
    double log_ck_lambda = neg_inf, log_ck_theta = neg_inf, log_ck_M = neg_inf, log_ck_B = neg_inf;
    int ck_negative_terms = 0;
    double omega_nz = 0, ux_nz = 0, uy = 0, theta_nz = 0;
    double shift_profile_norm = 0;
    double scattering_residual = 0;
    double profile_out_of_band = 0;
    double h_norm = 0, f0_norm = 0, g_shift_norm = 0, psi0_norm = 0;
    double coordinate_consistency = 0;
    double divergence = 0;
};

inline double log_sum_ck(const DiagnosticsRecord& r) {
    return log_add(log_add(r.log_ck_lambda, r.log_ck_theta), log_add(r.log_ck_M, r.log_ck_B));
}

inline const char* diagnostics_csv_header() {
    return "t,log_E,log_E_corrected,log_Ed,log_Elo_f0,log_Elo_h,log_ck_lambda,log_ck_theta,log_ck_M,log_ck_B,"
           "ck_negative_terms,omega_nz,ux_nz,uy,theta_nz,shift_norm,scattering_residual,profile_out_of_band,"
           "h_norm,f0_norm,g_shift_norm,psi0_norm,coordinate_consistency,divergence";
}

inline void write_csv_row(std::ostream& os, const DiagnosticsRecord& r) {
    os.precision(17);
    os << r.t << ',' << r.log_energy << ',' << r.log_energy_corrected << ',' << r.log_energy_d << ','
       << r.log_energy_lo_f0 << ',' << r.log_energy_lo_h << ',' << r.log_ck_lambda << ',' << r.log_ck_theta << ','
       << r.log_ck_M << ',' << r.log_ck_B << ',' << r.ck_negative_terms << ',' << r.omega_nz << ',' << r.ux_nz
       << ',' << r.uy << ',' << r.theta_nz << ',' << r.shift_profile_norm << ',' << r.scattering_residual << ','
       << r.profile_out_of_band << ',' << r.h_norm << ',' << r.f0_norm << ',' << r.g_shift_norm << ','
       << r.psi0_norm << ',' << r.coordinate_consistency << ',' << r.divergence << '\n';
}

struct DiagnosticsSummary {
    double epsilon = 0;
    double window_lo = 0, window_hi = 0;
    RateFit omega_fit, ux_fit, uy_fit, h_fit, f0_fit;
    double log_C_energy = neg_inf;  // ln max_t E / eps^2
    double log_C_ck = neg_inf;      // ln int sum CK dt / eps^2
    double scattering_ratio = NAN;  // residual(window_hi) / residual(window_lo)
    double scattering_max_rise = 0; // largest relative increase after 2 window_lo
    double scattering_fit_log = NAN, scattering_fit_cubic = NAN;  // coefficients of eps^2 ln(e+t)/<t>, eps/<t>^3
    double max_coordinate_consistency = 0;
    double max_energy_proxy_gap = 0;  // max |ln E_corrected - ln E|
    int ck_negative_terms = 0;
    std::string notes;
};

inline double zero_mode_log_gevrey(const std::vector<cplx>& c, double Ly, double lambda, double sigma, double s,
                                   int derivs) {
    LogSum sum;
    int Ny = int(c.size());
    for (int j = 0; j < Ny; ++j) {
        double a = std::abs(c[j]);
        if (a == 0) continue;
        double eta = std::abs(zero_mode_eta(Ny, Ly, j));
        if (derivs > 0 && eta == 0) continue;
        sum.add_log(2 * std::log(a) + 2 * derivs * std::log(std::max(eta, 1e-300)) + 2 * lambda * std::pow(eta, s) +
                    2 * sigma * std::log(bracket(eta)));
    }
    return sum.log() - std::log(Ly);
}

namespace detail {

inline int thread_count(int requested) {
    int n = requested;
    if (const char* env = std::getenv("TOOL_THREADS")) n = std::max(1, std::atoi(env));
    return std::max(1, n);
}

inline std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace detail

// Snapshot-by-snapshot diagnostics. zero_modes must contain every snapshot
// time; a finer cadence improves Phi and the coordinate quantities.
inline std::vector<DiagnosticsRecord> analyze(const Grid& g, const SimConfig& cfg, const WeightParams& p,
                                              const std::vector<SimState>& snaps,
                                              const spectral::ZeroModeHistory& zero_modes,
                                              const DiagnosticsOptions& opt = {}) {
    if (snaps.empty()) throw config_error("analyze: no snapshots");
    auto coords = coordinate_quantities(zero_modes);
    auto phi = shift_profile(ux_zero_history(zero_modes));
    std::vector<DiagnosticsRecord> recs(snaps.size());

    const std::size_t last = snaps.size() - 1;
    SpectralField final_profile;
    {
        std::unique_lock lock(detail::plan_mutex());
        spectral::Transform fft(g);
        lock.unlock();
        final_profile = scattering_profile(g, fft, snaps[last].theta, phi.c[find_time(phi.t, snaps[last].t)]);
    }
    double profile_cut = 0;
    for (auto& v : final_profile.c) profile_cut = std::max(profile_cut, std::abs(v));
    profile_cut *= opt.noise_floor;

    auto work = [&](std::size_t first, std::size_t stride) {
        std::unique_lock lock(detail::plan_mutex());
        spectral::Transform fft(g);
        lock.unlock();
        for (std::size_t q = first; q < snaps.size(); q += stride) {
            const SimState& s = snaps[q];
            DiagnosticsRecord& r = recs[q];
            r.t = s.t;
            std::size_t zi = find_time(zero_modes.t, s.t);
            const CoordinateState& cs = coords[zi];

            auto v = spectral::velocity_from_vorticity(g, s.omega, s.t);
            r.omega_nz = spectral::l2_norm(g, s.omega, true);
            r.ux_nz = spectral::l2_norm(g, v.ux, true);
            r.uy = spectral::l2_norm(g, v.uy);
            r.theta_nz = spectral::l2_norm(g, s.theta, true);
            r.divergence = spectral::divergence_residual(g, v, s.t);

            auto K = good_unknown_field(g, s, cfg.gamma);
            auto wk = weighted_sums(g, K, s.t, p, opt.noise_floor);
            auto wr = weighted_sums(g, s.theta, s.t, p, opt.noise_floor);
            r.log_energy = log_add(wk.log_A2, wr.log_A2) - std::log(2.0);
            r.log_ck_lambda = log_add(wk.log_ck_lambda, wr.log_ck_lambda);
            r.log_ck_theta = log_add(wk.log_ck_theta, wr.log_ck_theta);
            r.log_ck_M = log_add(wk.log_ck_M, wr.log_ck_M);
            r.log_ck_B = log_add(wk.log_ck_B, wr.log_ck_B);
            r.ck_negative_terms = wk.negative_terms + wr.negative_terms;
            auto Kc = good_unknown_field_corrected(g, fft, s, cfg.gamma, cs.h);
            r.log_energy_corrected =
                log_add(weighted_sums(g, Kc, s.t, p, opt.noise_floor).log_A2, wr.log_A2) - std::log(2.0);

            // E_d = <t>/2 |A <d_v>^2 h|^2 on the k = 0 row
            {
                SpectralField hh(g);
                for (int j = 0; j < g.Ny; ++j) {
                    double eta = g.eta_of(j);
                    hh(0, j) = (1 + eta * eta) * cs.h[j];
                }
                double la = weighted_sums(g, hh, s.t, p, opt.noise_floor).log_A2;
                r.log_energy_d = la + std::log(0.5 * bracket(s.t));
            }
            const double lam = lambda_of_t(s.t, p);
            LogSum lo;
            lo.add_log(zero_mode_log_gevrey(cs.f0, g.Ly, lam, p.beta, p.s, 0));
            for (int d = 1; d <= 3 && s.t > 0; ++d)
                lo.add_log(d * std::log(s.t / 4) + zero_mode_log_gevrey(cs.f0, g.Ly, lam, p.beta, p.s, d));
            r.log_energy_lo_f0 = lo.log();
            r.log_energy_lo_h =
                2 * std::log(bracket(s.t)) + zero_mode_log_gevrey(cs.h, g.Ly, lam, p.beta, p.s, 2);

            r.h_norm = zero_mode_norm(cs.h, g.Ly);
            r.f0_norm = zero_mode_norm(cs.f0, g.Ly);
            r.g_shift_norm = zero_mode_norm(cs.g_shift, g.Ly);
            r.psi0_norm = zero_mode_norm(cs.psi0, g.Ly);
            r.coordinate_consistency = cs.consistency;

            const auto& ph = phi.c[find_time(phi.t, s.t)];
            r.shift_profile_norm = zero_mode_norm(ph, g.Ly);
            auto prof = scattering_profile(g, fft, s.theta, ph);
            r.profile_out_of_band = out_of_band_fraction(g, prof);
            SpectralField diff(g);
            for (std::size_t a = 0; a < diff.c.size(); ++a) {
                cplx d = prof.c[a] - final_profile.c[a];
                diff.c[a] = std::abs(d) < profile_cut ? cplx{} : d;
            }
            r.scattering_residual = gevrey_norm(g, diff, p.lambda_prime, 0, p.s);
        }
    };
    int nt = std::min<int>(detail::thread_count(opt.threads), int(snaps.size()));
    if (nt <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nt; ++w) pool.emplace_back(work, std::size_t(w), std::size_t(nt));
        for (auto& th : pool) th.join();
    }
    return recs;
}

inline DiagnosticsSummary summarize(const std::vector<DiagnosticsRecord>& recs, const SimConfig& cfg,
                                    const DiagnosticsOptions& opt = {}) {
    DiagnosticsSummary s;
    s.epsilon = cfg.epsilon;
    double T = recs.empty() ? 0 : recs.back().t;
    s.window_lo = std::isnan(opt.fit_lo) ? T / 10 : opt.fit_lo;
    s.window_hi = std::isnan(opt.fit_hi) ? T : opt.fit_hi;
    std::ostringstream notes;

    auto series = [&](auto getter) {
        std::vector<std::pair<double, double>> out;
        for (auto& r : recs) out.emplace_back(r.t, getter(r));
        return out;
    };
    auto fit = [&](const char* name, auto getter) {
        try {
            return decay_fit(series(getter), s.window_lo, s.window_hi);
        } catch (const std::exception& e) {
            notes << name << ": " << e.what() << "; ";
            return RateFit{};
        }
    };
    s.omega_fit = fit("omega_nz", [](auto& r) { return r.omega_nz; });
    s.ux_fit = fit("ux_nz", [](auto& r) { return r.ux_nz; });
    s.uy_fit = fit("uy", [](auto& r) { return r.uy; });
    s.h_fit = fit("h", [](auto& r) { return r.h_norm; });
    s.f0_fit = fit("f0", [](auto& r) { return r.f0_norm; });

    double log_eps2 = 2 * std::log(cfg.epsilon);
    LogSum ck_integral;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        s.log_C_energy = std::max(s.log_C_energy, recs[i].log_energy - log_eps2);
        s.max_coordinate_consistency = std::max(s.max_coordinate_consistency, recs[i].coordinate_consistency);
        if (std::isfinite(recs[i].log_energy_corrected) && std::isfinite(recs[i].log_energy))
            s.max_energy_proxy_gap =
                std::max(s.max_energy_proxy_gap, std::abs(recs[i].log_energy_corrected - recs[i].log_energy));
        s.ck_negative_terms += recs[i].ck_negative_terms;
        if (i > 0) {
            double d = recs[i].t - recs[i - 1].t;
            ck_integral.add_log(std::log(0.5 * d) + log_sum_ck(recs[i - 1]));
            ck_integral.add_log(std::log(0.5 * d) + log_sum_ck(recs[i]));
        }
    }
    s.log_C_ck = ck_integral.log() - log_eps2;

    auto value_at = [&](double t) {
        for (auto& r : recs)
            if (std::abs(r.t - t) < 1e-9 * std::max(1.0, t)) return r.scattering_residual;
        return double(NAN);
    };
    double r_lo = value_at(s.window_lo), r_hi = value_at(s.window_hi);
    s.scattering_ratio = r_hi / r_lo;
    double prev = NAN;
    for (auto& r : recs) {
        if (r.t < 2 * s.window_lo || r.t > s.window_hi) continue;
        if (std::isfinite(prev) && prev > 0) s.scattering_max_rise = std::max(s.scattering_max_rise, r.scattering_residual / prev - 1);
        prev = r.scattering_residual;
    }
    // least squares of the residual on the two-term envelope
    {
        double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
        double e = cfg.epsilon;
        for (auto& r : recs) {
            if (r.t < s.window_lo || r.t > s.window_hi) continue;
            double x1 = e * e * std::log(std::exp(1.0) + r.t) / bracket(r.t), x2 = e / std::pow(bracket(r.t), 3);
            a11 += x1 * x1;
            a12 += x1 * x2;
            a22 += x2 * x2;
            b1 += x1 * r.scattering_residual;
            b2 += x2 * r.scattering_residual;
        }
        double det = a11 * a22 - a12 * a12;
        if (det > 0) {
            s.scattering_fit_log = (a22 * b1 - a12 * b2) / det;
            s.scattering_fit_cubic = (a11 * b2 - a12 * b1) / det;
        }
    }
    s.notes = notes.str();
    return s;
}

inline void write_summary(std::ostream& os, const DiagnosticsSummary& s) {
    os.precision(12);
    os << "epsilon=" << s.epsilon << "\nwindow_lo=" << s.window_lo << "\nwindow_hi=" << s.window_hi << '\n';
    auto fit = [&](const char* name, const RateFit& f) {
        os << name << ".exponent=" << f.exponent << '\n' << name << ".residual=" << f.residual << '\n';
    };
    fit("omega_nz", s.omega_fit);
    fit("ux_nz", s.ux_fit);
    fit("uy", s.uy_fit);
    fit("h", s.h_fit);
    fit("f0", s.f0_fit);
    os << "log_C_energy=" << s.log_C_energy << "\nlog_C_ck=" << s.log_C_ck << "\nscattering_ratio=" << s.scattering_ratio
       << "\nscattering_max_rise=" << s.scattering_max_rise << "\nscattering_fit_log=" << s.scattering_fit_log
       << "\nscattering_fit_cubic=" << s.scattering_fit_cubic
       << "\nmax_coordinate_consistency=" << s.max_coordinate_consistency
       << "\nmax_energy_proxy_gap=" << s.max_energy_proxy_gap << "\nck_negative_terms=" << s.ck_negative_terms
       << "\nnotes=" << s.notes << '\n';
}

}  // namespace shearlab
