#pragma once

// Time stepping of the perturbation system in sheared coordinates
// z = x - t y. Coefficients are labelled by (k, eta); d_y acts as
// i(eta - k t) at time t, so the Couette transport is exact.

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "shearlab/spectral/exp_rk4.hpp"
#include "shearlab/spectral/fft.hpp"
#include "shearlab/spectral/state.hpp"

namespace shearlab::spectral {

struct Velocity {
    SpectralField ux, uy;
};

// psi = -omega / (k^2 + (eta - kt)^2), u = (-i(eta - kt) psi, i k psi).
inline Velocity velocity_from_vorticity(const Grid& g, const SpectralField& omega, double t) {
    Velocity v{SpectralField(g), SpectralField(g)};
    for (int i = 0; i < g.Nx; ++i) {
        int k = g.k_of(i);
        for (int j = 0; j < g.Ny; ++j) {
            if (k == 0 && j == 0) continue;
            double es = g.eta_of(j) - k * t;
            cplx psi = -omega(i, j) / (double(k) * k + es * es);
            v.ux(i, j) = -I_unit * es * psi;
            v.uy(i, j) = I_unit * double(k) * psi;
        }
    }
    return v;
}

// max over modes |ik u^x + i(eta - kt) u^y| / ||u||
inline double divergence_residual(const Grid& g, const Velocity& v, double t) {
    double worst = 0;
    for (int i = 0; i < g.Nx; ++i) {
        int k = g.k_of(i);
        for (int j = 0; j < g.Ny; ++j) {
            double es = g.eta_of(j) - k * t;
            worst = std::max(worst, std::abs(I_unit * double(k) * v.ux(i, j) + I_unit * es * v.uy(i, j)));
        }
    }
    double norm = std::sqrt(l2_squared(g, v.ux) + l2_squared(g, v.uy));
    return norm > 0 ? worst / (norm / std::sqrt(g.lattice_weight())) : 0.0;
}

class Solver {
public:
    Solver(const Grid& g, const SimConfig& c) : g_(g), c_(c), fft_(g) {
        validate(g);
        validate(c);
        for (int i = 0; i < g.Nx; ++i)
            for (int j = 0; j < g.Ny; ++j)
                if (g.in_band(i, j)) band_.push_back({g.index(i, j), g.k_of(i), g.eta_of(j)});
        for (auto& f : spec_) f.assign(g.size(), 0.0);
        for (auto& p : phys_) p.assign(g.size(), 0.0);
        prod_.assign(g.size(), 0.0);
    }

    const Grid& grid() const { return g_; }
    const SimConfig& config() const { return c_; }

    // Largest stable-looking dt from the CFL rate at the current state.
    double cfl_rate(const SimState& s) {
        double rate = 0;
        SpectralField nw(g_), nt(g_);
        nonlinear(s.t, s.omega, s.theta, nw, nt, &rate);
        return rate;
    }

    // One exponential RK4 step of size h. Throws numerical_error on CFL
    // violation (state untouched) or on non-finite output.
    void step(SimState& s, double h) {
        const std::size_t nb = band_.size();
        weights_.resize(nb);
        for (std::size_t m = 0; m < nb; ++m) weights_[m] = exp_rk4_weights(band_[m].k, band_[m].eta, s.t, h, c_.nu);

        SpectralField n0w(g_), n0t(g_), naw(g_), nat(g_), nbw(g_), nbt(g_), ncw(g_), nct(g_);
        SpectralField aw(g_), at(g_), bw(g_), bt(g_), cw(g_), ct(g_);
        double rate = 0;
        nonlinear(s.t, s.omega, s.theta, n0w, n0t, &rate);
        if (h * rate > c_.cfl) {
            std::ostringstream os;
            os << "CFL violated at t=" << s.t << ": dt=" << h << " rate=" << rate << ", suggested dt <= "
               << 0.9 * c_.cfl / rate;
            throw numerical_error(os.str());
        }
        const double tm = s.t + h / 2, te = s.t + h;
        for (std::size_t m = 0; m < nb; ++m) {
            auto a = band_[m].a;
            auto& w = weights_[m];
            aw.c[a] = w.e_first * s.omega.c[a] + w.phi_first * n0w.c[a];
            at.c[a] = s.theta.c[a] + h / 2 * n0t.c[a];
        }
        nonlinear(tm, aw, at, naw, nat, nullptr);
        for (std::size_t m = 0; m < nb; ++m) {
            auto a = band_[m].a;
            auto& w = weights_[m];
            bw.c[a] = w.e_first * s.omega.c[a] + w.phi_first * naw.c[a];
            bt.c[a] = s.theta.c[a] + h / 2 * nat.c[a];
        }
        nonlinear(tm, bw, bt, nbw, nbt, nullptr);
        for (std::size_t m = 0; m < nb; ++m) {
            auto a = band_[m].a;
            auto& w = weights_[m];
            cw.c[a] = w.e_second * aw.c[a] + w.phi_second * (2.0 * nbw.c[a] - n0w.c[a]);
            ct.c[a] = at.c[a] + h / 2 * (2.0 * nbt.c[a] - n0t.c[a]);
        }
        nonlinear(te, cw, ct, ncw, nct, nullptr);
        bool finite = true;
        for (std::size_t m = 0; m < nb; ++m) {
            auto a = band_[m].a;
            auto& w = weights_[m];
            s.omega.c[a] = w.e_full * s.omega.c[a] + w.w_start * n0w.c[a] + 2 * w.w_mid * (naw.c[a] + nbw.c[a]) +
                           w.w_end * ncw.c[a];
            s.theta.c[a] += h / 6 * (n0t.c[a] + 2.0 * (nat.c[a] + nbt.c[a]) + nct.c[a]);
            finite = finite && std::isfinite(std::norm(s.omega.c[a])) && std::isfinite(std::norm(s.theta.c[a]));
        }
        if (!finite) {
            std::ostringstream os;
            os << "non-finite coefficient after step ending at t=" << te;
            throw numerical_error(os.str());
        }
        s.t = te;
        apply_dealias(g_, s.omega);
        apply_dealias(g_, s.theta);
        enforce_hermitian(g_, s.omega);
        enforce_hermitian(g_, s.theta);
        s.omega(0, 0) = s.theta(0, 0) = 0;
    }

    // Explicit part of the right-hand side: -u.grad omega - gamma^2 d_z theta
    // and -u.grad theta (+ u^y for NSB3), dealiased. When rate is non-null
    // it receives max(|u^x - t u^y|/dx + |u^y|/dy).
    void nonlinear(double t, const SpectralField& w, const SpectralField& th, SpectralField& nw, SpectralField& nt,
                   double* rate) {
        for (auto& f : spec_) std::fill(f.begin(), f.end(), cplx{});
        auto& ux = spec_[0];
        auto& uy = spec_[1];
        auto& wz = spec_[2];
        auto& wy = spec_[3];
        auto& tz = spec_[4];
        auto& ty = spec_[5];
        for (auto& m : band_) {
            double es = m.eta - m.k * t;
            double p = double(m.k) * m.k + es * es;
            cplx psi = p > 0 ? -w.c[m.a] / p : cplx{};
            ux[m.a] = -I_unit * es * psi;
            uy[m.a] = I_unit * double(m.k) * psi;
            wz[m.a] = I_unit * double(m.k) * w.c[m.a];
            wy[m.a] = I_unit * es * w.c[m.a];
            tz[m.a] = I_unit * double(m.k) * th.c[m.a];
            ty[m.a] = I_unit * es * th.c[m.a];
        }
        for (int q = 0; q < 6; ++q) fft_.to_physical(spec_[q].data(), phys_[q].data());
        const auto &px = phys_[0], &py = phys_[1];
        if (rate) {
            double r = 0;
            const double idx = 1 / g_.dx(), idy = 1 / g_.dy();
            for (std::size_t a = 0; a < prod_.size(); ++a)
                r = std::max(r, std::abs(px[a] - t * py[a]) * idx + std::abs(py[a]) * idy);
            *rate = r;
        }
        // u^x d_z + u^y (d_y - t d_z) in sheared variables
        for (std::size_t a = 0; a < prod_.size(); ++a) prod_[a] = -(px[a] * phys_[2][a] + py[a] * phys_[3][a]);
        nw = SpectralField(g_);
        fft_.to_spectral(prod_.data(), nw.c.data());
        for (std::size_t a = 0; a < prod_.size(); ++a) prod_[a] = -(px[a] * phys_[4][a] + py[a] * phys_[5][a]);
        nt = SpectralField(g_);
        fft_.to_spectral(prod_.data(), nt.c.data());
        apply_dealias(g_, nw);
        apply_dealias(g_, nt);

        const double g2 = c_.gamma * c_.gamma;
        for (auto& m : band_) {
            nw.c[m.a] -= g2 * I_unit * double(m.k) * th.c[m.a];
            if (c_.system == System::NSB3) nt.c[m.a] += uy[m.a];
        }
        nw(0, 0) = nt(0, 0) = 0;
    }

private:
    struct BandMode {
        std::size_t a;
        int k;
        double eta;
    };
    Grid g_;
    SimConfig c_;
    Transform fft_;
    std::vector<BandMode> band_;
    std::vector<ExpRK4Weights> weights_;
    std::vector<cplx> spec_[6];
    std::vector<double> phys_[6];
    std::vector<double> prod_;
};

}  // namespace shearlab::spectral
