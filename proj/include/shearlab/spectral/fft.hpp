#pragma once

// FFTW-backed transforms between lattice coefficients and grid values.
//   f(x, y) = 1/(2 pi Ly) sum_{k,eta} f^(k, eta) e^{i(kx + eta y)}
//   f^(k, eta) = 1/(2 pi) int int f e^{-i(kx + eta y)} dx dy
// so sum |f^|^2 / Ly = int int |f|^2. The (-1)^n factor accounts for the
// grid starting at y = -pi Ly.

#include <cstring>
#include <memory>
#include <vector>

#include <fftw3.h>

#include "shearlab/spectral/grid.hpp"

namespace shearlab::spectral {

class Transform {
public:
    explicit Transform(const Grid& g) : g_(g), n_(g.size()) {
        buf_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * n_));
        auto* b = reinterpret_cast<fftw_complex*>(buf_);
        // FFTW_ESTIMATE keeps plans, and hence results, reproducible.
        fwd_ = fftw_plan_dft_2d(g.Nx, g.Ny, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_2d(g.Nx, g.Ny, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
        int ny = g.Ny;
        fwd_y_ = fftw_plan_many_dft(1, &ny, g.Nx, b, nullptr, 1, ny, b, nullptr, 1, ny, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_y_ = fftw_plan_many_dft(1, &ny, g.Nx, b, nullptr, 1, ny, b, nullptr, 1, ny, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    Transform(const Transform&) = delete;
    Transform& operator=(const Transform&) = delete;
    ~Transform() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_destroy_plan(fwd_y_);
        fftw_destroy_plan(bwd_y_);
        fftw_free(buf_);
    }

    const Grid& grid() const { return g_; }

    // Grid values (real part), row-major over (x_i, y_j).
    void to_physical(const cplx* spec, double* phys) {
        const double scale = 1 / (2 * pi * g_.Ly);
        load_signed(spec, scale);
        fftw_execute(bwd_);
        for (std::size_t a = 0; a < n_; ++a) phys[a] = buf_[a].real();
    }
    void to_physical(const SpectralField& f, std::vector<double>& phys) {
        phys.resize(n_);
        to_physical(f.c.data(), phys.data());
    }

    void to_spectral(const double* phys, cplx* spec) {
        for (std::size_t a = 0; a < n_; ++a) buf_[a] = phys[a];
        fftw_execute(fwd_);
        store_signed(spec, 2 * pi * g_.Ly / double(n_));
    }
    void to_spectral(const std::vector<double>& phys, SpectralField& f) {
        f.Nx = g_.Nx;
        f.Ny = g_.Ny;
        f.c.resize(n_);
        to_spectral(phys.data(), f.c.data());
    }

    // Transform along y only: coefficients (k, eta) <-> values (k, y_j)
    // without the 1/(2 pi) of the x direction.
    void y_to_physical(const cplx* spec, cplx* mixed) {
        load_signed(spec, 1 / (2 * pi * g_.Ly));
        fftw_execute(bwd_y_);
        std::memcpy(static_cast<void*>(mixed), buf_, sizeof(cplx) * n_);
    }
    void y_to_spectral(const cplx* mixed, cplx* spec) {
        std::memcpy(static_cast<void*>(buf_), mixed, sizeof(cplx) * n_);
        fftw_execute(fwd_y_);
        store_signed(spec, 2 * pi * g_.Ly / g_.Ny);
    }

private:
    void load_signed(const cplx* spec, double scale) {
        for (int i = 0; i < g_.Nx; ++i)
            for (int j = 0; j < g_.Ny; ++j) {
                std::size_t a = g_.index(i, j);
                buf_[a] = spec[a] * ((j & 1) ? -scale : scale);
            }
    }
    void store_signed(cplx* spec, double scale) {
        for (int i = 0; i < g_.Nx; ++i)
            for (int j = 0; j < g_.Ny; ++j) {
                std::size_t a = g_.index(i, j);
                spec[a] = buf_[a] * ((j & 1) ? -scale : scale);
            }
    }

    Grid g_;
    std::size_t n_;
    cplx* buf_ = nullptr;
    fftw_plan fwd_, bwd_, fwd_y_, bwd_y_;
};

}  // namespace shearlab::spectral
