#pragma once

// Frequency lattice for the sheared box x in [0, 2 pi), y in [-pi Ly, pi Ly).
// Coefficient arrays are stored in FFT order, index = i * Ny + j, with
// k = i (i < Nx/2) or i - Nx, and eta = n / Ly for n = j or j - Ny.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "shearlab/common.hpp"

namespace shearlab::spectral {

struct Grid {
    int Nx = 128;
    int Ny = 128;
    double Ly = 8;
    double dealias_fraction = 2.0 / 3.0;

    std::size_t size() const { return std::size_t(Nx) * Ny; }
    std::size_t index(int i, int j) const { return std::size_t(i) * Ny + j; }
    int k_of(int i) const { return i < Nx / 2 ? i : i - Nx; }
    int n_of(int j) const { return j < Ny / 2 ? j : j - Ny; }
    double eta_of(int j) const { return n_of(j) / Ly; }
    // array position of the mode (-k, -n)
    int mirror_i(int i) const { return i == 0 ? 0 : Nx - i; }
    int mirror_j(int j) const { return j == 0 ? 0 : Ny - j; }

    int k_band() const { return int(std::floor(dealias_fraction * Nx / 2 + 1e-12)); }
    int n_band() const { return int(std::floor(dealias_fraction * Ny / 2 + 1e-12)); }
    bool in_band(int i, int j) const { return std::abs(k_of(i)) <= k_band() && std::abs(n_of(j)) <= n_band(); }

    double dx() const { return 2 * pi / Nx; }
    double dy() const { return 2 * pi * Ly / Ny; }
    double x_of(int i) const { return i * dx(); }
    double y_of(int j) const { return -pi * Ly + j * dy(); }
    // quadrature weight of one lattice point in the frequency sums
    double lattice_weight() const { return 1 / Ly; }
};

inline bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

inline void validate(const Grid& g) {
    if (!power_of_two(g.Nx) || !power_of_two(g.Ny)) throw config_error("grid: Nx and Ny must be powers of two");
    if (g.Nx < 4 || g.Ny < 4) throw config_error("grid: Nx, Ny >= 4 required");
    if (!(g.Ly >= 4)) throw config_error("grid: Ly >= 4 required");
    if (!(g.dealias_fraction > 0 && g.dealias_fraction <= 1)) throw config_error("grid: dealias_fraction in (0, 1]");
}

struct SpectralField {
    int Nx = 0, Ny = 0;
    std::vector<cplx> c;

    SpectralField() = default;
    explicit SpectralField(const Grid& g) : Nx(g.Nx), Ny(g.Ny), c(g.size()) {}
    cplx& operator()(int i, int j) { return c[std::size_t(i) * Ny + j]; }
    cplx operator()(int i, int j) const { return c[std::size_t(i) * Ny + j]; }
};

// Zero everything outside the retained band.
inline void apply_dealias(const Grid& g, SpectralField& f) {
    for (int i = 0; i < g.Nx; ++i)
        for (int j = 0; j < g.Ny; ++j)
            if (!g.in_band(i, j)) f(i, j) = 0;
}

// Overwrite the (-k,-n) half from the (k,n) half so the field is exactly
// Hermitian; self-conjugate entries get their imaginary part dropped.
inline void enforce_hermitian(const Grid& g, SpectralField& f) {
    for (int i = 0; i < g.Nx; ++i)
        for (int j = 0; j < g.Ny; ++j) {
            int mi = g.mirror_i(i), mj = g.mirror_j(j);
            std::size_t a = g.index(i, j), b = g.index(mi, mj);
            if (a == b) {
                f.c[a] = {f.c[a].real(), 0.0};
            } else if (a < b) {
                cplx avg = 0.5 * (f.c[a] + std::conj(f.c[b]));
                f.c[a] = avg;
                f.c[b] = std::conj(avg);
            }
        }
    // Nyquist rows and columns have no partner inside the lattice.
    for (int j = 0; j < g.Ny; ++j) f(g.Nx / 2, j) = 0;
    for (int i = 0; i < g.Nx; ++i) f(i, g.Ny / 2) = 0;
}

inline double hermitian_defect(const Grid& g, const SpectralField& f) {
    double worst = 0;
    for (int i = 0; i < g.Nx; ++i)
        for (int j = 0; j < g.Ny; ++j)
            worst = std::max(worst, std::abs(f(i, j) - std::conj(f(g.mirror_i(i), g.mirror_j(j)))));
    return worst;
}

// sum |f|^2 / Ly, the L^2 norm squared of the physical field
inline double l2_squared(const Grid& g, const SpectralField& f, bool nonzero_only = false) {
    double s = 0;
    for (int i = 0; i < g.Nx; ++i) {
        if (nonzero_only && i == 0) continue;
        for (int j = 0; j < g.Ny; ++j) s += std::norm(f(i, j));
    }
    return s * g.lattice_weight();
}

inline double l2_norm(const Grid& g, const SpectralField& f, bool nonzero_only = false) {
    return std::sqrt(l2_squared(g, f, nonzero_only));
}

}  // namespace shearlab::spectral
