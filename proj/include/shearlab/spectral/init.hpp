#pragma once

#include <cmath>
#include <cstdint>

#include "shearlab/spectral/state.hpp"

namespace shearlab::spectral {

namespace detail {

inline std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in (0, 1), a pure function of its arguments.
inline double hashed_uniform(std::uint64_t seed, std::uint64_t field, std::int64_t k, std::uint64_t slot) {
    std::uint64_t h = splitmix(seed);
    h = splitmix(h ^ (field * 0x632be59bd9b4e019ULL));
    h = splitmix(h ^ std::uint64_t(k + (1LL << 40)));
    h = splitmix(h ^ (slot * 0x8cb92ba72f3d8dd7ULL));
    return (double(h >> 11) + 0.5) / 9007199254740992.0;
}

inline double hashed_normal(std::uint64_t seed, std::uint64_t field, std::int64_t k, std::uint64_t slot) {
    double u1 = hashed_uniform(seed, field, k, 2 * slot), u2 = hashed_uniform(seed, field, k, 2 * slot + 1);
    return std::sqrt(-2 * std::log(u1)) * std::cos(2 * pi * u2);
}

}  // namespace detail

// Each x-wavenumber carries a packet centred at a random y_k with a random
// complex amplitude, shaped by exp(-2 lambda0 <k,eta>^s). The k = 0 columns
// vanish at eta = 0 (zero means).
inline SimState init_perturbation(const Grid& g, const SimConfig& c) {
    validate(g);
    validate(c);
    SimState st{SpectralField(g), SpectralField(g), 0.0};
    if (c.epsilon == 0) return st;

    auto envelope = [&](int k, double eta) {
        return std::exp(-2 * c.lambda0 * std::pow(bracket(freq_norm(k, eta)), c.s_init));
    };
    for (int field = 0; field < 2; ++field) {
        SpectralField& f = field == 0 ? st.omega : st.theta;
        for (int i = 0; i < g.Nx; ++i) {
            int k = g.k_of(i);
            if (k < 0 || !g.in_band(i, 0)) continue;
            double yk = c.shift_range * (2 * detail::hashed_uniform(c.seed, field, k, 0) - 1);
            cplx amp{detail::hashed_normal(c.seed, field, k, 1), detail::hashed_normal(c.seed, field, k, 2)};
            if (k == 0) amp = {amp.real(), 0.0};
            for (int j = 0; j < g.Ny; ++j) {
                if (!g.in_band(i, j)) continue;
                double eta = g.eta_of(j);
                cplx v = amp * envelope(k, eta) * std::exp(-I_unit * (eta * yk));
                if (k == 0) v *= field == 0 ? cplx{eta * eta, 0} : I_unit * eta;
                f(i, j) = v;
                if (k > 0) f(g.mirror_i(i), g.mirror_j(j)) = std::conj(v);
            }
        }
        f(0, 0) = 0;
    }

    double total = 0;
    for (int i = 0; i < g.Nx; ++i)
        for (int j = 0; j < g.Ny; ++j) {
            double w = std::exp(2 * c.lambda0 * std::pow(freq_norm(g.k_of(i), g.eta_of(j)), c.s_init));
            total += (std::norm(st.omega(i, j)) + std::norm(st.theta(i, j))) * w;
        }
    double scale = c.epsilon / std::sqrt(total * g.lattice_weight());
    for (auto& v : st.omega.c) v *= scale;
    for (auto& v : st.theta.c) v *= scale;
    return st;
}

}  // namespace shearlab::spectral
