#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "shearlab/diagnostics.hpp"
#include "shearlab/spectral/run.hpp"

using namespace shearlab;

namespace {

const WeightParams P = WeightParams::defaults();

Grid grid16() {
    Grid g;
    g.Nx = g.Ny = 16;
    g.Ly = 4;
    return g;
}

}  // namespace

TEST(DecayFit, RecoversPowerLaw) {
    std::vector<std::pair<double, double>> s;
    for (double t : log_spaced(1, 100, 30)) s.emplace_back(t, 3.5 * std::pow(t, -2.25));
    auto fit = decay_fit(s, 5, 50);
    EXPECT_TRUE(fit.ok);
    EXPECT_NEAR(fit.exponent, -2.25, 1e-12);
    EXPECT_LT(fit.residual, 1e-12);
    for (auto& [t, v] : fit.series) {
        EXPECT_GE(t, 5);
        EXPECT_LE(t, 50);
    }
}

TEST(DecayFit, RejectsThinOrBadWindows) {
    std::vector<std::pair<double, double>> s;
    for (int i = 1; i <= 20; ++i) s.emplace_back(i, 1.0 / i);
    EXPECT_THROW(decay_fit(s, 1, 5), std::invalid_argument);
    s[10].second = 0;
    EXPECT_THROW(decay_fit(s, 1, 20), std::invalid_argument);
    std::vector<std::pair<double, double>> flat(10, {2.0, 1.0});
    EXPECT_THROW(decay_fit(flat, 1, 3), std::invalid_argument);
}

TEST(LogSpaced, Endpoints) {
    auto v = log_spaced(0.1, 1e3, 5);
    ASSERT_EQ(v.size(), 5u);
    EXPECT_NEAR(v.front(), 0.1, 1e-16);
    EXPECT_EQ(v.back(), 1e3);
    EXPECT_NEAR(v[2], 10, 1e-12);
}

TEST(GevreySum, MatchesDirectSumAndHonoursFloor) {
    auto g = grid16();
    SpectralField f(g);
    f(1, 2) = {3, 4};
    f(g.mirror_i(1), g.mirror_j(2)) = {3, -4};
    f(0, 1) = {0.4, 0};  // below a floor of 0.1 * 5
    double n = freq_norm(1, g.eta_of(2));
    double term = std::log(25.0) + 2 * 0.7 * std::pow(n, 0.5) + 2 * 3 * std::log(bracket(n));
    double want = std::log(2.0) + term - std::log(g.Ly);
    EXPECT_NEAR(log_gevrey_sum(g, f, 0.7, 3, 0.5, 0.1), want, 1e-13);
    double n1 = g.eta_of(1);
    double small = std::log(0.16) + 2 * 0.7 * std::pow(n1, 0.5) + 2 * 3 * std::log(bracket(n1)) - std::log(g.Ly);
    EXPECT_NEAR(log_gevrey_sum(g, f, 0.7, 3, 0.5, 0), log_add(want, small), 1e-13);
    EXPECT_NEAR(gevrey_norm(g, f, 0, 0, 1), std::sqrt(l2_squared(g, f)), 1e-15);
    EXPECT_THROW(gevrey_norm(g, f, 800, 0, 1), numerical_error);
    EXPECT_THROW(gevrey_norm(g, f, -1, 0, 1), std::invalid_argument);
}

TEST(ZeroModes, ValuesMatchPhysicalTransform) {
    auto g = grid16();
    std::mt19937_64 rng(1);
    std::normal_distribution<> n;
    SpectralField f(g);
    for (int j = 1; j < g.n_band() + 1; ++j) {
        f(0, j) = {n(rng), n(rng)};
        f(0, g.mirror_j(j)) = std::conj(f(0, j));
    }
    spectral::Transform fft(g);
    std::vector<double> phys;
    fft.to_physical(f, phys);
    auto vals = zero_mode_values(std::vector<cplx>(f.c.begin(), f.c.begin() + g.Ny), g.Ly);
    // an x-independent field: every column holds the same profile
    for (int j = 0; j < g.Ny; ++j) EXPECT_NEAR(vals[j], phys[g.index(3, j)], 1e-14);
}

TEST(ShiftProfile, TrapezoidOfLinearSeriesIsExact) {
    ZeroModeSeries ux{4, 4.0, {0, 0.5, 1.0, 1.5, 2.0}, {}};
    for (double t : ux.t) ux.c.push_back({0, cplx{2 * t, 0}, cplx{1, -t}, 0});
    auto phi = shift_profile(ux);
    ASSERT_EQ(phi.c.size(), 5u);
    EXPECT_NEAR(phi.c[4][1].real(), 4.0, 1e-15);          // int 2t
    EXPECT_NEAR(phi.c[4][2].imag(), -2.0, 1e-15);         // int -t
    EXPECT_NEAR(phi.c[2][2].real(), 1.0, 1e-15);
    EXPECT_EQ(phi.c[0][1], cplx{});
}

TEST(ShiftProfile, RejectsGapsAndDisorder) {
    ZeroModeSeries ux{2, 4.0, {0, 1, 2, 3, 30}, std::vector<std::vector<cplx>>(5, std::vector<cplx>(2))};
    EXPECT_THROW(shift_profile(ux), config_error);
    ux.t = {0, 1, 1, 2, 3};
    EXPECT_THROW(shift_profile(ux), config_error);
    EXPECT_THROW(shift_profile(ZeroModeSeries{}), config_error);
    EXPECT_EQ(find_time({0, 0.5, 1}, 0.5), 1u);
    EXPECT_THROW(find_time({0, 0.5, 1}, 0.7), config_error);
}

TEST(CoordinateQuantities, ConsistentForLinearVorticity) {
    // omega_0 linear in t: trapezoid and central differences are both exact
    spectral::ZeroModeHistory h;
    h.Ny = 8;
    h.Ly = 4;
    for (int n = 0; n <= 10; ++n) {
        double t = 0.1 * n;
        std::vector<cplx> w(8);
        for (int j = 1; j < 8; ++j) w[j] = cplx{1.0 + j, 0.5 * j} * (1 + 2 * t) / double(j * j);
        h.t.push_back(t);
        h.omega0.push_back(w);
    }
    auto cs = coordinate_quantities(h);
    ASSERT_EQ(cs.size(), 11u);
    for (std::size_t i = 1; i + 1 < cs.size(); ++i) EXPECT_LT(cs[i].consistency, 1e-12);
    // t h = -int_0^t omega_0
    double t = h.t[10];
    for (int j = 1; j < 8; ++j) {
        cplx integral = cplx{1.0 + j, 0.5 * j} * (t + t * t) / double(j * j);
        EXPECT_LT(std::abs(t * cs[10].h[j] + integral), 1e-13);
        double eta = zero_mode_eta(8, 4, j);
        EXPECT_LT(std::abs(cs[10].psi0[j] + h.omega0[10][j] / (eta * eta)), 1e-15);
    }
    EXPECT_EQ(cs[0].h[3], cplx{});
}

TEST(GoodUnknown, SingleModeFormula) {
    auto g = grid16();
    SimState s{SpectralField(g), SpectralField(g), 1.5};
    s.omega(2, 3) = {1, 2};
    s.theta(2, 3) = {0.5, -1};
    s.omega(g.mirror_i(2), g.mirror_j(3)) = std::conj(s.omega(2, 3));
    s.theta(g.mirror_i(2), g.mirror_j(3)) = std::conj(s.theta(2, 3));
    auto K = good_unknown_field(g, s, 0.8);
    double es = g.eta_of(3) - 2 * 1.5;
    cplx want = -0.64 * I_unit * 2.0 * s.theta(2, 3) - (4 + es * es) * s.omega(2, 3);
    EXPECT_LT(std::abs(K(2, 3) - want), 1e-14);
    // with h = 0 the corrected good unknown is the same (up to dealiasing)
    spectral::Transform fft(g);
    auto Kc = good_unknown_field_corrected(g, fft, s, 0.8, std::vector<cplx>(g.Ny));
    EXPECT_LT(std::abs(Kc(2, 3) - want), 1e-12);
}

TEST(WeightedSums, SingleModeEnergyIsTheMultiplier) {
    auto g = grid16();
    SpectralField f(g);
    f(1, 2) = {0, 2};
    const double t = 3;
    auto w = weighted_sums(g, f, t, P, 1e-12);
    double want = 2 * log_A(t, 1, g.eta_of(2), P) + std::log(4.0) - std::log(g.Ly);
    EXPECT_NEAR(w.log_A2, want, 1e-12 * std::abs(want));
    EXPECT_EQ(w.negative_terms, 0);
    // lambda is constant before t = 1, so no CK_lambda term
    EXPECT_EQ(weighted_sums(g, f, 0.5, P, 1e-12).log_ck_lambda, neg_inf);
    EXPECT_GT(w.log_ck_lambda, neg_inf);
    SpectralField zero(g);
    EXPECT_NEAR(log_main_energy(g, f, zero, t, P), want - std::log(2.0), 1e-12 * std::abs(want));
}

TEST(Scattering, ConstantShiftIsAPhase) {
    auto g = grid16();
    std::mt19937_64 rng(2);
    std::normal_distribution<> n;
    SpectralField th(g);
    for (auto& c : th.c) c = {n(rng), n(rng)};
    spectral::apply_dealias(g, th);
    spectral::enforce_hermitian(g, th);
    spectral::Transform fft(g);
    auto same = scattering_profile(g, fft, th, std::vector<cplx>(g.Ny));
    for (std::size_t a = 0; a < th.c.size(); ++a) EXPECT_LT(std::abs(same.c[a] - th.c[a]), 1e-13);
    // Phi == 0.3 everywhere: only the eta = 0 coefficient, 0.3 * 2 pi Ly
    std::vector<cplx> phi(g.Ny);
    phi[0] = 0.3 * 2 * pi * g.Ly;
    auto shifted = scattering_profile(g, fft, th, phi);
    for (int i = 0; i < g.Nx; ++i)
        for (int j = 0; j < g.Ny; ++j)
            EXPECT_LT(std::abs(shifted(i, j) - th(i, j) * std::exp(I_unit * (0.3 * g.k_of(i)))), 1e-12);
    EXPECT_EQ(out_of_band_fraction(g, th), 0);
}

TEST(Analyze, SmallRunEndToEnd) {
    Grid g;
    g.Nx = g.Ny = 16;
    g.Ly = 4;
    SimConfig c;
    c.T = 4;
    c.snapshot_count = 16;
    c.dt = 0.05;
    std::vector<SimState> snaps;
    auto res = spectral::run(g, c, [&](const SimState& s, int) { snaps.push_back(s); });
    DiagnosticsOptions opt;
    opt.threads = 2;
    auto recs = analyze(g, c, P, snaps, res.zero_modes, opt);
    ASSERT_EQ(recs.size(), 17u);
    for (auto& r : recs) {
        EXPECT_TRUE(std::isfinite(r.log_energy));
        EXPECT_LE(r.divergence, 1e-13);
        EXPECT_GT(r.omega_nz, 0);
    }
    EXPECT_EQ(recs.back().scattering_residual, 0);
    // threading does not change the numbers
    opt.threads = 1;
    auto serial = analyze(g, c, P, snaps, res.zero_modes, opt);
    std::ostringstream a, b;
    for (auto& r : recs) write_csv_row(a, r);
    for (auto& r : serial) write_csv_row(b, r);
    EXPECT_EQ(a.str(), b.str());

    auto sum = summarize(recs, c);
    EXPECT_DOUBLE_EQ(sum.window_lo, 0.4);
    EXPECT_DOUBLE_EQ(sum.window_hi, 4);
    EXPECT_TRUE(sum.omega_fit.ok);
    EXPECT_LT(sum.omega_fit.exponent, 0);
    EXPECT_TRUE(std::isfinite(sum.log_C_energy));
    EXPECT_THROW(analyze(g, c, P, {}, res.zero_modes), config_error);
}
