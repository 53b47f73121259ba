#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "shearlab/toy_model.hpp"

using namespace shearlab;

TEST(ToyModel, MatchesFixedStepRk4) {
    for (auto [k, eta] : {std::pair{1, 100.0}, {1, 3e3}, {2, 500.0}, {3, 1e4}}) {
        auto I = critical_interval(k, eta);
        ToyState s{1, 0, k, eta, 0.01};
        auto r = integrate_toy(s, I);
        auto ref = oracle::toy_by_rk4(1, 0, k, eta, 0.01, I.t_minus, I.t_plus, 200000);
        EXPECT_NEAR(r.final.rho_R, ref[0], 1e-10 * std::abs(ref[0])) << k << " " << eta;
        EXPECT_NEAR(r.final.rho_NR, ref[1], 1e-10 * std::hypot(ref[0], ref[1])) << k << " " << eta;
        EXPECT_NEAR(r.amplification, std::hypot(ref[0], ref[1]), 1e-10 * r.amplification);
    }
}

TEST(ToyModel, RejectsEmptyInterval) {
    EXPECT_THROW(integrate_toy({}, critical_interval(5, 10.0)), std::invalid_argument);
}

TEST(ToyModel, ZeroCouplingLeavesStateAlone) {
    auto I = critical_interval(1, 1e3);
    auto r = integrate_toy({0.3, -0.7, 1, 1e3, 0.0}, I);
    EXPECT_DOUBLE_EQ(r.final.rho_R, 0.3);
    EXPECT_DOUBLE_EQ(r.final.rho_NR, -0.7);
    EXPECT_DOUBLE_EQ(r.amplification, 1);
}

TEST(ToyGrowth, ExponentNearDesignedValue) {
    auto etas = log_spaced(1e2, 1e5, 16);
    auto rep = toy_growth_sweep(etas, 1, 0.01, 1.0);
    ASSERT_EQ(rep.rows.size(), 16u);
    EXPECT_DOUBLE_EQ(rep.expected_exponent, 1.02);
    EXPECT_NEAR(rep.fit.exponent, rep.expected_exponent, 0.1 * rep.expected_exponent);
    for (auto& r : rep.rows) {
        EXPECT_GE(r.amplification, 1);
        EXPECT_NEAR(r.designed_theta_ratio, std::pow(r.eta, 1.02), 1e-9 * r.designed_theta_ratio);
    }
}

TEST(ToyGrowth, NeedsEnoughSamples) {
    EXPECT_THROW(toy_growth_sweep({1e2, 1e3}, 1, 0.01, 1.0), std::invalid_argument);
}

TEST(Chain, ModeIndexingRoundTrips) {
    for (int L : {1, 4, 9})
        for (int i = 0; i < 2 * L; ++i) {
            int l = ChainState::index_to_mode(L, i);
            EXPECT_NE(l, 0);
            EXPECT_LE(std::abs(l), L);
            EXPECT_EQ(ChainState::mode_to_index(L, l), i);
        }
}

TEST(Chain, InitialBandAndProfileMass) {
    auto c = make_chain(100, 7);
    for (int l = 1; l <= 7; ++l) {
        cplx want = l <= 4 ? 1.0 : 0.0;
        EXPECT_EQ(c.at(l), want);
        EXPECT_EQ(c.at(-l), want);
    }
    auto prof = gaussian_profile(1.5, 2.0);
    double mass = 0;
    for (int m = -200; m <= 200; ++m) mass += prof(m).real();
    EXPECT_NEAR(mass, 2.0, 1e-12);
    EXPECT_THROW(make_chain(10, 0), std::invalid_argument);
}

TEST(Chain, GrowthBelowDesignAndInsensitiveToTruncation) {
    const double eta = 200;
    int N = int(floor_cbrt(eta));
    auto prof = gaussian_profile(1, 1);
    auto base = integrate_chain(make_chain(eta, N), prof, 2 * eta, {});
    auto wide = integrate_chain(make_chain(eta, 2 * N), prof, 2 * eta, {});
    ASSERT_FALSE(base.overflow);
    double designed = std::exp(-theta_weight(0, 1, eta, WeightParams::defaults()).log_value);
    EXPECT_LE(base.total_growth, designed);
    EXPECT_LT(std::abs(wide.total_growth - base.total_growth) / base.total_growth, 0.05);
    EXPECT_FALSE(base.intervals.empty());
}
