#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shearlab/weights.hpp"

using namespace shearlab;

namespace {

const WeightParams P = WeightParams::defaults();

// composite Simpson on [a, b] with n (even) panels
template <class F>
double simpson(const F& f, double a, double b, int n) {
    double h = (b - a) / n, s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
    return s * h / 3;
}

}  // namespace

TEST(IntegerPart, FloorsAndRejectsNegatives) {
    EXPECT_EQ(integer_part(0.0), 0);
    EXPECT_EQ(integer_part(2.999), 2);
    EXPECT_EQ(integer_part(3.0), 3);
    EXPECT_THROW(integer_part(-0.5), std::invalid_argument);
}

TEST(FloorRoots, ExactAtPerfectPowers) {
    EXPECT_EQ(floor_cbrt(27.0), 3);
    EXPECT_EQ(floor_cbrt(26.999999), 2);
    EXPECT_EQ(floor_cbrt(1e6), 100);
    EXPECT_EQ(floor_two_thirds(8.0), 4);
    EXPECT_EQ(floor_two_thirds(1000.0), 100);
    EXPECT_EQ(floor_two_thirds(999.9), 99);
}

TEST(CriticalInterval, EndpointsAndEmptiness) {
    auto I = critical_interval(2, 100.0);
    ASSERT_FALSE(I.empty);
    EXPECT_DOUBLE_EQ(I.t_minus, 50 - 100.0 / 16);
    EXPECT_DOUBLE_EQ(I.t_plus, 50 + 100.0 / 16);
    EXPECT_TRUE(I.inside_bar());
    EXPECT_TRUE(I.contains(50));
    EXPECT_FALSE(I.contains(I.t_plus));
    // opposite signs never resonate; k beyond eta^{1/3} has no interval
    EXPECT_TRUE(critical_interval(-2, 100.0).empty);
    EXPECT_TRUE(critical_interval(5, 100.0).empty);
    EXPECT_FALSE(critical_interval(-4, -100.0).empty);
    EXPECT_THROW(critical_interval(0, 10.0), std::invalid_argument);
}

TEST(CriticalInterval, InsideBarsFromKTwoAndDisjoint) {
    for (double eta : {10.0, 333.3, 1e4, 2.5e5}) {
        // k = 1 spills left of 2 eta / 3 and into I_2
        EXPECT_FALSE(critical_interval(1, eta).inside_bar());
        for (std::int64_t k = 2; k <= floor_cbrt(eta); ++k) {
            auto I = critical_interval(k, eta);
            EXPECT_TRUE(I.inside_bar()) << "k=" << k << " eta=" << eta;
            // I_1 and I_2 overlap; from k = 3 on the intervals are disjoint
            if (k >= 3) {
                EXPECT_LT(I.t_plus, critical_interval(k - 1, eta).t_minus);
            }
        }
    }
}

TEST(Theta, InitialValueIsTheGrowthProduct) {
    // every factor sits at its frozen value (j^3/eta)^{1+2c} at t = 0
    const double c = P.theta_exponent();
    for (double eta : {10.0, 1e3, 5e4}) {
        double prod = 0;
        for (int j = 1; double(j) * j * j <= eta; ++j) prod += (1 + 2 * c) * std::log(double(j) * j * j / eta);
        EXPECT_NEAR(theta_nonresonant(0, eta, P).log_value, prod, 1e-10 * std::abs(prod));
    }
}

TEST(Theta, ResonantBranchAtTheCentre) {
    for (double eta : {64.0, 1e3, 3e4})
        for (std::int64_t k = 1; k <= floor_cbrt(eta); ++k) {
            double t = eta / double(k);
            double diff = theta_weight(t, k, eta, P).log_value - theta_nonresonant(t, eta, P).log_value;
            EXPECT_NEAR(diff, std::log(double(k) * k * k / eta), 1e-12 * (1 + std::abs(diff)));
            EXPECT_EQ(theta_weight(t, k, eta, P).regime, Regime::R);
        }
}

TEST(Theta, NonresonantWeightNeverDecreases) {
    for (double eta : {50.0, 2e3, 8e4}) {
        double prev = theta_nonresonant(0, eta, P).log_value;
        for (int i = 1; i <= 4000; ++i) {
            double t = 2.1 * eta * i / 4000;
            auto w = theta_nonresonant(t, eta, P);
            EXPECT_GE(w.log_value, prev - 1e-12);
            EXPECT_GE(w.d_log_dt, 0);
            EXPECT_LE(w.log_value, 1e-15);
            prev = w.log_value;
        }
        EXPECT_EQ(theta_nonresonant(2 * eta, eta, P).log_value, 0);
    }
}

TEST(Theta, DerivativeMatchesFiniteDifference) {
    std::mt19937_64 rng(7);
    for (int n = 0; n < 300; ++n) {
        double eta = std::exp(std::uniform_real_distribution<>(std::log(8.0), std::log(1e5))(rng));
        double t = std::uniform_real_distribution<>(0, 2 * eta)(rng);
        std::int64_t k = std::uniform_int_distribution<std::int64_t>(0, 4)(rng);
        double h = 1e-6 * std::max(1.0, t);
        double fd = (theta_weight(t + h, k, eta, P).log_value - theta_weight(t - h, k, eta, P).log_value) / (2 * h);
        double an = theta_weight(t, k, eta, P).d_log_dt;
        // skip points straddling a kink
        if (std::abs(theta_weight(t + h, k, eta, P).d_log_dt - theta_weight(t - h, k, eta, P).d_log_dt) >
            1e-3 * (1 + std::abs(an)))
            continue;
        EXPECT_NEAR(fd, an, 1e-5 * (1 + std::abs(an))) << "eta=" << eta << " t=" << t << " k=" << k;
    }
}

TEST(GWeight, AgreesWithBackwardOdeIntegration) {
    for (double eta : {10.0, 1e3, 1e5}) {
        for (double frac : {0.0, 0.01, 0.3, 0.7, 0.95, 1.5}) {
            double t = frac * eta;
            double ref = oracle::g_log_by_ode(t, eta, P);
            double got = g_weight(t, eta, P).log_value;
            EXPECT_NEAR(got, ref, 1e-8 * std::max(1.0, std::abs(ref))) << "eta=" << eta << " t=" << t;
        }
    }
}

TEST(GWeight, BoundsOnRandomSample) {
    std::mt19937_64 rng(11);
    for (int n = 0; n < 5000; ++n) {
        double eta = std::exp(std::uniform_real_distribution<>(0, std::log(1e6))(rng));
        if (rng() & 1) eta = -eta;
        double t = std::uniform_real_distribution<>(0, 3 * std::abs(eta))(rng);
        double inv = -g_weight(t, eta, P).log_value;
        EXPECT_GE(inv, 0);
        EXPECT_LE(inv, 3 * pi / P.delta_L * std::cbrt(std::abs(eta)));
    }
}

TEST(GWeight, EvenInEta) {
    for (double eta : {7.0, 400.0, 9e3})
        for (double t : {0.0, 1.0, eta / 2, eta})
            EXPECT_EQ(g_weight(t, eta, P).log_value, g_weight(t, -eta, P).log_value);
}

TEST(Cutoffs, PlateausAndSupport) {
    EXPECT_EQ(cutoff_outer(0), 1);
    EXPECT_EQ(cutoff_outer(8), 1);
    EXPECT_EQ(cutoff_outer(-10), 0);
    EXPECT_GT(cutoff_outer(9), 0);
    EXPECT_LT(cutoff_outer(9), 1);
    EXPECT_EQ(cutoff_band(0.5), 1);
    EXPECT_EQ(cutoff_band(1.5), 1);
    EXPECT_EQ(cutoff_band(1.0 / 3.0), 0);
    EXPECT_EQ(cutoff_band(2.5), 0);
    for (double x = -12; x <= 12; x += 0.01) {
        EXPECT_GE(cutoff_outer(x), 0);
        EXPECT_LE(cutoff_outer(x), 1);
        EXPECT_GE(cutoff_band(x), 0);
        EXPECT_LE(cutoff_band(x), 1);
    }
}

TEST(BCutoff, VanishesOutsideItsWindow) {
    EXPECT_EQ(b_cutoff(5, 1, 10), 0);       // t < 10
    EXPECT_EQ(b_cutoff(50, 0, 10), 0);      // k = 0
    EXPECT_EQ(b_cutoff(50, 1, 1000), 0);    // eta/k^3 >= 10
    EXPECT_EQ(b_cutoff(50, 3, 1000), 0);    // eta/(k t) outside the band
    EXPECT_DOUBLE_EQ(b_cutoff(100, 3, 200), 1.0);
}

TEST(BMultiplier, MatchesSimpson) {
    for (auto [t, k, eta] : {std::tuple{80.0, 2, 150.0}, {200.0, 5, 600.0}, {60.0, 3, 100.0}, {400.0, 4, 320.0}}) {
        auto f = [&](double s) { return b_cutoff(s, k, eta) / (1 + (s - eta / k) * (s - eta / k)); };
        double ref = simpson(f, 1e-9, t, 400000) / P.delta_B;
        EXPECT_NEAR(log_B_multiplier(t, k, eta, P), ref, 1e-9 * std::max(1.0, ref)) << t << " " << k << " " << eta;
    }
    EXPECT_EQ(log_B_multiplier(50, 0, 10, P), 0);
    EXPECT_EQ(log_B_multiplier(50, 1, -10, P), 0);
}

TEST(BMultiplier, BoundedByTheFullLorentzian) {
    for (double eta : {50.0, 300.0, 2000.0})
        for (int k = 1; k <= 12; ++k)
            EXPECT_LE(log_B_multiplier(1e4, k, eta, P), pi / P.delta_B + 1e-12);
}

TEST(Lambda, StartsAtLambdaOneAndDecreasesToTarget) {
    EXPECT_DOUBLE_EQ(lambda_of_t(0, P), lambda_at_one(P));
    EXPECT_DOUBLE_EQ(lambda_of_t(1, P), lambda_at_one(P));
    double prev = lambda_of_t(1, P);
    for (double t = 1.5; t < 1e6; t *= 1.5) {
        double l = lambda_of_t(t, P);
        EXPECT_LT(l, prev);
        EXPECT_GT(l, lambda_limit_target(P));
        prev = l;
    }
    EXPECT_NEAR(lambda_of_t(1e12, P), lambda_limit_target(P), 1e-3);
    EXPECT_GT(lambda_limit_target(P), P.lambda_prime);
    EXPECT_THROW(lambda_of_t(-1, P), std::invalid_argument);
}

TEST(Lambda, DerivativeMatchesFiniteDifference) {
    for (double t : {1.5, 3.0, 20.0, 700.0}) {
        double h = 1e-5 * t;
        double fd = (lambda_of_t(t + h, P) - lambda_of_t(t - h, P)) / (2 * h);
        EXPECT_NEAR(lambda_dot(t, P), fd, 1e-6 * std::abs(fd));
    }
}

TEST(BracketPowerIntegral, MatchesQuadrature) {
    for (double q : {0.6, 0.75, 1.0, 2.0})
        for (auto [a, b] : {std::pair{0.0, 1.0}, {1.0, 30.0}, {2.0, 5.0}}) {
            double ref = simpson([&](double x) { return std::pow(1 + x * x, -q); }, a, b, 20000);
            EXPECT_NEAR(bracket_power_integral(a, b, q), ref, 1e-11) << q << " " << a << " " << b;
        }
    // q = 1 has the closed form pi/2 - atan(a)
    EXPECT_NEAR(bracket_power_integral(3, INFINITY, 1.0), pi / 2 - std::atan(3.0), 1e-14);
}

TEST(Multipliers, ComposeInTheLogDomain) {
    for (auto [t, k, eta] : {std::tuple{0.0, 1, 40.0}, {7.0, -2, 90.0}, {120.0, 3, 200.0}}) {
        auto m = multiplier_parts(t, k, eta, P);
        double n = freq_norm(k, eta);
        double expect = m.lambda * std::pow(n, P.s) + P.sigma * std::log(bracket(n)) + m.log_J + m.log_M + m.log_B;
        EXPECT_DOUBLE_EQ(m.log_A, expect);
        EXPECT_DOUBLE_EQ(log_A(t, k, eta, P), m.log_A);
        // J >= e^{mu |k|^{1/3}} and M >= e^{(4 pi / delta_L) |k|^{1/3}}
        EXPECT_GE(m.log_J, P.mu * std::cbrt(std::abs(k)));
        EXPECT_GE(m.log_M, 4 * pi / P.delta_L * std::cbrt(std::abs(k)));
    }
}

TEST(WeightParams, DefaultsSatisfyInvariants) {
    EXPECT_EQ(check_invariants(P), "");
    EXPECT_NEAR(P.mu, 6 * (1 + 2 * P.kappa * P.C_theta), 1e-15);
    EXPECT_GT(P.delta_lambda, 0);
}

TEST(WeightParams, RejectsBrokenSettings) {
    auto broken = [](auto edit) {
        WeightParams p = P;
        edit(p);
        return check_invariants(p);
    };
    EXPECT_NE(broken([](WeightParams& p) { p.mu = 6; }), "");
    EXPECT_NE(broken([](WeightParams& p) { p.s = 0.3; }), "");
    EXPECT_NE(broken([](WeightParams& p) { p.lambda_prime = 2; }), "");
    EXPECT_NE(broken([](WeightParams& p) { p.delta_L = 0; }), "");
    EXPECT_NE(broken([](WeightParams& p) { p.C_theta = 0.5; }), "");
    EXPECT_NE(broken([](WeightParams& p) { p.q_tilde = 0.4; }), "");
    EXPECT_NE(broken([](WeightParams& p) { p.kappa = NAN; }), "");
    WeightParams bad = P;
    bad.mu = 6;
    EXPECT_THROW(validate(bad), config_error);
}
