#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "shearlab/common.hpp"

namespace shearlab {

struct WeightParams {
    double s = 1.0;
    double lambda0 = 1.0;
    double lambda_prime = 0.5;
    double sigma = 8.0;
    double beta = 4.0;
    double kappa = 0.01;
    double C_theta = 1.0;
    double mu = 6.12;
    double delta_L = 0.1;
    double delta_B = 0.1;
    double q_tilde = 0.75;
    double delta_lambda = 0.0;  // filled by calibrate_delta_lambda()

    double theta_exponent() const { return C_theta * kappa; }

    static WeightParams defaults();
};

// Integral of <tau>^{-2q} over [a, b], 0 <= a <= b <= inf, for q > 1/2.
// Substituting u = tau^2/(1+tau^2) turns the antiderivative into half an
// incomplete beta function B(u; 1/2, q - 1/2).
inline double bracket_power_integral(double a, double b, double q) {
    auto prim = [q](double x) {
        if (std::isinf(x)) return 0.5 * boost::math::beta(0.5, q - 0.5);
        double u = x * x / (1.0 + x * x);
        return 0.5 * boost::math::beta(0.5, q - 0.5, u);
    };
    return prim(b) - prim(a);
}

inline double lambda_at_one(const WeightParams& p) { return 0.75 * p.lambda0 + 0.25 * p.lambda_prime; }

inline double lambda_limit_target(const WeightParams& p) {
    return 0.5 * (p.lambda0 + p.lambda_prime) + 0.125 * (p.lambda0 - p.lambda_prime);
}

// Chooses delta_lambda so that lambda(t) tends to lambda_limit_target(p).
inline void calibrate_delta_lambda(WeightParams& p) {
    double tail = bracket_power_integral(1.0, INFINITY, p.q_tilde);
    p.delta_lambda = std::log((1.0 + lambda_at_one(p)) / (1.0 + lambda_limit_target(p))) / tail;
}

// Empty string when every invariant holds, otherwise the first violation.
inline std::string check_invariants(const WeightParams& p) {
    std::ostringstream err;
    auto finite = [](double v) { return std::isfinite(v); };
    if (!(finite(p.s) && finite(p.lambda0) && finite(p.lambda_prime) && finite(p.sigma) && finite(p.beta) &&
          finite(p.kappa) && finite(p.C_theta) && finite(p.mu) && finite(p.delta_L) && finite(p.delta_B) &&
          finite(p.q_tilde) && finite(p.delta_lambda)))
        err << "non-finite weight parameter";
    else if (!(p.s > 1.0 / 3.0 && p.s <= 1.0))
        err << "s must lie in (1/3, 1], got " << p.s;
    else if (!(p.lambda0 > p.lambda_prime && p.lambda_prime > 0))
        err << "need lambda0 > lambda_prime > 0";
    else if (!(p.delta_L > 0 && p.delta_L <= 1))
        err << "delta_L must lie in (0, 1]";
    else if (!(p.delta_B > 0 && p.delta_B <= 1))
        err << "delta_B must lie in (0, 1]";
    else if (!(p.kappa > 0))
        err << "kappa must be positive";
    else if (!(p.C_theta >= 1))
        err << "C_theta must be >= 1";
    else if (std::abs(p.mu - 6.0 * (1.0 + 2.0 * p.theta_exponent())) > 1e-12 * p.mu)
        err << "mu must equal 6(1 + 2 C_theta kappa) = " << 6.0 * (1.0 + 2.0 * p.theta_exponent()) << ", got "
            << p.mu;
    else if (!(2 * p.q_tilde < 3 * p.s && 4 * p.q_tilde < 3 * p.s + 1))
        err << "q_tilde must satisfy 2q < 3s and 4q < 3s + 1";
    else if (!(2 * p.q_tilde > 1))
        err << "q_tilde must exceed 1/2 for lambda(t) to stay bounded below";
    else if (!(p.delta_lambda > 0))
        err << "delta_lambda must be positive";
    else if (!(p.sigma >= 0 && p.beta >= 0))
        err << "sigma and beta must be non-negative";
    return err.str();
}

inline void validate(const WeightParams& p) {
    auto msg = check_invariants(p);
    if (!msg.empty()) throw config_error("weights: " + msg);
}

inline WeightParams WeightParams::defaults() {
    WeightParams p;
    p.mu = 6.0 * (1.0 + 2.0 * p.theta_exponent());
    p.q_tilde = 0.75 * p.s;
    calibrate_delta_lambda(p);
    return p;
}

}  // namespace shearlab
