#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace shearlab {

struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// NaN, CFL violation or other breakdown during time stepping.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double pi = 3.14159265358979323846;

using cplx = std::complex<double>;
inline constexpr cplx I_unit{0.0, 1.0};
inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// <v> = sqrt(1 + v^2)
inline double bracket(double v) { return std::sqrt(1.0 + v * v); }

// |k,eta| uses the l1 convention throughout.
inline double freq_norm(double k, double eta) { return std::abs(k) + std::abs(eta); }

// floor(x^{1/3}) for x >= 0, exact at perfect cubes.
inline std::int64_t floor_cbrt(double x) {
    if (!(x > 0)) return 0;
    auto n = static_cast<std::int64_t>(std::floor(std::cbrt(x)));
    auto cube = [](std::int64_t m) { return static_cast<long double>(m) * m * m; };
    while (cube(n + 1) <= x) ++n;
    while (n > 0 && cube(n) > x) --n;
    return n;
}

// floor(x^{2/3}) for x >= 0.
inline std::int64_t floor_two_thirds(double x) {
    if (!(x > 0)) return 0;
    auto n = static_cast<std::int64_t>(std::floor(std::pow(x, 2.0 / 3.0)));
    long double x2 = static_cast<long double>(x) * x;
    auto cube = [](std::int64_t m) { return static_cast<long double>(m) * m * m; };
    while (cube(n + 1) <= x2) ++n;
    while (n > 0 && cube(n) > x2) --n;
    return n;
}

inline double log_add(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    double m = a > b ? a : b;
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Running sum of non-negative terms given by their logarithms.
class LogSum {
public:
    void add_log(double log_term) { acc_ = log_add(acc_, log_term); }
    void add(double term) {
        if (term > 0) add_log(std::log(term));
    }
    double log() const { return acc_; }
    double value() const { return std::exp(acc_); }
    bool empty() const { return acc_ == neg_inf; }

private:
    double acc_ = neg_inf;
};

}  // namespace shearlab
