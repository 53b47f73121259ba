#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace shearlab {

namespace detail {

template <class F>
double gk_recurse(const F& f, double a, double b, double target, int depth) {
    double err = 0;
    double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err);
    // Boost reports the error of the integral over [-1, 1]; rescale it.
    err *= 0.5 * (b - a);
    if (depth == 0 || err <= std::max(target, 64 * std::numeric_limits<double>::epsilon() * std::abs(v))) return v;
    double m = 0.5 * (a + b);
    return gk_recurse(f, a, m, target / 2, depth - 1) + gk_recurse(f, m, b, target / 2, depth - 1);
}

}  // namespace detail

// Adaptive Gauss-Kronrod (15/31) bisection with an absolute target of
// rel_tol times the coarse L1 estimate over the whole interval.
template <class F>
double integrate_gk(const F& f, double a, double b, double rel_tol = 1e-12, int max_depth = 20) {
    if (!(b > a)) return 0;
    double L1 = 0;
    boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, nullptr, &L1);
    return detail::gk_recurse(f, a, b, rel_tol * L1, max_depth);
}

}  // namespace shearlab
