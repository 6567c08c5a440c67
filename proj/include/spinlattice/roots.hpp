#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace spinlattice::detail {

/// Bisect a bracketed sign change of f down to an interval narrower than tol.
template <class F>
double bisect(F&& f, double lo, double hi, double tol) {
    double flo = f(lo);
    for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// All sign changes of f on a uniform grid over [a, b], each refined by bisection.
template <class F>
std::vector<double> scan_roots(F&& f, double a, double b, std::size_t grid = 1000, double tol = 1e-8) {
    std::vector<double> roots;
    double x_prev = a;
    double f_prev = f(a);
    if (f_prev == 0.0) roots.push_back(a);
    for (std::size_t i = 1; i < grid; ++i) {
        const double x = (i + 1 == grid) ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(grid - 1);
        const double fx = f(x);
        if (fx == 0.0) {
            roots.push_back(x);
        } else if (f_prev != 0.0 && std::isfinite(f_prev) && std::isfinite(fx) && (fx < 0.0) != (f_prev < 0.0)) {
            roots.push_back(bisect(f, x_prev, x, tol));
        }
        x_prev = x;
        f_prev = fx;
    }
    return roots;
}

inline double log_cosh(double x) {
    const double ax = std::fabs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

/// log|sinh x| for x != 0.
inline double log_abs_sinh(double x) {
    const double ax = std::fabs(x);
    if (ax < 1.0) return std::log(std::sinh(ax));
    return ax + std::log1p(-std::exp(-2.0 * ax)) - std::log(2.0);
}

inline double log_add_exp(double a, double b) {
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    if (std::isinf(hi) && hi < 0) return hi;
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace spinlattice::detail
