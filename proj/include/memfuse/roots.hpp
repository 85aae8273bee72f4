#pragma once

#include <cmath>
#include <utility>

namespace memfuse::roots {

struct BisectResult {
    double x = 0.0;
    double residual = 0.0;  // f(x)
    int iterations = 0;
    bool converged = false;
};

/// Bisection on [lo, hi] for increasing or decreasing f with f(lo), f(hi) of
/// opposite sign (or zero). Stops when |f| <= f_tol, the bracket is narrower
/// than x_tol, or the bracket can no longer be split in double precision.
template <class F>
BisectResult bisect(F&& f, double lo, double hi, double f_tol, double x_tol, int max_iter = 400) {
    double f_lo = f(lo);
    double f_hi = f(hi);
    BisectResult best{lo, f_lo, 0, std::abs(f_lo) <= f_tol};
    if (std::abs(f_hi) < std::abs(best.residual)) best = {hi, f_hi, 0, std::abs(f_hi) <= f_tol};
    if (best.converged) return best;
    if ((f_lo < 0.0) == (f_hi < 0.0)) return best;

    for (int it = 1; it <= max_iter; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        const bool exhausted = hi - lo <= x_tol || mid == lo || mid == hi;
        const double f_mid = f(mid);
        if (std::abs(f_mid) < std::abs(best.residual)) best = {mid, f_mid, it, false};
        best.iterations = it;
        if (std::abs(f_mid) <= f_tol) {
            best.converged = true;
            return best;
        }
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if (exhausted) {
            // The sign change sits inside a bracket that can no longer shrink.
            best.converged = true;
            return best;
        }
    }
    return best;
}

/// Golden-section minimisation of f on [lo, hi]. Returns the abscissa.
template <class F>
double golden_section_min(F&& f, double lo, double hi, double x_tol = 1e-12, int max_iter = 200) {
    constexpr double inv_phi = 0.6180339887498949;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < max_iter && (hi - lo) > x_tol; ++it) {
        if (fc <= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    return fc <= fd ? c : d;
}

}  // namespace memfuse::roots
