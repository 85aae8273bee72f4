#pragma once

// Test-only reference computations. These deliberately avoid the library's
// code paths so they can serve as independent checks.

#include <cmath>
#include <vector>

namespace oracle {

/// Piecewise-quadratic switching function written out with std::pow.
inline double switching_delta(double a_plus, double a_minus, double th_plus, double th_minus, double v) {
    if (v > th_plus) return a_plus * std::pow(v - th_plus, 2.0);
    if (v < th_minus) return a_minus * std::pow(std::fabs(v - th_minus), 2.0);
    return 0.0;
}

/// Linear potential divider: voltage across the first resistor.
inline double divider(double r_first, double r_second, double v_b) { return v_b / (1.0 + r_second / r_first); }

/// Dense-grid sign-change locator for a scalar function on (lo, hi).
/// Returns the midpoints of grid cells whose endpoints differ in sign.
template <class F>
std::vector<double> sign_changes(F&& f, double lo, double hi, int cells) {
    std::vector<double> out;
    double x_prev = lo;
    double f_prev = f(lo);
    for (int i = 1; i <= cells; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / cells;
        const double fx = f(x);
        if (f_prev != 0.0 && fx != 0.0 && (f_prev > 0.0) != (fx > 0.0)) out.push_back(0.5 * (x_prev + x));
        x_prev = x;
        f_prev = fx;
    }
    return out;
}

}  // namespace oracle
