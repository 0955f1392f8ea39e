#pragma once

#include <cmath>
#include <string>

#include "suptail/errors.hpp"

namespace suptail {

// Bisection for f with f(lo), f(hi) of opposite sign. Stops when the bracket width
// drops below xtol_rel * |mid| + xtol_abs. Returns the bracket midpoint.
template <class F>
double bisect(F&& f, double lo, double hi, double flo, double fhi,
              double xtol_rel = 1e-14, double xtol_abs = 0.0, int max_iter = 400) {
    if (!(lo < hi)) throw SolverFailure("bisect: invalid bracket");
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw SolverFailure("bisect: no sign change on [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
    for (int i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= xtol_rel * std::fabs(mid) + xtol_abs) return mid;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (fhi > 0.0)) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

template <class F>
double bisect(F&& f, double lo, double hi,
              double xtol_rel = 1e-14, double xtol_abs = 0.0, int max_iter = 400) {
    const double flo = f(lo);
    const double fhi = f(hi);
    return bisect(f, lo, hi, flo, fhi, xtol_rel, xtol_abs, max_iter);
}

}  // namespace suptail
