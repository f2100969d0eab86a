#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "stochctl/errors.hpp"

namespace stochctl {

struct RootResult {
    double root = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

/// Safeguarded Newton iteration inside a sign-changing bracket [lo, hi].
///
/// Each Newton step that would leave the bracket, or that fails to halve the
/// bracket width relative to two steps ago, is replaced by bisection.
/// `f` returns the value and `df` its derivative.
inline RootResult newton_bisect(const std::function<double(double)>& f,
                                const std::function<double(double)>& df, double lo, double hi,
                                double rel_tol, int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return {lo, 0, 0.0};
    if (fhi == 0.0) return {hi, 0, 0.0};
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw NoRootError("newton_bisect: no sign change on [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "], f(lo)=" + std::to_string(flo) +
                          ", f(hi)=" + std::to_string(fhi));
    }
    // Orient so that f(lo) < 0.
    if (flo > 0.0) std::swap(lo, hi);

    double x = 0.5 * (lo + hi);
    double dx_old = std::abs(hi - lo);
    double dx = dx_old;
    double fx = f(x);
    double dfx = df(x);
    for (int it = 1; it <= max_iter; ++it) {
        const bool newton_out = ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) > 0.0;
        const bool too_slow = std::abs(2.0 * fx) > std::abs(dx_old * dfx);
        dx_old = dx;
        if (newton_out || too_slow) {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        } else {
            dx = fx / dfx;
            x -= dx;
        }
        if (std::abs(dx) <= rel_tol * std::abs(x)) return {x, it, f(x)};
        fx = f(x);
        dfx = df(x);
        if (fx < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
    }
    throw NoRootError("newton_bisect: no convergence after " + std::to_string(max_iter) +
                      " iterations near x=" + std::to_string(x));
}

} // namespace stochctl
