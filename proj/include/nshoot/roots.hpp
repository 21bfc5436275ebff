#pragma once

#include <cmath>
#include <limits>

#include "nshoot/errors.hpp"

namespace nshoot {

/// Safeguarded secant/bisection root polish on a bracket [a, b] with f(a)*f(b) <= 0.
/// Secant steps are taken while they stay inside the bracket and shrink it; otherwise
/// the step falls back to bisection. Stops when |f| <= ftol or the bracket width
/// drops below xtol.
template <class F>
double solve_bracketed(F&& f, double a, double b, double fa, double fb,
                       double ftol = 1e-12, double xtol = 1e-15, int max_iter = 200) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa < 0.0) == (fb < 0.0)) throw domain_error("solve_bracketed: no sign change on bracket");
    double x = b, fx = fb, xprev = a, fprev = fa;
    for (int it = 0; it < max_iter; ++it) {
        double cand;
        const double df = fx - fprev;
        if (df != 0.0) {
            cand = x - fx * (x - xprev) / df;
        } else {
            cand = 0.5 * (a + b);
        }
        const double lo = std::min(a, b), hi = std::max(a, b);
        if (!(cand > lo && cand < hi)) cand = 0.5 * (a + b);
        const double fc = f(cand);
        xprev = x;
        fprev = fx;
        x = cand;
        fx = fc;
        if (std::abs(fx) <= ftol) return x;
        if ((fc < 0.0) == (fa < 0.0)) {
            a = cand;
            fa = fc;
        } else {
            b = cand;
            fb = fc;
        }
        if (std::abs(b - a) <= xtol * (1.0 + std::abs(a) + std::abs(b))) break;
    }
    return 0.5 * (a + b);
}

template <class F>
double solve_bracketed(F&& f, double a, double b,
                       double ftol = 1e-12, double xtol = 1e-15, int max_iter = 200) {
    const double fa = f(a), fb = f(b);
    return solve_bracketed(f, a, b, fa, fb, ftol, xtol, max_iter);
}

/// Plain bisection for a monotone predicate: returns the largest x in [lo, hi]
/// such that pred holds on (lo, x), assuming pred(lo+) true and pred(hi) false.
template <class Pred>
double bisect_predicate(Pred&& pred, double lo, double hi, double xtol = 1e-12, int max_iter = 200) {
    for (int it = 0; it < max_iter && (hi - lo) > xtol * (1.0 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (pred(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

/// Minimum of f over [a, b]: coarse grid scan followed by golden-section refinement
/// of the best cell. Accurate to ~xtol for unimodal-on-a-cell functions.
template <class F>
double minimize_grid_golden(F&& f, double a, double b, std::size_t grid = 2048, double xtol = 1e-10) {
    if (!(a < b)) throw domain_error("minimize_grid_golden: empty interval");
    double best_x = a, best_v = f(a);
    for (std::size_t i = 1; i <= grid; ++i) {
        const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(grid);
        const double v = f(x);
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
    }
    const double cell = (b - a) / static_cast<double>(grid);
    double lo = std::max(a, best_x - cell), hi = std::min(b, best_x + cell);
    const double invphi = 0.6180339887498949;
    double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > xtol) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = f(x2);
        }
    }
    const double xm = 0.5 * (lo + hi);
    const double vm = f(xm);
    return std::min(vm, best_v);
}

/// Maximum via the minimizer of -f.
template <class F>
double maximize_grid_golden(F&& f, double a, double b, std::size_t grid = 2048, double xtol = 1e-10) {
    return -minimize_grid_golden([&](double x) { return -f(x); }, a, b, grid, xtol);
}

} // namespace nshoot
