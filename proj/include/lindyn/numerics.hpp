#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "lindyn/errors.hpp"

namespace lindyn {

// Adaptive Simpson with Richardson correction; the usual 15 eps acceptance
// test on the two-panel refinement.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double eps = 1e-12, int max_depth = 48) {
    struct Impl {
        F& f;
        double eps_floor;
        int max_depth;
        double recurse(double a, double m, double b, double fa, double fm, double fb, double whole,
                       double eps, int depth) {
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (depth >= max_depth || std::abs(delta) <= 15.0 * eps)
                return left + right + delta / 15.0;
            return recurse(a, lm, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
                   recurse(m, rm, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
        }
    };
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    Impl impl{f, eps, max_depth};
    return impl.recurse(a, m, b, fa, fm, fb, whole, std::max(eps, 1e-300), 0);
}

// Safeguarded Newton: quadratic steps while they stay inside the bracket,
// bisection otherwise. g must be monotone on [lo, hi] with a sign change.
template <class G, class DG>
double newton_bisect(G&& g, DG&& dg, double x0, double lo, double hi, double xtol = 1e-14,
                     int max_iter = 200) {
    double glo = g(lo), ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if ((glo > 0.0) == (ghi > 0.0))
        throw branch_error("newton_bisect: root not bracketed");
    double x = std::clamp(x0, lo, hi);
    for (int it = 0; it < max_iter; ++it) {
        const double gx = g(x);
        if (gx == 0.0) return x;
        if ((gx > 0.0) == (ghi > 0.0)) {
            hi = x;
            ghi = gx;
        } else {
            lo = x;
            glo = gx;
        }
        const double d = dg(x);
        double xn = (d != 0.0) ? x - gx / d : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        const double scale = std::max({std::abs(x), std::abs(xn), 1e-30});
        const bool done = std::abs(xn - x) <= xtol * scale || (hi - lo) <= xtol * scale;
        x = xn;
        if (done) return x;
    }
    return x;
}

}  // namespace lindyn
