#pragma once

// Reference computations for the verification suites. Nothing here calls
// into the library: each oracle recomputes its quantity by a different
// route (bisection, quadrature, finite differences, continued fractions).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace hopnet::oracle {

// Root of f on [lo, hi]; f(lo) and f(hi) must have opposite signs.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-15) {
    double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace detail {
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                           double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Adaptive Simpson quadrature of f over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, 50);
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double second_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// Gradient of a multivariate function by central differences.
inline std::vector<double> gradient(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        x[i] = xi + h;
        const double fp = f(x);
        x[i] = xi - h;
        const double fm = f(x);
        x[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// Maximum value of a unimodal f on [lo, hi] by golden-section search,
// stopping once the bracket is narrower than tol.
inline long double golden_max(const std::function<long double(long double)>& f, long double lo,
                              long double hi, long double tol = 1e-12L) {
    const long double r = 0.6180339887498948482L;
    long double a = lo, b = hi;
    long double c = b - r * (b - a), d = a + r * (b - a);
    long double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return std::max(fc, fd);
}

// (C / lambda) ln cosh(lambda q / C) in long double, straight from the
// definition.
inline long double tanh_charge_energy(long double q, long double gain, long double cap) {
    return cap / gain * std::log(std::cosh(gain * q / cap));
}

// Fourth-order five-point stencil, for checks tighter than h^2 allows.
inline std::vector<double> gradient5(const std::function<double(const std::vector<double>&)>& f,
                                     std::vector<double> x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        double v[4];
        const double off[4] = {-2.0, -1.0, 1.0, 2.0};
        for (int k = 0; k < 4; ++k) {
            x[i] = xi + off[k] * h;
            v[k] = f(x);
        }
        x[i] = xi;
        g[i] = (v[0] - 8.0 * v[1] + 8.0 * v[2] - v[3]) / (12.0 * h);
    }
    return g;
}

// tanh by Lambert's continued fraction x / (1 + x^2 / (3 + x^2 / (5 + ...)))
// in long double, evaluated bottom-up.
inline long double tanh_continued_fraction(long double x, int terms = 60) {
    const long double x2 = x * x;
    long double d = 2.0L * terms + 1.0L;
    for (int k = terms - 1; k >= 0; --k) d = (2.0L * k + 1.0L) + x2 / d;
    return x / d;
}

}  // namespace hopnet::oracle
