// stats.hpp
// Sample statistics, a two-sample Kolmogorov-Smirnov test, least-squares
// slope fits and adaptive quadrature.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace difflab {

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
    size_t n = 0;
};

inline MeanSE mean_se(const std::vector<double>& xs) {
    MeanSE r;
    r.n = xs.size();
    if (r.n == 0) return r;
    double s = 0;
    for (double v : xs) s += v;
    r.mean = s / static_cast<double>(r.n);
    if (r.n > 1) {
        double q = 0;
        for (double v : xs) q += (v - r.mean) * (v - r.mean);
        r.se = std::sqrt(q / (static_cast<double>(r.n) * (static_cast<double>(r.n) - 1)));
    }
    return r;
}

inline double sample_variance(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    MeanSE m = mean_se(xs);
    double q = 0;
    for (double v : xs) q += (v - m.mean) * (v - m.mean);
    return q / (static_cast<double>(xs.size()) - 1.0);
}

// Two-sample KS statistic D = sup |F1 - F2|.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    size_t i = 0, j = 0;
    double d = 0.0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// Rejection threshold at level alpha: c(alpha) * sqrt((n+m)/(n m)),
// c(alpha) = sqrt(-ln(alpha/2)/2).
inline double ks_threshold(size_t n, size_t m, double alpha) {
    double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    return c * std::sqrt((static_cast<double>(n) + static_cast<double>(m)) /
                         (static_cast<double>(n) * static_cast<double>(m)));
}

// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ls_slope: bad input");
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double num = 0, den = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    if (den == 0.0) throw std::invalid_argument("ls_slope: degenerate abscissae");
    return num / den;
}

// Adaptive Simpson quadrature with absolute tolerance.
namespace detail {
inline double simpson(const std::function<double(double)>& f, double a, double m, double b,
                      double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const std::function<double(double)>& f, double a, double m, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(f, a, lm, m, fa, flm, fm);
    double right = simpson(f, m, rm, b, fm, frm, fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adapt(f, a, lm, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adapt(f, m, rm, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}
}  // namespace detail

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 40, int panels = 16) {
    // split into panels first so oscillatory integrands converge
    double h = (b - a) / panels;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        double x0 = a + i * h, x1 = x0 + h, xm = 0.5 * (x0 + x1);
        double f0 = f(x0), f1 = f(x1), fm = f(xm);
        double whole = detail::simpson(f, x0, xm, x1, f0, fm, f1);
        total += detail::adapt(f, x0, xm, x1, f0, fm, f1, whole, tol / panels, max_depth);
    }
    return total;
}

}  // namespace difflab
