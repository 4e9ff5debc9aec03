// Test-side oracles, kept independent of the library's enumeration and
// summation paths.
#pragma once

#include <cmath>
#include <vector>

namespace oracles {

// Golden-ratio chain by direct window solving: for each first coordinate the
// admissible second coordinates follow from the half-open window inequality.
inline std::vector<double> fibonacci_points(double R) {
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    const double den = std::sqrt(1.0 + phi * phi);
    const double c = phi / den, s = 1.0 / den;
    const double wlo = -s, whi = c;
    std::vector<double> pts;
    long bound = static_cast<long>(std::ceil(c * R + 2.0));
    for (long a = -bound; a <= bound; ++a) {
        // wlo <= -s a + c b < whi
        double blo = (wlo + s * static_cast<double>(a)) / c;
        double bhi = (whi + s * static_cast<double>(a)) / c;
        for (long b = static_cast<long>(std::floor(blo)); b <= static_cast<long>(std::ceil(bhi)); ++b) {
            double internal = -s * static_cast<double>(a) + c * static_cast<double>(b);
            if (internal < wlo || internal >= whi) continue;
            double p = c * static_cast<double>(a) + s * static_cast<double>(b);
            if (std::fabs(p) <= R) pts.push_back(p);
        }
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

inline double oracle_pi() { return 3.14159265358979323846; }

// Dirichlet kernel: sum_{x=-N}^{N} exp(-2 pi i lambda x), real by symmetry.
inline double dirichlet_sum(long N, double lambda) {
    double s = std::sin(oracle_pi() * lambda);
    if (std::fabs(s) < 1e-15) return 2.0 * static_cast<double>(N) + 1.0;
    return std::sin((2.0 * static_cast<double>(N) + 1.0) * oracle_pi() * lambda) / s;
}

}  // namespace oracles
