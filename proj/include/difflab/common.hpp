// common.hpp
// Small shared utilities: fixed-capacity vectors, dense linear algebra for
// low dimensions, ball volumes, compensated sums, hashing and canonical
// coordinate encoding.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace difflab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr int kMaxDim = 8;

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Vec: a runtime-dimensional point/frequency with inline storage.
// ---------------------------------------------------------------------------
struct Vec {
    std::array<double, kMaxDim> x{};
    int dim = 0;

    Vec() = default;
    explicit Vec(int d) : dim(d) {
        if (d < 0 || d > kMaxDim) throw std::invalid_argument("Vec: dimension out of range");
    }
    Vec(std::initializer_list<double> vals) {
        if (static_cast<int>(vals.size()) > kMaxDim) throw std::invalid_argument("Vec: too many components");
        dim = static_cast<int>(vals.size());
        int i = 0;
        for (double v : vals) x[static_cast<size_t>(i++)] = v;
    }
    static Vec from(std::span<const double> s) {
        Vec v(static_cast<int>(s.size()));
        std::copy(s.begin(), s.end(), v.x.begin());
        return v;
    }

    double& operator[](int i) { return x[static_cast<size_t>(i)]; }
    double operator[](int i) const { return x[static_cast<size_t>(i)]; }

    Vec operator+(const Vec& o) const {
        Vec r(dim);
        for (int i = 0; i < dim; ++i) r[i] = x[size_t(i)] + o[i];
        return r;
    }
    Vec operator-(const Vec& o) const {
        Vec r(dim);
        for (int i = 0; i < dim; ++i) r[i] = x[size_t(i)] - o[i];
        return r;
    }
    Vec operator*(double s) const {
        Vec r(dim);
        for (int i = 0; i < dim; ++i) r[i] = x[size_t(i)] * s;
        return r;
    }
    Vec operator-() const { return *this * -1.0; }

    double norm2() const {
        double s = 0;
        for (int i = 0; i < dim; ++i) s += x[size_t(i)] * x[size_t(i)];
        return s;
    }
    double norm() const { return std::sqrt(norm2()); }
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (int i = 0; i < a.dim; ++i) s += a[i] * b[i];
    return s;
}

inline double dot(const double* a, const Vec& b) {
    double s = 0;
    for (int i = 0; i < b.dim; ++i) s += a[i] * b[i];
    return s;
}

inline bool lex_less(const Vec& a, const Vec& b) {
    for (int i = 0; i < a.dim; ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Mat: dense row-major n x m matrix for the small dimensions used here.
// ---------------------------------------------------------------------------
struct Mat {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Mat diag(std::initializer_list<double> d) {
        Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
        int i = 0;
        for (double v : d) m(i, i) = v, ++i;
        return m;
    }

    double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    Vec mul(const Vec& v) const {
        Vec r(rows);
        for (int i = 0; i < rows; ++i) {
            double s = 0;
            for (int j = 0; j < cols; ++j) s += (*this)(i, j) * v[j];
            r[i] = s;
        }
        return r;
    }

    Mat mul(const Mat& o) const {
        Mat r(rows, o.cols);
        for (int i = 0; i < rows; ++i)
            for (int k = 0; k < cols; ++k) {
                double v = (*this)(i, k);
                for (int j = 0; j < o.cols; ++j) r(i, j) += v * o(k, j);
            }
        return r;
    }

    Mat transpose() const {
        Mat r(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) r(j, i) = (*this)(i, j);
        return r;
    }
};

// LU with partial pivoting; returns determinant, fills inverse if requested.
inline double det_and_inverse(const Mat& m, Mat* inv) {
    if (m.rows != m.cols) throw std::invalid_argument("det_and_inverse: matrix not square");
    const int n = m.rows;
    Mat lu = m;
    Mat id = Mat::identity(n);
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(lu(r, c)) > std::fabs(lu(piv, c))) piv = r;
        if (lu(piv, c) == 0.0) return 0.0;
        if (piv != c) {
            for (int j = 0; j < n; ++j) {
                std::swap(lu(piv, j), lu(c, j));
                std::swap(id(piv, j), id(c, j));
            }
            det = -det;
        }
        det *= lu(c, c);
        const double invp = 1.0 / lu(c, c);
        for (int j = 0; j < n; ++j) {
            lu(c, j) *= invp;
            id(c, j) *= invp;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = lu(r, c);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                lu(r, j) -= f * lu(c, j);
                id(r, j) -= f * id(c, j);
            }
        }
    }
    if (inv) *inv = id;
    return det;
}

inline double determinant(const Mat& m) { return det_and_inverse(m, nullptr); }

inline Mat inverse(const Mat& m) {
    Mat inv;
    if (det_and_inverse(m, &inv) == 0.0) throw std::invalid_argument("inverse: singular matrix");
    return inv;
}

// ---------------------------------------------------------------------------
// Geometry helpers.
// ---------------------------------------------------------------------------
inline double unit_ball_volume(int d) {
    // pi^{d/2} / Gamma(d/2 + 1)
    return std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

inline double ball_volume(int d, double R) { return unit_ball_volume(d) * std::pow(R, d); }

// Riemann zeta on integer arguments >= 2: closed forms for the small even
// cases, Euler-Maclaurin tail otherwise (absolute error far below 1e-12).
inline double zeta(int s) {
    if (s < 2) throw std::invalid_argument("zeta: argument must be >= 2");
    switch (s) {
        case 2: return kPi * kPi / 6.0;
        case 4: return kPi * kPi * kPi * kPi / 90.0;
        case 6: return std::pow(kPi, 6) / 945.0;
        default: break;
    }
    const double N = 2000.0;
    double sum = 0.0;
    for (int k = 1; k < static_cast<int>(N); ++k) sum += std::pow(static_cast<double>(k), -s);
    const double sd = static_cast<double>(s);
    sum += std::pow(N, 1.0 - sd) / (sd - 1.0) + 0.5 * std::pow(N, -sd) +
           sd / 12.0 * std::pow(N, -sd - 1.0) -
           sd * (sd + 1.0) * (sd + 2.0) / 720.0 * std::pow(N, -sd - 3.0);
    return sum;
}

// ---------------------------------------------------------------------------
// Compensated (Kahan) accumulation for real and complex sums.
// ---------------------------------------------------------------------------
struct KahanSum {
    double sum = 0.0, c = 0.0;
    void add(double v) {
        double y = v - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

struct KahanComplexSum {
    KahanSum re, im;
    void add(std::complex<double> z) {
        re.add(z.real());
        im.add(z.imag());
    }
    std::complex<double> value() const { return {re.sum, im.sum}; }
};

// ---------------------------------------------------------------------------
// Hashing and canonical coordinate encoding.
// ---------------------------------------------------------------------------
inline uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 14695981039346656037ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

// 17 significant digits: round-trips doubles exactly.
inline std::string format_g17(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Content key of a point: hash of the comma-joined 17-digit coordinate text.
// Depends only on coordinates, never on set membership or ordering.
inline uint64_t point_key(const double* p, int dim) {
    uint64_t h = 14695981039346656037ull;
    char buf[40];
    for (int i = 0; i < dim; ++i) {
        double v = p[i] == 0.0 ? 0.0 : p[i];
        int n = std::snprintf(buf, sizeof(buf), "%.17g,", v);
        h = fnv1a64(buf, static_cast<size_t>(n), h);
    }
    return h;
}

inline uint64_t int_point_key(const int64_t* z, int dim) {
    return fnv1a64(z, sizeof(int64_t) * static_cast<size_t>(dim));
}

}  // namespace difflab
