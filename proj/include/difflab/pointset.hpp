// pointset.hpp
// Deterministic generators for uniformly discrete point configurations:
// lattices, cut-and-project sets, visible lattice points and asymptotically
// affine lattice deformations, plus separation and density diagnostics.
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "difflab/common.hpp"
#include "difflab/rng.hpp"

namespace difflab {

struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr size_t kDefaultPointCap = 10'000'000;

// ---------------------------------------------------------------------------
// Provenance record attached to every generated set.
// ---------------------------------------------------------------------------
struct Descriptor {
    std::string generator;
    std::vector<std::pair<std::string, std::string>> params;

    void set(const std::string& k, const std::string& v) { params.emplace_back(k, v); }
    void set(const std::string& k, double v) { params.emplace_back(k, format_g17(v)); }
    void set(const std::string& k, int64_t v) { params.emplace_back(k, std::to_string(v)); }
};

// ---------------------------------------------------------------------------
// PointSet: finite configuration in R^d, points stored flat (dim-strided),
// lexicographically sorted so output is independent of enumeration order.
// ---------------------------------------------------------------------------
struct PointSet {
    int dim = 0;
    std::vector<double> xs;  // size() == dim * count
    double separation_radius = std::numeric_limits<double>::infinity();
    std::optional<double> claimed_density;
    double generation_radius = 0.0;
    Descriptor descriptor;

    // Optional integer pre-images (lattice coordinates) aligned with points;
    // used by lattice-shift-correlated displacement fields.
    int preimage_dim = 0;
    std::vector<int64_t> preimages;

    // Content hashes of the canonical coordinate encoding, aligned with points.
    std::vector<uint64_t> keys;

    size_t size() const { return dim == 0 ? 0 : xs.size() / static_cast<size_t>(dim); }
    const double* point(size_t i) const { return xs.data() + i * static_cast<size_t>(dim); }
    Vec at(size_t i) const { return Vec::from({point(i), static_cast<size_t>(dim)}); }

    void compute_keys() {
        keys.resize(size());
        for (size_t i = 0; i < size(); ++i) keys[i] = point_key(point(i), dim);
    }
};

namespace detail {

// Sorts points lexicographically, carrying pre-images along; recomputes keys.
inline void normalize_order(PointSet& ps) {
    const size_t n = ps.size();
    std::vector<uint32_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = static_cast<uint32_t>(i);
    const int d = ps.dim;
    std::sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) {
        const double* pa = ps.point(a);
        const double* pb = ps.point(b);
        for (int c = 0; c < d; ++c) {
            if (pa[c] < pb[c]) return true;
            if (pa[c] > pb[c]) return false;
        }
        return false;
    });
    std::vector<double> xs(ps.xs.size());
    std::vector<int64_t> pre(ps.preimages.size());
    for (size_t i = 0; i < n; ++i) {
        for (int c = 0; c < d; ++c) xs[i * d + c] = ps.point(idx[i])[c];
        for (int c = 0; c < ps.preimage_dim; ++c)
            pre[i * ps.preimage_dim + c] = ps.preimages[idx[i] * ps.preimage_dim + c];
    }
    ps.xs = std::move(xs);
    ps.preimages = std::move(pre);
    ps.compute_keys();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Lattice.
// ---------------------------------------------------------------------------
struct Lattice {
    int dim = 0;
    Mat basis;  // columns are generators

    static Lattice cubic(int d) { return Lattice{d, Mat::identity(d)}; }

    double covolume() const { return std::fabs(determinant(basis)); }

    // Exact shortest nonzero vector for the small dimensions used here.
    double shortest_vector() const {
        Mat inv = inverse(basis);
        double c0 = std::numeric_limits<double>::infinity();
        for (int j = 0; j < dim; ++j) {
            double n2 = 0;
            for (int i = 0; i < dim; ++i) n2 += basis(i, j) * basis(i, j);
            c0 = std::min(c0, std::sqrt(n2));
        }
        // any vector shorter than c0 has integer coords bounded by |B^-1| row sums * c0
        std::vector<int64_t> bound(static_cast<size_t>(dim));
        for (int i = 0; i < dim; ++i) {
            double s = 0;
            for (int j = 0; j < dim; ++j) s += std::fabs(inv(i, j));
            bound[static_cast<size_t>(i)] = static_cast<int64_t>(std::floor(s * c0 + 1e-9));
        }
        double best2 = c0 * c0;
        std::vector<int64_t> z(static_cast<size_t>(dim), 0);
        std::function<void(int)> rec = [&](int i) {
            if (i == dim) {
                bool zero = true;
                for (int j = 0; j < dim; ++j)
                    if (z[static_cast<size_t>(j)] != 0) zero = false;
                if (zero) return;
                double n2 = 0;
                for (int r = 0; r < dim; ++r) {
                    double v = 0;
                    for (int j = 0; j < dim; ++j) v += basis(r, j) * static_cast<double>(z[static_cast<size_t>(j)]);
                    n2 += v * v;
                }
                best2 = std::min(best2, n2);
                return;
            }
            for (int64_t v = -bound[static_cast<size_t>(i)]; v <= bound[static_cast<size_t>(i)]; ++v) {
                z[static_cast<size_t>(i)] = v;
                rec(i + 1);
            }
        };
        rec(0);
        return std::sqrt(best2);
    }
};

// ---------------------------------------------------------------------------
// Window in internal space: axis-aligned box or ball.
// ---------------------------------------------------------------------------
struct Window {
    enum class Shape { Box, Ball } shape = Shape::Box;
    Vec lo, hi;      // box
    Vec center;      // ball
    double radius = 0.0;
    bool half_open = false;  // box membership lo <= y < hi (regular model sets)

    static Window box(Vec lo_, Vec hi_, bool half_open_ = false) {
        Window w;
        w.shape = Shape::Box;
        w.lo = lo_;
        w.hi = hi_;
        w.half_open = half_open_;
        return w;
    }
    static Window ball(Vec c, double r) {
        Window w;
        w.shape = Shape::Ball;
        w.center = c;
        w.radius = r;
        return w;
    }

    int dim() const { return shape == Shape::Box ? lo.dim : center.dim; }

    double volume() const {
        if (shape == Shape::Ball) return ball_volume(center.dim, radius);
        double v = 1.0;
        for (int i = 0; i < lo.dim; ++i) v *= std::max(0.0, hi[i] - lo[i]);
        return v;
    }

    bool contains(const Vec& y) const {
        if (shape == Shape::Ball) return (y - center).norm2() <= radius * radius;
        for (int i = 0; i < lo.dim; ++i) {
            if (y[i] < lo[i]) return false;
            if (half_open ? y[i] >= hi[i] : y[i] > hi[i]) return false;
        }
        return true;
    }

    void bounding_box(Vec& blo, Vec& bhi) const {
        if (shape == Shape::Box) {
            blo = lo;
            bhi = hi;
        } else {
            blo = Vec(center.dim);
            bhi = Vec(center.dim);
            for (int i = 0; i < center.dim; ++i) {
                blo[i] = center[i] - radius;
                bhi[i] = center[i] + radius;
            }
        }
    }

    Window shifted(const Vec& t) const {
        Window w = *this;
        if (shape == Shape::Box) {
            w.lo = lo + t;
            w.hi = hi + t;
        } else {
            w.center = center + t;
        }
        return w;
    }
};

// ---------------------------------------------------------------------------
// Cut-and-project scheme.
// ---------------------------------------------------------------------------
struct CutProjectScheme {
    int n = 0;  // total dimension
    int d = 0;  // physical dimension
    Mat lattice_basis;  // n x n
    Mat proj_phys;      // d x n
    Mat proj_int;       // (n-d) x n
    Window window;      // in R^{n-d}

    int internal_dim() const { return n - d; }

    Mat stacked() const {
        Mat s(n, n);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < d; ++i) s(i, j) = proj_phys(i, j);
            for (int i = 0; i < n - d; ++i) s(d + i, j) = proj_int(i, j);
        }
        return s;
    }

    void validate() const {
        if (n <= 0 || d <= 0 || d >= n) throw std::invalid_argument("cut-and-project: need 0 < d < n");
        if (proj_phys.rows != d || proj_phys.cols != n || proj_int.rows != n - d || proj_int.cols != n)
            throw std::invalid_argument("cut-and-project: projection shapes inconsistent");
        if (window.dim() != n - d) throw std::invalid_argument("cut-and-project: window dimension mismatch");
        Mat s = stacked();
        if (std::fabs(determinant(s)) < 1e-12)
            throw std::invalid_argument("cut-and-project: stacked projections are singular");
        if (std::fabs(determinant(lattice_basis)) < 1e-12)
            throw std::invalid_argument("cut-and-project: lattice basis is singular");
    }

    // Point density of the projected set (per unit physical volume),
    // from equidistribution of internal coordinates in the window.
    double analytic_density() const {
        return window.volume() / std::fabs(determinant(stacked().mul(lattice_basis)));
    }
};

// The canonical 1-D quasicrystal: Z^2 projected onto a line of slope 1/phi,
// window = internal projection of the unit square.
inline CutProjectScheme fibonacci_scheme() {
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    const double den = std::sqrt(1.0 + phi * phi);
    const double c = phi / den;   // cos(theta), tan(theta) = 1/phi
    const double s = 1.0 / den;   // sin(theta)
    CutProjectScheme sch;
    sch.n = 2;
    sch.d = 1;
    sch.lattice_basis = Mat::identity(2);
    sch.proj_phys = Mat(1, 2);
    sch.proj_phys(0, 0) = c;
    sch.proj_phys(0, 1) = s;
    sch.proj_int = Mat(1, 2);
    sch.proj_int(0, 0) = -s;
    sch.proj_int(0, 1) = c;
    // half-open acceptance keeps the chain a regular two-gap model set
    sch.window = Window::box(Vec{-s}, Vec{c}, true);
    return sch;
}

// ---------------------------------------------------------------------------
// Asymptotically affine deformation psi(x) = A x + c (1+|x|)^(-beta) u(x),
// u a seeded unit-vector field.
// ---------------------------------------------------------------------------
struct DeformationSpec {
    Mat linear_part;        // d x d, nonsingular
    double decay_amplitude = 0.0;
    double decay_exponent = 1.0;
    uint64_t direction_seed = 0;
};

inline Vec deformation_direction(const DeformationSpec& spec, const Vec& x) {
    Stream s = Stream::from(spec.direction_seed, point_key(x.x.data(), x.dim));
    return s.sphere_dir(x.dim, 0);
}

inline Vec deform(const DeformationSpec& spec, const Vec& x) {
    Vec out = spec.linear_part.mul(x);
    if (spec.decay_amplitude != 0.0) {
        double scale = spec.decay_amplitude * std::pow(1.0 + x.norm(), -spec.decay_exponent);
        Vec u = deformation_direction(spec, x);
        for (int i = 0; i < x.dim; ++i) out[i] += scale * u[i];
    }
    return out;
}

// The limit shift F(k) = -A k of psi(x) - psi(x+k) as |x| -> infinity.
inline Vec deformation_limit(const DeformationSpec& spec, const Vec& k) {
    return -spec.linear_part.mul(k);
}

// ---------------------------------------------------------------------------
// Integer enumeration of { z in Z^n : G z in [lo, hi] } with interval
// pruning; exact membership filtering is the caller's job.
// ---------------------------------------------------------------------------
namespace detail {

template <typename Fn>
void enumerate_box(const Mat& G, const std::vector<double>& lo, const std::vector<double>& hi,
                   size_t cap, Fn&& emit) {
    const int n = G.rows;
    Mat Ginv = inverse(G);
    std::vector<double> zlo(static_cast<size_t>(n)), zhi(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double center = 0, rad = 0;
        for (int j = 0; j < n; ++j) {
            center += Ginv(i, j) * 0.5 * (lo[static_cast<size_t>(j)] + hi[static_cast<size_t>(j)]);
            rad += std::fabs(Ginv(i, j)) * 0.5 * (hi[static_cast<size_t>(j)] - lo[static_cast<size_t>(j)]);
        }
        zlo[static_cast<size_t>(i)] = std::ceil(center - rad - 1e-9);
        zhi[static_cast<size_t>(i)] = std::floor(center + rad + 1e-9);
        if (zhi[static_cast<size_t>(i)] < zlo[static_cast<size_t>(i)]) return;
    }
    // suffix extrema of sum_{k >= i} G(j,k) z_k over the global ranges
    std::vector<std::vector<double>> sufmin(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n) + 1, 0.0));
    std::vector<std::vector<double>> sufmax = sufmin;
    for (int j = 0; j < n; ++j) {
        for (int i = n - 1; i >= 0; --i) {
            double a = G(j, i) * zlo[static_cast<size_t>(i)];
            double b = G(j, i) * zhi[static_cast<size_t>(i)];
            sufmin[static_cast<size_t>(j)][static_cast<size_t>(i)] = sufmin[static_cast<size_t>(j)][static_cast<size_t>(i) + 1] + std::min(a, b);
            sufmax[static_cast<size_t>(j)][static_cast<size_t>(i)] = sufmax[static_cast<size_t>(j)][static_cast<size_t>(i) + 1] + std::max(a, b);
        }
    }
    std::vector<int64_t> z(static_cast<size_t>(n), 0);
    std::vector<double> partial(static_cast<size_t>(n), 0.0);  // partial[j] = sum_{k<depth} G(j,k) z_k
    size_t count = 0;

    std::function<void(int)> rec = [&](int depth) {
        if (depth == n) {
            if (++count > cap)
                throw resource_error("point count cap exceeded (" + std::to_string(cap) + ")");
            emit(z);
            return;
        }
        double vlo = zlo[static_cast<size_t>(depth)], vhi = zhi[static_cast<size_t>(depth)];
        for (int j = 0; j < n; ++j) {
            const double rem_min = sufmin[static_cast<size_t>(j)][static_cast<size_t>(depth) + 1];
            const double rem_max = sufmax[static_cast<size_t>(j)][static_cast<size_t>(depth) + 1];
            const double a = lo[static_cast<size_t>(j)] - partial[static_cast<size_t>(j)] - rem_max;
            const double b = hi[static_cast<size_t>(j)] - partial[static_cast<size_t>(j)] - rem_min;
            const double g = G(j, depth);
            if (std::fabs(g) < 1e-14) {
                if (a > 1e-9 || b < -1e-9) return;
                continue;
            }
            double t0 = a / g, t1 = b / g;
            if (g < 0) std::swap(t0, t1);
            vlo = std::max(vlo, std::ceil(t0 - 1e-9));
            vhi = std::min(vhi, std::floor(t1 + 1e-9));
            if (vhi < vlo) return;
        }
        for (int64_t v = static_cast<int64_t>(vlo); v <= static_cast<int64_t>(vhi); ++v) {
            z[static_cast<size_t>(depth)] = v;
            for (int j = 0; j < n; ++j) partial[static_cast<size_t>(j)] += G(j, depth) * static_cast<double>(v);
            rec(depth + 1);
            for (int j = 0; j < n; ++j) partial[static_cast<size_t>(j)] -= G(j, depth) * static_cast<double>(v);
        }
    };
    rec(0);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Grid-bucket neighbor search over a flat point array.
// ---------------------------------------------------------------------------
class BucketGrid {
public:
    BucketGrid(const std::vector<double>& xs, int dim, double cell)
        : xs_(xs), dim_(dim), cell_(cell) {
        const size_t n = xs.size() / static_cast<size_t>(dim);
        cells_.reserve(n);
        for (size_t i = 0; i < n; ++i) cells_[key_of(xs_.data() + i * static_cast<size_t>(dim))].push_back(static_cast<uint32_t>(i));
    }

    // Visits every point within `radius` of `p` (including p itself if present).
    template <typename Fn>
    void for_neighbors(const double* p, double radius, Fn&& fn) const {
        const int reach = static_cast<int>(std::ceil(radius / cell_));
        std::array<int64_t, kMaxDim> base{};
        for (int c = 0; c < dim_; ++c) base[static_cast<size_t>(c)] = cell_index(p[c]);
        std::array<int64_t, kMaxDim> cur{};
        const double r2 = radius * radius;
        visit_cells(0, reach, base, cur, [&](const std::array<int64_t, kMaxDim>& cc) {
            auto it = cells_.find(pack(cc));
            if (it == cells_.end()) return;
            for (uint32_t idx : it->second) {
                const double* q = xs_.data() + static_cast<size_t>(idx) * dim_;
                double d2 = 0;
                for (int c = 0; c < dim_; ++c) d2 += (q[c] - p[c]) * (q[c] - p[c]);
                if (d2 <= r2) fn(idx, d2);
            }
        });
    }

private:
    int64_t cell_index(double v) const { return static_cast<int64_t>(std::floor(v / cell_)); }

    uint64_t key_of(const double* p) const {
        std::array<int64_t, kMaxDim> cc{};
        for (int c = 0; c < dim_; ++c) cc[static_cast<size_t>(c)] = cell_index(p[c]);
        return pack(cc);
    }

    uint64_t pack(const std::array<int64_t, kMaxDim>& cc) const {
        return fnv1a64(cc.data(), sizeof(int64_t) * static_cast<size_t>(dim_));
    }

    template <typename Fn>
    void visit_cells(int c, int reach, const std::array<int64_t, kMaxDim>& base,
                     std::array<int64_t, kMaxDim>& cur, Fn&& fn) const {
        if (c == dim_) {
            fn(cur);
            return;
        }
        for (int64_t dcell = -reach; dcell <= reach; ++dcell) {
            cur[static_cast<size_t>(c)] = base[static_cast<size_t>(c)] + dcell;
            visit_cells(c + 1, reach, base, cur, fn);
        }
    }

    const std::vector<double>& xs_;
    int dim_;
    double cell_;
    std::unordered_map<uint64_t, std::vector<uint32_t>> cells_;
};

// ---------------------------------------------------------------------------
// Diagnostics.
// ---------------------------------------------------------------------------
inline double min_separation(const PointSet& ps) {
    const size_t n = ps.size();
    if (n < 2) throw std::invalid_argument("min_separation: need at least 2 points");
    // start with the mean-spacing scale and double until a pair is captured
    double cell = std::pow(ball_volume(ps.dim, ps.generation_radius > 0 ? ps.generation_radius : 1.0) /
                               static_cast<double>(n),
                           1.0 / ps.dim);
    if (!(cell > 0) || !std::isfinite(cell)) cell = 1.0;
    for (;;) {
        BucketGrid grid(ps.xs, ps.dim, cell);
        double best2 = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < n; ++i) {
            grid.for_neighbors(ps.point(i), cell, [&](uint32_t j, double d2) {
                if (j != i && d2 < best2) best2 = d2;
            });
        }
        if (std::isfinite(best2)) return std::sqrt(best2);
        cell *= 2.0;
    }
}

struct DensitySample {
    double R = 0.0;
    double density = 0.0;                      // #(X cap B_R) / Vol(B_R)
    std::optional<double> discrepancy;         // |count - dens Vol| / R^d
};

inline std::vector<DensitySample> estimate_density(const PointSet& ps,
                                                   const std::vector<double>& radii) {
    if (radii.empty()) throw std::invalid_argument("estimate_density: radii empty");
    for (size_t i = 1; i < radii.size(); ++i)
        if (radii[i] <= radii[i - 1]) throw std::invalid_argument("estimate_density: radii must increase");
    if (radii.back() > ps.generation_radius + 1e-9)
        throw std::invalid_argument("estimate_density: radius exceeds generation radius");
    std::vector<double> norms(ps.size());
    for (size_t i = 0; i < ps.size(); ++i) {
        double s = 0;
        for (int c = 0; c < ps.dim; ++c) s += ps.point(i)[c] * ps.point(i)[c];
        norms[i] = std::sqrt(s);
    }
    std::sort(norms.begin(), norms.end());
    std::vector<DensitySample> out;
    out.reserve(radii.size());
    for (double R : radii) {
        auto it = std::upper_bound(norms.begin(), norms.end(), R);
        double count = static_cast<double>(it - norms.begin());
        DensitySample s;
        s.R = R;
        s.density = ps.dim > 0 ? count / ball_volume(ps.dim, R) : 0.0;
        if (ps.claimed_density)
            s.discrepancy = std::fabs(count - *ps.claimed_density * ball_volume(ps.dim, R)) /
                            std::pow(R, ps.dim);
        out.push_back(s);
    }
    return out;
}

// Exact pairwise-separation check, sampled above `exact_limit` points.
inline bool check_separation(const PointSet& ps, size_t exact_limit = 100'000) {
    const size_t n = ps.size();
    if (n < 2 || !std::isfinite(ps.separation_radius)) return true;
    const double r = ps.separation_radius * (1.0 - 1e-12);
    if (n <= exact_limit) {
        BucketGrid grid(ps.xs, ps.dim, std::max(ps.separation_radius, 1e-12));
        for (size_t i = 0; i < n; ++i) {
            bool ok = true;
            grid.for_neighbors(ps.point(i), r, [&](uint32_t j, double) {
                if (j != i) ok = false;
            });
            if (!ok) return false;
        }
        return true;
    }
    BucketGrid grid(ps.xs, ps.dim, std::max(ps.separation_radius, 1e-12));
    Stream s = Stream::from(0x5eedu, 0xA5A5u);
    for (size_t t = 0; t < exact_limit; ++t) {
        size_t i = static_cast<size_t>(s.u01(t) * static_cast<double>(n));
        if (i >= n) i = n - 1;
        bool ok = true;
        grid.for_neighbors(ps.point(i), r, [&](uint32_t j, double) {
            if (j != i) ok = false;
        });
        if (!ok) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Generators.
// ---------------------------------------------------------------------------
inline PointSet generate_lattice(const Lattice& lat, double R, size_t cap = kDefaultPointCap) {
    if (!(R > 0)) throw std::invalid_argument("generate_lattice: R must be positive");
    const double covol = lat.covolume();
    if (covol < 1e-300) throw std::invalid_argument("generate_lattice: singular basis");
    if (ball_volume(lat.dim, R) / covol > 1.2 * static_cast<double>(cap) + 64.0)
        throw resource_error("generate_lattice: estimated point count exceeds cap");

    PointSet ps;
    ps.dim = lat.dim;
    ps.generation_radius = R;
    ps.preimage_dim = lat.dim;
    std::vector<double> lo(static_cast<size_t>(lat.dim), -R), hi(static_cast<size_t>(lat.dim), R);
    detail::enumerate_box(lat.basis, lo, hi, cap, [&](const std::vector<int64_t>& z) {
        Vec p(lat.dim);
        for (int r = 0; r < lat.dim; ++r) {
            double v = 0;
            for (int j = 0; j < lat.dim; ++j) v += lat.basis(r, j) * static_cast<double>(z[static_cast<size_t>(j)]);
            p[r] = v;
        }
        if (p.norm2() <= R * R) {
            for (int c = 0; c < lat.dim; ++c) ps.xs.push_back(p[c]);
            for (int c = 0; c < lat.dim; ++c) ps.preimages.push_back(z[static_cast<size_t>(c)]);
        }
    });
    ps.separation_radius = lat.shortest_vector();
    ps.claimed_density = 1.0 / covol;
    ps.descriptor.generator = "lattice";
    ps.descriptor.set("dim", static_cast<int64_t>(lat.dim));
    ps.descriptor.set("R", R);
    ps.descriptor.set("covolume", covol);
    detail::normalize_order(ps);
    return ps;
}

inline PointSet generate_cut_and_project(const CutProjectScheme& scheme, double R,
                                         size_t cap = kDefaultPointCap,
                                         const std::vector<int64_t>& enum_origin = {}) {
    if (!(R > 0)) throw std::invalid_argument("generate_cut_and_project: R must be positive");
    scheme.validate();
    const int n = scheme.n, d = scheme.d, k = scheme.internal_dim();

    PointSet ps;
    ps.dim = d;
    ps.generation_radius = R;
    ps.preimage_dim = n;
    ps.descriptor.generator = "cut_and_project";
    ps.descriptor.set("n", static_cast<int64_t>(n));
    ps.descriptor.set("d", static_cast<int64_t>(d));
    ps.descriptor.set("R", R);
    ps.descriptor.set("density", "analytic");

    if (scheme.window.volume() <= 0.0) {
        ps.separation_radius = std::numeric_limits<double>::infinity();
        return ps;  // empty window: empty set, not an error
    }

    const double dens = scheme.analytic_density();
    if (ball_volume(d, R) * dens > 1.2 * static_cast<double>(cap) + 64.0)
        throw resource_error("generate_cut_and_project: estimated point count exceeds cap");

    Mat G = scheme.stacked().mul(scheme.lattice_basis);  // rows: phys then internal
    Vec wlo, whi;
    scheme.window.bounding_box(wlo, whi);
    std::vector<double> lo(static_cast<size_t>(n)), hi(static_cast<size_t>(n));
    for (int i = 0; i < d; ++i) lo[static_cast<size_t>(i)] = -R, hi[static_cast<size_t>(i)] = R;
    for (int i = 0; i < k; ++i) lo[static_cast<size_t>(d + i)] = wlo[i], hi[static_cast<size_t>(d + i)] = whi[i];

    const bool shifted = !enum_origin.empty();
    if (shifted && enum_origin.size() != static_cast<size_t>(n))
        throw std::invalid_argument("generate_cut_and_project: enumeration origin dimension mismatch");
    std::vector<double> slo = lo, shi = hi;
    if (shifted) {
        // enumerate y = z - origin over the translated box; same set emitted
        for (int r = 0; r < n; ++r) {
            double shift = 0;
            for (int j = 0; j < n; ++j) shift += G(r, j) * static_cast<double>(enum_origin[static_cast<size_t>(j)]);
            slo[static_cast<size_t>(r)] -= shift;
            shi[static_cast<size_t>(r)] -= shift;
        }
    }

    detail::enumerate_box(G, slo, shi, cap, [&](const std::vector<int64_t>& y) {
        std::vector<int64_t> z = y;
        if (shifted)
            for (int j = 0; j < n; ++j) z[static_cast<size_t>(j)] += enum_origin[static_cast<size_t>(j)];
        Vec q(n);
        for (int r = 0; r < n; ++r) {
            double v = 0;
            for (int j = 0; j < n; ++j) v += scheme.lattice_basis(r, j) * static_cast<double>(z[static_cast<size_t>(j)]);
            q[r] = v;
        }
        Vec p = scheme.proj_phys.mul(q);
        Vec y_int = scheme.proj_int.mul(q);
        if (p.norm2() <= R * R && scheme.window.contains(y_int)) {
            for (int c = 0; c < d; ++c) ps.xs.push_back(p[c]);
            for (int c = 0; c < n; ++c) ps.preimages.push_back(z[static_cast<size_t>(c)]);
        }
    });

    ps.claimed_density = dens;
    if (ps.size() >= 2) {
        ps.separation_radius = min_separation(ps);
        if (ps.separation_radius < 1e-9)
            throw std::invalid_argument(
                "generate_cut_and_project: physical projection not injective on sample (CP2)");
    }
    detail::normalize_order(ps);
    return ps;
}

inline PointSet generate_visible_points(int d, double R, size_t cap = kDefaultPointCap) {
    if (d < 2) throw std::invalid_argument("generate_visible_points: need d >= 2");
    if (!(R >= 1)) throw std::invalid_argument("generate_visible_points: need R >= 1");
    if (ball_volume(d, R) > 1.2 * static_cast<double>(cap) + 64.0)
        throw resource_error("generate_visible_points: estimated point count exceeds cap");

    PointSet ps;
    ps.dim = d;
    ps.generation_radius = R;
    ps.preimage_dim = d;
    std::vector<double> lo(static_cast<size_t>(d), -R), hi(static_cast<size_t>(d), R);
    detail::enumerate_box(Mat::identity(d), lo, hi, cap, [&](const std::vector<int64_t>& z) {
        double n2 = 0;
        for (int c = 0; c < d; ++c) n2 += static_cast<double>(z[static_cast<size_t>(c)]) * static_cast<double>(z[static_cast<size_t>(c)]);
        if (n2 > R * R) return;
        uint64_t g = 0;
        for (int c = 0; c < d; ++c) {
            uint64_t a = static_cast<uint64_t>(std::llabs(z[static_cast<size_t>(c)]));
            while (a != 0) {
                uint64_t t = g % a;
                g = a;
                a = t;
            }
        }
        if (g != 1) return;
        for (int c = 0; c < d; ++c) ps.xs.push_back(static_cast<double>(z[static_cast<size_t>(c)]));
        for (int c = 0; c < d; ++c) ps.preimages.push_back(z[static_cast<size_t>(c)]);
    });
    ps.claimed_density = 1.0 / zeta(d);
    ps.separation_radius = ps.size() >= 2 ? min_separation(ps) : std::numeric_limits<double>::infinity();
    ps.descriptor.generator = "visible_points";
    ps.descriptor.set("dim", static_cast<int64_t>(d));
    ps.descriptor.set("R", R);
    detail::normalize_order(ps);
    return ps;
}

inline PointSet generate_deformed_lattice(const Lattice& lat, const DeformationSpec& spec, double R,
                                          size_t cap = kDefaultPointCap) {
    if (!(R > 0)) throw std::invalid_argument("generate_deformed_lattice: R must be positive");
    if (!(spec.decay_exponent > 0)) throw std::invalid_argument("generate_deformed_lattice: beta must be positive");
    Mat AB = spec.linear_part.mul(lat.basis);
    Lattice image{lat.dim, AB};
    const double covol = image.covolume();
    if (covol < 1e-300) throw std::invalid_argument("generate_deformed_lattice: singular linear part");
    const double Rbase = R + std::fabs(spec.decay_amplitude);
    if (ball_volume(lat.dim, Rbase) / covol > 1.2 * static_cast<double>(cap) + 64.0)
        throw resource_error("generate_deformed_lattice: estimated point count exceeds cap");

    PointSet ps;
    ps.dim = lat.dim;
    ps.generation_radius = R;
    ps.preimage_dim = lat.dim;
    std::vector<double> lo(static_cast<size_t>(lat.dim), -Rbase), hi(static_cast<size_t>(lat.dim), Rbase);
    detail::enumerate_box(AB, lo, hi, cap, [&](const std::vector<int64_t>& z) {
        Vec x(lat.dim);
        for (int r = 0; r < lat.dim; ++r) {
            double v = 0;
            for (int j = 0; j < lat.dim; ++j) v += lat.basis(r, j) * static_cast<double>(z[static_cast<size_t>(j)]);
            x[r] = v;
        }
        Vec p = deform(spec, x);
        if (p.norm2() <= R * R) {
            for (int c = 0; c < lat.dim; ++c) ps.xs.push_back(p[c]);
            for (int c = 0; c < lat.dim; ++c) ps.preimages.push_back(z[static_cast<size_t>(c)]);
        }
    });
    const double lattice_min = image.shortest_vector();
    ps.separation_radius = ps.size() >= 2 ? min_separation(ps) : std::numeric_limits<double>::infinity();
    if (ps.size() >= 2 && ps.separation_radius < 1e-3 * lattice_min)
        throw std::invalid_argument("generate_deformed_lattice: deformation breaks uniform discreteness");
    ps.claimed_density = 1.0 / covol;
    ps.descriptor.generator = "deformed_lattice";
    ps.descriptor.set("dim", static_cast<int64_t>(lat.dim));
    ps.descriptor.set("R", R);
    ps.descriptor.set("amplitude", spec.decay_amplitude);
    ps.descriptor.set("exponent", spec.decay_exponent);
    ps.descriptor.set("direction_seed", static_cast<int64_t>(spec.direction_seed));
    detail::normalize_order(ps);
    return ps;
}

// ---------------------------------------------------------------------------
// GeneratorSpec: a value describing how to (re)generate a set at any radius.
// ---------------------------------------------------------------------------
struct GeneratorSpec {
    enum class Kind { Lattice, CutProject, VisiblePoints, DeformedLattice } kind = Kind::Lattice;
    Lattice lattice;
    CutProjectScheme scheme;
    DeformationSpec deformation;
    int visible_dim = 2;
    size_t cap = kDefaultPointCap;

    static GeneratorSpec make_lattice(Lattice l) {
        GeneratorSpec g;
        g.kind = Kind::Lattice;
        g.lattice = std::move(l);
        return g;
    }
    static GeneratorSpec make_cut_project(CutProjectScheme s) {
        GeneratorSpec g;
        g.kind = Kind::CutProject;
        g.scheme = std::move(s);
        return g;
    }
    static GeneratorSpec make_visible(int d) {
        GeneratorSpec g;
        g.kind = Kind::VisiblePoints;
        g.visible_dim = d;
        return g;
    }
    static GeneratorSpec make_deformed(Lattice l, DeformationSpec spec) {
        GeneratorSpec g;
        g.kind = Kind::DeformedLattice;
        g.lattice = std::move(l);
        g.deformation = std::move(spec);
        return g;
    }

    int dim() const {
        switch (kind) {
            case Kind::Lattice: return lattice.dim;
            case Kind::CutProject: return scheme.d;
            case Kind::VisiblePoints: return visible_dim;
            case Kind::DeformedLattice: return lattice.dim;
        }
        return 0;
    }

    PointSet generate(double R) const {
        switch (kind) {
            case Kind::Lattice: return generate_lattice(lattice, R, cap);
            case Kind::CutProject: return generate_cut_and_project(scheme, R, cap);
            case Kind::VisiblePoints: return generate_visible_points(visible_dim, R, cap);
            case Kind::DeformedLattice: return generate_deformed_lattice(lattice, deformation, R, cap);
        }
        throw std::logic_error("GeneratorSpec: bad kind");
    }
};

}  // namespace difflab
