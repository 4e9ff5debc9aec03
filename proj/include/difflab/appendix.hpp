// appendix.hpp
// Strong-law traces for correlated scalar sequences, gridded measures and
// localized Hellinger densities with the Cauchy-Schwarz and diffraction
// bounds built on them.
#pragma once

#include <array>
#include <vector>

#include "difflab/spectral.hpp"
#include "difflab/stats.hpp"

namespace difflab {

// ---------------------------------------------------------------------------
// Scalar marginals for sequence simulation.
// ---------------------------------------------------------------------------
struct ScalarMarginal {
    enum class Kind { Constant, Uniform01, Exponential1, Pareto, GaussianStd } kind = Kind::Uniform01;
    double constant = 0.0;
    double pareto_alpha = 1.5;  // density alpha x^{-alpha-1} on [1, inf)

    static ScalarMarginal constant_of(double c) {
        ScalarMarginal m;
        m.kind = Kind::Constant;
        m.constant = c;
        return m;
    }
    static ScalarMarginal uniform01() { return ScalarMarginal{}; }
    static ScalarMarginal exponential1() {
        ScalarMarginal m;
        m.kind = Kind::Exponential1;
        return m;
    }
    static ScalarMarginal pareto(double alpha) {
        ScalarMarginal m;
        m.kind = Kind::Pareto;
        m.pareto_alpha = alpha;
        return m;
    }
    static ScalarMarginal gaussian_std() {
        ScalarMarginal m;
        m.kind = Kind::GaussianStd;
        return m;
    }

    double mean() const {
        switch (kind) {
            case Kind::Constant: return constant;
            case Kind::Uniform01: return 0.5;
            case Kind::Exponential1: return 1.0;
            case Kind::Pareto:
                if (!(pareto_alpha > 1.0)) throw std::invalid_argument("pareto: infinite mean");
                return pareto_alpha / (pareto_alpha - 1.0);
            case Kind::GaussianStd: return 0.0;
        }
        return 0.0;
    }

    bool positive() const {
        switch (kind) {
            case Kind::Constant: return constant > 0.0;
            case Kind::Uniform01:
            case Kind::Exponential1:
            case Kind::Pareto: return true;
            case Kind::GaussianStd: return false;
        }
        return false;
    }

    double draw(const Stream& s, uint64_t i) const {
        switch (kind) {
            case Kind::Constant: return constant;
            case Kind::Uniform01: return s.u01(i);
            case Kind::Exponential1: return -std::log(s.u01_pos(i));
            case Kind::Pareto: return std::pow(s.u01_pos(i), -1.0 / pareto_alpha);
            case Kind::GaussianStd: return s.gauss(i);
        }
        return 0.0;
    }
};

// ---------------------------------------------------------------------------
// Correlated sequences: IID draws of the marginal, or the AR(1) chain
// (exact geometric covariance beta^{|i-j|} for the Gaussian marginal).
// ---------------------------------------------------------------------------
struct CorrelatedSequenceSpec {
    enum class Kind { IIDBounded, GeometricCovariance } kind = Kind::IIDBounded;
    ScalarMarginal marginal;
    double beta = 0.5;
    size_t length_cap = 10'000'000;

    static CorrelatedSequenceSpec iid(ScalarMarginal m) {
        CorrelatedSequenceSpec s;
        s.kind = Kind::IIDBounded;
        s.marginal = m;
        return s;
    }
    static CorrelatedSequenceSpec ar1(double beta_) {
        CorrelatedSequenceSpec s;
        s.kind = Kind::GeometricCovariance;
        s.marginal = ScalarMarginal::gaussian_std();
        s.beta = beta_;
        return s;
    }

    void validate() const {
        if (kind == Kind::GeometricCovariance && !(beta > 0.0 && beta < 1.0))
            throw std::invalid_argument("sequence: beta must lie in (0,1)");
    }
};

namespace salt {
inline constexpr uint64_t kSequence = 0x7365712D73616C74ull;
}

struct TracePoint {
    size_t n = 0;
    double value = 0.0;
};

namespace detail {

template <typename Step>
std::vector<TracePoint> run_trace(size_t n_max, Step&& step) {
    std::vector<size_t> checkpoints;
    for (size_t c = 1000; c <= n_max; c *= 10) checkpoints.push_back(c);
    if (checkpoints.empty() || checkpoints.back() != n_max) checkpoints.push_back(n_max);
    std::vector<TracePoint> out;
    KahanSum acc;
    size_t next = 0;
    for (size_t i = 1; i <= n_max; ++i) {
        acc.add(step(i));
        if (next < checkpoints.size() && i == checkpoints[next]) {
            out.push_back(TracePoint{i, acc.sum / static_cast<double>(i)});
            ++next;
        }
    }
    return out;
}

}  // namespace detail

// (1/n) sum_{k<=n} (X_k - E X_k) at decade checkpoints.
inline std::vector<TracePoint> slln_trace(const CorrelatedSequenceSpec& spec, size_t n_max,
                                          uint64_t seed) {
    spec.validate();
    if (n_max > spec.length_cap) throw std::invalid_argument("slln_trace: exceeds length cap");
    Stream s = Stream::from(seed ^ salt::kSequence, 17);
    if (spec.kind == CorrelatedSequenceSpec::Kind::IIDBounded) {
        const double mu = spec.marginal.mean();
        return detail::run_trace(n_max, [&](size_t i) { return spec.marginal.draw(s, i) - mu; });
    }
    // stationary AR(1), standard-normal marginal, covariance beta^{|i-j|}
    const double beta = spec.beta;
    const double innov = std::sqrt(1.0 - beta * beta);
    double x = s.gauss(0);
    return detail::run_trace(n_max, [&](size_t i) {
        if (i > 1) x = beta * x + innov * s.gauss(i);
        return x;
    });
}

// Plain running mean S_n / n of a positive identically distributed sequence.
inline std::vector<TracePoint> truncated_slln_trace(const CorrelatedSequenceSpec& spec, size_t n_max,
                                                    uint64_t seed) {
    spec.validate();
    if (!spec.marginal.positive())
        throw std::invalid_argument("truncated_slln_trace: marginal must be positive");
    if (n_max > spec.length_cap) throw std::invalid_argument("truncated_slln_trace: exceeds length cap");
    Stream s = Stream::from(seed ^ salt::kSequence, 23);
    if (spec.kind == CorrelatedSequenceSpec::Kind::IIDBounded)
        return detail::run_trace(n_max, [&](size_t i) { return spec.marginal.draw(s, i); });
    throw std::invalid_argument("truncated_slln_trace: positive marginals use the IID generator");
}

// ---------------------------------------------------------------------------
// Gridded measures (uniform rectangular grid, density per cell).
// ---------------------------------------------------------------------------
struct GriddedMeasure {
    int dim = 0;
    Vec origin;                      // lower corner
    Vec step;                        // per-dimension cell edge
    std::array<int, kMaxDim> counts{};
    std::vector<double> densities;   // row-major, nonnegative

    size_t cell_count() const {
        size_t n = 1;
        for (int c = 0; c < dim; ++c) n *= static_cast<size_t>(counts[static_cast<size_t>(c)]);
        return n;
    }
    double cell_volume() const {
        double v = 1;
        for (int c = 0; c < dim; ++c) v *= step[c];
        return v;
    }
    Vec cell_center(size_t idx) const {
        Vec p(dim);
        size_t rem = idx;
        for (int c = dim - 1; c >= 0; --c) {
            size_t n = static_cast<size_t>(counts[static_cast<size_t>(c)]);
            p[c] = origin[c] + (static_cast<double>(rem % n) + 0.5) * step[c];
            rem /= n;
        }
        return p;
    }
    double total_mass() const {
        KahanSum s;
        for (double d : densities) s.add(d);
        return s.sum * cell_volume();
    }
    bool same_grid(const GriddedMeasure& o) const {
        if (dim != o.dim) return false;
        for (int c = 0; c < dim; ++c)
            if (origin[c] != o.origin[c] || step[c] != o.step[c] ||
                counts[static_cast<size_t>(c)] != o.counts[static_cast<size_t>(c)])
                return false;
        return true;
    }

    static GriddedMeasure zeros_like(const GriddedMeasure& g) {
        GriddedMeasure out = g;
        out.densities.assign(g.densities.size(), 0.0);
        return out;
    }
};

// Localized Hellinger density: cellwise sqrt of the product of densities
// (equivalently sqrt(dg1/ds dg2/ds) ds for s = g1 + g2); vanishes wherever
// either input does, so mutually singular inputs give the zero measure.
inline GriddedMeasure hellinger_density(const GriddedMeasure& g1, const GriddedMeasure& g2) {
    if (!g1.same_grid(g2)) throw std::invalid_argument("hellinger_density: grid mismatch");
    GriddedMeasure out = GriddedMeasure::zeros_like(g1);
    for (size_t i = 0; i < g1.densities.size(); ++i) {
        double a = g1.densities[i], b = g2.densities[i];
        if (a < 0 || b < 0) throw std::invalid_argument("hellinger_density: negative density");
        out.densities[i] = (a + b > 0.0) ? std::sqrt(a * b) : 0.0;
    }
    return out;
}

// Cauchy-Schwarz bound <rho(g1,g2), f> <= sqrt(<g1,f>) sqrt(<g2,f>) for
// nonnegative grid functions f.
struct HellingerBound {
    double lhs = 0.0;
    double rhs = 0.0;
};

inline HellingerBound hellinger_cs_bound(const GriddedMeasure& g1, const GriddedMeasure& g2,
                                         const std::vector<double>& f) {
    if (!g1.same_grid(g2)) throw std::invalid_argument("hellinger_cs_bound: grid mismatch");
    if (f.size() != g1.densities.size())
        throw std::invalid_argument("hellinger_cs_bound: test function size mismatch");
    GriddedMeasure rho = hellinger_density(g1, g2);
    KahanSum lhs, a, b;
    for (size_t i = 0; i < f.size(); ++i) {
        if (f[i] < 0) throw std::invalid_argument("hellinger_cs_bound: f must be nonnegative");
        lhs.add(rho.densities[i] * f[i]);
        a.add(g1.densities[i] * f[i]);
        b.add(g2.densities[i] * f[i]);
    }
    const double vol = g1.cell_volume();
    return HellingerBound{lhs.sum * vol, std::sqrt(a.sum * vol) * std::sqrt(b.sum * vol)};
}

// ---------------------------------------------------------------------------
// Diffraction Hellinger bound: for the phase-weight measures mu (centered)
// and nu (plane-wave) of a perturbed set,
//   |(1/Vol(B_R)) sum_{p,q in X cap B_R} mu(p) conj(nu(q)) fhat(p-q)|
// is eventually dominated by <rho(I_mu, I_nu), |f|> computed from gridded
// periodogram estimates. f is a Gaussian bump in frequency space.
// ---------------------------------------------------------------------------
struct FrequencyBump {
    Vec center;          // frequency-space center
    double width = 0.5;  // gaussian std dev
    double amplitude = 1.0;

    double eval(const Vec& lam) const {
        return amplitude * std::exp(-(lam - center).norm2() / (2.0 * width * width));
    }
    // fourier transform at physical displacement x (modulus envelope + phase)
    cplx transform(const Vec& x) const {
        const int d = center.dim;
        double env = amplitude * std::pow(2.0 * kPi * width * width, 0.5 * d) *
                     std::exp(-2.0 * kPi * kPi * width * width * x.norm2());
        double phase = -2.0 * kPi * dot(center, x);
        return env * cplx(std::cos(phase), std::sin(phase));
    }
    double support_radius(double tol = 1e-12) const {
        const int d = center.dim;
        double env0 = amplitude * std::pow(2.0 * kPi * width * width, 0.5 * d);
        if (env0 <= tol) return 0.0;
        return std::sqrt(std::log(env0 / tol) / (2.0 * kPi * kPi * width * width));
    }
};

struct DiffractionBoundResult {
    std::vector<double> radii;
    std::vector<double> lhs;   // |pair sum| / Vol(B_R) per radius
    double rhs = 0.0;          // <rho(I_mu, I_nu), |f|>
    GriddedMeasure grid_mu, grid_nu;
};

namespace detail {

inline std::vector<cplx> weighted_exponential_sums(const AtomicMeasure& am, double R,
                                                   const std::vector<Vec>& freqs, int threads = 0) {
    const double R2 = R * R;
    std::vector<uint32_t> inside;
    for (size_t i = 0; i < am.size(); ++i) {
        double s = 0;
        for (int c = 0; c < am.dim; ++c) s += am.at(i)[c] * am.at(i)[c];
        if (s <= R2) inside.push_back(static_cast<uint32_t>(i));
    }
    std::vector<cplx> out(freqs.size());
    parallel_for(freqs.size(), threads, [&](size_t f) {
        const Vec& lam = freqs[f];
        KahanComplexSum acc;
        for (uint32_t i : inside) {
            double phase = -2.0 * kPi * dot(am.at(i), lam);
            acc.add(am.weights[i] * cplx(std::cos(phase), std::sin(phase)));
        }
        out[f] = acc.value();
    });
    return out;
}

}  // namespace detail

// Gridded periodogram of a weighted atomic measure over a frequency box.
inline GriddedMeasure gridded_periodogram(const AtomicMeasure& am, double R, const Vec& center,
                                          double extent, double step, int threads = 0) {
    GriddedMeasure g;
    g.dim = am.dim;
    g.step = Vec(am.dim);
    g.origin = Vec(am.dim);
    int per_axis = std::max(1, static_cast<int>(std::round(2.0 * extent / step)));
    size_t total = 1;
    for (int c = 0; c < am.dim; ++c) {
        g.step[c] = step;
        g.origin[c] = center[c] - extent;
        g.counts[static_cast<size_t>(c)] = per_axis;
        total *= static_cast<size_t>(per_axis);
    }
    std::vector<Vec> freqs(total);
    for (size_t i = 0; i < total; ++i) freqs[i] = g.cell_center(i);
    std::vector<cplx> sums = detail::weighted_exponential_sums(am, R, freqs, threads);
    const double vol = ball_volume(am.dim, R);
    g.densities.resize(total);
    for (size_t i = 0; i < total; ++i) g.densities[i] = std::norm(sums[i]) / vol;
    return g;
}

inline DiffractionBoundResult hellinger_diffraction_bound(const PerturbedPointSet& pps,
                                                          const Vec& lambda,
                                                          const FrequencyBump& bump,
                                                          const std::vector<double>& R_schedule,
                                                          double grid_extent, double grid_step,
                                                          int threads = 0) {
    if (R_schedule.empty()) throw std::invalid_argument("hellinger_diffraction_bound: empty schedule");
    PhaseMeasures pm = mu_lambda_weights(pps, lambda);
    const AtomicMeasure& mu = pm.centered_displacement;
    const AtomicMeasure& nu = pm.plane_wave;

    DiffractionBoundResult out;
    out.radii = R_schedule;
    const double cutoff = bump.support_radius(1e-12);

    // pair sums at each radius
    const size_t n = mu.size();
    std::vector<double> base_norm2(n);
    for (size_t i = 0; i < n; ++i) {
        double s = 0;
        for (int c = 0; c < mu.dim; ++c) s += mu.at(i)[c] * mu.at(i)[c];
        base_norm2[i] = s;
    }
    BucketGrid grid(pps.base.xs, mu.dim, std::max(cutoff, 1e-6));
    for (double R : R_schedule) {
        const double R2 = R * R;
        KahanComplexSum acc;
        for (size_t i = 0; i < n; ++i) {
            if (base_norm2[i] > R2) continue;
            const double* pi = mu.at(i);
            grid.for_neighbors(pi, cutoff, [&](uint32_t j, double) {
                if (base_norm2[j] > R2) return;
                Vec diff(mu.dim);
                for (int c = 0; c < mu.dim; ++c) diff[c] = pi[c] - nu.at(j)[c];
                acc.add(mu.weights[i] * std::conj(nu.weights[j]) * bump.transform(diff));
            });
        }
        out.lhs.push_back(std::abs(acc.value()) / ball_volume(mu.dim, R));
    }

    // gridded diffraction estimates at the final radius
    const double Rmax = R_schedule.back();
    out.grid_mu = gridded_periodogram(mu, Rmax, bump.center, grid_extent, grid_step, threads);
    out.grid_nu = gridded_periodogram(nu, Rmax, bump.center, grid_extent, grid_step, threads);
    GriddedMeasure rho = hellinger_density(out.grid_mu, out.grid_nu);
    KahanSum rhs;
    for (size_t i = 0; i < rho.densities.size(); ++i)
        rhs.add(rho.densities[i] * bump.eval(rho.cell_center(i)));
    out.rhs = rhs.sum * rho.cell_volume();
    return out;
}

}  // namespace difflab
