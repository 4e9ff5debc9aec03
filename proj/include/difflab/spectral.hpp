// spectral.hpp
// Fourier-side estimators over finite point configurations: volume-normalized
// exponential sums, periodograms, pair autocorrelations and the derived
// diagnostics (escape fractions, residual sums, atom-detection statistics).
#pragma once

#include <complex>
#include <map>
#include <vector>

#include "difflab/common.hpp"
#include "difflab/parallel.hpp"
#include "difflab/perturb.hpp"
#include "difflab/pointset.hpp"

namespace difflab {

// ---------------------------------------------------------------------------
// Frequency sets.
// ---------------------------------------------------------------------------
struct FrequencySet {
    int dim = 0;
    std::vector<Vec> freqs;
    std::string provenance;

    static FrequencySet explicit_set(int d, std::vector<Vec> fs, std::string prov = "explicit") {
        FrequencySet s;
        s.dim = d;
        s.freqs = std::move(fs);
        s.provenance = std::move(prov);
        s.dedup();
        return s;
    }

    void dedup() {
        std::sort(freqs.begin(), freqs.end(), lex_less);
        std::vector<Vec> out;
        for (const Vec& f : freqs) {
            if (!out.empty()) {
                double d2 = 0;
                for (int c = 0; c < dim; ++c) d2 += (f[c] - out.back()[c]) * (f[c] - out.back()[c]);
                if (d2 <= 1e-24) continue;
            }
            out.push_back(f);
        }
        freqs = std::move(out);
    }
};

inline FrequencySet dual_lattice_frequencies(const Lattice& lat, double max_norm) {
    Mat dual = inverse(lat.basis).transpose();
    FrequencySet out;
    out.dim = lat.dim;
    out.provenance = "dual_lattice";
    std::vector<double> lo(static_cast<size_t>(lat.dim), -max_norm), hi(static_cast<size_t>(lat.dim), max_norm);
    detail::enumerate_box(dual, lo, hi, 1u << 24, [&](const std::vector<int64_t>& m) {
        Vec f(lat.dim);
        for (int r = 0; r < lat.dim; ++r) {
            double v = 0;
            for (int j = 0; j < lat.dim; ++j) v += dual(r, j) * static_cast<double>(m[static_cast<size_t>(j)]);
            f[r] = v;
        }
        if (f.norm() <= max_norm + 1e-12) out.freqs.push_back(f);
    });
    out.dedup();
    return out;
}

inline FrequencySet uniform_grid_frequencies(int d, double extent, double step) {
    if (!(step > 0) || !(extent >= 0)) throw std::invalid_argument("uniform grid: bad extent/step");
    FrequencySet out;
    out.dim = d;
    out.provenance = "uniform_grid";
    const int64_t kmax = static_cast<int64_t>(std::floor(extent / step + 1e-12));
    std::vector<int64_t> idx(static_cast<size_t>(d), -kmax);
    for (;;) {
        Vec f(d);
        for (int c = 0; c < d; ++c) f[c] = step * static_cast<double>(idx[static_cast<size_t>(c)]);
        out.freqs.push_back(f);
        int c = 0;
        while (c < d && ++idx[static_cast<size_t>(c)] > kmax) idx[static_cast<size_t>(c++)] = -kmax;
        if (c == d) break;
    }
    out.dedup();
    return out;
}

// Fourier transform of the window indicator at internal frequency nu.
inline cplx window_transform(const Window& w, const Vec& nu) {
    const int k = w.dim();
    if (w.shape == Window::Shape::Box) {
        cplx v{1.0, 0.0};
        for (int c = 0; c < k; ++c) {
            double len = w.hi[c] - w.lo[c];
            double mid = 0.5 * (w.hi[c] + w.lo[c]);
            double x = kPi * nu[c] * len;
            double s = (x == 0.0) ? len : len * std::sin(x) / x;
            double phase = -2.0 * kPi * nu[c] * mid;
            v *= s * cplx(std::cos(phase), std::sin(phase));
        }
        return v;
    }
    double r = nu.norm();
    double mag;
    if (r == 0.0) {
        mag = ball_volume(k, w.radius);
    } else if (k == 1) {
        double x = 2.0 * kPi * r * w.radius;
        mag = 2.0 * w.radius * std::sin(x) / x;
    } else {
        mag = std::pow(w.radius / r, 0.5 * k) * std::cyl_bessel_j(0.5 * k, 2.0 * kPi * w.radius * r);
    }
    double phase = -2.0 * kPi * dot(w.center, nu);
    return mag * cplx(std::cos(phase), std::sin(phase));
}

// Bragg frequency of a cut-and-project scheme: the physical block of the
// dual-lattice vector in the coordinates induced by the stacked projections.
struct DualModuleEntry {
    Vec lambda;          // physical frequency
    Vec internal;        // internal component
    cplx amplitude;      // analytic weak-limit amplitude
    double intensity;    // |window hat| / Vol(W), in [0,1]
};

inline std::vector<DualModuleEntry> dual_module_frequencies(const CutProjectScheme& scheme,
                                                            double intensity_floor,
                                                            double max_phys_norm,
                                                            int index_cap = 32) {
    scheme.validate();
    const int n = scheme.n, d = scheme.d;
    Mat dualL = inverse(scheme.lattice_basis).transpose();     // dual lattice basis
    Mat Sinv_t = inverse(scheme.stacked()).transpose();        // maps l to (lambda, nu)
    const double volW = scheme.window.volume();
    const double dens = scheme.analytic_density();
    std::vector<DualModuleEntry> entries;
    std::vector<int64_t> m(static_cast<size_t>(n), -index_cap);
    for (;;) {
        Vec l(n);
        for (int r = 0; r < n; ++r) {
            double v = 0;
            for (int j = 0; j < n; ++j) v += dualL(r, j) * static_cast<double>(m[static_cast<size_t>(j)]);
            l[r] = v;
        }
        Vec t = Sinv_t.mul(l);
        Vec lambda(d), nu(n - d);
        for (int c = 0; c < d; ++c) lambda[c] = t[c];
        for (int c = 0; c < n - d; ++c) nu[c] = t[d + c];
        if (lambda.norm() <= max_phys_norm + 1e-12) {
            cplx wt = window_transform(scheme.window, nu);
            double intensity = std::abs(wt) / volW;
            if (intensity >= intensity_floor) {
                DualModuleEntry e;
                e.lambda = lambda;
                e.internal = nu;
                e.amplitude = dens * std::conj(wt) / volW;
                e.intensity = intensity;
                entries.push_back(e);
            }
        }
        int c = 0;
        while (c < n && ++m[static_cast<size_t>(c)] > index_cap) m[static_cast<size_t>(c++)] = -index_cap;
        if (c == n) break;
    }
    std::sort(entries.begin(), entries.end(), [](const DualModuleEntry& a, const DualModuleEntry& b) {
        if (a.intensity != b.intensity) return a.intensity > b.intensity;
        return lex_less(a.lambda, b.lambda);
    });
    // drop duplicate physical frequencies (keep the strongest)
    std::vector<DualModuleEntry> out;
    for (const DualModuleEntry& e : entries) {
        bool dup = false;
        for (const DualModuleEntry& o : out)
            if ((e.lambda - o.lambda).norm() <= 1e-12) dup = true;
        if (!dup) out.push_back(e);
    }
    return out;
}

inline FrequencySet frequencies_of(const std::vector<DualModuleEntry>& entries, int d) {
    FrequencySet s;
    s.dim = d;
    s.provenance = "dual_module";
    for (const auto& e : entries) s.freqs.push_back(e.lambda);
    s.dedup();
    return s;
}

// ---------------------------------------------------------------------------
// Spectral estimates.
// ---------------------------------------------------------------------------
enum class SpectralKind { FourierSum, Periodogram, Recovered };

struct SpectralEstimate {
    Vec frequency;
    cplx value{0.0, 0.0};
    double R = 0.0;
    SpectralKind kind = SpectralKind::FourierSum;
};

namespace detail {

// Raw exponential sums sum_p exp(-2 pi i <p, lambda>) over |p| <= R, one per
// frequency; Kahan-compensated in a fixed point order, parallel across
// frequencies only (bit-reproducible at any thread count).
inline std::vector<cplx> raw_exponential_sums(const std::vector<double>& xs, int dim, double R,
                                              const std::vector<Vec>& freqs, int threads = 0) {
    const size_t n = xs.size() / static_cast<size_t>(dim);
    std::vector<uint32_t> inside;
    inside.reserve(n);
    const double R2 = R * R;
    for (size_t i = 0; i < n; ++i) {
        double s = 0;
        for (int c = 0; c < dim; ++c) s += xs[i * dim + c] * xs[i * dim + c];
        if (s <= R2) inside.push_back(static_cast<uint32_t>(i));
    }
    std::vector<cplx> out(freqs.size());
    parallel_for(freqs.size(), threads, [&](size_t f) {
        const Vec& lam = freqs[f];
        KahanComplexSum acc;
        for (uint32_t i : inside) {
            double phase = -2.0 * kPi * dot(xs.data() + static_cast<size_t>(i) * dim, lam);
            acc.add(cplx(std::cos(phase), std::sin(phase)));
        }
        out[f] = acc.value();
    });
    return out;
}

inline std::vector<double> perturbed_positions(const PerturbedPointSet& pps) {
    std::vector<double> xs(pps.base.xs.size());
    for (size_t i = 0; i < xs.size(); ++i) xs[i] = pps.base.xs[i] + pps.displacements[i];
    return xs;
}

}  // namespace detail

inline std::vector<SpectralEstimate> fourier_sum(const PointSet& ps, const FrequencySet& freqs,
                                                 double R, int threads = 0) {
    if (R > ps.generation_radius + 1e-9)
        throw std::invalid_argument("fourier_sum: R exceeds generation radius");
    std::vector<cplx> raw = detail::raw_exponential_sums(ps.xs, ps.dim, R, freqs.freqs, threads);
    const double vol = ball_volume(ps.dim, R);
    std::vector<SpectralEstimate> out(raw.size());
    for (size_t i = 0; i < raw.size(); ++i)
        out[i] = SpectralEstimate{freqs.freqs[i], raw[i] / vol, R, SpectralKind::FourierSum};
    return out;
}

// Membership is decided on the perturbed positions: exactly the points of the
// perturbed set inside B_R.
inline std::vector<SpectralEstimate> fourier_sum(const PerturbedPointSet& pps,
                                                 const FrequencySet& freqs, double R,
                                                 int threads = 0) {
    if (R > pps.base.generation_radius + 1e-9)
        throw std::invalid_argument("fourier_sum: R exceeds generation radius");
    std::vector<double> xs = detail::perturbed_positions(pps);
    std::vector<cplx> raw = detail::raw_exponential_sums(xs, pps.dim(), R, freqs.freqs, threads);
    const double vol = ball_volume(pps.dim(), R);
    std::vector<SpectralEstimate> out(raw.size());
    for (size_t i = 0; i < raw.size(); ++i)
        out[i] = SpectralEstimate{freqs.freqs[i], raw[i] / vol, R, SpectralKind::FourierSum};
    return out;
}

template <typename Points>
std::vector<SpectralEstimate> periodogram(const Points& pts, const FrequencySet& freqs, double R,
                                          int threads = 0) {
    std::vector<SpectralEstimate> sums = fourier_sum(pts, freqs, R, threads);
    const double vol = ball_volume(freqs.dim, R);
    for (auto& e : sums) {
        double m = std::norm(e.value) * vol;  // |sum|^2 / Vol
        e.value = cplx(m, 0.0);
        e.kind = SpectralKind::Periodogram;
    }
    return sums;
}

// ---------------------------------------------------------------------------
// Weak Fourier limit along a radius schedule.
// ---------------------------------------------------------------------------
struct WeakLimitTrace {
    Vec frequency;
    std::vector<double> radii;
    std::vector<cplx> values;
    cplx estimate{0.0, 0.0};
    bool converged = true;
};

inline std::vector<WeakLimitTrace> weak_fourier_limit(const GeneratorSpec& gen,
                                                      const FrequencySet& freqs,
                                                      const std::vector<double>& R_schedule,
                                                      int threads = 0) {
    if (R_schedule.size() < 3)
        throw std::invalid_argument("weak_fourier_limit: need at least 3 radii");
    for (size_t i = 1; i < R_schedule.size(); ++i)
        if (R_schedule[i] <= R_schedule[i - 1])
            throw std::invalid_argument("weak_fourier_limit: radii must increase");
    PointSet ps = gen.generate(R_schedule.back());
    std::vector<WeakLimitTrace> out(freqs.freqs.size());
    for (size_t f = 0; f < freqs.freqs.size(); ++f) {
        out[f].frequency = freqs.freqs[f];
        out[f].radii = R_schedule;
    }
    for (double R : R_schedule) {
        std::vector<SpectralEstimate> v = fourier_sum(ps, freqs, R, threads);
        for (size_t f = 0; f < v.size(); ++f) out[f].values.push_back(v[f].value);
    }
    for (auto& tr : out) {
        tr.estimate = tr.values.back();
        std::vector<double> devs;
        for (size_t i = 0; i + 1 < tr.values.size(); ++i)
            devs.push_back(std::abs(tr.values[i + 1] - tr.values[i]));
        bool strictly_growing = true;
        for (size_t i = 0; i + 1 < devs.size(); ++i)
            if (devs[i + 1] <= devs[i] + 1e-15) strictly_growing = false;
        tr.converged = !strictly_growing;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Atomic measures and autocorrelation.
// ---------------------------------------------------------------------------
struct AtomicMeasure {
    int dim = 0;
    std::vector<double> pos;     // flat, dim-strided
    std::vector<cplx> weights;
    std::string note;

    size_t size() const { return weights.size(); }
    const double* at(size_t i) const { return pos.data() + i * static_cast<size_t>(dim); }
};

inline AtomicMeasure dirac_comb(const PointSet& ps) {
    AtomicMeasure m;
    m.dim = ps.dim;
    m.pos = ps.xs;
    m.weights.assign(ps.size(), cplx(1.0, 0.0));
    m.note = "dirac_comb";
    return m;
}

struct AutocorrEstimate {
    int dim = 0;
    std::vector<Vec> lags;
    std::vector<cplx> coefficients;
    std::vector<int64_t> pair_counts;
    double K = 0.0;  // lag-ball radius
    double R = 0.0;  // averaging radius

    const cplx* coefficient_at(const Vec& k, double tol = 1e-9) const {
        for (size_t i = 0; i < lags.size(); ++i)
            if ((lags[i] - k).norm() <= tol) return &coefficients[i];
        return nullptr;
    }
};

namespace detail {

struct LagKey {
    std::array<int64_t, kMaxDim> q{};
    int dim = 0;
    bool operator<(const LagKey& o) const {
        for (int c = 0; c < dim; ++c) {
            if (q[static_cast<size_t>(c)] < o.q[static_cast<size_t>(c)]) return true;
            if (q[static_cast<size_t>(c)] > o.q[static_cast<size_t>(c)]) return false;
        }
        return false;
    }
};

inline LagKey quantize_lag(const double* k, int dim) {
    LagKey key;
    key.dim = dim;
    for (int c = 0; c < dim; ++c) key.q[static_cast<size_t>(c)] = llround(k[c] * 1e9);
    return key;
}

}  // namespace detail

// Pair autocorrelation of a weighted atomic measure over B_R:
// coefficient(k) = (1/Vol(B_R)) sum_{p, p-k in supp} w(p) conj(w(p-k)).
inline AutocorrEstimate autocorrelation(const AtomicMeasure& am, double K, double R) {
    if (!(K > 0) || K > R / 10.0 + 1e-12)
        throw std::invalid_argument("autocorrelation: require 0 < K <= R/10 (boundary bias)");
    AutocorrEstimate out;
    out.dim = am.dim;
    out.K = K;
    out.R = R;
    const double vol = ball_volume(am.dim, R);

    std::vector<uint32_t> inside;
    const double R2 = R * R;
    for (size_t i = 0; i < am.size(); ++i) {
        double s = 0;
        for (int c = 0; c < am.dim; ++c) s += am.at(i)[c] * am.at(i)[c];
        if (s <= R2) inside.push_back(static_cast<uint32_t>(i));
    }
    std::vector<double> xs;
    xs.reserve(inside.size() * static_cast<size_t>(am.dim));
    std::vector<cplx> w;
    w.reserve(inside.size());
    for (uint32_t i : inside) {
        for (int c = 0; c < am.dim; ++c) xs.push_back(am.at(i)[c]);
        w.push_back(am.weights[i]);
    }

    std::map<detail::LagKey, std::pair<KahanComplexSum, int64_t>> acc;
    // diagonal (lag zero)
    {
        KahanComplexSum z;
        for (const cplx& wi : w) z.add(wi * std::conj(wi));
        detail::LagKey zero;
        zero.dim = am.dim;
        auto& slot = acc[zero];
        slot.first = z;
        slot.second = static_cast<int64_t>(w.size());
    }
    const size_t n = w.size();
    if (n > 0) {
        BucketGrid grid(xs, am.dim, K);
        for (size_t i = 0; i < n; ++i) {
            const double* pi = xs.data() + i * static_cast<size_t>(am.dim);
            grid.for_neighbors(pi, K, [&](uint32_t j, double) {
                if (j <= i) return;  // unordered pairs once
                double kv[kMaxDim];
                const double* pj = xs.data() + static_cast<size_t>(j) * am.dim;
                for (int c = 0; c < am.dim; ++c) kv[c] = pi[c] - pj[c];
                cplx prod = w[i] * std::conj(w[static_cast<size_t>(j)]);
                auto& slot = acc[detail::quantize_lag(kv, am.dim)];
                slot.first.add(prod);
                slot.second += 1;
                for (int c = 0; c < am.dim; ++c) kv[c] = -kv[c];
                auto& slot2 = acc[detail::quantize_lag(kv, am.dim)];
                slot2.first.add(std::conj(prod));
                slot2.second += 1;
            });
        }
    }
    for (const auto& [key, slot] : acc) {
        Vec lag(am.dim);
        for (int c = 0; c < am.dim; ++c) lag[c] = static_cast<double>(key.q[static_cast<size_t>(c)]) * 1e-9;
        out.lags.push_back(lag);
        out.coefficients.push_back(slot.first.value() / vol);
        out.pair_counts.push_back(slot.second);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Phase-weight measures of a perturbed set at frequency lambda:
//  - plane_wave:       weight exp(-2 pi i <p, lambda>) at base point p
//  - centered_displacement: weight exp(-2 pi i <xi_p, lambda>) - phi(lambda)
// (atoms sit at the unperturbed positions).
// ---------------------------------------------------------------------------
struct PhaseMeasures {
    AtomicMeasure plane_wave;
    AtomicMeasure centered_displacement;
    cplx phi{1.0, 0.0};
};

inline PhaseMeasures mu_lambda_weights(const PerturbedPointSet& pps, const Vec& lambda) {
    PhaseMeasures out;
    out.phi = characteristic_function(pps.model, lambda).value;
    out.plane_wave.dim = pps.dim();
    out.plane_wave.pos = pps.base.xs;
    out.plane_wave.note = "plane_wave";
    out.centered_displacement.dim = pps.dim();
    out.centered_displacement.pos = pps.base.xs;
    out.centered_displacement.note = "centered_displacement";
    const size_t n = pps.size();
    out.plane_wave.weights.resize(n);
    out.centered_displacement.weights.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double ph = -2.0 * kPi * dot(pps.base.point(i), lambda);
        out.plane_wave.weights[i] = cplx(std::cos(ph), std::sin(ph));
        double pd = -2.0 * kPi * dot(pps.displacements.data() + i * static_cast<size_t>(pps.dim()), lambda);
        out.centered_displacement.weights[i] = cplx(std::cos(pd), std::sin(pd)) - out.phi;
    }
    return out;
}

// Autocorrelation of the centered displacement-phase measure; its lag-zero
// coefficient estimates Var[exp(-2 pi i <xi, lambda>)] dens(X) and all other
// lags vanish for independent fields.
inline AutocorrEstimate gamma_xi_lambda(const PerturbedPointSet& pps, const Vec& lambda, double K,
                                        double R) {
    if (pps.model.kind != PerturbationModel::Kind::IID &&
        pps.model.kind != PerturbationModel::Kind::ShellMixing)
        throw std::invalid_argument("gamma_xi_lambda: needs an independent or shell-mixing model");
    PhaseMeasures pm = mu_lambda_weights(pps, lambda);
    return autocorrelation(pm.centered_displacement, K, R);
}

// (1/Vol(B_R)) sum_{p in X cap B_R} e^{-2 pi i <p,lambda>} (e^{-2 pi i <xi_p,lambda>} - phi)
inline cplx residual_sum(const PerturbedPointSet& pps, const Vec& lambda, double R) {
    const cplx phi = characteristic_function(pps.model, lambda).value;
    const double R2 = R * R;
    KahanComplexSum acc;
    for (size_t i = 0; i < pps.size(); ++i) {
        const double* p = pps.base.point(i);
        double n2 = 0;
        for (int c = 0; c < pps.dim(); ++c) n2 += p[c] * p[c];
        if (n2 > R2) continue;
        double ph = -2.0 * kPi * dot(p, lambda);
        double pd = -2.0 * kPi * dot(pps.displacements.data() + i * static_cast<size_t>(pps.dim()), lambda);
        acc.add(cplx(std::cos(ph), std::sin(ph)) * (cplx(std::cos(pd), std::sin(pd)) - phi));
    }
    return acc.value() / ball_volume(pps.dim(), R);
}

// ---------------------------------------------------------------------------
// Boundary escape fractions under perturbation.
// ---------------------------------------------------------------------------
struct EscapeFractions {
    double out_fraction = 0.0;  // |p| <= R but |p + xi_p| > R
    double in_fraction = 0.0;   // |p| > R but |p + xi_p| <= R
};

inline EscapeFractions boundary_escape_fraction(const PerturbedPointSet& pps, double R) {
    const double margin = 10.0 * pps.model.dist.sigma_equivalent();
    if (pps.base.generation_radius < R + margin - 1e-9)
        throw std::invalid_argument(
            "boundary_escape_fraction: generation radius must exceed R by the displacement margin");
    size_t out_count = 0, in_count = 0;
    const double R2 = R * R;
    for (size_t i = 0; i < pps.size(); ++i) {
        double base2 = pps.base.at(i).norm2();
        double pert2 = pps.perturbed(i).norm2();
        if (base2 <= R2 && pert2 > R2) ++out_count;
        if (base2 > R2 && pert2 <= R2) ++in_count;
    }
    const double vol = ball_volume(pps.dim(), R);
    return EscapeFractions{static_cast<double>(out_count) / vol, static_cast<double>(in_count) / vol};
}

// ---------------------------------------------------------------------------
// Atom-detection statistic (Strungaru criterion surrogate): the summed
// magnitude of off-zero autocorrelation coefficients per unit lag volume.
// Vanishing values indicate an atom-free transform.
// ---------------------------------------------------------------------------
inline double strungaru_statistic(const AutocorrEstimate& ac) {
    KahanSum s;
    for (size_t i = 0; i < ac.lags.size(); ++i) {
        if (ac.lags[i].norm() <= 1e-12) continue;
        s.add(std::abs(ac.coefficients[i]));
    }
    return s.sum / ball_volume(ac.dim, ac.K);
}

// ---------------------------------------------------------------------------
// LagPairIndex: the seed-independent pair structure of a base set, built once
// and reused across displacement realizations.
// ---------------------------------------------------------------------------
class LagPairIndex {
public:
    LagPairIndex(const PointSet& ps, double K, double R) : dim_(ps.dim), K_(K), R_(R) {
        if (!(K > 0) || K > R / 10.0 + 1e-12)
            throw std::invalid_argument("LagPairIndex: require 0 < K <= R/10");
        const double R2 = R * R;
        for (size_t i = 0; i < ps.size(); ++i) {
            double s = 0;
            for (int c = 0; c < ps.dim; ++c) s += ps.point(i)[c] * ps.point(i)[c];
            if (s <= R2) inside_.push_back(static_cast<uint32_t>(i));
        }
        xs_.reserve(inside_.size() * static_cast<size_t>(dim_));
        for (uint32_t i : inside_)
            for (int c = 0; c < dim_; ++c) xs_.push_back(ps.point(i)[c]);

        std::map<detail::LagKey, uint32_t> lag_slot;
        BucketGrid grid(xs_, dim_, K);
        const size_t n = inside_.size();
        for (size_t i = 0; i < n; ++i) {
            const double* pi = xs_.data() + i * static_cast<size_t>(dim_);
            grid.for_neighbors(pi, K, [&](uint32_t j, double) {
                if (j <= i) return;
                double kv[kMaxDim];
                const double* pj = xs_.data() + static_cast<size_t>(j) * dim_;
                for (int c = 0; c < dim_; ++c) kv[c] = pi[c] - pj[c];
                detail::LagKey key = detail::quantize_lag(kv, dim_);
                auto it = lag_slot.find(key);
                uint32_t slot;
                if (it == lag_slot.end()) {
                    slot = static_cast<uint32_t>(lags_.size());
                    lag_slot.emplace(key, slot);
                    Vec lag(dim_);
                    for (int c = 0; c < dim_; ++c) lag[c] = kv[c];
                    lags_.push_back(lag);
                    pairs_.emplace_back();
                }
                else {
                    slot = it->second;
                }
                pairs_[slot].emplace_back(static_cast<uint32_t>(i), j);
            });
        }
    }

    size_t lag_count() const { return lags_.size(); }
    const std::vector<Vec>& lags() const { return lags_; }
    const std::vector<uint32_t>& inside() const { return inside_; }
    double K() const { return K_; }
    double R() const { return R_; }

    // Autocorrelation of weights given per ORIGINAL point index of the base set.
    AutocorrEstimate evaluate(const std::vector<cplx>& weights_by_point) const {
        AutocorrEstimate out;
        out.dim = dim_;
        out.K = K_;
        out.R = R_;
        const double vol = ball_volume(dim_, R_);
        std::vector<cplx> w(inside_.size());
        for (size_t t = 0; t < inside_.size(); ++t) w[t] = weights_by_point[inside_[t]];

        KahanComplexSum diag;
        for (const cplx& wi : w) diag.add(wi * std::conj(wi));
        out.lags.push_back(Vec(dim_));
        out.coefficients.push_back(diag.value() / vol);
        out.pair_counts.push_back(static_cast<int64_t>(w.size()));

        for (size_t s = 0; s < lags_.size(); ++s) {
            KahanComplexSum acc;
            for (const auto& [i, j] : pairs_[s]) acc.add(w[i] * std::conj(w[j]));
            cplx v = acc.value() / vol;
            out.lags.push_back(lags_[s]);
            out.coefficients.push_back(v);
            out.pair_counts.push_back(static_cast<int64_t>(pairs_[s].size()));
            out.lags.push_back(-lags_[s]);
            out.coefficients.push_back(std::conj(v));
            out.pair_counts.push_back(static_cast<int64_t>(pairs_[s].size()));
        }
        return out;
    }

private:
    int dim_;
    double K_, R_;
    std::vector<uint32_t> inside_;
    std::vector<double> xs_;
    std::vector<Vec> lags_;
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> pairs_;
};

}  // namespace difflab
