// distribution.hpp
// Displacement laws: sampling (counter-based, reproducible) and
// characteristic functions phi(lambda) = E exp(-2 pi i <xi, lambda>).
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "difflab/common.hpp"
#include "difflab/rng.hpp"
#include "difflab/stats.hpp"

namespace difflab {

struct Distribution {
    enum class Kind { Dirac0, GaussianIso, GaussianMixture, UniformBox, HeavyTail } kind = Kind::Dirac0;
    int dim = 1;

    double sigma = 0.0;                 // GaussianIso
    std::vector<double> mix_weights;    // GaussianMixture
    std::vector<double> mix_sigmas;
    std::vector<Vec> mix_means;
    double half_width = 0.0;            // UniformBox
    double tail_exponent = 0.0;         // HeavyTail: alpha
    double tail_scale = 1.0;

    static Distribution dirac0(int d) {
        Distribution t;
        t.kind = Kind::Dirac0;
        t.dim = d;
        return t;
    }
    static Distribution gaussian_iso(int d, double s) {
        Distribution t;
        t.kind = Kind::GaussianIso;
        t.dim = d;
        t.sigma = s;
        return t;
    }
    static Distribution gaussian_mixture(int d, std::vector<double> w, std::vector<double> s,
                                         std::vector<Vec> m) {
        Distribution t;
        t.kind = Kind::GaussianMixture;
        t.dim = d;
        t.mix_weights = std::move(w);
        t.mix_sigmas = std::move(s);
        t.mix_means = std::move(m);
        return t;
    }
    static Distribution uniform_box(int d, double a) {
        Distribution t;
        t.kind = Kind::UniformBox;
        t.dim = d;
        t.half_width = a;
        return t;
    }
    static Distribution heavy_tail(int d, double alpha, double scale = 1.0) {
        Distribution t;
        t.kind = Kind::HeavyTail;
        t.dim = d;
        t.tail_exponent = alpha;
        t.tail_scale = scale;
        return t;
    }

    void validate() const {
        if (dim <= 0 || dim > kMaxDim) throw std::invalid_argument("distribution: bad dimension");
        switch (kind) {
            case Kind::Dirac0: return;
            case Kind::GaussianIso:
                if (!(sigma > 0)) throw std::invalid_argument("distribution: sigma must be positive");
                return;
            case Kind::GaussianMixture: {
                if (mix_weights.empty() || mix_weights.size() != mix_sigmas.size() ||
                    mix_weights.size() != mix_means.size())
                    throw std::invalid_argument("distribution: mixture arrays inconsistent");
                double s = 0;
                for (double w : mix_weights) {
                    if (w < 0) throw std::invalid_argument("distribution: negative mixture weight");
                    s += w;
                }
                if (std::fabs(s - 1.0) > 1e-12)
                    throw std::invalid_argument("distribution: mixture weights must sum to 1");
                for (double sg : mix_sigmas)
                    if (!(sg > 0)) throw std::invalid_argument("distribution: mixture sigma must be positive");
                for (const Vec& m : mix_means)
                    if (m.dim != dim) throw std::invalid_argument("distribution: mixture mean dimension");
                return;
            }
            case Kind::UniformBox:
                if (!(half_width > 0)) throw std::invalid_argument("distribution: half-width must be positive");
                return;
            case Kind::HeavyTail:
                // alpha > d keeps E|xi|^{d+eps} finite for small eps
                if (!(tail_exponent > dim))
                    throw std::invalid_argument("distribution: heavy-tail exponent must exceed dimension");
                if (!(tail_scale > 0)) throw std::invalid_argument("distribution: heavy-tail scale must be positive");
                return;
        }
    }

    bool is_gaussian_family() const {
        return kind == Kind::Dirac0 || kind == Kind::GaussianIso;
    }

    // Scale used for escape-margin bookkeeping.
    double sigma_equivalent() const {
        switch (kind) {
            case Kind::Dirac0: return 0.0;
            case Kind::GaussianIso: return sigma;
            case Kind::GaussianMixture: {
                double m = 0;
                for (size_t j = 0; j < mix_weights.size(); ++j)
                    m = std::max(m, mix_means[j].norm() + mix_sigmas[j]);
                return m;
            }
            case Kind::UniformBox: return half_width * std::sqrt(static_cast<double>(dim));
            case Kind::HeavyTail: return tail_scale;
        }
        return 0.0;
    }

    // Draw one displacement from the stream (counters are internal to it).
    Vec sample(const Stream& s) const {
        Vec v(dim);
        switch (kind) {
            case Kind::Dirac0:
                return v;
            case Kind::GaussianIso:
                for (int c = 0; c < dim; ++c) v[c] = sigma * s.gauss(static_cast<uint64_t>(c));
                return v;
            case Kind::GaussianMixture: {
                double u = s.u01(1ull << 32);
                size_t j = 0;
                double acc = 0;
                for (; j + 1 < mix_weights.size(); ++j) {
                    acc += mix_weights[j];
                    if (u < acc) break;
                }
                for (int c = 0; c < dim; ++c)
                    v[c] = mix_means[j][c] + mix_sigmas[j] * s.gauss(static_cast<uint64_t>(c));
                return v;
            }
            case Kind::UniformBox:
                for (int c = 0; c < dim; ++c)
                    v[c] = half_width * (2.0 * s.u01(static_cast<uint64_t>(c)) - 1.0);
                return v;
            case Kind::HeavyTail: {
                double u = s.u01(1ull << 32);
                double rho = std::pow(1.0 - u, -1.0 / tail_exponent) - 1.0;
                double r = tail_scale * rho;
                if (dim == 1) {
                    v[0] = (s.u01((1ull << 32) + 1) < 0.5) ? -r : r;
                } else {
                    Vec dir = s.sphere_dir(dim, 0);
                    for (int c = 0; c < dim; ++c) v[c] = r * dir[c];
                }
                return v;
            }
        }
        return v;
    }
};

struct CharFnValue {
    std::complex<double> value{1.0, 0.0};
    bool numeric = false;  // true when obtained by quadrature rather than a closed form
};

namespace detail {

// E exp(-i t <Theta, e>) for Theta uniform on S^{d-1}.
inline double sphere_average(int d, double t) {
    if (t == 0.0) return 1.0;
    switch (d) {
        case 1: return std::cos(t);
        case 2: return std::cyl_bessel_j(0.0, t);
        case 3: return std::sin(t) / t;
        default:
            return std::tgamma(0.5 * d) * std::pow(2.0 / t, 0.5 * d - 1.0) *
                   std::cyl_bessel_j(0.5 * d - 1.0, t);
    }
}

}  // namespace detail

inline CharFnValue characteristic_function(const Distribution& dist, const Vec& lambda) {
    CharFnValue out;
    switch (dist.kind) {
        case Distribution::Kind::Dirac0:
            out.value = {1.0, 0.0};
            return out;
        case Distribution::Kind::GaussianIso:
            out.value = {std::exp(-2.0 * kPi * kPi * dist.sigma * dist.sigma * lambda.norm2()), 0.0};
            return out;
        case Distribution::Kind::GaussianMixture: {
            std::complex<double> v{0.0, 0.0};
            for (size_t j = 0; j < dist.mix_weights.size(); ++j) {
                double amp = dist.mix_weights[j] *
                             std::exp(-2.0 * kPi * kPi * dist.mix_sigmas[j] * dist.mix_sigmas[j] *
                                      lambda.norm2());
                double phase = -2.0 * kPi * dot(dist.mix_means[j], lambda);
                v += amp * std::complex<double>(std::cos(phase), std::sin(phase));
            }
            out.value = v;
            return out;
        }
        case Distribution::Kind::UniformBox: {
            double v = 1.0;
            for (int c = 0; c < dist.dim; ++c) {
                double x = 2.0 * kPi * dist.half_width * lambda[c];
                v *= (x == 0.0) ? 1.0 : std::sin(x) / x;
            }
            out.value = {v, 0.0};
            return out;
        }
        case Distribution::Kind::HeavyTail: {
            const double a = dist.tail_exponent;
            const double t = 2.0 * kPi * lambda.norm() * dist.tail_scale;
            if (t == 0.0) {
                out.value = {1.0, 0.0};
                return out;
            }
            const double U = std::pow(1e-9, -1.0 / a) - 1.0;  // tail mass beyond U is < 1e-9
            const int d = dist.dim;
            auto f = [a, t, d](double rho) {
                return detail::sphere_average(d, t * rho) * a * std::pow(1.0 + rho, -a - 1.0);
            };
            // integrate half-oscillation by half-oscillation so the adaptive
            // rule never aliases; per-chunk tolerance shares the 1e-8 budget
            const double chunk = std::max(kPi / t, U / 200000.0);
            double v = 0.0, x0 = 0.0;
            while (x0 < U) {
                double x1 = std::min(U, x0 + chunk);
                v += integrate(f, x0, x1, 1e-9 * (x1 - x0) / U, 30, 1);
                x0 = x1;
                if (std::pow(1.0 + x0, -a) < 1e-10) break;  // remaining tail is negligible
            }
            out.value = {v, 0.0};
            out.numeric = true;
            return out;
        }
    }
    return out;
}

}  // namespace difflab
