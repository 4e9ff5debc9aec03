// Fourier-estimator tests: exponential sums against closed-form oracles,
// periodogram identities and scaling, autocorrelation pair counts, phase
// weights, residual sums, escape fractions, atom statistics.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "difflab/recover.hpp"
#include "difflab/spectral.hpp"
#include "oracles.hpp"

using namespace difflab;

namespace {

PerturbedPointSet gaussian_field(const PointSet& ps, double sigma, uint64_t seed) {
    return displace(ps, PerturbationModel::iid(Distribution::gaussian_iso(ps.dim, sigma), seed));
}

}  // namespace

TEST_CASE("exponential sums against closed forms") {
    PointSet z2 = generate_lattice(Lattice::cubic(2), 100.0);
    FrequencySet fs = FrequencySet::explicit_set(2, {Vec{0.0, 0.0}, Vec{1.0, 0.0}});
    auto sums = fourier_sum(z2, fs, 100.0);

    // lambda = 0: exactly count / volume
    const double vol = ball_volume(2, 100.0);
    CHECK(sums[0].value.real() == Catch::Approx(static_cast<double>(z2.size()) / vol).epsilon(1e-12));
    CHECK(sums[0].value.imag() == 0.0);

    // integer frequency: every term is 1, so the same value up to rounding
    CHECK(std::abs(sums[1].value - sums[0].value) < 1e-9);
    CHECK(std::fabs(sums[1].value.real() - 1.0) < 0.01);

    // 1-d half-integer frequency: Dirichlet kernel closed form
    PointSet z1 = generate_lattice(Lattice::cubic(1), 100.0);
    FrequencySet half = FrequencySet::explicit_set(1, {Vec{0.5}});
    auto s1 = fourier_sum(z1, half, 100.0);
    double oracle = oracles::dirichlet_sum(100, 0.5) / ball_volume(1, 100.0);
    CHECK(std::fabs(s1[0].value.real() - oracle) < 1e-12);
    CHECK(std::fabs(s1[0].value.imag()) < 1e-12);
    CHECK(std::abs(s1[0].value) < 0.01);
}

TEST_CASE("membership is decided on perturbed positions") {
    PointSet ps;
    ps.dim = 1;
    ps.xs = {9.9, 10.4};
    ps.generation_radius = 12.0;
    ps.compute_keys();
    PerturbedPointSet pps;
    pps.base = ps;
    pps.displacements = {0.3, -0.6};  // 9.9 -> 10.2 leaves, 10.4 -> 9.8 enters
    pps.model = PerturbationModel::iid(Distribution::dirac0(1), 0);

    FrequencySet zero = FrequencySet::explicit_set(1, {Vec{0.0}});
    auto v = fourier_sum(pps, zero, 10.0);
    CHECK(v[0].value.real() == Catch::Approx(1.0 / 20.0));  // exactly one point inside
}

TEST_CASE("conjugate symmetry and the amplitude bound") {
    PointSet z2 = generate_lattice(Lattice::cubic(2), 60.0);
    PerturbedPointSet pps = gaussian_field(z2, 0.2, 5);
    FrequencySet fs = FrequencySet::explicit_set(
        2, {Vec{0.37, -0.21}, Vec{-0.37, 0.21}, Vec{0.0, 0.0}, Vec{1.3, 0.7}, Vec{-1.3, -0.7}});
    auto sums = fourier_sum(pps, fs, 60.0);
    auto find = [&](const Vec& f) -> cplx {
        for (const auto& e : sums)
            if ((e.frequency - f).norm() < 1e-12) return e.value;
        throw std::logic_error("frequency not found");
    };
    CHECK(std::abs(find(Vec{0.37, -0.21}) - std::conj(find(Vec{-0.37, 0.21}))) == 0.0);
    CHECK(std::abs(find(Vec{1.3, 0.7}) - std::conj(find(Vec{-1.3, -0.7}))) == 0.0);
    double m0 = find(Vec{0.0, 0.0}).real();
    for (const auto& e : sums) CHECK(std::abs(e.value) <= m0 + 1e-12);
}

TEST_CASE("periodogram identity and positivity") {
    PointSet z2 = generate_lattice(Lattice::cubic(2), 80.0);
    FrequencySet fs = FrequencySet::explicit_set(
        2, {Vec{1.0, 0.0}, Vec{0.317, 0.411}, Vec{0.5, 0.5}, Vec{0.123, -0.789}});
    auto P = periodogram(z2, fs, 80.0);
    auto M = fourier_sum(z2, fs, 80.0);
    const double vol = ball_volume(2, 80.0);
    for (size_t i = 0; i < P.size(); ++i) {
        CHECK(P[i].value.real() >= 0.0);
        CHECK(P[i].value.imag() == 0.0);
        double expect = std::norm(M[i].value) * vol;
        CHECK(P[i].value.real() == Catch::Approx(expect).epsilon(1e-9));
    }
    // Bragg value ~ N^2 / Vol at the dual point (1,0)
    double bragg = 0.0;
    for (const auto& e : P)
        if ((e.frequency - Vec{1.0, 0.0}).norm() < 1e-12) bragg = e.value.real();
    double n2 = static_cast<double>(z2.size()) * static_cast<double>(z2.size());
    CHECK(bragg == Catch::Approx(n2 / vol).epsilon(1e-6));
}

TEST_CASE("uniform random control stays at the density level") {
    // uniform points in the ball at lattice density; mean periodogram ~ dens
    const double R = 40.0;
    const size_t n_pts = static_cast<size_t>(ball_volume(2, R));
    FrequencySet fs = FrequencySet::explicit_set(2, {Vec{0.731, 0.289}});
    std::vector<double> vals;
    for (uint64_t seed = 0; seed < 100; ++seed) {
        Stream s = Stream::from(seed, 0xC0FFEE);
        PointSet ps;
        ps.dim = 2;
        ps.generation_radius = R;
        uint64_t ctr = 0;
        while (ps.xs.size() < 2 * n_pts) {
            double x = (2.0 * s.u01(ctr++) - 1.0) * R;
            double y = (2.0 * s.u01(ctr++) - 1.0) * R;
            if (x * x + y * y <= R * R) {
                ps.xs.push_back(x);
                ps.xs.push_back(y);
            }
        }
        auto P = periodogram(ps, fs, R);
        vals.push_back(P[0].value.real());
    }
    MeanSE m = mean_se(vals);
    const double dens = static_cast<double>(n_pts) / ball_volume(2, R);
    CHECK(std::fabs(m.mean - dens) <= 3.0 * m.se);
}

TEST_CASE("weak limits along a radius schedule") {
    GeneratorSpec gen = GeneratorSpec::make_lattice(Lattice::cubic(2));
    FrequencySet fs = FrequencySet::explicit_set(2, {Vec{1.0, 0.0}, Vec{0.3123, 0.52}});
    auto traces = weak_fourier_limit(gen, fs, {40.0, 80.0, 120.0});
    for (const auto& tr : traces) {
        if (tr.frequency.norm() > 0.9) {  // the dual point (1,0)
            CHECK(std::fabs(tr.estimate.real() - 1.0) < 0.01);
            CHECK(tr.converged);
        } else {
            CHECK(std::abs(tr.estimate) < 0.01);
        }
    }

    // 1-d irrational frequency equals the Dirichlet kernel exactly
    GeneratorSpec g1 = GeneratorSpec::make_lattice(Lattice::cubic(1));
    const double lam = 0.2236067977499790;  // sqrt(5)/10
    auto t1 = weak_fourier_limit(g1, FrequencySet::explicit_set(1, {Vec{lam}}), {50.0, 100.0, 150.0});
    double oracle = oracles::dirichlet_sum(150, lam) / ball_volume(1, 150.0);
    CHECK(std::fabs(t1[0].estimate.real() - oracle) < 1e-12);
    CHECK(std::abs(t1[0].estimate) < 0.05);
}

TEST_CASE("dual-module frequencies of the golden-ratio chain") {
    CutProjectScheme fib = fibonacci_scheme();
    auto entries = dual_module_frequencies(fib, 0.25, 6.0);
    REQUIRE(entries.size() >= 6);
    CHECK(entries[0].lambda.norm() < 1e-12);  // density peak
    CHECK(entries[0].intensity == Catch::Approx(1.0).epsilon(1e-12));

    // the five strongest nonzero peaks (positive side), in intensity order;
    // expected physical frequencies a cos(theta) + b sin(theta) for the dual
    // index pairs below
    const double phi_ratio = 0.5 * (1.0 + std::sqrt(5.0));
    const double den = std::sqrt(1.0 + phi_ratio * phi_ratio);
    const double ct = phi_ratio / den, st = 1.0 / den;
    std::vector<std::pair<int, int>> idx = {{5, 3}, {3, 2}, {2, 1}, {1, 1}, {4, 2}};
    std::vector<double> positive;
    for (const auto& e : entries)
        if (e.lambda[0] > 1e-12) positive.push_back(e.lambda[0]);
    REQUIRE(positive.size() >= 5);
    for (size_t i = 0; i < 5; ++i) {
        double expect = idx[i].first * ct + idx[i].second * st;
        CHECK(positive[i] == Catch::Approx(expect).epsilon(1e-10));
    }

    // weak limit at the strongest frequency matches the direct-summation
    // oracle at R = 1e5 within 2%, and the analytic amplitude as well
    const DualModuleEntry& top = entries[1];
    GeneratorSpec gen = GeneratorSpec::make_cut_project(fib);
    auto tr = weak_fourier_limit(gen, FrequencySet::explicit_set(1, {top.lambda}),
                                 {25000.0, 50000.0, 100000.0});
    std::vector<double> oracle_pts = oracles::fibonacci_points(100000.0);
    cplx oracle_sum{0.0, 0.0};
    for (double p : oracle_pts) {
        double ph = -2.0 * kPi * p * top.lambda[0];
        oracle_sum += cplx(std::cos(ph), std::sin(ph));
    }
    cplx oracle = oracle_sum / ball_volume(1, 100000.0);
    CHECK(std::abs(tr[0].estimate - oracle) / std::abs(oracle) < 0.02);
    CHECK(std::abs(tr[0].estimate - top.amplitude) / std::abs(top.amplitude) < 0.02);
}

TEST_CASE("autocorrelation pair counts and weights") {
    PointSet z2 = generate_lattice(Lattice::cubic(2), 60.0);
    AtomicMeasure comb = dirac_comb(z2);
    AutocorrEstimate ac = autocorrelation(comb, 3.0, 60.0);
    const double vol = ball_volume(2, 60.0);

    const cplx* zero = ac.coefficient_at(Vec{0.0, 0.0});
    REQUIRE(zero != nullptr);
    CHECK(zero->real() == Catch::Approx(static_cast<double>(z2.size()) / vol).epsilon(1e-12));

    // exact pair count for lag (1,0)
    size_t pairs = 0;
    std::set<std::pair<long, long>> members;
    for (size_t i = 0; i < z2.size(); ++i)
        members.insert({llround(z2.at(i)[0]), llround(z2.at(i)[1])});
    for (const auto& [x, y] : members)
        if (members.count({x - 1, y})) ++pairs;
    const cplx* one = ac.coefficient_at(Vec{1.0, 0.0});
    REQUIRE(one != nullptr);
    CHECK(one->real() == Catch::Approx(static_cast<double>(pairs) / vol).epsilon(1e-12));
    CHECK(std::fabs(one->real() - 1.0) < 0.05);

    // Hermitian symmetry, exactly
    for (size_t i = 0; i < ac.lags.size(); ++i) {
        const cplx* mirror = ac.coefficient_at(-ac.lags[i]);
        REQUIRE(mirror != nullptr);
        CHECK(std::abs(*mirror - std::conj(ac.coefficients[i])) == 0.0);
    }

    CHECK_THROWS_AS(autocorrelation(comb, 10.0, 60.0), std::invalid_argument);  // K > R/10
}

TEST_CASE("alternating weights flip the neighbor coefficient") {
    PointSet z1 = generate_lattice(Lattice::cubic(1), 200.0);
    AtomicMeasure am;
    am.dim = 1;
    am.pos = z1.xs;
    for (size_t i = 0; i < z1.size(); ++i)
        am.weights.push_back(cplx((llround(z1.xs[i]) % 2 == 0) ? 1.0 : -1.0, 0.0));
    AutocorrEstimate ac = autocorrelation(am, 5.0, 200.0);
    const cplx* one = ac.coefficient_at(Vec{1.0});
    REQUIRE(one != nullptr);
    CHECK(one->real() < 0.0);
    CHECK(std::fabs(one->real() + 1.0) < 0.05);  // ~ -dens
}

TEST_CASE("phase weights") {
    PointSet z2 = generate_lattice(Lattice::cubic(2), 180.0);
    Vec lam{1.0, 0.0};

    SECTION("zero law gives identically zero centered weights") {
        PerturbedPointSet pps = displace(z2, PerturbationModel::iid(Distribution::dirac0(2), 1));
        PhaseMeasures pm = mu_lambda_weights(pps, lam);
        for (const cplx& w : pm.centered_displacement.weights) CHECK(std::abs(w) == 0.0);
    }

    SECTION("bounded by 2, atoms at unperturbed points, near-zero mean") {
        REQUIRE(z2.size() >= 100000);
        PerturbedPointSet pps = gaussian_field(z2, 0.1, 23);
        PhaseMeasures pm = mu_lambda_weights(pps, lam);
        CHECK(pm.centered_displacement.pos == z2.xs);
        KahanComplexSum mean;
        std::vector<double> res, ims;
        for (const cplx& w : pm.centered_displacement.weights) {
            CHECK(std::abs(w) <= 2.0);
            mean.add(w);
            res.push_back(w.real());
            ims.push_back(w.imag());
        }
        const double n = static_cast<double>(pm.centered_displacement.weights.size());
        cplx avg = mean.value() / n;
        double sd = std::sqrt(sample_variance(res) + sample_variance(ims));
        CHECK(std::abs(avg) <= 3.0 * sd / std::sqrt(n));
    }
}

TEST_CASE("centered autocorrelation estimates the displacement variance at lag zero") {
    PointSet z2 = generate_lattice(Lattice::cubic(2), 150.0);
    const double sigma = 0.1;
    Vec lam{1.0, 0.0};
    PerturbedPointSet pps = gaussian_field(z2, sigma, 11);

    AutocorrEstimate ac = gamma_xi_lambda(pps, lam, 10.0, 150.0);
    const double variance = 1.0 - std::exp(-4.0 * kPi * kPi * sigma * sigma * lam.norm2());
    const cplx* zero = ac.coefficient_at(Vec{0.0, 0.0});
    REQUIRE(zero != nullptr);
    const double dens = 1.0;
    CHECK(std::fabs(zero->real() - variance * dens) / (variance * dens) < 0.05);

    // off-zero coefficients obey the pair-count bound (10 seeds)
    const double vol = ball_volume(2, 150.0);
    LagPairIndex index(z2, 10.0, 150.0);
    for (uint64_t seed = 0; seed < 10; ++seed) {
        PerturbedPointSet trial = gaussian_field(z2, sigma, 400 + seed);
        PhaseMeasures pm = mu_lambda_weights(trial, lam);
        AutocorrEstimate a = index.evaluate(pm.centered_displacement.weights);
        for (size_t i = 0; i < a.lags.size(); ++i) {
            if (a.lags[i].norm() <= 1e-12) continue;
            double bound = 4.0 * std::sqrt(static_cast<double>(a.pair_counts[i])) / vol;
            CHECK(std::abs(a.coefficients[i]) <= bound);
        }
    }

    SECTION("zero law zeroes every coefficient") {
        PerturbedPointSet quiet = displace(z2, PerturbationModel::iid(Distribution::dirac0(2), 1));
        AutocorrEstimate a0 = gamma_xi_lambda(quiet, lam, 10.0, 150.0);
        for (const cplx& c : a0.coefficients) CHECK(std::abs(c) == 0.0);
    }
}

TEST_CASE("lag pair index reproduces the map-based autocorrelation") {
    PointSet z2 = generate_lattice(Lattice::cubic(2), 50.0);
    PerturbedPointSet pps = gaussian_field(z2, 0.15, 3);
    PhaseMeasures pm = mu_lambda_weights(pps, Vec{1.0, 0.0});
    AutocorrEstimate direct = autocorrelation(pm.centered_displacement, 4.0, 50.0);
    LagPairIndex index(z2, 4.0, 50.0);
    AutocorrEstimate indexed = index.evaluate(pm.centered_displacement.weights);
    REQUIRE(direct.lags.size() == indexed.lags.size());
    for (size_t i = 0; i < direct.lags.size(); ++i) {
        const cplx* v = indexed.coefficient_at(direct.lags[i]);
        REQUIRE(v != nullptr);
        CHECK(std::abs(*v - direct.coefficients[i]) < 1e-12);
    }
}

TEST_CASE("residual sums") {
    PointSet z2 = generate_lattice(Lattice::cubic(2), 150.0);
    Vec lam{1.0, 0.0};

    SECTION("zero law gives exactly zero") {
        PerturbedPointSet pps = displace(z2, PerturbationModel::iid(Distribution::dirac0(2), 1));
        CHECK(std::abs(residual_sum(pps, lam, 100.0)) == 0.0);
    }

    SECTION("scale bound and decreasing trace across seeds") {
        const double R = 60.0;
        const double vol = ball_volume(2, R);
        size_t inside = 0;
        for (size_t i = 0; i < z2.size(); ++i)
            if (z2.at(i).norm() <= R) ++inside;
        int within = 0, endpoint_drop = 0;
        double m50 = 0, m100 = 0, m150 = 0;
        for (uint64_t seed = 0; seed < 100; ++seed) {
            PerturbedPointSet pps = gaussian_field(z2, 0.1, 900 + seed);
            double r60 = std::abs(residual_sum(pps, lam, R));
            if (r60 <= 4.0 * std::sqrt(static_cast<double>(inside)) / vol) ++within;
            double r50 = std::abs(residual_sum(pps, lam, 50.0));
            double r100 = std::abs(residual_sum(pps, lam, 100.0));
            double r150 = std::abs(residual_sum(pps, lam, 150.0));
            if (r150 < r50) ++endpoint_drop;
            m50 += r50;
            m100 += r100;
            m150 += r150;
        }
        CHECK(within >= 95);
        // the ensemble-mean trace shrinks like 1/R; per-seed endpoint drop
        // rates were measured at ~84/100 (strict per-step decrease is rarer)
        CHECK(m100 < m50);
        CHECK(m150 < m100);
        CHECK(endpoint_drop >= 70);
    }
}

TEST_CASE("escape fractions") {
    SECTION("zero law never crosses") {
        PointSet z2 = generate_lattice(Lattice::cubic(2), 110.0);
        PerturbedPointSet pps = displace(z2, PerturbationModel::iid(Distribution::dirac0(2), 1));
        EscapeFractions ef = boundary_escape_fraction(pps, 100.0);
        CHECK(ef.out_fraction == 0.0);
        CHECK(ef.in_fraction == 0.0);
    }

    SECTION("gaussian crossings are rare and shrink with R") {
        PointSet z2 = generate_lattice(Lattice::cubic(2), 210.0);
        PerturbedPointSet pps = gaussian_field(z2, 0.1, 77);
        EscapeFractions e100 = boundary_escape_fraction(pps, 100.0);
        CHECK(e100.out_fraction <= 0.01);
        CHECK(e100.in_fraction <= 0.01);
        EscapeFractions e50 = boundary_escape_fraction(pps, 50.0);
        EscapeFractions e200 = boundary_escape_fraction(pps, 200.0);
        CHECK(e100.out_fraction < e50.out_fraction);
        CHECK(e200.out_fraction < e100.out_fraction);
        CHECK(e100.in_fraction < e50.in_fraction);
        CHECK(e200.in_fraction < e100.in_fraction);
    }

    SECTION("bounded support pins crossers to a shell around the sphere") {
        const double a = 0.2;
        PointSet z2 = generate_lattice(Lattice::cubic(2), 70.0);
        PerturbedPointSet pps =
            displace(z2, PerturbationModel::iid(Distribution::uniform_box(2, a), 5));
        const double R = 60.0;
        const double reach = a * std::sqrt(2.0);
        for (size_t i = 0; i < pps.size(); ++i) {
            double rb = pps.base.at(i).norm(), rp = pps.perturbed(i).norm();
            bool switched = (rb <= R) != (rp <= R);
            if (switched) CHECK(std::fabs(rb - R) <= reach + 1e-12);
        }
    }

    SECTION("insufficient margin is rejected") {
        PointSet z2 = generate_lattice(Lattice::cubic(2), 100.0);
        PerturbedPointSet pps = gaussian_field(z2, 0.1, 1);
        CHECK_THROWS_AS(boundary_escape_fraction(pps, 99.9), std::invalid_argument);
    }
}

TEST_CASE("atom statistic separates flat from atomic transforms") {
    PointSet z2 = generate_lattice(Lattice::cubic(2), 80.0);
    Vec lam{1.0, 0.0};

    PerturbedPointSet quiet = displace(z2, PerturbationModel::iid(Distribution::dirac0(2), 1));
    AutocorrEstimate a0 = gamma_xi_lambda(quiet, lam, 8.0, 80.0);
    CHECK(strungaru_statistic(a0) == 0.0);

    PerturbedPointSet pps = gaussian_field(z2, 0.1, 19);
    AutocorrEstimate a1 = gamma_xi_lambda(pps, lam, 8.0, 80.0);
    const cplx* zero = a1.coefficient_at(Vec{0.0, 0.0});
    REQUIRE(zero != nullptr);
    CHECK(strungaru_statistic(a1) <= 0.05 * zero->real());

    // positive control: the plane-wave weights keep their atoms
    PhaseMeasures pm = mu_lambda_weights(pps, lam);
    AutocorrEstimate ap = autocorrelation(pm.plane_wave, 8.0, 80.0);
    const cplx* pzero = ap.coefficient_at(Vec{0.0, 0.0});
    REQUIRE(pzero != nullptr);
    CHECK(strungaru_statistic(ap) >= 0.5 * pzero->real());
}

TEST_CASE("power at dual points grows with the ball volume, elsewhere stays flat") {
    PointSet z2 = generate_lattice(Lattice::cubic(2), 200.0);
    FrequencySet dual = FrequencySet::explicit_set(2, {Vec{1.0, 0.0}});
    // a bundle of generic frequencies: single off-peak values oscillate in R,
    // the bundle mean self-averages to the flat level
    std::vector<Vec> bundle;
    Stream s = Stream::from(31337, 1);
    for (uint64_t i = 0; i < 20; ++i) {
        double ang = 2.0 * kPi * s.u01(2 * i);
        double rad = 0.3 + 0.4 * s.u01(2 * i + 1);
        bundle.push_back(Vec{rad * std::cos(ang), rad * std::sin(ang)});
    }
    FrequencySet off = FrequencySet::explicit_set(2, bundle);
    PerturbedPointSet pps = gaussian_field(z2, 0.1, 4);
    std::vector<double> lv, lp_dual, lp_base_off, lp_pert_off;
    for (double R : {50.0, 100.0, 150.0, 200.0}) {
        lv.push_back(std::log(ball_volume(2, R)));
        lp_dual.push_back(std::log(periodogram(z2, dual, R)[0].value.real()));
        double base_mean = 0, pert_mean = 0;
        auto pb = periodogram(z2, off, R);
        auto pp = periodogram(pps, off, R);
        for (size_t i = 0; i < pb.size(); ++i) {
            base_mean += pb[i].value.real();
            pert_mean += pp[i].value.real();
        }
        lp_base_off.push_back(std::log(base_mean / static_cast<double>(pb.size())));
        lp_pert_off.push_back(std::log(pert_mean / static_cast<double>(pb.size())));
    }
    double slope_dual = ls_slope(lv, lp_dual);
    CHECK(slope_dual >= 0.9);
    CHECK(slope_dual <= 1.1);
    // deterministic off-peak power must not grow (for the bare lattice it in
    // fact decays); the diffuse background of the perturbed set sits at the
    // flat level 1 - |phi|^2 with exponent near zero
    CHECK(ls_slope(lv, lp_base_off) <= 0.2);
    double slope_pert = ls_slope(lv, lp_pert_off);
    CHECK(slope_pert >= -0.2);
    CHECK(slope_pert <= 0.2);
}

TEST_CASE("perturbed sums converge to the damped amplitude") {
    // |M_R - phi| decreases along the schedule for a pinned seed
    PointSet z2 = generate_lattice(Lattice::cubic(2), 120.0);
    Vec lam{1.0, 0.0};
    const double sigma = 0.1;
    const double phi = std::exp(-2.0 * kPi * kPi * sigma * sigma);
    PerturbedPointSet pps = gaussian_field(z2, sigma, 2);
    FrequencySet fs = FrequencySet::explicit_set(2, {lam});
    double prev = std::numeric_limits<double>::infinity();
    for (double R : {40.0, 80.0, 120.0}) {
        double dev = std::abs(fourier_sum(pps, fs, R)[0].value - cplx(phi, 0.0));
        CHECK(dev < prev);
        prev = dev;
    }
    CHECK(prev < 0.02);
}

TEST_CASE("dual lattice frequency generation") {
    FrequencySet fs = dual_lattice_frequencies(Lattice::cubic(2), 2.0);
    CHECK(fs.freqs.size() == 13);  // integer vectors with |m| <= 2
    FrequencySet rect = dual_lattice_frequencies(Lattice{2, Mat::diag({2.0, 1.0})}, 1.0);
    // dual basis diag(1/2, 1): vectors (0,0), (±1/2,0), (0,±1), (±1,0)
    CHECK(rect.freqs.size() == 7);
}

TEST_CASE("uniform grids dedup and cover the requested box") {
    FrequencySet g = uniform_grid_frequencies(2, 1.0, 0.5);
    CHECK(g.freqs.size() == 25);
    FrequencySet e = FrequencySet::explicit_set(1, {Vec{0.5}, Vec{0.5}, Vec{0.25}});
    CHECK(e.freqs.size() == 2);
}
