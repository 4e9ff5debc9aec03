// Recovery tests: deconvolution identities, cloaking detection, structure
// factors against closed forms and the perturbation relations.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "difflab/recover.hpp"
#include "oracles.hpp"

using namespace difflab;

TEST_CASE("zero law recovery is the identity") {
    PointSet z2 = generate_lattice(Lattice::cubic(2), 60.0);
    PerturbationModel model = PerturbationModel::iid(Distribution::dirac0(2), 1);
    PerturbedPointSet pps = displace(z2, model);
    FrequencySet fs = FrequencySet::explicit_set(2, {Vec{1.0, 0.0}, Vec{0.37, 0.11}});
    auto measured = fourier_sum(pps, fs, 60.0);
    RecoveryReport rep = recover_spectrum(measured, model, 0.05, &measured);
    for (size_t i = 0; i < rep.entries.size(); ++i) {
        CHECK_FALSE(rep.entries[i].cloaked);
        REQUIRE(rep.entries[i].recovered.has_value());
        CHECK(*rep.entries[i].recovered == measured[i].value);
        REQUIRE(rep.entries[i].abs_error.has_value());
        CHECK(*rep.entries[i].abs_error == 0.0);
    }
}

TEST_CASE("gaussian recovery lands on the unperturbed amplitude") {
    PointSet z2 = generate_lattice(Lattice::cubic(2), 150.0);
    PerturbationModel model = PerturbationModel::iid(Distribution::gaussian_iso(2, 0.1), 1);
    PerturbedPointSet pps = displace(z2, model);
    FrequencySet fs = FrequencySet::explicit_set(2, {Vec{1.0, 0.0}});
    auto measured = fourier_sum(pps, fs, 150.0);
    RecoveryReport rep = recover_spectrum(measured, model, 0.05);
    REQUIRE(rep.entries.size() == 1);
    REQUIRE(rep.entries[0].recovered.has_value());
    CHECK(std::abs(*rep.entries[0].recovered - cplx(1.0, 0.0)) < 0.03);
}

TEST_CASE("recovered peaks agree across displacement widths") {
    PointSet z2 = generate_lattice(Lattice::cubic(2), 100.0);
    FrequencySet fs = FrequencySet::explicit_set(2, {Vec{1.0, 0.0}});
    std::vector<cplx> rec;
    for (double sigma : {0.05, 0.1, 0.2}) {
        PerturbationModel model = PerturbationModel::iid(Distribution::gaussian_iso(2, sigma), 17);
        PerturbedPointSet pps = displace(z2, model);
        RecoveryReport rep = recover_spectrum(fourier_sum(pps, fs, 100.0), model, 0.05);
        REQUIRE(rep.entries[0].recovered.has_value());
        rec.push_back(*rep.entries[0].recovered);
    }
    for (size_t i = 0; i < rec.size(); ++i)
        for (size_t j = i + 1; j < rec.size(); ++j) CHECK(std::abs(rec[i] - rec[j]) < 0.05);
}

TEST_CASE("cloaked frequencies carry no recovered value") {
    const double a = 0.5;
    PerturbationModel model = PerturbationModel::iid(Distribution::uniform_box(1, a), 2);
    PointSet z1 = generate_lattice(Lattice::cubic(1), 60.0);
    PerturbedPointSet pps = displace(z1, model);
    FrequencySet fs = FrequencySet::explicit_set(1, {Vec{1.0}, Vec{0.4}});
    RecoveryReport rep = recover_spectrum(fourier_sum(pps, fs, 60.0), model, 0.05);
    for (const auto& e : rep.entries) {
        if (std::fabs(e.lambda[0] - 1.0) < 1e-12) {
            CHECK(e.cloaked);  // sinc zero at 2 a lambda = 1
            CHECK_FALSE(e.recovered.has_value());
        } else {
            CHECK_FALSE(e.cloaked);
            CHECK(e.recovered.has_value());
        }
    }
    CHECK_THROWS_AS(recover_spectrum({}, model, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(recover_spectrum({}, model, 1.0), std::invalid_argument);
}

TEST_CASE("cloaking detection") {
    FrequencySet grid = uniform_grid_frequencies(1, 2.0, 0.1);

    SECTION("gaussian never vanishes") {
        PerturbationModel g = PerturbationModel::iid(Distribution::gaussian_iso(1, 0.3), 0);
        double min_mod = 1.0;
        for (const Vec& f : grid.freqs)
            min_mod = std::min(min_mod, std::abs(characteristic_function(g, f).value));
        CHECK(detect_cloaking(g, grid, 0.9 * min_mod).empty());
    }

    SECTION("box law cloaks the sinc zeros, monotone in the threshold") {
        PerturbationModel u = PerturbationModel::iid(Distribution::uniform_box(1, 0.5), 0);
        std::vector<Vec> cloaked = detect_cloaking(u, grid, 0.05);
        bool has_one = false;
        for (const Vec& f : cloaked)
            if (std::fabs(std::fabs(f[0]) - 1.0) < 1e-12) has_one = true;
        CHECK(has_one);

        std::vector<Vec> tighter = detect_cloaking(u, grid, 0.01);
        for (const Vec& f : tighter) {
            bool contained = false;
            for (const Vec& g2 : cloaked)
                if ((f - g2).norm() < 1e-12) contained = true;
            CHECK(contained);
        }

        // vanishing threshold: no exact zeros on a finite grid
        CHECK(detect_cloaking(u, grid, 1e-300).empty());
    }
}

TEST_CASE("structure factor statistics") {
    PointSet z2 = generate_lattice(Lattice::cubic(2), 60.0);
    PerturbationModel quiet = PerturbationModel::iid(Distribution::dirac0(2), 0);

    SECTION("input validation") {
        FrequencySet zero = FrequencySet::explicit_set(2, {Vec{0.0, 0.0}});
        CHECK_THROWS_AS(structure_factor(z2, quiet, zero, 60.0, 10), std::invalid_argument);
        FrequencySet ok = FrequencySet::explicit_set(2, {Vec{0.3, 0.1}});
        CHECK_THROWS_AS(structure_factor(z2, quiet, ok, 60.0, 5), std::invalid_argument);
    }

    SECTION("unperturbed 1-d values equal the Dirichlet closed form") {
        PointSet z1 = generate_lattice(Lattice::cubic(1), 80.0);
        PerturbationModel quiet1 = PerturbationModel::iid(Distribution::dirac0(1), 0);
        const double lam = 0.2236067977499790;
        FrequencySet fs = FrequencySet::explicit_set(1, {Vec{lam}});
        StructureFactorEstimate s = structure_factor(z1, quiet1, fs, 80.0, 10);
        double dk = oracles::dirichlet_sum(80, lam);
        double expect = dk * dk / static_cast<double>(z1.size());
        CHECK(s.S[0] == Catch::Approx(expect).epsilon(1e-9));
        CHECK(s.std_error[0] <= 1e-15 * std::max(s.S[0], 1e-30));  // deterministic input
    }

    SECTION("peak value is the point count; off-peak is tiny") {
        FrequencySet fs = FrequencySet::explicit_set(2, {Vec{1.0, 0.0}, Vec{0.437, 0.291}});
        StructureFactorEstimate s = structure_factor(z2, quiet, fs, 60.0, 10);
        size_t inside = 0;
        for (size_t i = 0; i < z2.size(); ++i)
            if (z2.at(i).norm() <= 60.0) ++inside;
        for (size_t f = 0; f < s.freqs.size(); ++f) {
            CHECK(s.S[f] >= 0.0);
            if ((s.freqs[f] - Vec{1.0, 0.0}).norm() < 1e-12)
                CHECK(s.S[f] == Catch::Approx(static_cast<double>(inside)).epsilon(1e-9));
            else
                CHECK(s.S[f] < 0.05);
        }
    }

    SECTION("per-point normalization equals periodogram over empirical density") {
        FrequencySet fs = FrequencySet::explicit_set(2, {Vec{0.437, 0.291}, Vec{1.0, 0.0}});
        StructureFactorEstimate s = structure_factor(z2, quiet, fs, 60.0, 10);
        auto P = periodogram(z2, fs, 60.0);
        size_t inside = 0;
        for (size_t i = 0; i < z2.size(); ++i)
            if (z2.at(i).norm() <= 60.0) ++inside;
        const double dens_emp = static_cast<double>(inside) / ball_volume(2, 60.0);
        for (size_t f = 0; f < fs.freqs.size(); ++f)
            CHECK(s.S[f] == Catch::Approx(P[f].value.real() / dens_emp).epsilon(1e-9));
    }

    SECTION("gaussian diffuse level is 1 - |phi|^2") {
        const double sigma = 0.1;
        PerturbationModel model = PerturbationModel::iid(Distribution::gaussian_iso(2, sigma), 3);
        Vec lam{0.437, 0.291};
        FrequencySet fs = FrequencySet::explicit_set(2, {lam});
        StructureFactorEstimate s = structure_factor(z2, model, fs, 60.0, 50);
        double phi2 = std::exp(-4.0 * kPi * kPi * sigma * sigma * lam.norm2());
        CHECK(std::fabs(s.S[0] - (1.0 - phi2)) <= 3.0 * s.std_error[0]);
    }
}

TEST_CASE("structure-factor relation between base and perturbed sets") {
    PointSet z2 = generate_lattice(Lattice::cubic(2), 60.0);
    PerturbationModel quiet = PerturbationModel::iid(Distribution::dirac0(2), 0);

    SECTION("zero law leaves an exactly zero residual") {
        FrequencySet fs = FrequencySet::explicit_set(2, {Vec{0.3, 0.2}, Vec{0.7, 0.1}});
        StructureFactorEstimate sb = structure_factor(z2, quiet, fs, 60.0, 10);
        RelationSummary rel = verify_structure_relation(sb, sb, quiet);
        CHECK(rel.max_abs == 0.0);
    }

    SECTION("off-peak grid within combined errors; peak within 5 percent") {
        // 50 generic frequencies in an annulus
        std::vector<Vec> bundle;
        Stream s = Stream::from(99, 7);
        for (uint64_t i = 0; i < 50; ++i) {
            double ang = 2.0 * kPi * s.u01(2 * i);
            double rad = 0.25 + 0.5 * s.u01(2 * i + 1);
            bundle.push_back(Vec{rad * std::cos(ang), rad * std::sin(ang)});
        }
        FrequencySet fs = FrequencySet::explicit_set(2, bundle);
        const double sigma = 0.1;
        PerturbationModel model = PerturbationModel::iid(Distribution::gaussian_iso(2, sigma), 5);
        StructureFactorEstimate sb = structure_factor(z2, quiet, fs, 60.0, 10);
        StructureFactorEstimate sp = structure_factor(z2, model, fs, 60.0, 50);
        RelationSummary rel = verify_structure_relation(sb, sp, model);
        double mean_se_combined = 0.0;
        for (const auto& r : rel.residuals) mean_se_combined += r.combined_se;
        mean_se_combined /= static_cast<double>(rel.residuals.size());
        CHECK(rel.mean_abs <= 3.0 * mean_se_combined);

        FrequencySet peak = FrequencySet::explicit_set(2, {Vec{1.0, 0.0}});
        StructureFactorEstimate pb = structure_factor(z2, quiet, peak, 60.0, 10);
        StructureFactorEstimate pp = structure_factor(z2, model, peak, 60.0, 50);
        RelationSummary prel = verify_structure_relation(pb, pp, model);
        CHECK(std::fabs(prel.residuals[0].residual) / std::fabs(prel.residuals[0].right) < 0.05);
    }

    SECTION("mismatched inputs and non-independent models are rejected") {
        FrequencySet a = FrequencySet::explicit_set(2, {Vec{0.3, 0.2}});
        FrequencySet b = FrequencySet::explicit_set(2, {Vec{0.4, 0.2}});
        StructureFactorEstimate sa = structure_factor(z2, quiet, a, 60.0, 10);
        StructureFactorEstimate sbad = structure_factor(z2, quiet, b, 60.0, 10);
        CHECK_THROWS_AS(verify_structure_relation(sa, sbad, quiet), std::invalid_argument);
        PerturbationModel shell = PerturbationModel::shell_mixing(
            Distribution::gaussian_iso(2, 0.1), {2.0, 10.0, 70.0}, 0.4, 0);
        CHECK_THROWS_AS(verify_structure_relation(sa, sa, shell), std::invalid_argument);
    }
}

TEST_CASE("diffraction-density relation per realization") {
    PointSet z2 = generate_lattice(Lattice::cubic(2), 150.0);

    SECTION("zero law residual vanishes identically") {
        PerturbationModel quiet = PerturbationModel::iid(Distribution::dirac0(2), 0);
        PerturbedPointSet pps = displace(z2, quiet);
        FrequencySet fs = FrequencySet::explicit_set(2, {Vec{0.41, 0.23}, Vec{1.0, 0.0}});
        RelationSummary rel = verify_diffraction_relation(pps, fs, 100.0);
        CHECK(rel.max_abs == 0.0);
    }

    SECTION("smoothed off-peak residual within 5 / sqrt(Vol) for most seeds") {
        const double R = 60.0;
        FrequencySet fs = FrequencySet::explicit_set(2, {Vec{0.71, 0.31}});
        const double bound = 5.0 / std::sqrt(ball_volume(2, R));
        int ok = 0;
        const int trials = 40;
        for (uint64_t seed = 0; seed < trials; ++seed) {
            PerturbationModel model =
                PerturbationModel::iid(Distribution::gaussian_iso(2, 0.1), 600 + seed);
            PerturbedPointSet pps = displace(z2, model);
            RelationSummary rel = verify_diffraction_relation(pps, fs, R, 0.5, 13);
            if (std::fabs(rel.residuals[0].residual) <= bound) ++ok;
        }
        CHECK(ok >= (trials * 9) / 10);
    }

    SECTION("peak residual is relatively small") {
        PerturbationModel model = PerturbationModel::iid(Distribution::gaussian_iso(2, 0.1), 4);
        PerturbedPointSet pps = displace(z2, model);
        FrequencySet peak = FrequencySet::explicit_set(2, {Vec{1.0, 0.0}});
        RelationSummary rel = verify_diffraction_relation(pps, peak, 150.0);
        CHECK(std::fabs(rel.residuals[0].residual) / std::fabs(rel.residuals[0].right) <= 0.05);
    }
}
