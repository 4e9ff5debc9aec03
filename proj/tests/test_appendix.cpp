// Strong-law traces and localized Hellinger machinery: analytic limits,
// exact identities, randomized inequality checks, the diffraction bound.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "difflab/appendix.hpp"

using namespace difflab;

namespace {

GriddedMeasure grid1d(std::vector<double> dens, double step = 0.5) {
    GriddedMeasure g;
    g.dim = 1;
    g.origin = Vec{0.0};
    g.step = Vec{step};
    g.counts[0] = static_cast<int>(dens.size());
    g.densities = std::move(dens);
    return g;
}

}  // namespace

TEST_CASE("centered strong-law traces") {
    SECTION("constant sequences vanish identically") {
        auto tr = slln_trace(CorrelatedSequenceSpec::iid(ScalarMarginal::constant_of(3.7)), 100000, 1);
        for (const auto& t : tr) CHECK(t.value == 0.0);
    }
    SECTION("iid uniform converges at the CLT scale") {
        auto tr = slln_trace(CorrelatedSequenceSpec::iid(ScalarMarginal::uniform01()), 1000000, 2);
        CHECK(tr.size() == 4);  // decade checkpoints
        CHECK(std::fabs(tr.back().value) < 0.005);
    }
    SECTION("AR(1) converges despite correlations") {
        auto tr = slln_trace(CorrelatedSequenceSpec::ar1(0.5), 1000000, 3);
        CHECK(std::fabs(tr.back().value) < 0.01);
    }
    SECTION("traces come down from their start for almost all seeds") {
        int down = 0;
        for (uint64_t seed = 0; seed < 100; ++seed) {
            auto tr = slln_trace(CorrelatedSequenceSpec::ar1(0.9), 1000000, seed);
            if (std::fabs(tr.back().value) <= std::fabs(tr.front().value)) ++down;
        }
        CHECK(down >= 90);
    }
    SECTION("beta outside (0,1) is rejected") {
        CHECK_THROWS_AS(slln_trace(CorrelatedSequenceSpec::ar1(1.0), 1000, 0), std::invalid_argument);
    }
}

TEST_CASE("positive-sequence running means") {
    SECTION("constant positive sequences hit the mean at once") {
        auto tr = truncated_slln_trace(CorrelatedSequenceSpec::iid(ScalarMarginal::constant_of(2.5)),
                                       100000, 1);
        for (const auto& t : tr) CHECK(t.value == 2.5);
    }
    SECTION("exponential converges to 1") {
        auto tr = truncated_slln_trace(CorrelatedSequenceSpec::iid(ScalarMarginal::exponential1()),
                                       1000000, 4);
        CHECK(std::fabs(tr.back().value - 1.0) < 0.01);
    }
    SECTION("heavy-tailed with finite mean converges to the analytic mean") {
        ScalarMarginal pareto = ScalarMarginal::pareto(1.5);
        CHECK(pareto.mean() == Catch::Approx(3.0));
        auto tr = truncated_slln_trace(CorrelatedSequenceSpec::iid(pareto), 1000000, 11);
        CHECK(std::fabs(tr.back().value - 3.0) < 0.05);
    }
    SECTION("signed marginals are rejected") {
        CHECK_THROWS_AS(truncated_slln_trace(
                            CorrelatedSequenceSpec::iid(ScalarMarginal::gaussian_std()), 1000, 0),
                        std::invalid_argument);
    }
}

TEST_CASE("hellinger density identities") {
    GriddedMeasure a = grid1d({1.0, 2.0, 0.0, 0.5});
    GriddedMeasure b = grid1d({1.0, 1.0, 3.0, 0.0});

    SECTION("symmetry and self-identity are exact") {
        GriddedMeasure ab = hellinger_density(a, b);
        GriddedMeasure ba = hellinger_density(b, a);
        for (size_t i = 0; i < ab.densities.size(); ++i) CHECK(ab.densities[i] == ba.densities[i]);
        GriddedMeasure aa = hellinger_density(a, a);
        for (size_t i = 0; i < aa.densities.size(); ++i) CHECK(aa.densities[i] == a.densities[i]);
    }

    SECTION("vanishes where either input vanishes; disjoint supports annihilate") {
        GriddedMeasure ab = hellinger_density(a, b);
        CHECK(ab.densities[2] == 0.0);
        CHECK(ab.densities[3] == 0.0);
        GriddedMeasure left = grid1d({2.0, 1.0, 0.0, 0.0});
        GriddedMeasure right = grid1d({0.0, 0.0, 1.0, 4.0});
        GriddedMeasure rho = hellinger_density(left, right);
        for (double v : rho.densities) CHECK(v == 0.0);
    }

    SECTION("doubling one side scales by sqrt(2)") {
        GriddedMeasure g2 = grid1d({0.8, 1.6, 0.4, 2.0});
        GriddedMeasure doubled = grid1d({1.6, 3.2, 0.8, 4.0});
        GriddedMeasure rho = hellinger_density(doubled, g2);
        for (size_t i = 0; i < rho.densities.size(); ++i)
            CHECK(rho.densities[i] ==
                  Catch::Approx(std::sqrt(2.0) * g2.densities[i]).epsilon(1e-14));
    }

    SECTION("dominated by the cellwise maximum") {
        GriddedMeasure rho = hellinger_density(a, b);
        for (size_t i = 0; i < rho.densities.size(); ++i)
            CHECK(rho.densities[i] <= std::max(a.densities[i], b.densities[i]) + 1e-15);
    }

    SECTION("grid mismatch is rejected") {
        GriddedMeasure other = grid1d({1.0, 2.0, 0.0, 0.5}, 0.25);
        CHECK_THROWS_AS(hellinger_density(a, other), std::invalid_argument);
    }
}

TEST_CASE("hellinger Cauchy-Schwarz bound") {
    SECTION("disjoint supports give zero lhs") {
        GriddedMeasure left = grid1d({2.0, 1.0, 0.0, 0.0});
        GriddedMeasure right = grid1d({0.0, 0.0, 1.0, 4.0});
        HellingerBound hb = hellinger_cs_bound(left, right, {1.0, 1.0, 1.0, 1.0});
        CHECK(hb.lhs == 0.0);
        CHECK(hb.lhs <= hb.rhs);
    }
    SECTION("equal measures achieve equality") {
        GriddedMeasure g = grid1d({0.3, 1.7, 0.9, 0.0});
        HellingerBound hb = hellinger_cs_bound(g, g, {0.5, 2.0, 1.0, 3.0});
        CHECK(hb.lhs == Catch::Approx(hb.rhs).epsilon(1e-12));
    }
    SECTION("random grids always satisfy the inequality") {
        Stream s = Stream::from(2024, 5);
        uint64_t ctr = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<double> da(8), db(8), f(8);
            for (int i = 0; i < 8; ++i) {
                da[static_cast<size_t>(i)] = 3.0 * s.u01(ctr++);
                db[static_cast<size_t>(i)] = 3.0 * s.u01(ctr++);
                f[static_cast<size_t>(i)] = 2.0 * s.u01(ctr++);
            }
            HellingerBound hb = hellinger_cs_bound(grid1d(da), grid1d(db), f);
            CHECK(hb.lhs <= hb.rhs * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("diffraction bound for phase-weight measures") {
    SECTION("zero law zeroes the pair sums") {
        PointSet z2 = generate_lattice(Lattice::cubic(2), 30.0);
        PerturbedPointSet quiet = displace(z2, PerturbationModel::iid(Distribution::dirac0(2), 1));
        FrequencyBump bump;
        bump.center = Vec{1.0, 0.0};
        bump.width = 0.3;
        DiffractionBoundResult res =
            hellinger_diffraction_bound(quiet, Vec{1.0, 0.0}, bump, {15.0, 30.0}, 1.2, 0.01);
        for (double v : res.lhs) CHECK(v == 0.0);
    }

    SECTION("flat against atomic: bound holds with room") {
        PointSet z2 = generate_lattice(Lattice::cubic(2), 60.0);
        Vec lam{1.0, 0.0};
        FrequencyBump bump;
        bump.center = lam;
        bump.width = 0.3;
        PerturbedPointSet pps =
            displace(z2, PerturbationModel::iid(Distribution::gaussian_iso(2, 0.1), 6));
        DiffractionBoundResult res =
            hellinger_diffraction_bound(pps, lam, bump, {30.0, 60.0}, 1.0, 0.02);
        // nearly mutually singular estimates: rhs far below the crossed scale
        double flat = 0.0, peak = 0.0;
        for (double v : res.grid_mu.densities) flat = std::max(flat, v);
        for (double v : res.grid_nu.densities) peak = std::max(peak, v);
        double f_mass = 0.0;
        for (size_t i = 0; i < res.grid_mu.densities.size(); ++i)
            f_mass += bump.eval(res.grid_mu.cell_center(i));
        f_mass *= res.grid_mu.cell_volume();
        CHECK(res.rhs <= 0.05 * std::sqrt(flat * peak) * f_mass);
        CHECK(res.lhs.back() <= res.rhs);
    }

    SECTION("identical measures recover the test-function pairing") {
        // mu = nu = dirac-comb weights: the pair sum equals the gridded
        // periodogram paired with f, up to quadrature error
        PointSet z2 = generate_lattice(Lattice::cubic(2), 30.0);
        AtomicMeasure comb = dirac_comb(z2);
        FrequencyBump bump;
        bump.center = Vec{1.0, 0.0};
        bump.width = 0.3;
        const double R = 30.0;
        const double cutoff = bump.support_radius(1e-12);
        BucketGrid grid(z2.xs, 2, cutoff);
        KahanComplexSum acc;
        for (size_t i = 0; i < z2.size(); ++i) {
            grid.for_neighbors(z2.point(i), cutoff, [&](uint32_t j, double) {
                acc.add(bump.transform(z2.at(i) - z2.at(static_cast<size_t>(j))));
            });
        }
        double lhs = std::abs(acc.value()) / ball_volume(2, R);

        GriddedMeasure gm = gridded_periodogram(comb, R, bump.center, 1.2, 0.01);
        GriddedMeasure rho = hellinger_density(gm, gm);
        KahanSum rhs;
        for (size_t i = 0; i < rho.densities.size(); ++i)
            rhs.add(rho.densities[i] * bump.eval(rho.cell_center(i)));
        double rhs_v = rhs.sum * rho.cell_volume();
        CHECK(std::fabs(rhs_v - lhs) / lhs < 0.05);
    }
}
