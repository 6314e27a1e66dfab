#include <doctest.h>

#include <cmath>

#include "kdl/errors.hpp"
#include "kdl/harness.hpp"
#include "oracles.hpp"

using namespace kdl;

TEST_SUITE("harness") {
    TEST_CASE("config round trip and hash") {
        StudyConfig c;
        c.eps = {0.3, 0.15};
        c.initial.density = "bump";
        c.initial.center = Vec{0.1, -0.2};
        c.n_r = 6;
        const StudyConfig d = config_from_json(to_json(c));
        CHECK(to_json(d) == to_json(c));
        CHECK(config_hash(d) == config_hash(c));
        StudyConfig e = c;
        e.seeds = {9};
        CHECK(config_hash(e) != config_hash(c));
        CHECK(hex64(0xabcULL) == "0000000000000abc");
        CHECK_THROWS_AS(config_from_json(json{{"bogus", 1}}), ArgumentError);
        CHECK_THROWS_AS(config_from_json(json{{"mesh", {{"n_z", 3}}}}), ArgumentError);
        CHECK_THROWS_AS(config_from_json(json{{"eps", "small"}}), ArgumentError);
    }

    TEST_CASE("monotone verdict") {
        CHECK(monotone_verdict({0.2, 0.1, 0.05}, {0.01, 0.01, 0.01}) == "monotone");
        CHECK(monotone_verdict({0.2, 0.3, 0.05}, {0.01, 0.01, 0.01}) == "non-monotone");
        CHECK(monotone_verdict({0.2, 0.19, 0.05}, {0.01, 0.01, 0.01}) == "inconclusive");
    }

    TEST_CASE("integrability") {
        const std::vector<std::size_t> sched{100000, 300000, 1000000};
        const IntegrabilityReport p1 = integrability_study(1.0, sched, 1);
        CHECK(p1.verdict == "converging");
        CHECK(p1.estimates.back() == doctest::Approx(oracle::kMeanInverseChord).epsilon(1e-3));
        const IntegrabilityReport p2 = integrability_study(2.0, sched, 1);
        CHECK(p2.verdict == "converging");
        CHECK(p2.estimates.back() == doctest::Approx(2.0).epsilon(0.01));
        CHECK(integrability_study(4.0, sched, 1).verdict == "diverging");
        const IntegrabilityReport r = integrability_study(2.0, sched, 3, "random");
        CHECK(r.verdict == "converging");
        CHECK(r.counts == sched);
        CHECK_THROWS_AS(integrability_study(2.0, {10, 5}, 1), ArgumentError);
        CHECK_THROWS_AS(integrability_study(2.0, sched, 1, "halton"), ArgumentError);
    }

    TEST_CASE("equilibrium errors sit at the noise floor") {
        StudyConfig c;
        c.n_particles = 20000;
        c.t_end = 0.05;
        c.eps = {0.4, 0.2};
        c.seeds = {1, 2};
        const ConvergenceReport r = converge_study(c);
        for (const auto& e : r.entries) CHECK(e.mean_error < 2.0 * e.noise_floor);
    }

    TEST_CASE("mass-only residual vanishes") {
        StudyConfig c;
        c.initial.density = "bump";
        c.n_particles = 2000;
        c.eps = {0.4};
        c.seeds = {1};
        c.test_functions = {0};
        c.snapshots = 5;
        const WeakResidualReport r = weak_residual_study(c);
        CHECK(std::abs(r.entries[0].R) <= 1e-12);
        CHECK(r.mass_only_residual <= 1e-12);
    }

    TEST_CASE("equilibrium eigenmode residual agrees with the heat residual") {
        StudyConfig c;
        c.n_particles = 20000;
        c.eps = {0.2};
        c.seeds = {1};
        c.test_functions = {2};
        c.snapshots = 10;
        const WeakResidualReport r = weak_residual_study(c);
        CHECK(std::abs(r.R_heat[0]) < 1e-3);
        CHECK(std::abs(r.entries[0].R - r.R_heat[0]) < 4.0 * r.entries[0].R_se + 1e-3);
    }

    TEST_CASE("kde keeps the integral") {
        InitialSpec spec;
        spec.density = "bump";
        const ScalarField f = project_initial(spec, Mesh::polar(8, 16));
        const ScalarField g = kde_smooth(f, 0.1);
        CHECK(g.integral() == doctest::Approx(f.integral()).epsilon(1e-13));
        CHECK(g.max() < f.max());
        CHECK_THROWS_AS(kde_smooth(f, 0.0), ArgumentError);
    }
}
