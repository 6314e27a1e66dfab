#include <doctest.h>

#include <cmath>

#include "kdl/errors.hpp"
#include "kdl/heat_solver.hpp"
#include "kdl/initial_data.hpp"
#include "kdl/rng.hpp"
#include "oracles.hpp"

using namespace kdl;

TEST_SUITE("heat_solver") {
    TEST_CASE("constants are stationary") {
        for (const Mesh& m : {Mesh::polar(8, 16), Mesh::radial(3, 10)}) {
            const ScalarField c(m, 0.7);
            for (TimeScheme s : {TimeScheme::BackwardEuler, TimeScheme::CrankNicolson}) {
                const HeatState st = heat_solve(c, 0.1, 1e-3, s);
                for (double v : st.rho.values) CHECK(v == doctest::Approx(0.7).epsilon(1e-13));
            }
        }
    }

    TEST_CASE("mass is conserved at every step") {
        InitialSpec spec;
        spec.density = "bump";
        const ScalarField rho0 = project_initial(spec, Mesh::polar(16, 32));
        const double m0 = rho0.integral();
        for (TimeScheme s : {TimeScheme::BackwardEuler, TimeScheme::CrankNicolson, TimeScheme::Explicit}) {
            const double dt = s == TimeScheme::Explicit ? 0.9 * explicit_step_limit(rho0.mesh) : 1e-3;
            double worst = 0.0;
            heat_solve(rho0, 0.05, dt, s, [&](const HeatState& st) {
                worst = std::max(worst, std::abs(st.rho.integral() - m0));
            });
            CHECK(worst <= 1e-12);
        }
    }

    TEST_CASE("explicit stability guard") {
        const ScalarField c(Mesh::polar(8, 16), 1.0);
        CHECK_THROWS_AS(heat_solve(c, 0.1, 10.0 * explicit_step_limit(c.mesh), TimeScheme::Explicit), ArgumentError);
    }

    TEST_CASE("scheme names") {
        CHECK(parse_scheme("implicit") == TimeScheme::BackwardEuler);
        CHECK(parse_scheme("crank-nicolson") == TimeScheme::CrankNicolson);
        CHECK(parse_scheme("cn") == TimeScheme::CrankNicolson);
        CHECK(parse_scheme("explicit") == TimeScheme::Explicit);
        CHECK_THROWS_AS(parse_scheme("rk4"), ArgumentError);
    }

    TEST_CASE("eigenmode decay rate") {
        CHECK(neumann_lambda1(2) == doctest::Approx(oracle::kJ11Squared).epsilon(1e-13));
        CHECK(neumann_lambda1(2) == doctest::Approx(oracle::j11() * oracle::j11()).epsilon(1e-13));
        const DecayFit f128 = eigenmode_decay_rate(2, 128);
        const DecayFit f256 = eigenmode_decay_rate(2, 256);
        CHECK(f256.rel_error < 0.01);
        CHECK(f128.rel_error / f256.rel_error == doctest::Approx(4.0).epsilon(0.15));
        CHECK(eigenmode_decay_rate(3, 256).rel_error < 0.01);
    }

    TEST_CASE("heat flows toward the mean") {
        InitialSpec spec;
        spec.density = "bump";
        const ScalarField rho0 = project_initial(spec, Mesh::polar(16, 32));
        const HeatState st = heat_solve(rho0, 0.25, 1e-3, TimeScheme::CrankNicolson);
        CHECK(st.rho.max() < rho0.max());
        CHECK(st.rho.min() > rho0.min());
        CHECK(st.steps == 250);
    }
}

TEST_SUITE("mesh") {
    TEST_CASE("polar layout") {
        const Mesh m = Mesh::polar(4, 8);
        CHECK(m.size() == 1 + 3 * 8);
        CHECK(m.total_volume() == doctest::Approx(M_PI).epsilon(1e-14));
        for (int c = 0; c < m.size(); ++c) CHECK(m.locate(m.center(c)) == c);
        CHECK(m.locate(Vec{2.0, 0.0}) == -1);
        CHECK(m.boundary_cells().size() == 8);
        CHECK(Mesh::radial(3, 10).total_volume() == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-14));
    }

    TEST_CASE("l2 error") {
        const Mesh m = Mesh::polar(8, 16);
        const ScalarField a(m, 0.3), b(m, 1.3);
        CHECK(l2_error(a, a) == 0.0);
        CHECK(l2_error(b, a) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
        Rng rng(1, 0);
        for (int t = 0; t < 50; ++t) {
            ScalarField x(m), y(m), z(m);
            for (int c = 0; c < m.size(); ++c) {
                x.values[c] = rng.normal();
                y.values[c] = rng.normal();
                z.values[c] = rng.normal();
            }
            CHECK(l2_error(x, z) <= l2_error(x, y) + l2_error(y, z) + 1e-14);
        }
        CHECK_THROWS_AS(l2_error(a, ScalarField(Mesh::polar(4, 16))), ArgumentError);
    }

    TEST_CASE("restriction keeps mass") {
        InitialSpec spec;
        spec.density = "bump";
        const ScalarField fine = project_initial(spec, Mesh::polar(32, 64));
        const ScalarField coarse = restrict_to(fine, Mesh::polar(8, 16));
        CHECK(coarse.integral() == doctest::Approx(fine.integral()).epsilon(1e-13));
    }
}

TEST_SUITE("initial_data") {
    TEST_CASE("projections") {
        const Mesh m = Mesh::polar(8, 16);
        InitialSpec spec;
        const ScalarField u = project_initial(spec, m);
        for (double v : u.values) CHECK(v == doctest::Approx(1.0 / M_PI).epsilon(1e-14));

        spec.density = "bump";
        const ScalarField b = project_initial(spec, m);
        int arg = 0;
        for (int c = 0; c < m.size(); ++c)
            if (b.values[c] > b.values[arg]) arg = c;
        CHECK(m.locate(Vec{0.4, 0.0}) == arg);

        spec.density = "eigenmode";
        const ScalarField e = project_initial(spec, m);
        CHECK(e.integral() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(project_initial(spec, Mesh::radial(3, 12)).integral() == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("validation") {
        const Domain disk = Domain::unit_ball(2);
        InitialSpec spec;
        CHECK_THROWS_AS(validate(spec, disk, BoundaryMode::FreeSpace), ArgumentError);
        spec.density = "gaussian";
        CHECK_THROWS_AS(validate(spec, disk, BoundaryMode::Reflecting), ArgumentError);
        spec.density = "bump";
        spec.center = Vec{0.9, 0.0};
        CHECK_THROWS_AS(validate(spec, disk, BoundaryMode::Reflecting), ArgumentError);
        spec.density = "eigenmode";
        spec.amplitude = 3.0;  // 1 + a u1(1) < 0
        CHECK_THROWS_AS(validate(spec, disk, BoundaryMode::Reflecting), ArgumentError);
        spec.amplitude = -1.0;  // 1 - u1 >= 0
        CHECK_NOTHROW(validate(spec, disk, BoundaryMode::Reflecting));
        spec.amplitude = -1.5;
        CHECK_THROWS_AS(validate(spec, disk, BoundaryMode::Reflecting), ArgumentError);
    }

    TEST_CASE("gaussian heat solution keeps mass") {
        InitialSpec spec;
        spec.density = "gaussian";
        const ScalarField g = gaussian_heat_solution(spec, Mesh::cartesian(96, -6.0, 6.0), 0.25);
        CHECK(g.integral() == doctest::Approx(1.0).epsilon(1e-9));
    }
}
