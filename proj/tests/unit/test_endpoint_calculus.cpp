#include <doctest.h>

#include <cmath>

#include "kdl/endpoint_calculus.hpp"
#include "kdl/errors.hpp"
#include "kdl/rng.hpp"
#include "oracles.hpp"

using namespace kdl;

namespace {

double rel_err(const Mat& a, const Mat& b) {
    return (a - b).max_abs() / std::max(1.0, b.max_abs());
}

double rel_err(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (double x : b) s = std::max(s, std::abs(x));
    return max_abs_diff(a, b) / std::max(1.0, s);
}

}  // namespace

TEST_SUITE("endpoint_calculus") {
    const Domain disk = Domain::unit_ball(2);

    TEST_CASE("no reflection: identity jacobian") {
        const EndpointDerivatives d = endpoint_derivatives(disk, Vec{0.0, 0.0}, Vec{0.2, 0.0});
        CHECK(d.n == 0);
        CHECK(rel_err(d.J, Mat::identity(2)) == 0.0);
        CHECK(max_abs_diff(d.lap, Vec{0.0, 0.0}) == 0.0);
    }

    TEST_CASE("boundary jacobian limit") {
        const EndpointDerivatives d = endpoint_derivatives(disk, Vec{1.0, 0.0}, Vec{1e-3, 2e-4});
        Mat expect = Mat::identity(2);
        expect(0, 0) = -1.0;
        CHECK(rel_err(d.J, expect) < 1e-6);
    }

    TEST_CASE("diameter: analytic vs finite differences") {
        // |v| = 3 from the center ends exactly on a reflection, where eta has a kink.
        CHECK_THROWS_AS(endpoint_derivatives(disk, Vec{0.0, 0.0}, Vec{3.0, 0.0}, DerivMode::FiniteDifference),
                        DiscontinuityError);
        for (const Vec& v : {Vec{3.4, 0.0}, Vec{2.6, 0.0}, Vec{3.4, 0.3}}) {
            const EndpointDerivatives a = endpoint_derivatives(disk, Vec{0.0, 0.0}, v);
            const EndpointDerivatives f = endpoint_derivatives(disk, Vec{0.0, 0.0}, v, DerivMode::FiniteDifference);
            CHECK(rel_err(a.J, f.J) < 1e-5);
            CHECK(rel_err(a.lap, f.lap) < 1e-5);
        }
    }

    TEST_CASE("random samples: analytic vs finite differences") {
        for (int dim : {2, 3}) {
            const Domain ball = Domain::unit_ball(dim);
            Rng rng(21, dim);
            int checked = 0;
            for (int i = 0; i < 300; ++i) {
                Vec x(dim), v(dim);
                for (int k = 0; k < dim; ++k) {
                    x[k] = rng.normal();
                    v[k] = rng.normal();
                }
                x *= 0.95 * std::pow(rng.uniform(), 1.0 / dim) / norm(x);
                v *= 3.0 * rng.uniform() / norm(v);
                EndpointDerivatives f;
                try {
                    f = endpoint_derivatives(ball, x, v, DerivMode::FiniteDifference);
                } catch (const DiscontinuityError&) {
                    continue;
                }
                const EndpointDerivatives a = endpoint_derivatives(ball, x, v);
                CHECK(rel_err(a.J, f.J) < 1e-5);
                CHECK(rel_err(a.lap, f.lap) < 1e-5);
                ++checked;
            }
            CHECK(checked > 250);
        }
    }

    TEST_CASE("ellipse: jets vs finite differences") {
        const Domain ell = Domain::builtin("ellipse", 2, {1.5, 0.8});
        Rng rng(22, 0);
        int checked = 0;
        for (int i = 0; i < 100; ++i) {
            const Vec x{1.2 * (2.0 * rng.uniform() - 1.0) * 0.7, 0.6 * (2.0 * rng.uniform() - 1.0) * 0.7};
            const Vec v{2.0 * rng.normal(), 2.0 * rng.normal()};
            EndpointDerivatives f;
            try {
                f = endpoint_derivatives(ell, x, v, DerivMode::FiniteDifference);
            } catch (const DiscontinuityError&) {
                continue;
            }
            const EndpointDerivatives a = endpoint_derivatives(ell, x, v);
            CHECK(rel_err(a.J, f.J) < 1e-5);
            CHECK(rel_err(a.lap, f.lap) < 1e-5);
            ++checked;
        }
        CHECK(checked > 80);
    }

    TEST_CASE("jacobian stays bounded") {
        Rng rng(23, 0);
        double worst = 0.0;
        for (int i = 0; i < 2000; ++i) {
            const Vec x{0.99 * (2.0 * rng.uniform() - 1.0) / std::sqrt(2.0), 0.99 * (2.0 * rng.uniform() - 1.0) / std::sqrt(2.0)};
            const Vec v{5.0 * rng.normal(), 5.0 * rng.normal()};
            worst = std::max(worst, endpoint_derivatives(disk, x, v).J.max_abs());
        }
        CHECK(std::isfinite(worst));
    }

    TEST_CASE("composite laplacian") {
        const TestFunction one = neumann_family(0, 2);
        CHECK(test_function_laplacian(disk, one, 0.0, Vec{0.3, 0.1}, Vec{4.0, 1.0}) == 0.0);
        const TestFunction bubble = neumann_family(1, 2);
        CHECK(test_function_laplacian(disk, bubble, 0.0, Vec{0.0, 0.0}, Vec{0.1, 0.0}) ==
              doctest::Approx(-7.84).epsilon(1e-13));
        const TestFunction sq = make_test_function(
            "r2", 2, [](double, const Vec& x) { return squared_norm(x); }, [](double, const Vec& x) { return 2.0 * x; },
            [](double, const Vec&) { return Mat::identity(2) * 2.0; }, [](double, const Vec&) { return 0.0; });
        CHECK_FALSE(sq.neumann_ok);
        CHECK_THROWS_AS(test_function_laplacian(disk, sq, 0.0, Vec{0.0, 0.0}, Vec{0.1, 0.0}), ContractError);
    }

    TEST_CASE("neumann family") {
        for (int dim : {2, 3}) {
            for (int k = 0; k < kNeumannFamilySize; ++k) {
                const TestFunction psi = neumann_family(k, dim);
                CHECK(psi.neumann_ok);
                CHECK(neumann_defect(psi, 1000) <= 1e-12);
            }
        }
        CHECK(neumann_family(0, 2).value(0.3, Vec{0.2, 0.1}) == 1.0);
        CHECK(neumann_family(1, 2).value(0.0, Vec{0.5, 0.0}) == doctest::Approx(0.5625));
        const TestFunction eig = neumann_family(2, 2);
        const double lam = oracle::kJ11Squared;
        CHECK(eig.value(0.1, Vec{0.0, 0.0}) == doctest::Approx(std::exp(-lam * 0.1)).epsilon(1e-12));
        // heat solution: dt psi = lap psi
        for (double r : {0.1, 0.5, 0.9})
            CHECK(std::abs(eig.dt(0.05, Vec{r, 0.0}) - eig.laplacian(0.05, Vec{r, 0.0})) < 1e-9);
        CHECK_THROWS_AS(neumann_family(7, 2), ArgumentError);
    }

    TEST_CASE("time factor vanishes at T") {
        const TestFunction psi = with_time_factor(neumann_family(1, 2), 0.25);
        CHECK(psi.value(0.25, Vec{0.1, 0.2}) == 0.0);
        CHECK(psi.neumann_ok);
        CHECK(psi.dt(0.1, Vec{0.0, 0.0}) == doctest::Approx(-4.0));
    }

    TEST_CASE("radial modes match the bisection oracle") {
        CHECK(radial_mode(2).k == doctest::Approx(oracle::j11()).epsilon(1e-13));
        CHECK(radial_mode(2).lambda() == doctest::Approx(oracle::kJ11Squared).epsilon(1e-13));
        CHECK(radial_mode(3).k == doctest::Approx(oracle::spherical_root()).epsilon(1e-13));
        CHECK(radial_mode(3).k == doctest::Approx(oracle::kSphericalRoot).epsilon(1e-13));
        const RadialMode m = radial_mode(2);
        CHECK(std::abs(m.d1(1.0)) < 1e-14);
        CHECK(m.value(0.5) == doctest::Approx(oracle::bessel_j(0, m.k * 0.5)).epsilon(1e-13));
        CHECK(m.d1(0.0) == 0.0);
    }

    TEST_CASE("chord data") {
        ChordData c = chord_data(Vec{0.0, 0.0}, Vec{0.3, -0.4});
        CHECK(c.L == doctest::Approx(2.0));
        CHECK(c.A == doctest::Approx(0.0));
        c = chord_data(Vec{0.5, 0.0}, Vec{0.0, 1.0});
        CHECK(c.L == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
        CHECK(c.A == doctest::Approx(M_PI / 6.0).epsilon(1e-14));
        const ChordData a = chord_data(Vec{0.2, -0.4}, Vec{1.0, 0.7});
        const ChordData b = chord_data(Vec{0.2, -0.4}, Vec{7.0, 4.9});
        CHECK(a.L == doctest::Approx(b.L).epsilon(1e-15));
        CHECK(a.A == doctest::Approx(b.A).epsilon(1e-15));
        CHECK(chord_data(Vec{0.5, 0.0}, Vec{0.0, 10.0}).k == 6);
    }

    TEST_CASE("distance to the boundary along a chord") {
        CHECK(trajectory_boundary_distance(2.0) == 1.0);
        CHECK(trajectory_boundary_distance(std::sqrt(3.0)) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(trajectory_boundary_distance(0.02) == doctest::Approx(oracle::kDistanceL002).epsilon(1e-14));
        CHECK(trajectory_boundary_distance(0.02) == doctest::Approx(oracle::boundary_distance(0.02)).epsilon(1e-14));
        CHECK_THROWS_AS(trajectory_boundary_distance(0.0), ArgumentError);
        CHECK_THROWS_AS(trajectory_boundary_distance(2.5), ArgumentError);
    }

    TEST_CASE("inverse chord envelope is finite for every family member") {
        for (int k = 0; k < kNeumannFamilySize; ++k) {
            const InverseChordFit f = fit_inverse_chord_bound(neumann_family(k, 2), 10000, 5);
            CHECK(f.finite);
            CHECK(f.samples == 10000);
            CHECK(std::isfinite(f.C));
        }
    }
}
