#include <doctest.h>

#include <cmath>

#include "kdl/billiards.hpp"
#include "kdl/errors.hpp"
#include "kdl/rng.hpp"
#include "oracles.hpp"

using namespace kdl;

namespace {

Vec random_disk(Rng& rng, int d = 2) {
    Vec u(d);
    for (int i = 0; i < d; ++i) u[i] = rng.normal();
    return (std::pow(rng.uniform(), 1.0 / d) / norm(u)) * u;
}

Vec random_velocity(Rng& rng, double vmax, int d = 2) {
    Vec u(d);
    for (int i = 0; i < d; ++i) u[i] = rng.normal();
    return (vmax * (1.0 - rng.uniform()) / norm(u)) * u;
}

}  // namespace

TEST_SUITE("billiards") {
    const Domain disk = Domain::unit_ball(2);

    TEST_CASE("specular cycle examples") {
        SpecularCycle c = specular_cycle(disk, Vec{0.0, 0.0}, Vec{0.5, 0.0});
        CHECK(c.n == 0);
        CHECK(c.velocities.size() == 1);

        c = specular_cycle(disk, Vec{0.0, 0.0}, Vec{3.0, 0.0});
        REQUIRE(c.n == 2);
        CHECK(c.arc[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(c.arc[1] == doctest::Approx(3.0).epsilon(1e-14));
        const auto tau = c.breakpoints();
        CHECK(tau[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
        CHECK(tau[2] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(max_abs_diff(c.points[0], Vec{1.0, 0.0}) < 1e-14);
        CHECK(max_abs_diff(c.points[1], Vec{-1.0, 0.0}) < 1e-14);
        const oracle::March m = oracle::march_disk(Vec{0.0, 0.0}, Vec{3.0, 0.0});
        CHECK(m.n == 2);
        CHECK(std::abs(m.arcs[0] - 1.0) < 1e-5);
        CHECK(std::abs(m.arcs[1] - 3.0) < 1e-5);

        c = specular_cycle(disk, Vec{0.5, 0.0}, Vec{0.0, 10.0});
        for (long i = 1; i < c.n; ++i) CHECK(c.arc[i] - c.arc[i - 1] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    }

    TEST_CASE("endpoint examples") {
        CHECK(max_abs_diff(endpoint(disk, Vec{0.3, 0.2}, Vec{0.1, -0.1}).eta, Vec{0.4, 0.1}) < 1e-16);
        CHECK(max_abs_diff(endpoint(disk, Vec{0.0, 0.0}, Vec{3.0, 0.0}).eta, Vec{-1.0, 0.0}) < 1e-14);
        // One more diameter after reaching (-1, 0) covers 1 of its 2 units: the center.
        CHECK(max_abs_diff(endpoint(disk, Vec{0.0, 0.0}, Vec{4.0, 0.0}).eta, Vec{0.0, 0.0}) < 1e-14);
        CHECK(max_abs_diff(oracle::march_disk(Vec{0.0, 0.0}, Vec{4.0, 0.0}).eta, Vec{0.0, 0.0}) < 1e-5);
        const Vec vh = Vec{0.6, 0.8};
        CHECK(max_abs_diff(endpoint(disk, Vec{0.0, 0.0}, 3.0 * vh).eta, -1.0 * vh) < 1e-14);
        CHECK(max_abs_diff(endpoint(disk, Vec{0.0, 0.0}, 5.0 * vh).eta, vh) < 1e-14);
        const EndpointResult r = endpoint(disk, Vec{0.5, 0.0}, Vec{0.0, std::sqrt(0.75)});
        CHECK(max_abs_diff(r.eta, Vec{0.5, std::sqrt(0.75)}) < 1e-15);
    }

    TEST_CASE("rotation of successive directions") {
        const SpecularCycle c = specular_cycle(disk, Vec{0.5, 0.0}, Vec{0.0, 5.0});
        const oracle::March m = oracle::march_disk(Vec{0.5, 0.0}, Vec{0.0, 5.0});
        REQUIRE(c.n == m.n);
        const double A = std::acos(std::sqrt(3.0) / 2.0);
        CHECK(A == doctest::Approx(M_PI / 6.0));
        for (long i = 1; i <= c.n; ++i) {
            const Vec w = c.velocities[i] / 5.0;
            const double ang = (M_PI - 2.0 * A) * static_cast<double>(i);
            const Vec expect{-std::sin(ang), std::cos(ang)};
            CHECK(max_abs_diff(w, expect) < 1e-12);
            CHECK(max_abs_diff(m.directions[i], expect) < 1e-6);
        }
    }

    TEST_CASE("reflection counts") {
        CHECK(reflection_count(disk, Vec{0.0, 0.0}, Vec{0.5, 0.0}) == 0);
        CHECK(reflection_count(disk, Vec{0.0, 0.0}, Vec{0.0, 3.0}) == 2);
        CHECK(reflection_count(disk, Vec{0.5, 0.0}, Vec{0.0, 10.0}) == 6);
        CHECK(oracle::march_disk(Vec{0.5, 0.0}, Vec{0.0, 10.0}).n == 6);
    }

    TEST_CASE("cycle invariants") {
        Rng rng(11, 0);
        for (int i = 0; i < 200; ++i) {
            const Vec x = random_disk(rng);
            const Vec v = random_velocity(rng, 40.0);
            const SpecularCycle c = specular_cycle(disk, x, v);
            const double sp = norm(v);
            for (const Vec& w : c.velocities) CHECK(std::abs(norm(w) - sp) <= 1e-12 * sp);
            for (long k = 0; k < c.n; ++k) {
                CHECK(std::abs(norm(c.points[k]) - 1.0) < 1e-12);
                const Vec n = c.points[k];
                const Vec refl = c.velocities[k] - (2.0 * dot(c.velocities[k], n)) * n;
                CHECK(max_abs_diff(refl, c.velocities[k + 1]) < 1e-12 * sp);
            }
            const auto tau = c.breakpoints();
            for (std::size_t k = 1; k < tau.size(); ++k) CHECK(tau[k] > tau[k - 1]);
            if (!tau.empty()) CHECK(tau.back() <= 1.0);
        }
    }

    TEST_CASE("analytic and generic agree, also against marching") {
        Rng rng(12, 0);
        double worst = 0.0, worst_march = 0.0;
        for (int i = 0; i < 2000; ++i) {
            const Vec x = random_disk(rng);
            const Vec v = random_velocity(rng, 10.0);
            const Vec a = disk_endpoint_analytic(x, v).eta;
            worst = std::max(worst, max_abs_diff(a, endpoint(disk, x, v).eta));
            if (i < 200) worst_march = std::max(worst_march, max_abs_diff(a, oracle::march_disk(x, v).eta));
        }
        CHECK(worst <= 1e-10);
        CHECK(worst_march <= 1e-5);
    }

    TEST_CASE("plane confinement in the 3-d ball") {
        const Domain ball = Domain::unit_ball(3);
        Rng rng(13, 0);
        for (int i = 0; i < 300; ++i) {
            const Vec x = random_disk(rng, 3);
            const Vec v = random_velocity(rng, 20.0, 3);
            const Vec nrm = cross3(x, v);
            const double nn = norm(nrm);
            if (nn < 1e-6) continue;
            const SpecularCycle c = specular_cycle(ball, x, v);
            for (const Vec& p : c.points) CHECK(std::abs(dot(p, nrm)) / nn < 1e-10);
            const Vec eta = endpoint(ball, x, v).eta;
            CHECK(std::abs(dot(eta, nrm)) / nn < 1e-10);
            CHECK(max_abs_diff(eta, disk_endpoint_analytic(x, v).eta) < 1e-10);
        }
    }

    TEST_CASE("short flight is exact") {
        Rng rng(14, 0);
        for (int i = 0; i < 2000; ++i) {
            const Vec x = random_disk(rng);
            Vec v = random_velocity(rng, 1.0);
            const double room = 1.0 - norm(x);
            if (norm(v) >= room) v *= 0.999 * room / norm(v);
            const Vec expect = x + v;
            CHECK(endpoint(disk, x, v).eta == expect);
            CHECK(disk_endpoint_analytic(x, v).eta == expect);
        }
    }

    TEST_CASE("chord homogeneity through the cycle") {
        const SpecularCycle a = specular_cycle(disk, Vec{0.3, -0.2}, Vec{1.0, 2.0});
        const SpecularCycle b = specular_cycle(disk, Vec{0.3, -0.2}, Vec{7.0, 14.0});
        REQUIRE(a.n >= 1);
        REQUIRE(b.n >= 2);
        CHECK(a.arc[0] == doctest::Approx(b.arc[0]).epsilon(1e-12));
        CHECK(b.arc[1] - b.arc[0] == doctest::Approx(b.arc[b.n - 1] - b.arc[b.n - 2]).epsilon(1e-10));
    }

    TEST_CASE("errors") {
        CHECK_THROWS_AS(specular_cycle(disk, Vec{1.0, 0.0}, Vec{0.0, 1.0}), GrazingError);
        CHECK_THROWS_AS(specular_cycle(disk, Vec{0.0, 0.0}, Vec{100.0, 0.0}, 10), RunawayError);
        CHECK_THROWS_AS(endpoint(disk, Vec{1.5, 0.0}, Vec{0.0, 1.0}), DomainError);
        // Outgoing boundary start reflects at once.
        const SpecularCycle c = specular_cycle(disk, Vec{1.0, 0.0}, Vec{1.0, 0.0});
        CHECK(c.velocities[1][0] == doctest::Approx(-1.0));
    }

    TEST_CASE("near grazing is flagged") {
        const EndpointResult r = disk_endpoint_analytic(Vec{1.0, 0.0}, Vec{-1e-9, 1.0});
        CHECK(r.cycle.near_grazing);
        CHECK(norm(r.eta) <= 1.0 + 1e-12);
        CHECK_THROWS_AS(endpoint(disk, Vec{1.0, 0.0}, Vec{-1e-9, 1.0}), RunawayError);
        CHECK_FALSE(disk_endpoint_analytic(Vec{0.0, 0.0}, Vec{3.0, 0.0}).cycle.near_grazing);
    }

    TEST_CASE("physical time") {
        CHECK(physical_time(0.0) == 0.0);
        CHECK(physical_time(1.0 - std::exp(-2.0)) == doctest::Approx(2.0));
    }
}
