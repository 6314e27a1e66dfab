#include <doctest.h>

#include <cmath>

#include "kdl/errors.hpp"
#include "kdl/geometry.hpp"
#include "kdl/rng.hpp"

using namespace kdl;

namespace {

// zeta(x) = |x|^2/4 - 1, a radius-2 ball given only as a level set.
class RadiusTwo final : public LevelSet {
public:
    int dim() const override { return 2; }
    double value(const Vec& x) const override { return squared_norm(x) / 4.0 - 1.0; }
    Vec gradient(const Vec& x) const override { return x / 2.0; }
    Mat hessian(const Vec&) const override { return Mat::identity(2) * 0.5; }
    double convexity_constant() const override { return 0.5; }
    double bounding_radius() const override { return 2.0; }
    std::string name() const override { return "radius-two"; }
};

Vec random_unit(Rng& rng, int d) {
    Vec u(d);
    for (int i = 0; i < d; ++i) u[i] = rng.normal();
    return u / norm(u);
}

}  // namespace

TEST_SUITE("geometry") {
    TEST_CASE("normals") {
        const Domain ball = Domain::unit_ball(2);
        CHECK(max_abs_diff(ball.normal_at(Vec{1.0, 0.0}), Vec{1.0, 0.0}) == 0.0);
        CHECK(max_abs_diff(ball.normal_at(Vec{0.0, -1.0}), Vec{0.0, -1.0}) == 0.0);
        const Domain two = Domain::level_set(std::make_shared<RadiusTwo>());
        CHECK(max_abs_diff(two.normal_at(Vec{2.0, 0.0}), Vec{1.0, 0.0}) < 1e-15);
        CHECK_THROWS_AS(ball.normal_at(Vec{0.5, 0.0}), DomainError);

        Rng rng(3, 0);
        for (int i = 0; i < 1000; ++i) {
            const Vec x = random_unit(rng, 3);
            CHECK(std::abs(norm(Domain::unit_ball(3).normal_at(x)) - 1.0) < 1e-14);
        }
    }

    TEST_CASE("reflect") {
        const Domain ball = Domain::unit_ball(2);
        const Vec x{1.0, 0.0};
        CHECK(max_abs_diff(ball.reflect(x, Vec{1.0, 0.0}), Vec{-1.0, 0.0}) == 0.0);
        CHECK(max_abs_diff(ball.reflect(x, Vec{0.0, 1.0}), Vec{0.0, 1.0}) == 0.0);
        CHECK(max_abs_diff(ball.reflect(x, Vec{1.0, 1.0}), Vec{-1.0, 1.0}) == 0.0);
        Rng rng(4, 0);
        for (int i = 0; i < 1000; ++i) {
            const Vec p = random_unit(rng, 2);
            const Vec v = 3.0 * random_unit(rng, 2);
            CHECK(std::abs(norm(ball.reflect(p, v)) - norm(v)) < 1e-15 * 3.0 * 4);
        }
    }

    TEST_CASE("classify") {
        const Domain ball = Domain::unit_ball(2);
        const Vec x{1.0, 0.0};
        BoundaryClass c = ball.classify(x, Vec{1.0, 0.0});
        CHECK(c.kind == BoundaryKind::Outgoing);
        CHECK(c.value == 1.0);
        c = ball.classify(x, Vec{-1.0, 0.0});
        CHECK(c.kind == BoundaryKind::Incoming);
        CHECK(c.value == -1.0);
        c = ball.classify(x, Vec{0.0, 1.0});
        CHECK(c.kind == BoundaryKind::Grazing);
        CHECK(c.value == 0.0);
    }

    TEST_CASE("ray_exit examples") {
        const Domain ball = Domain::unit_ball(2);
        RayExit e = ball.ray_exit(Vec{0.0, 0.0}, Vec{1.0, 0.0});
        CHECK(e.s == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(max_abs_diff(e.x, Vec{1.0, 0.0}) < 1e-15);
        e = ball.ray_exit(Vec{0.5, 0.0}, Vec{1.0, 0.0});
        CHECK(e.s == doctest::Approx(0.5).epsilon(1e-15));
        e = ball.ray_exit(Vec{0.5, 0.0}, Vec{0.0, 1.0});
        CHECK(e.s == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
        CHECK(max_abs_diff(e.x, Vec{0.5, std::sqrt(0.75)}) < 1e-15);
    }

    TEST_CASE("ray_exit then classify") {
        const Domain ball = Domain::unit_ball(2);
        Rng rng(5, 0);
        for (int i = 0; i < 500; ++i) {
            const Vec x = 0.9 * std::sqrt(rng.uniform()) * random_unit(rng, 2);
            const Vec w = random_unit(rng, 2);
            const RayExit e = ball.ray_exit(x, w);
            CHECK(ball.classify(e.x, w).kind == BoundaryKind::Outgoing);
            CHECK(ball.classify(e.x, ball.reflect(e.x, w)).kind == BoundaryKind::Incoming);
        }
    }

    TEST_CASE("closed form and root finder agree") {
        for (int d : {2, 3}) {
            const Domain ball = Domain::unit_ball(d);
            const Domain ls = Domain::level_set(std::make_shared<Ellipsoid>(std::vector<double>(d, 1.0)));
            Rng rng(6, d);
            double worst = 0.0;
            for (int i = 0; i < 10000; ++i) {
                const Vec x = std::pow(rng.uniform(), 1.0 / d) * random_unit(rng, d);
                const Vec w = random_unit(rng, d);
                worst = std::max(worst, max_abs_diff(ball.ray_exit(x, w).x, ls.ray_exit(x, w).x));
            }
            CHECK(worst < 1e-10);
        }
    }

    TEST_CASE("level-set assumptions") {
        const Domain ell = Domain::builtin("ellipse", 2, {1.5, 0.8});
        const LevelSetCheck c = verify_level_set(ell, 2000, 1);
        CHECK(c.ok);
        CHECK(c.min_hessian_ratio >= 1.0);
        CHECK(c.min_gradient_norm > 0.0);
        CHECK(verify_level_set(Domain::unit_ball(3), 2000, 2).ok);
        CHECK(ell.zeta(Vec{0.0, 0.0}) < 0.0);
        CHECK(std::abs(ell.zeta(Vec{1.5, 0.0})) < 1e-15);
        CHECK(ell.volume() == doctest::Approx(M_PI * 1.5 * 0.8));
    }

    TEST_CASE("bad input") {
        CHECK_THROWS_AS(Domain::unit_ball(4), ArgumentError);
        CHECK_THROWS_AS(Domain::builtin("torus", 2), ArgumentError);
        CHECK_THROWS_AS(Domain::builtin("ellipse", 2, {1.0, -1.0}), ArgumentError);
    }
}
