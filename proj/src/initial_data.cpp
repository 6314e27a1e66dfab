#include "kdl/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kdl/endpoint_calculus.hpp"

namespace kdl {
namespace {

Vec center_of(const InitialSpec& spec, int d) {
    Vec c(d);
    for (int i = 0; i < std::min(d, spec.center.dim()); ++i) c[i] = spec.center[i];
    return c;
}

double bump_norm(int d, double w) {
    return d == 2 ? 3.0 / (std::numbers::pi * w * w) : 105.0 / (32.0 * std::numbers::pi * w * w * w);
}

Vec uniform_in_ball(Rng& rng, int d, double radius) {
    Vec u(d);
    double n = 0.0;
    while (!(n > 1e-12)) {
        for (int i = 0; i < d; ++i) u[i] = rng.normal();
        n = norm(u);
    }
    return (radius * std::pow(rng.uniform(), 1.0 / d) / n) * u;
}

// Integral of u1 * r^(d-1) dr dOmega from 0 to r (per unit solid angle in d = 3,
// per radian in d = 2).
double eigen_primitive(const RadialMode& m, double r) {
    const double k = m.k;
    if (m.dim == 2) return r * std::cyl_bessel_j(1.0, k * r) / k;
    return std::sin(k * r) / (k * k * k) - r * std::cos(k * r) / (k * k);
}

}  // namespace

bool is_radial(const InitialSpec& spec) {
    if (spec.density == "uniform" || spec.density == "eigenmode") return true;
    return squared_norm(spec.center) == 0.0;
}

void validate(const InitialSpec& spec, const Domain& domain, BoundaryMode mode) {
    const int d = domain.dim();
    if (!(spec.mass > 0.0)) throw ArgumentError("mass must be positive");
    if (spec.velocity != "maxwellian" && spec.velocity != "scaled")
        throw ArgumentError("unknown velocity law '" + spec.velocity + "'");
    if (spec.velocity == "scaled" && !(spec.velocity_variance > 0.0))
        throw ArgumentError("velocity variance must be positive");
    const bool free = mode == BoundaryMode::FreeSpace;
    if (spec.density == "uniform") {
        if (free) throw ArgumentError("uniform density is not normalizable in free space");
    } else if (spec.density == "bump") {
        if (!(spec.width > 0.0)) throw ArgumentError("bump width must be positive");
        if (!free) {
            const Vec c = center_of(spec, d);
            if (domain.is_ball()) {
                if (norm(c) + spec.width > 1.0 + 1e-12) throw ArgumentError("bump support leaves the domain");
            } else {
                Rng rng(7, 0);
                for (int s = 0; s < 2000; ++s) {
                    Vec u(d);
                    for (int i = 0; i < d; ++i) u[i] = rng.normal();
                    if (domain.zeta(c + (spec.width / norm(u)) * u) > 0.0)
                        throw ArgumentError("bump support leaves the domain");
                }
            }
        }
    } else if (spec.density == "eigenmode") {
        if (free || !domain.is_ball()) throw ArgumentError("eigenmode density needs the unit ball");
        const double umin = radial_mode(d).min_value();
        if (1.0 + spec.amplitude < 0.0 || 1.0 + spec.amplitude * umin < 0.0)
            throw ArgumentError("eigenmode amplitude makes the density negative");
    } else if (spec.density == "gaussian") {
        if (!free) throw ArgumentError("gaussian density is only available in free space");
        if (!(spec.sigma > 0.0)) throw ArgumentError("gaussian sigma must be positive");
    } else {
        throw ArgumentError("unknown initial density '" + spec.density + "'");
    }
}

double initial_density(const InitialSpec& spec, const Domain& domain, const Vec& x) {
    const int d = x.dim();
    if (spec.density == "uniform") return domain.zeta(x) <= 0.0 ? spec.mass / domain.volume() : 0.0;
    if (spec.density == "bump") {
        const double s2 = squared_norm(x - center_of(spec, d)) / (spec.width * spec.width);
        if (s2 >= 1.0) return 0.0;
        return spec.mass * bump_norm(d, spec.width) * (1.0 - s2) * (1.0 - s2);
    }
    if (spec.density == "eigenmode") {
        const double r = norm(x);
        if (r > 1.0) return 0.0;
        return spec.mass / domain.volume() * (1.0 + spec.amplitude * radial_mode(d).value(r));
    }
    if (spec.density == "gaussian") {
        const double s2 = spec.sigma * spec.sigma;
        const double q = squared_norm(x - center_of(spec, d));
        return spec.mass * std::exp(-0.5 * q / s2) / std::pow(2.0 * std::numbers::pi * s2, 0.5 * d);
    }
    throw ArgumentError("unknown initial density '" + spec.density + "'");
}

Vec sample_position(const InitialSpec& spec, const Domain& domain, BoundaryMode mode, Rng& rng) {
    const int d = domain.dim();
    if (spec.density == "uniform") {
        if (domain.is_ball()) return uniform_in_ball(rng, d, 1.0);
        const double R = domain.bounding_radius();
        for (;;) {
            Vec x(d);
            for (int i = 0; i < d; ++i) x[i] = R * (2.0 * rng.uniform() - 1.0);
            if (domain.zeta(x) < 0.0) return x;
        }
    }
    if (spec.density == "bump") {
        const Vec c = center_of(spec, d);
        for (;;) {
            const Vec y = uniform_in_ball(rng, d, spec.width);
            const double s2 = squared_norm(y) / (spec.width * spec.width);
            if (rng.uniform() < (1.0 - s2) * (1.0 - s2)) return c + y;
        }
    }
    if (spec.density == "eigenmode") {
        static thread_local RadialMode mode2 = radial_mode(2), mode3 = radial_mode(3);
        const RadialMode& m = d == 2 ? mode2 : mode3;
        const double a = spec.amplitude;
        const double top = std::max(1.0 + a, 1.0 + a * m.min_value());
        for (;;) {
            const Vec x = uniform_in_ball(rng, d, 1.0);
            if (rng.uniform() * top < 1.0 + a * m.value(norm(x))) return x;
        }
    }
    if (spec.density == "gaussian") {
        Vec x = center_of(spec, d);
        for (int i = 0; i < d; ++i) x[i] += spec.sigma * rng.normal();
        return x;
    }
    (void)mode;
    throw ArgumentError("unknown initial density '" + spec.density + "'");
}

Vec sample_velocity(const InitialSpec& spec, int dim, Rng& rng) {
    const double s = spec.velocity == "scaled" ? std::sqrt(spec.velocity_variance) : 1.0;
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = s * rng.normal();
    return v;
}

ScalarField project_initial(const InitialSpec& spec, const Mesh& mesh, int quadrature) {
    if (mesh.empty()) throw ArgumentError("empty mesh");
    if (quadrature < 1) throw ArgumentError("quadrature order must be positive");
    const int d = mesh.dim();
    const bool free = mesh.kind() == MeshKind::Cartesian;
    const Domain ball = Domain::unit_ball(d);
    validate(spec, ball, free ? BoundaryMode::FreeSpace : BoundaryMode::Reflecting);
    if (mesh.kind() == MeshKind::Radial && !is_radial(spec))
        throw ArgumentError("radial mesh needs radially symmetric initial data");
    if (spec.density == "gaussian" && free) return gaussian_heat_solution(spec, mesh, 0.0);

    ScalarField out(mesh);
    if (spec.density == "uniform") {
        std::fill(out.values.begin(), out.values.end(), spec.mass / ball.volume());
        return out;
    }
    if (spec.density == "eigenmode") {
        const RadialMode m = radial_mode(d);
        const double base = spec.mass / ball.volume();
        for (int c = 0; c < mesh.size(); ++c) {
            const Mesh::Box b = mesh.bounds(c);
            const double angular = mesh.kind() == MeshKind::Polar ? (b.b1 - b.b0) : (d == 2 ? 2.0 : 4.0) * std::numbers::pi;
            const double integral = angular * (eigen_primitive(m, b.a1) - eigen_primitive(m, b.a0));
            out.values[c] = base * (1.0 + spec.amplitude * integral / mesh.volume(c));
        }
        return out;
    }

    // Midpoint quadrature in the cell's own coordinates.
    const int q = quadrature;
    for (int c = 0; c < mesh.size(); ++c) {
        const Mesh::Box b = mesh.bounds(c);
        double acc = 0.0, wsum = 0.0;
        for (int a = 0; a < q; ++a) {
            const double s = b.a0 + (a + 0.5) * (b.a1 - b.a0) / q;
            for (int e = 0; e < q; ++e) {
                const double t = b.b0 + (e + 0.5) * (b.b1 - b.b0) / q;
                Vec x(d);
                double w = 1.0;
                if (mesh.kind() == MeshKind::Cartesian) {
                    x[0] = s;
                    x[1] = t;
                } else if (mesh.kind() == MeshKind::Polar || d == 2) {
                    x[0] = s * std::cos(t);
                    x[1] = s * std::sin(t);
                    w = s;
                } else {
                    x[0] = s;
                    w = s * s;
                }
                acc += w * initial_density(spec, ball, x);
                wsum += w;
            }
        }
        out.values[c] = acc / wsum;
    }
    return out;
}

ScalarField gaussian_heat_solution(const InitialSpec& spec, const Mesh& mesh, double t) {
    if (mesh.kind() != MeshKind::Cartesian) throw ArgumentError("gaussian heat solution needs a Cartesian mesh");
    const double s = std::sqrt(spec.sigma * spec.sigma + 2.0 * t);
    const Vec c = center_of(spec, 2);
    auto cdf = [&](double a, double mu) { return 0.5 * std::erfc(-(a - mu) / (s * std::numbers::sqrt2)); };
    ScalarField out(mesh);
    for (int k = 0; k < mesh.size(); ++k) {
        const Mesh::Box b = mesh.bounds(k);
        const double px = cdf(b.a1, c[0]) - cdf(b.a0, c[0]);
        const double py = cdf(b.b1, c[1]) - cdf(b.b0, c[1]);
        out.values[k] = spec.mass * px * py / mesh.volume(k);
    }
    return out;
}

}  // namespace kdl
