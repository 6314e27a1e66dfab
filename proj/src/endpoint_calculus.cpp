#include "kdl/endpoint_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>

#include "kdl/rng.hpp"

namespace kdl {
namespace {

constexpr double kFdStep = 1e-4;
constexpr double kFdMinStep = 1e-6;

TraceOut<double> end_point_double(const Domain& dom, const Vec& x, const Vec& v) {
    if (dom.is_ball()) {
        detail::check_phase_point(dom, x, v);
        return *disk_analytic_t(x, v, nullptr, kDefaultReflectionCap);
    }
    return trace_t(dom, x, v, kDefaultReflectionCap, nullptr);
}

TraceOut<Jet> end_point_jet(const Domain& dom, const VecN<Jet>& x, const VecN<Jet>& v) {
    if (dom.is_ball()) {
        if (auto out = disk_analytic_t(x, v, nullptr, kDefaultReflectionCap)) return *out;
    }
    return trace_t(dom, x, v, kDefaultReflectionCap, nullptr);
}

EndpointDerivatives analytic_derivatives(const Domain& dom, const Vec& x, const Vec& v) {
    detail::check_phase_point(dom, x, v);
    const int d = dom.dim();
    EndpointDerivatives out;
    out.J = Mat(d);
    out.lap = Vec(d);
    const VecN<Jet> xj = lift<Jet>(x);
    for (int i = 0; i < d; ++i) {
        VecN<Jet> vj = lift<Jet>(v);
        vj[i].d1 = 1.0;
        const TraceOut<Jet> r = end_point_jet(dom, xj, vj);
        for (int k = 0; k < d; ++k) {
            out.J(k, i) = r.eta[k].d1;
            out.lap[k] += r.eta[k].d2;
        }
        if (i == 0) {
            out.eta = values(r.eta);
            out.n = r.n;
            out.near_grazing = r.near_grazing;
        }
    }
    return out;
}

EndpointDerivatives fd_derivatives(const Domain& dom, const Vec& x, const Vec& v) {
    const int d = dom.dim();
    const TraceOut<double> base = end_point_double(dom, x, v);
    const double speed = norm(v);

    // Distance in path length from the end point to the nearest breakpoint,
    // behind (last reflection) or ahead (next boundary hit).
    double behind = base.n > 0 ? speed - base.last_arc : std::numeric_limits<double>::infinity();
    double ahead = std::numeric_limits<double>::infinity();
    if (speed > 0.0) {
        ahead = dom.zeta(base.eta) >= -kBoundaryTol ? 0.0 : dom.exit_distance(base.eta, base.dir, false);
    }
    const double gap = std::min(behind, ahead);
    const double tau_near = speed > 0.0 ? (behind <= ahead ? base.last_arc / speed : (speed + ahead) / speed) : 0.0;
    const double h = std::min(kFdStep, gap / 20.0);
    if (!(h >= kFdMinStep) || gap < 10.0 * h)
        throw DiscontinuityError("finite-difference stencil too close to a reflection breakpoint", tau_near);

    EndpointDerivatives out;
    out.eta = base.eta;
    out.n = base.n;
    out.near_grazing = base.near_grazing;
    out.h = h;
    out.J = Mat(d);
    out.lap = Vec(d);
    const double offsets[4] = {-2.0, -1.0, 1.0, 2.0};
    for (int i = 0; i < d; ++i) {
        Vec f[4];
        for (int s = 0; s < 4; ++s) {
            Vec vs = v;
            vs[i] += offsets[s] * h;
            const TraceOut<double> r = end_point_double(dom, x, vs);
            if (r.n != base.n)
                throw DiscontinuityError("finite-difference stencil straddles a change in reflection count", tau_near);
            f[s] = r.eta;
        }
        for (int k = 0; k < d; ++k) {
            out.J(k, i) = (f[0][k] - 8.0 * f[1][k] + 8.0 * f[2][k] - f[3][k]) / (12.0 * h);
            out.lap[k] +=
                (-f[0][k] + 16.0 * f[1][k] - 30.0 * base.eta[k] + 16.0 * f[2][k] - f[3][k]) / (12.0 * h * h);
        }
    }
    return out;
}

Vec random_unit(Rng& rng, int d) {
    Vec u(d);
    for (;;) {
        for (int i = 0; i < d; ++i) u[i] = rng.normal();
        const double n = norm(u);
        if (n > 1e-12) return u / n;
    }
}

Mat radial_hessian(const Vec& x, double r, double f2, double f1_over_r) {
    const int d = x.dim();
    if (r == 0.0) return Mat::identity(d) * f2;
    const Vec xh = x / r;
    const Mat P = Mat::outer(xh, xh);
    return P * f2 + (Mat::identity(d) - P) * f1_over_r;
}

}  // namespace

EndpointDerivatives endpoint_derivatives(const Domain& domain, const Vec& x, const Vec& v, DerivMode mode) {
    if (mode == DerivMode::Analytic) return analytic_derivatives(domain, x, v);
    return fd_derivatives(domain, x, v);
}

// ---------------------------------------------------------------------------

double neumann_defect(const TestFunction& psi, int samples, double t, std::uint64_t seed) {
    Rng rng(seed, 0x5eed);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const Vec n = random_unit(rng, psi.dim);
        worst = std::max(worst, std::abs(dot(psi.gradient(t, n), n)));
    }
    return worst;
}

TestFunction make_test_function(std::string name, int dim, std::function<double(double, const Vec&)> value,
                                std::function<Vec(double, const Vec&)> gradient,
                                std::function<Mat(double, const Vec&)> hessian,
                                std::function<double(double, const Vec&)> dt) {
    TestFunction psi;
    psi.name = std::move(name);
    psi.dim = dim;
    psi.value = std::move(value);
    psi.gradient = std::move(gradient);
    psi.hessian = std::move(hessian);
    psi.dt = std::move(dt);
    psi.neumann_ok = neumann_defect(psi, 1000, 0.0) <= 1e-12;
    return psi;
}

RadialMode radial_mode(int dim) {
    if (dim == 2) return {2, boost::math::cyl_bessel_j_zero(1.0, 1)};
    if (dim == 3) {
        // u1'(1) = 0  <=>  tan k = k
        auto f = [](double k) {
            return std::make_tuple(std::sin(k) - k * std::cos(k), k * std::sin(k));
        };
        std::uintmax_t iters = 50;
        const double k = boost::math::tools::newton_raphson_iterate(f, 4.49, 4.2, 4.7, 52, iters);
        return {3, k};
    }
    throw ArgumentError("dimension must be 2 or 3");
}

double RadialMode::value(double r) const {
    const double z = k * r;
    return dim == 2 ? std::cyl_bessel_j(0.0, z) : std::sph_bessel(0, z);
}

double RadialMode::d1(double r) const {
    const double z = k * r;
    return -k * (dim == 2 ? std::cyl_bessel_j(1.0, z) : std::sph_bessel(1, z));
}

namespace {

// u1'(r)/r, finite at the origin.
double d1_over_r(const RadialMode& m, double r) {
    const double z = m.k * r;
    if (z < 1e-4) {
        const double c = m.dim == 2 ? 0.5 - z * z / 16.0 : 1.0 / 3.0 - z * z / 30.0;
        return -m.k * m.k * c;
    }
    return m.d1(r) / r;
}

}  // namespace

double RadialMode::d2(double r) const {
    // Radial ODE: u'' + (d-1)/r u' + k^2 u = 0.
    return -k * k * value(r) - (dim - 1) * d1_over_r(*this, r);
}

double RadialMode::min_value() const { return value(1.0); }

TestFunction neumann_family(int index, int dim) {
    if (dim != 2 && dim != 3) throw ArgumentError("dimension must be 2 or 3");
    const auto zero_dt = [](double, const Vec&) { return 0.0; };
    switch (index) {
        case 0:
            return make_test_function(
                "one", dim, [](double, const Vec&) { return 1.0; }, [dim](double, const Vec&) { return Vec(dim); },
                [dim](double, const Vec&) { return Mat(dim); }, zero_dt);
        case 1:
            return make_test_function(
                "bubble", dim,
                [](double, const Vec& x) {
                    const double q = 1.0 - squared_norm(x);
                    return q * q;
                },
                [](double, const Vec& x) { return (-4.0 * (1.0 - squared_norm(x))) * x; },
                [dim](double, const Vec& x) {
                    return Mat::identity(dim) * (-4.0 * (1.0 - squared_norm(x))) + Mat::outer(x, x) * 8.0;
                },
                zero_dt);
        case 2: {
            const RadialMode m = radial_mode(dim);
            const double lam = m.lambda();
            return make_test_function(
                "eigenmode", dim, [m, lam](double t, const Vec& x) { return std::exp(-lam * t) * m.value(norm(x)); },
                [m, lam](double t, const Vec& x) { return (std::exp(-lam * t) * d1_over_r(m, norm(x))) * x; },
                [m, lam](double t, const Vec& x) {
                    const double r = norm(x);
                    return radial_hessian(x, r, m.d2(r), d1_over_r(m, r)) * std::exp(-lam * t);
                },
                [m, lam](double t, const Vec& x) { return -lam * std::exp(-lam * t) * m.value(norm(x)); });
        }
        case 3:
            return make_test_function(
                "x1-bubble", dim,
                [](double, const Vec& x) {
                    const double q = 1.0 - squared_norm(x);
                    return x[0] * q * q;
                },
                [dim](double, const Vec& x) {
                    const double q = 1.0 - squared_norm(x);
                    return (q * q) * Vec::unit(dim, 0) + (-4.0 * q * x[0]) * x;
                },
                [dim](double, const Vec& x) {
                    const double q = 1.0 - squared_norm(x);
                    const Vec e = Vec::unit(dim, 0);
                    const Vec g = (-4.0 * q) * x;
                    const Mat hg = Mat::identity(dim) * (-4.0 * q) + Mat::outer(x, x) * 8.0;
                    return Mat::outer(e, g) + Mat::outer(g, e) + hg * x[0];
                },
                zero_dt);
        default:
            throw ArgumentError("neumann_family index out of range");
    }
}

TestFunction with_time_factor(const TestFunction& psi, double T) {
    if (!(T > 0.0)) throw ArgumentError("final time must be positive");
    TestFunction out = psi;
    out.name = psi.name + "*theta";
    out.value = [psi, T](double t, const Vec& x) { return (1.0 - t / T) * psi.value(t, x); };
    out.gradient = [psi, T](double t, const Vec& x) { return (1.0 - t / T) * psi.gradient(t, x); };
    out.hessian = [psi, T](double t, const Vec& x) { return psi.hessian(t, x) * (1.0 - t / T); };
    out.dt = [psi, T](double t, const Vec& x) {
        return -psi.value(t, x) / T + (1.0 - t / T) * psi.dt(t, x);
    };
    return out;
}

double test_function_laplacian(const Domain& domain, const TestFunction& psi, double t, const Vec& x, const Vec& u) {
    if (!psi.neumann_ok) throw ContractError("test function '" + psi.name + "' fails the Neumann condition");
    if (psi.dim != domain.dim()) throw ArgumentError("test function dimension mismatch");
    return test_function_laplacian(analytic_derivatives(domain, x, u), psi, t);
}

double test_function_laplacian(const EndpointDerivatives& d, const TestFunction& psi, double t) {
    if (!psi.neumann_ok) throw ContractError("test function '" + psi.name + "' fails the Neumann condition");
    const Mat JJt = d.J * d.J.transposed();
    return dot(d.lap, psi.gradient(t, d.eta)) + (JJt * psi.hessian(t, d.eta)).trace();
}

// ---------------------------------------------------------------------------

double chord_length(const Vec& x, const Vec& v) {
    const double speed = norm(v);
    if (!(speed > 0.0)) throw ArgumentError("velocity must be nonzero");
    const double b = dot(x, v) / speed;
    return 2.0 * std::sqrt(std::max(0.0, b * b + 1.0 - squared_norm(x)));
}

ChordData chord_data(const Vec& x, const Vec& v) {
    const double L = chord_length(x, v);
    const double A = std::acos(std::min(1.0, L / 2.0));
    const long k = disk_analytic_t(x, v, nullptr, kDefaultReflectionCap)->n;
    return {L, A, k};
}

double trajectory_boundary_distance(double L) {
    if (!(L > 0.0 && L <= 2.0)) throw ArgumentError("chord length must lie in (0, 2]");
    const double q = 0.25 * L * L;
    return q / (1.0 + std::sqrt(1.0 - q));
}

InverseChordFit fit_inverse_chord_bound(const TestFunction& psi, int samples, std::uint64_t seed, double max_speed) {
    const Domain dom = Domain::unit_ball(psi.dim);
    Rng rng(seed, 0xc0de);
    std::vector<double> ys, Ls;
    ys.reserve(samples);
    Ls.reserve(samples);
    while (static_cast<int>(ys.size()) < samples) {
        // Uniform in the shell 0.9 <= |x| < 1.
        const double inner = std::pow(0.9, psi.dim);
        const double r = std::pow(inner + (1.0 - inner) * rng.uniform(), 1.0 / psi.dim);
        const Vec x = r * random_unit(rng, psi.dim);
        const Vec v = (max_speed * rng.uniform_open0()) * random_unit(rng, psi.dim);
        EndpointDerivatives d;
        try {
            d = analytic_derivatives(dom, x, v);
        } catch (const GrazingError&) {
            continue;
        }
        if (d.near_grazing) continue;
        ys.push_back(std::abs(dot(d.lap, psi.gradient(0.0, d.eta))));
        Ls.push_back(chord_data(x, v).L);
    }
    InverseChordFit fit{0.0, 0.0, 0.0, samples, true};
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (Ls[i] >= 1.0) fit.C0 = std::max(fit.C0, ys[i]);
        fit.max_ratio = std::max(fit.max_ratio, ys[i] * Ls[i]);
    }
    for (std::size_t i = 0; i < ys.size(); ++i) fit.C = std::max(fit.C, (ys[i] - fit.C0) * Ls[i]);
    fit.finite = std::isfinite(fit.C) && std::isfinite(fit.C0);
    return fit;
}

}  // namespace kdl
