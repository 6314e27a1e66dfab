#pragma once
/**
 * @file billiards.hpp
 * @brief Specular cycles and the end-point map.
 *
 * A cycle starts at (x0, v0) and follows straight chords with specular
 * reflections for a total path length |v0|; the end point eta is where it
 * stops. Internally the cycle is tracked in cumulative arc length; the
 * reparametrized time is tau = arc / |v0|.
 *
 * Both solvers are templates over the scalar so they can be evaluated on
 * Jet values (see jet.hpp). Discrete choices (reflection count, root
 * branch) are made on values only.
 */

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "kdl/geometry.hpp"

namespace kdl {

inline constexpr long kDefaultReflectionCap = 1'000'000;
inline constexpr double kNearGrazing = 1e-8;

struct SpecularCycle {
    Vec x0;
    Vec v0;
    double speed = 0.0;
    long n = 0;                   ///< reflection count N
    std::vector<double> arc;      ///< cumulative path length at each reflection
    std::vector<Vec> points;      ///< reflection points x(tau_1) ... x(tau_N)
    std::vector<Vec> velocities;  ///< segment velocities w_0 ... w_N, |w_i| = |v0|
    bool near_grazing = false;    ///< |v.n|/|v| < 1e-8 at the first hit
    bool materialized = true;     ///< false when only N and eta were computed

    /// tau_0 = 0 followed by tau_1 ... tau_N.
    std::vector<double> breakpoints() const;
};

/// Physical time s for reparametrized time tau (tau = 1 - exp(-s)).
inline double physical_time(double tau) { return -std::log1p(-tau); }

struct EndpointResult {
    Vec eta;
    SpecularCycle cycle;
    double path_length = 0.0;
};

SpecularCycle specular_cycle(const Domain& domain, const Vec& x0, const Vec& v0,
                             long max_reflections = kDefaultReflectionCap);
EndpointResult endpoint(const Domain& domain, const Vec& x0, const Vec& v0,
                        long max_reflections = kDefaultReflectionCap);
/// Closed-form end point in the unit disk, or the unit ball reduced to the
/// trajectory plane. With detail the cycle is materialized (up to the cap).
EndpointResult disk_endpoint_analytic(const Vec& x0, const Vec& v0, bool detail = false,
                                      long max_reflections = kDefaultReflectionCap);
long reflection_count(const Domain& domain, const Vec& x0, const Vec& v0);

// ---------------------------------------------------------------------------

template <class T>
struct TraceOut {
    VecN<T> eta;
    VecN<T> dir;  ///< unit direction of the final segment
    long n = 0;
    bool near_grazing = false;
    double last_arc = 0.0;  ///< arc length of the last reflection (0 if none)
};

namespace detail {

inline void check_phase_point(const Domain& dom, const Vec& x, const Vec& v) {
    if (x.dim() != dom.dim() || v.dim() != dom.dim()) throw ArgumentError("dimension mismatch");
    if (dom.zeta(x) > kBoundaryTol) throw DomainError("start point is outside the domain");
}

}  // namespace detail

/// Segment-by-segment tracer. Records the cycle into rec when given.
template <class T>
TraceOut<T> trace_t(const Domain& dom, const VecN<T>& x0, const VecN<T>& v0, long cap, SpecularCycle* rec) {
    const Vec x0v = values(x0);
    const Vec v0v = values(v0);
    detail::check_phase_point(dom, x0v, v0v);
    TraceOut<T> out;
    const T speed = norm(v0);
    const double speed_v = value(speed);
    if (rec) {
        rec->x0 = x0v;
        rec->v0 = v0v;
        rec->speed = speed_v;
        rec->velocities.push_back(v0v);
    }
    if (!(speed_v > 0.0)) {
        out.eta = x0 + v0;
        out.dir = VecN<T>(x0.dim());
        return out;
    }
    VecN<T> u = v0 / speed;
    VecN<T> x = x0;
    T arc(0.0);
    bool from_boundary = false;
    bool first_hit = true;

    auto do_reflect = [&](const VecN<T>& n) {
        const double c = std::abs(value(dot(u, n)));
        if (first_hit) {
            out.near_grazing = c < kNearGrazing;
            first_hit = false;
        }
        u = reflect_t(n, u);
        u = u / norm(u);
        ++out.n;
        if (out.n > cap) throw RunawayError("reflection cap exceeded");
        out.last_arc = value(arc);
        if (rec) {
            rec->arc.push_back(value(arc));
            rec->points.push_back(values(x));
            rec->velocities.push_back(speed_v * values(u));
        }
    };

    if (dom.on_boundary(x0v)) {
        const BoundaryClass bc = dom.classify(x0v, v0v);
        if (bc.kind == BoundaryKind::Grazing) throw GrazingError("grazing start point");
        if (bc.kind == BoundaryKind::Outgoing) do_reflect(normal_t(dom, x));
        from_boundary = true;
    }
    for (;;) {
        const T s = exit_distance_t(dom, x, u, from_boundary);
        if (value(arc) + value(s) > speed_v) break;
        arc += s;
        x = project_boundary_t(dom, VecN<T>(x + s * u));
        do_reflect(normal_t(dom, x));
        from_boundary = true;
    }
    if (out.n == 0) {
        out.eta = x0 + v0;
    } else {
        out.eta = x + (speed - arc) * u;
    }
    out.dir = u;
    return out;
}

template <class T>
VecN<T> rotate2(const VecN<T>& a, const T& phi) {
    using std::cos;
    using std::sin;
    const T c = cos(phi);
    const T s = sin(phi);
    return VecN<T>{c * a[0] - s * a[1], s * a[0] + c * a[1]};
}

/// Closed-form disk cycle; materializes points into rec when given.
template <class T>
TraceOut<T> disk_analytic_2d_t(const VecN<T>& x, const VecN<T>& v, SpecularCycle* rec, long cap) {
    using std::atan2;
    using std::sqrt;
    TraceOut<T> out;
    const T speed = norm(v);
    const double speed_v = value(speed);
    if (!(speed_v > 0.0)) {
        out.eta = x + v;
        out.dir = VecN<T>(2);
        return out;
    }
    const VecN<T> u = v / speed;
    out.dir = u;
    const T b = dot(x, u);
    const T c = squared_norm(x) - T(1.0);
    if (value(c) > kBoundaryTol) throw DomainError("start point is outside the domain");
    T s1;
    if (std::abs(value(c)) <= kBoundaryTol) {
        if (std::abs(value(b)) <= kGrazingTol) throw GrazingError("grazing start point");
        s1 = value(b) > 0.0 ? T(0.0) : T(-2.0) * b;
    } else {
        const T root = sqrt(b * b - c);
        s1 = value(b) > 0.0 ? -c / (b + root) : root - b;
    }
    if (value(s1) > speed_v) {
        out.eta = x + v;
        return out;
    }
    VecN<T> p1 = x + s1 * u;
    p1 = p1 / norm(p1);
    const T cos_in = dot(u, p1);
    const VecN<T> u1 = u - (T(2.0) * cos_in) * p1;
    const T chord = T(2.0) * cos_in;
    const T theta = T(2.0) * atan2(cos_in, cross2(p1, u));
    out.near_grazing = value(cos_in) < kNearGrazing;
    const double m_real = std::floor((speed_v - value(s1)) / value(chord));
    const long m = static_cast<long>(m_real);
    out.n = 1 + m;
    out.last_arc = value(s1) + m_real * value(chord);
    const T rem = speed - s1 - T(m_real) * chord;
    const T phi = T(m_real) * theta;
    out.dir = rotate2(u1, phi);
    out.eta = rotate2(p1, phi) + rem * out.dir;

    if (rec) {
        if (out.n > cap) throw RunawayError("reflection cap exceeded while materializing the cycle");
        for (long k = 0; k < out.n; ++k) {
            const T ang = T(static_cast<double>(k)) * theta;
            rec->arc.push_back(value(s1) + static_cast<double>(k) * value(chord));
            rec->points.push_back(values(rotate2(p1, ang)));
            rec->velocities.push_back(speed_v * values(rotate2(u1, ang)));
        }
    }
    return out;
}

/// Disk closed form for d = 2, plane reduction for d = 3. Returns nullopt when
/// the plane is not smoothly defined (x parallel to v, x != 0) and T is a jet.
template <class T>
std::optional<TraceOut<T>> disk_analytic_t(const VecN<T>& x, const VecN<T>& v, SpecularCycle* rec, long cap) {
    const int d = x.dim();
    if (rec) {
        rec->x0 = values(x);
        rec->v0 = values(v);
        rec->speed = value(norm(v));
        rec->velocities.push_back(values(v));
    }
    if (d == 2) return disk_analytic_2d_t(x, v, rec, cap);

    const T speed = norm(v);
    if (!(value(speed) > 0.0)) {
        TraceOut<T> out;
        out.eta = x + v;
        out.dir = VecN<T>(3);
        return out;
    }
    const VecN<T> e1 = v / speed;
    const T a = dot(x, e1);
    const VecN<T> xp = x - a * e1;
    const double xp2 = value(squared_norm(xp));
    VecN<T> e2;
    T h(0.0);
    if (xp2 > 1e-24) {
        h = norm(xp);
        e2 = xp / h;
    } else {
        if constexpr (!std::is_same_v<T, double>) {
            if (value(squared_norm(x)) > 0.0) return std::nullopt;
        }
        const Vec ev = values(e1);
        int axis = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(ev[i]) < std::abs(ev[axis])) axis = i;
        Vec w = Vec::unit(3, axis);
        w -= dot(w, ev) * ev;
        e2 = lift<T>(w / norm(w));
    }
    SpecularCycle plane;
    TraceOut<T> p = disk_analytic_2d_t(VecN<T>{a, h}, VecN<T>{speed, T(0.0)}, rec ? &plane : nullptr, cap);
    TraceOut<T> out;
    out.n = p.n;
    out.near_grazing = p.near_grazing;
    out.last_arc = p.last_arc;
    if (p.n == 0) {
        out.eta = x + v;
    } else {
        out.eta = p.eta[0] * e1 + p.eta[1] * e2;
    }
    out.dir = p.dir[0] * e1 + p.dir[1] * e2;
    if (rec) {
        const Vec e1v = values(e1), e2v = values(e2);
        rec->arc = plane.arc;
        for (const Vec& q : plane.points) rec->points.push_back(q[0] * e1v + q[1] * e2v);
        for (const Vec& q : plane.velocities) rec->velocities.push_back(q[0] * e1v + q[1] * e2v);
    }
    return out;
}

}  // namespace kdl
