#pragma once
/**
 * @file geometry.hpp
 * @brief Strictly convex spatial domains, boundary normals and specular reflection.
 *
 * Two kinds of domain are supported: the unit ball {|x| < 1} with closed-form
 * queries, and a generic level set {zeta < 0} described by a LevelSet object.
 * Domain is immutable after construction and all queries are thread safe.
 */

#include <cstdint>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "kdl/errors.hpp"
#include "kdl/jet.hpp"
#include "kdl/vec.hpp"

namespace kdl {

inline constexpr double kGrazingTol = 1e-12;   // relative to |v|
inline constexpr double kBoundaryTol = 1e-10;  // in zeta
inline constexpr double kExitTol = 1e-12;      // level-set root tolerance in zeta

/// Smooth defining function of a strictly convex region.
class LevelSet {
public:
    virtual ~LevelSet() = default;
    virtual int dim() const = 0;
    virtual double value(const Vec& x) const = 0;
    virtual Vec gradient(const Vec& x) const = 0;
    virtual Mat hessian(const Vec& x) const = 0;
    /// Third derivative contracted once with a: (T[a])_ij = sum_k d3 zeta/dx_i dx_j dx_k a_k.
    virtual Mat third(const Vec& x, const Vec& a) const {
        (void)x;
        (void)a;
        return Mat(dim());
    }
    /// Lower bound on the Hessian quadratic form near the boundary.
    virtual double convexity_constant() const = 0;
    /// Radius of a centered ball containing the region.
    virtual double bounding_radius() const = 0;
    virtual std::string name() const = 0;
};

/// zeta(x) = sum ((x_i - c_i)/a_i)^2 - 1.
class Ellipsoid final : public LevelSet {
public:
    Ellipsoid(std::vector<double> semi_axes, std::vector<double> center = {});

    int dim() const override { return static_cast<int>(a_.size()); }
    double value(const Vec& x) const override;
    Vec gradient(const Vec& x) const override;
    Mat hessian(const Vec& x) const override;
    double convexity_constant() const override;
    double bounding_radius() const override;
    std::string name() const override { return dim() == 2 ? "ellipse" : "ellipsoid"; }

    const std::vector<double>& semi_axes() const { return a_; }
    const std::vector<double>& center() const { return c_; }

private:
    std::vector<double> a_;
    std::vector<double> c_;
};

enum class DomainKind { UnitBall, LevelSet };

enum class BoundaryKind { Outgoing, Incoming, Grazing };

struct BoundaryClass {
    BoundaryKind kind;
    double value;  ///< v . n(x)
};

struct RayExit {
    double s;  ///< parameter along w
    Vec x;     ///< exit point
};

class Domain {
public:
    static Domain unit_ball(int dim);
    static Domain level_set(std::shared_ptr<const LevelSet> ls);
    /// Builtin by name: "unit-ball", "ellipse"/"ellipsoid" (semi-axes, optional center).
    static Domain builtin(const std::string& kind, int dim, const std::vector<double>& semi_axes = {},
                          const std::vector<double>& center = {});

    DomainKind kind() const { return kind_; }
    bool is_ball() const { return kind_ == DomainKind::UnitBall; }
    int dim() const { return dim_; }
    const LevelSet* level() const { return ls_.get(); }

    double zeta(const Vec& x) const;
    Vec grad_zeta(const Vec& x) const;
    Mat hess_zeta(const Vec& x) const;
    double convexity_constant() const;
    double bounding_radius() const;
    /// Volume (area in d = 2) of the region.
    double volume() const;

    bool contains(const Vec& x, double tol = kBoundaryTol) const { return zeta(x) <= tol; }
    bool on_boundary(const Vec& x, double tol = kBoundaryTol) const;

    Vec normal_at(const Vec& x) const;
    Vec reflect(const Vec& x, const Vec& v) const;
    BoundaryClass classify(const Vec& x, const Vec& v) const;
    RayExit ray_exit(const Vec& x, const Vec& w) const;

    /// Distance along unit direction u to the boundary. from_boundary selects the
    /// far root when x sits on the boundary.
    double exit_distance(const Vec& x, const Vec& u, bool from_boundary) const;
    /// Pull a point that drifted off the boundary back onto it.
    Vec project_to_boundary(const Vec& x) const;

    std::string describe() const;

private:
    DomainKind kind_ = DomainKind::UnitBall;
    int dim_ = 2;
    std::shared_ptr<const LevelSet> ls_;
};

/// Result of sampling the convexity and non-degeneracy assumptions.
struct LevelSetCheck {
    bool ok;
    double min_hessian_ratio;  ///< min over samples of xi^T H xi / (C |xi|^2)
    double min_gradient_norm;  ///< min |grad zeta| over the boundary shell
};

/// Sample random points in the shell of width shell*R around the boundary and
/// random xi; check xi^T H xi >= C|xi|^2 and grad zeta != 0.
LevelSetCheck verify_level_set(const Domain& domain, int samples, std::uint64_t seed, double shell = 0.1);

// ---------------------------------------------------------------------------
// Scalar-generic kernels used by the billiard and derivative code.

inline Vec values(const VecN<Jet>& x) {
    Vec out(x.dim());
    for (int i = 0; i < x.dim(); ++i) out[i] = x[i].v;
    return out;
}
inline const Vec& values(const Vec& x) { return x; }

template <class T>
VecN<T> lift(const Vec& x) {
    VecN<T> out(x.dim());
    for (int i = 0; i < x.dim(); ++i) out[i] = T(x[i]);
    return out;
}

namespace detail {

/// Second-order expansion of zeta about the value point of a jet vector.
inline Jet zeta_jet(const LevelSet& ls, const VecN<Jet>& x) {
    const Vec x0 = values(x);
    const Vec g = ls.gradient(x0);
    const Mat h = ls.hessian(x0);
    Jet out(ls.value(x0));
    for (int i = 0; i < x.dim(); ++i) {
        const Jet di(0.0, x[i].d1, x[i].d2);
        out += di * Jet(g[i]);
        for (int j = 0; j < x.dim(); ++j) {
            const Jet dj(0.0, x[j].d1, x[j].d2);
            out += Jet(0.5 * h(i, j)) * di * dj;
        }
    }
    return out;
}

inline VecN<Jet> grad_jet(const LevelSet& ls, const VecN<Jet>& x) {
    const int d = x.dim();
    const Vec x0 = values(x);
    const Vec g = ls.gradient(x0);
    const Mat h = ls.hessian(x0);
    VecN<Jet> delta(d);
    Vec a1(d);
    for (int i = 0; i < d; ++i) {
        delta[i] = Jet(0.0, x[i].d1, x[i].d2);
        a1[i] = x[i].d1;
    }
    // T[delta, delta] only has a second-order part: t^2 T[a1, a1].
    const Mat t = ls.third(x0, a1);
    const Vec ta = t * a1;
    VecN<Jet> out(d);
    for (int i = 0; i < d; ++i) {
        Jet s(g[i]);
        for (int j = 0; j < d; ++j) s += Jet(h(i, j)) * delta[j];
        s += Jet(0.0, 0.0, ta[i]);
        out[i] = s;
    }
    return out;
}

}  // namespace detail

template <class T>
T zeta_t(const Domain& dom, const VecN<T>& x) {
    if (dom.is_ball()) return squared_norm(x) - T(1.0);
    if constexpr (std::is_same_v<T, double>) {
        return dom.level()->value(x);
    } else {
        return detail::zeta_jet(*dom.level(), x);
    }
}

template <class T>
VecN<T> normal_t(const Domain& dom, const VecN<T>& x) {
    if (dom.is_ball()) return x / norm(x);
    VecN<T> g;
    if constexpr (std::is_same_v<T, double>) {
        g = dom.level()->gradient(x);
    } else {
        g = detail::grad_jet(*dom.level(), x);
    }
    return g / norm(g);
}

template <class T>
VecN<T> reflect_t(const VecN<T>& n, const VecN<T>& v) {
    const T vn = dot(v, n);
    return v - (T(2.0) * vn) * n;
}

/// Exit distance along a unit direction, in the scalar type T. Root selection is
/// done on values; for level sets the double root is refined by two Newton
/// steps in T so that jets pick up exact first and second derivatives.
template <class T>
T exit_distance_t(const Domain& dom, const VecN<T>& x, const VecN<T>& u, bool from_boundary) {
    using std::sqrt;
    if (dom.is_ball()) {
        const T b = dot(x, u);
        if (from_boundary) return T(-2.0) * b;
        const T c = squared_norm(x) - T(1.0);
        const T disc = b * b - c;
        if (value(disc) < 0.0) throw GeometryError("ray misses the unit ball");
        const T root = sqrt(disc);
        if (value(b) > 0.0) return -c / (b + root);
        return root - b;
    }
    const double s0 = dom.exit_distance(values(x), values(u), from_boundary);
    if constexpr (std::is_same_v<T, double>) {
        return s0;
    } else {
        T s(s0);
        for (int it = 0; it < 2; ++it) {
            const VecN<T> p = x + s * u;
            const T f = zeta_t(dom, p);
            const VecN<T> g = detail::grad_jet(*dom.level(), p);
            s = s - f / dot(g, u);
        }
        return s;
    }
}

template <class T>
VecN<T> project_boundary_t(const Domain& dom, const VecN<T>& x) {
    if (dom.is_ball()) return x / norm(x);
    if constexpr (std::is_same_v<T, double>) {
        return dom.project_to_boundary(x);
    } else {
        return x;
    }
}

}  // namespace kdl
