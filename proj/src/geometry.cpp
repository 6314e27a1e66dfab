#include "kdl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kdl/rng.hpp"

namespace kdl {

Ellipsoid::Ellipsoid(std::vector<double> semi_axes, std::vector<double> center)
    : a_(std::move(semi_axes)), c_(std::move(center)) {
    if (a_.size() != 2 && a_.size() != 3) throw ArgumentError("ellipsoid needs 2 or 3 semi-axes");
    for (double a : a_)
        if (!(a > 0.0) || !std::isfinite(a)) throw ArgumentError("semi-axes must be positive");
    if (c_.empty()) c_.assign(a_.size(), 0.0);
    if (c_.size() != a_.size()) throw ArgumentError("center dimension does not match semi-axes");
}

double Ellipsoid::value(const Vec& x) const {
    double s = -1.0;
    for (int i = 0; i < dim(); ++i) {
        const double q = (x[i] - c_[i]) / a_[i];
        s += q * q;
    }
    return s;
}

Vec Ellipsoid::gradient(const Vec& x) const {
    Vec g(dim());
    for (int i = 0; i < dim(); ++i) g[i] = 2.0 * (x[i] - c_[i]) / (a_[i] * a_[i]);
    return g;
}

Mat Ellipsoid::hessian(const Vec&) const {
    Mat h(dim());
    for (int i = 0; i < dim(); ++i) h(i, i) = 2.0 / (a_[i] * a_[i]);
    return h;
}

double Ellipsoid::convexity_constant() const {
    const double amax = *std::max_element(a_.begin(), a_.end());
    return 2.0 / (amax * amax);
}

double Ellipsoid::bounding_radius() const {
    double c2 = 0.0;
    for (double c : c_) c2 += c * c;
    return std::sqrt(c2) + *std::max_element(a_.begin(), a_.end());
}

Domain Domain::unit_ball(int dim) {
    if (dim != 2 && dim != 3) throw ArgumentError("dimension must be 2 or 3");
    Domain d;
    d.kind_ = DomainKind::UnitBall;
    d.dim_ = dim;
    return d;
}

Domain Domain::level_set(std::shared_ptr<const LevelSet> ls) {
    if (!ls) throw ArgumentError("null level set");
    if (ls->dim() != 2 && ls->dim() != 3) throw ArgumentError("dimension must be 2 or 3");
    if (!(ls->convexity_constant() > 0.0)) throw ArgumentError("convexity constant must be positive");
    Domain d;
    d.kind_ = DomainKind::LevelSet;
    d.dim_ = ls->dim();
    d.ls_ = std::move(ls);
    return d;
}

Domain Domain::builtin(const std::string& kind, int dim, const std::vector<double>& semi_axes,
                       const std::vector<double>& center) {
    if (kind == "unit-ball" || kind == "unit-disk") return unit_ball(dim);
    if (kind == "ellipse" || kind == "ellipsoid" || kind == "level-set") {
        if (static_cast<int>(semi_axes.size()) != dim) throw ArgumentError("semi_axes must have dim entries");
        return level_set(std::make_shared<Ellipsoid>(semi_axes, center));
    }
    throw ArgumentError("unknown domain kind '" + kind + "'");
}

double Domain::zeta(const Vec& x) const {
    if (is_ball()) return squared_norm(x) - 1.0;
    return ls_->value(x);
}

Vec Domain::grad_zeta(const Vec& x) const {
    if (is_ball()) return 2.0 * x;
    return ls_->gradient(x);
}

Mat Domain::hess_zeta(const Vec& x) const {
    if (is_ball()) return Mat::identity(dim_) * 2.0;
    return ls_->hessian(x);
}

double Domain::convexity_constant() const { return is_ball() ? 2.0 : ls_->convexity_constant(); }

double Domain::bounding_radius() const { return is_ball() ? 1.0 : ls_->bounding_radius(); }

double Domain::volume() const {
    double scale = 1.0;
    if (!is_ball()) {
        const auto* e = dynamic_cast<const Ellipsoid*>(ls_.get());
        if (!e) throw ArgumentError("volume is only known for builtin domains");
        for (double a : e->semi_axes()) scale *= a;
    }
    return scale * (dim_ == 2 ? std::numbers::pi : 4.0 * std::numbers::pi / 3.0);
}

bool Domain::on_boundary(const Vec& x, double tol) const { return std::abs(zeta(x)) <= tol; }

Vec Domain::normal_at(const Vec& x) const {
    if (x.dim() != dim_) throw ArgumentError("dimension mismatch");
    if (!on_boundary(x)) throw DomainError("point is not on the boundary");
    return normal_t(*this, x);
}

Vec Domain::reflect(const Vec& x, const Vec& v) const { return reflect_t(normal_at(x), v); }

BoundaryClass Domain::classify(const Vec& x, const Vec& v) const {
    const double vn = dot(v, normal_at(x));
    if (std::abs(vn) <= kGrazingTol * norm(v)) return {BoundaryKind::Grazing, vn};
    return {vn > 0.0 ? BoundaryKind::Outgoing : BoundaryKind::Incoming, vn};
}

RayExit Domain::ray_exit(const Vec& x, const Vec& w) const {
    if (x.dim() != dim_ || w.dim() != dim_) throw ArgumentError("dimension mismatch");
    const double speed = norm(w);
    if (!(speed > 0.0)) throw ArgumentError("direction must be nonzero");
    if (!(zeta(x) < 0.0)) throw DomainError("ray_exit needs a strictly interior point");
    const Vec u = w / speed;
    const double s = exit_distance(x, u, false);
    return {s / speed, project_to_boundary(x + s * u)};
}

double Domain::exit_distance(const Vec& x, const Vec& u, bool from_boundary) const {
    if (is_ball()) return exit_distance_t(*this, x, u, from_boundary);

    // zeta is convex along the ray, so Newton started beyond the far root
    // decreases monotonically onto it.
    const double s_max = norm(x) + ls_->bounding_radius();
    double s = s_max;
    double lo = 0.0;
    double hi = s_max;
    for (int it = 0; it < 200; ++it) {
        const Vec p = x + s * u;
        const double f = ls_->value(p);
        if (std::abs(f) <= kExitTol) return s;
        if (f > 0.0) hi = std::min(hi, s);
        else lo = std::max(lo, s);
        const double fp = dot(ls_->gradient(p), u);
        double next = (fp > 0.0) ? s - f / fp : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        s = next;
    }
    throw GeometryError("boundary root not bracketed");
}

Vec Domain::project_to_boundary(const Vec& x) const {
    if (is_ball()) return x / norm(x);
    Vec p = x;
    for (int it = 0; it < 3; ++it) {
        const double f = ls_->value(p);
        if (std::abs(f) <= kExitTol) break;
        const Vec g = ls_->gradient(p);
        p -= (f / squared_norm(g)) * g;
    }
    return p;
}

std::string Domain::describe() const {
    std::ostringstream os;
    if (is_ball()) {
        os << "unit-ball(d=" << dim_ << ")";
    } else {
        os << ls_->name() << "(d=" << dim_ << ")";
    }
    return os.str();
}

LevelSetCheck verify_level_set(const Domain& domain, int samples, std::uint64_t seed, double shell) {
    const int d = domain.dim();
    const double R = domain.bounding_radius();
    const double c = domain.convexity_constant();
    Rng rng(seed, 0);
    LevelSetCheck out{true, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    int found = 0;
    for (int attempt = 0; found < samples && attempt < 100 * samples; ++attempt) {
        Vec x(d);
        for (int i = 0; i < d; ++i) x[i] = R * (2.0 * rng.uniform() - 1.0);
        // Keep points whose distance to the boundary is within the shell,
        // measured with the first-order estimate |zeta|/|grad zeta|.
        const double z = domain.zeta(x);
        const Vec g = domain.grad_zeta(x);
        const double gn = norm(g);
        if (!(gn > 0.0) || std::abs(z) / gn > shell * R) continue;
        ++found;
        Vec xi(d);
        for (int i = 0; i < d; ++i) xi[i] = rng.normal();
        const double ratio = quad_form(domain.hess_zeta(x), xi, xi) / (c * squared_norm(xi));
        out.min_hessian_ratio = std::min(out.min_hessian_ratio, ratio);
        out.min_gradient_norm = std::min(out.min_gradient_norm, gn);
    }
    out.ok = found > 0 && out.min_hessian_ratio >= 1.0 - 1e-12 && out.min_gradient_norm > 0.0;
    return out;
}

}  // namespace kdl
