#include "kdl/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "kdl/errors.hpp"

namespace kdl {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kOnSphereSlack = 1e-9;

}  // namespace

Mesh Mesh::polar(int n_r, int n_theta) {
    if (n_r < 1 || n_theta < 1) throw ArgumentError("polar mesh needs n_r >= 1 and n_theta >= 1");
    Mesh m;
    m.kind_ = MeshKind::Polar;
    m.dim_ = 2;
    m.n_r_ = n_r;
    m.n_theta_ = n_theta;
    return m;
}

Mesh Mesh::radial(int dim, int n_r) {
    if (dim != 2 && dim != 3) throw ArgumentError("dimension must be 2 or 3");
    if (n_r < 1) throw ArgumentError("radial mesh needs n_r >= 1");
    Mesh m;
    m.kind_ = MeshKind::Radial;
    m.dim_ = dim;
    m.n_r_ = n_r;
    m.n_theta_ = 1;
    return m;
}

Mesh Mesh::cartesian(int n, double lo, double hi) {
    if (n < 1 || !(hi > lo)) throw ArgumentError("cartesian mesh needs n >= 1 and hi > lo");
    Mesh m;
    m.kind_ = MeshKind::Cartesian;
    m.dim_ = 2;
    m.n_r_ = n;
    m.n_theta_ = n;
    m.lo_ = lo;
    m.hi_ = hi;
    return m;
}

int Mesh::size() const {
    switch (kind_) {
        case MeshKind::Polar:
            return n_r_ == 0 ? 0 : 1 + (n_r_ - 1) * n_theta_;
        case MeshKind::Radial:
            return n_r_;
        case MeshKind::Cartesian:
            return n_r_ * n_theta_;
    }
    return 0;
}

Mesh::Box Mesh::bounds(int c) const {
    switch (kind_) {
        case MeshKind::Polar: {
            const double dr = 1.0 / n_r_;
            if (c == 0) return {0.0, dr, 0.0, kTwoPi};
            const int i = 1 + (c - 1) / n_theta_;
            const int j = (c - 1) % n_theta_;
            const double dt = kTwoPi / n_theta_;
            return {i * dr, (i + 1) * dr, j * dt, (j + 1) * dt};
        }
        case MeshKind::Radial: {
            const double dr = 1.0 / n_r_;
            return {c * dr, (c + 1) * dr, 0.0, kTwoPi};
        }
        case MeshKind::Cartesian: {
            const double h = (hi_ - lo_) / n_r_;
            const int i = c % n_r_;
            const int j = c / n_r_;
            return {lo_ + i * h, lo_ + (i + 1) * h, lo_ + j * h, lo_ + (j + 1) * h};
        }
    }
    return {};
}

double Mesh::volume(int c) const {
    const Box b = bounds(c);
    switch (kind_) {
        case MeshKind::Polar:
            return 0.5 * (b.a1 * b.a1 - b.a0 * b.a0) * (b.b1 - b.b0);
        case MeshKind::Radial:
            if (dim_ == 2) return std::numbers::pi * (b.a1 * b.a1 - b.a0 * b.a0);
            return 4.0 * std::numbers::pi / 3.0 * (b.a1 * b.a1 * b.a1 - b.a0 * b.a0 * b.a0);
        case MeshKind::Cartesian:
            return (b.a1 - b.a0) * (b.b1 - b.b0);
    }
    return 0.0;
}

double Mesh::total_volume() const {
    double s = 0.0;
    for (int c = 0; c < size(); ++c) s += volume(c);
    return s;
}

double Mesh::center_r(int c) const {
    if (kind_ == MeshKind::Cartesian) return norm(center(c));
    if (kind_ == MeshKind::Polar && c == 0) return 0.0;
    const Box b = bounds(c);
    return 0.5 * (b.a0 + b.a1);
}

double Mesh::center_theta(int c) const {
    if (kind_ == MeshKind::Cartesian) {
        const Vec x = center(c);
        const double th = std::atan2(x[1], x[0]);
        return th < 0.0 ? th + kTwoPi : th;
    }
    if (kind_ == MeshKind::Radial || c == 0) return 0.0;
    const Box b = bounds(c);
    return 0.5 * (b.b0 + b.b1);
}

Vec Mesh::center(int c) const {
    if (kind_ == MeshKind::Cartesian) {
        const Box b = bounds(c);
        return Vec{0.5 * (b.a0 + b.a1), 0.5 * (b.b0 + b.b1)};
    }
    const double r = center_r(c);
    const double th = center_theta(c);
    if (kind_ == MeshKind::Radial) {
        Vec x(dim_);
        x[0] = r;
        return x;
    }
    return Vec{r * std::cos(th), r * std::sin(th)};
}

int Mesh::locate(const Vec& x) const {
    if (kind_ == MeshKind::Cartesian) {
        const double h = (hi_ - lo_) / n_r_;
        const double fi = std::floor((x[0] - lo_) / h);
        const double fj = std::floor((x[1] - lo_) / h);
        if (fi < 0 || fj < 0 || fi >= n_r_ || fj >= n_theta_) return -1;
        return static_cast<int>(fj) * n_r_ + static_cast<int>(fi);
    }
    const double r = norm(x);
    if (r > 1.0 + kOnSphereSlack) return -1;
    const int i = std::min(n_r_ - 1, static_cast<int>(r * n_r_));
    if (kind_ == MeshKind::Radial) return i;
    if (i == 0) return 0;
    double th = std::atan2(x[1], x[0]);
    if (th < 0.0) th += kTwoPi;
    const int j = std::min(n_theta_ - 1, static_cast<int>(th / kTwoPi * n_theta_));
    return 1 + (i - 1) * n_theta_ + j;
}

std::vector<int> Mesh::boundary_cells() const {
    std::vector<int> out;
    switch (kind_) {
        case MeshKind::Polar:
            if (n_r_ == 1) return {0};
            for (int j = 0; j < n_theta_; ++j) out.push_back(1 + (n_r_ - 2) * n_theta_ + j);
            break;
        case MeshKind::Radial:
            out.push_back(n_r_ - 1);
            break;
        case MeshKind::Cartesian:
            for (int c = 0; c < size(); ++c) {
                const int i = c % n_r_, j = c / n_r_;
                if (i == 0 || j == 0 || i == n_r_ - 1 || j == n_theta_ - 1) out.push_back(c);
            }
            break;
    }
    return out;
}

std::vector<Face> Mesh::faces() const {
    std::vector<Face> f;
    switch (kind_) {
        case MeshKind::Polar: {
            const double dth = kTwoPi / n_theta_;
            for (int i = 1; i < n_r_; ++i) {
                for (int j = 0; j < n_theta_; ++j) {
                    const int c = 1 + (i - 1) * n_theta_ + j;
                    // inner radial face at r = i dr
                    const int inner = (i == 1) ? 0 : c - n_theta_;
                    f.push_back({inner, c, i * dth});
                    if (n_theta_ > 1) {
                        const int next = 1 + (i - 1) * n_theta_ + (j + 1) % n_theta_;
                        f.push_back({c, next, 1.0 / ((i + 0.5) * dth)});
                    }
                }
            }
            break;
        }
        case MeshKind::Radial: {
            const double dr = 1.0 / n_r_;
            for (int i = 0; i + 1 < n_r_; ++i) {
                const double rf = (i + 1) * dr;
                const double area = dim_ == 2 ? kTwoPi * rf : 2.0 * kTwoPi * rf * rf;
                f.push_back({i, i + 1, area / dr});
            }
            break;
        }
        case MeshKind::Cartesian:
            for (int j = 0; j < n_theta_; ++j)
                for (int i = 0; i < n_r_; ++i) {
                    const int c = j * n_r_ + i;
                    if (i + 1 < n_r_) f.push_back({c, c + 1, 1.0});
                    if (j + 1 < n_theta_) f.push_back({c, c + n_r_, 1.0});
                }
            break;
    }
    return f;
}

std::string Mesh::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case MeshKind::Polar:
            os << "polar(n_r=" << n_r_ << ",n_theta=" << n_theta_ << ")";
            break;
        case MeshKind::Radial:
            os << "radial(d=" << dim_ << ",n_r=" << n_r_ << ")";
            break;
        case MeshKind::Cartesian:
            os << "cartesian(n=" << n_r_ << ",[" << lo_ << "," << hi_ << "]^2)";
            break;
    }
    return os.str();
}

bool Mesh::operator==(const Mesh& o) const {
    return kind_ == o.kind_ && dim_ == o.dim_ && n_r_ == o.n_r_ && n_theta_ == o.n_theta_ && lo_ == o.lo_ &&
           hi_ == o.hi_;
}

double ScalarField::integral() const {
    double s = 0.0;
    for (int c = 0; c < mesh.size(); ++c) s += values[c] * mesh.volume(c);
    return s;
}

double ScalarField::min() const { return *std::min_element(values.begin(), values.end()); }
double ScalarField::max() const { return *std::max_element(values.begin(), values.end()); }

double l2_error(const ScalarField& a, const ScalarField& b) {
    if (!(a.mesh == b.mesh)) throw ArgumentError("l2_error: mesh mismatch");
    double s = 0.0;
    for (int c = 0; c < a.mesh.size(); ++c) {
        const double d = a.values[c] - b.values[c];
        s += d * d * a.mesh.volume(c);
    }
    return std::sqrt(s);
}

double l2_norm(const ScalarField& a) {
    double s = 0.0;
    for (int c = 0; c < a.mesh.size(); ++c) s += a.values[c] * a.values[c] * a.mesh.volume(c);
    return std::sqrt(s);
}

ScalarField restrict_to(const ScalarField& fine, const Mesh& coarse) {
    ScalarField out(coarse);
    std::vector<double> vol(coarse.size(), 0.0);
    for (int c = 0; c < fine.mesh.size(); ++c) {
        const int k = coarse.locate(fine.mesh.center(c));
        if (k < 0) continue;
        const double v = fine.mesh.volume(c);
        out.values[k] += fine.values[c] * v;
        vol[k] += v;
    }
    for (int k = 0; k < coarse.size(); ++k) {
        if (vol[k] <= 0.0) throw ArgumentError("restrict_to: coarse cell not covered by the fine mesh");
        out.values[k] /= vol[k];
    }
    return out;
}

std::string to_csv(const ScalarField& f) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "r,theta,x,y,value\n";
    for (int c = 0; c < f.mesh.size(); ++c) {
        const Vec x = f.mesh.center(c);
        os << f.mesh.center_r(c) << ',' << f.mesh.center_theta(c) << ',' << x[0] << ',' << x[1] << ','
           << f.values[c] << '\n';
    }
    return os.str();
}

}  // namespace kdl
