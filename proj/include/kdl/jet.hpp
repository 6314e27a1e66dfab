#pragma once
/**
 * @file jet.hpp
 * @brief Second-order univariate Taylor jets.
 *
 * A Jet carries f(t0), f'(t0), f''(t0) for one perturbation direction t.
 * Propagating v + t e_i through the end-point map gives column i of the
 * Jacobian (d1) and the pure second derivative along e_i (d2); summing d2
 * over i gives the velocity Laplacian.
 *
 * Branching decisions (reflection counts, root selection) are taken on
 * value() so jets follow the same piecewise-smooth branch as the double
 * evaluation.
 */

#include <cmath>

namespace kdl {

struct Jet {
    double v = 0.0;   ///< value
    double d1 = 0.0;  ///< first derivative
    double d2 = 0.0;  ///< second derivative

    Jet() = default;
    Jet(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
    Jet(double value, double first, double second) : v(value), d1(first), d2(second) {}

    static Jet variable(double value) { return {value, 1.0, 0.0}; }

    Jet& operator+=(const Jet& o) {
        v += o.v;
        d1 += o.d1;
        d2 += o.d2;
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        v -= o.v;
        d1 -= o.d1;
        d2 -= o.d2;
        return *this;
    }
    Jet& operator*=(const Jet& o) {
        const double nd2 = d2 * o.v + 2.0 * d1 * o.d1 + v * o.d2;
        const double nd1 = d1 * o.v + v * o.d1;
        v *= o.v;
        d1 = nd1;
        d2 = nd2;
        return *this;
    }
    Jet& operator/=(const Jet& o);
};

/// Apply a scalar function given its value and first two derivatives at g.v.
inline Jet chain(const Jet& g, double f0, double f1, double f2) {
    return {f0, f1 * g.d1, f2 * g.d1 * g.d1 + f1 * g.d2};
}

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, const Jet& b) { return a *= b; }
inline Jet operator-(const Jet& a) { return {-a.v, -a.d1, -a.d2}; }

inline Jet reciprocal(const Jet& a) {
    const double r = 1.0 / a.v;
    return chain(a, r, -r * r, 2.0 * r * r * r);
}

inline Jet& Jet::operator/=(const Jet& o) { return *this *= reciprocal(o); }
inline Jet operator/(Jet a, const Jet& b) { return a /= b; }

inline bool operator<(const Jet& a, const Jet& b) { return a.v < b.v; }
inline bool operator>(const Jet& a, const Jet& b) { return a.v > b.v; }

inline Jet sqrt(const Jet& a) {
    const double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet sin(const Jet& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return chain(a, s, c, -s);
}
inline Jet cos(const Jet& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return chain(a, c, -s, -c);
}
inline Jet acos(const Jet& a) {
    const double q = 1.0 - a.v * a.v;
    const double f1 = -1.0 / std::sqrt(q);
    return chain(a, std::acos(a.v), f1, f1 * a.v / q);
}

inline Jet atan2(const Jet& y, const Jet& x) {
    const double r2 = x.v * x.v + y.v * y.v;
    const double num1 = x.v * y.d1 - y.v * x.d1;
    const double d1 = num1 / r2;
    const double d2 = (x.v * y.d2 - y.v * x.d2) / r2 - num1 * 2.0 * (x.v * x.d1 + y.v * y.d1) / (r2 * r2);
    return {std::atan2(y.v, x.v), d1, d2};
}

inline double value(double a) { return a; }
inline double value(const Jet& a) { return a.v; }

}  // namespace kdl
