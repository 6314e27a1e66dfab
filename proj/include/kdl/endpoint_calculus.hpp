#pragma once
/**
 * @file endpoint_calculus.hpp
 * @brief Velocity derivatives of the end-point map and Neumann test functions.
 *
 * J = grad_v eta (J(k, i) = d eta_k / d v_i) and lap = Delta_v eta are
 * computed either exactly, by running the billiard kernels on second-order
 * jets along each velocity axis, or by Richardson-extrapolated central
 * differences that refuse to straddle a change in the reflection count.
 */

#include <cstdint>
#include <functional>
#include <string>

#include "kdl/billiards.hpp"

namespace kdl {

enum class DerivMode { Analytic, FiniteDifference };

struct EndpointDerivatives {
    Vec eta;
    Mat J;
    Vec lap;
    long n = 0;
    bool near_grazing = false;
    double h = 0.0;  ///< finite-difference step (0 in analytic mode)
};

EndpointDerivatives endpoint_derivatives(const Domain& domain, const Vec& x, const Vec& v,
                                         DerivMode mode = DerivMode::Analytic);

/// psi(t, x) with its x-gradient, x-Hessian and time derivative.
struct TestFunction {
    std::string name;
    int dim = 2;
    std::function<double(double, const Vec&)> value;
    std::function<Vec(double, const Vec&)> gradient;
    std::function<Mat(double, const Vec&)> hessian;
    std::function<double(double, const Vec&)> dt;
    bool neumann_ok = false;

    double laplacian(double t, const Vec& x) const { return hessian(t, x).trace(); }
};

/// Largest |grad psi . n| over `samples` boundary points of the unit ball.
double neumann_defect(const TestFunction& psi, int samples = 1000, double t = 0.0, std::uint64_t seed = 1);

/// Build a test function and set neumann_ok by checking the normal derivative
/// on 10^3 boundary points of the unit ball to 1e-12.
TestFunction make_test_function(std::string name, int dim, std::function<double(double, const Vec&)> value,
                                std::function<Vec(double, const Vec&)> gradient,
                                std::function<Mat(double, const Vec&)> hessian,
                                std::function<double(double, const Vec&)> dt);

/// Builtin family on the unit ball:
///   0: 1
///   1: (1 - |x|^2)^2
///   2: exp(-lambda1 t) u1(|x|), the first radial Neumann eigenmode
///   3: x_1 (1 - |x|^2)^2
TestFunction neumann_family(int index, int dim);
inline constexpr int kNeumannFamilySize = 4;

/// theta(t) psi(t, x) with theta(t) = 1 - t/T, so the result vanishes at t = T.
TestFunction with_time_factor(const TestFunction& psi, double T);

/// Delta_u [psi(t, eta(x, u))] = lap . grad psi(eta) + tr(J J^T H psi(eta)).
double test_function_laplacian(const Domain& domain, const TestFunction& psi, double t, const Vec& x, const Vec& u);

/// Same composite Laplacian from precomputed end-point derivatives.
double test_function_laplacian(const EndpointDerivatives& d, const TestFunction& psi, double t);

struct ChordData {
    double L;  ///< chord length
    double A;  ///< reflection angle, cos A = L/2
    long k;    ///< index of the chord containing eta (= reflection count)
};

ChordData chord_data(const Vec& x, const Vec& v);

/// L alone, without the reflection count.
double chord_length(const Vec& x, const Vec& v);

/// Largest distance to the boundary along a chord of length L in the unit disk.
double trajectory_boundary_distance(double L);

/// Fitted envelope |lap . grad psi(eta)| <= C / L + C0 over random near-boundary
/// samples.
struct InverseChordFit {
    double C;
    double C0;
    double max_ratio;  ///< max over samples of value * L
    int samples;
    bool finite;
};

InverseChordFit fit_inverse_chord_bound(const TestFunction& psi, int samples, std::uint64_t seed,
                                        double max_speed = 2.0);

/// First radial Neumann eigenpair on the unit ball: u1(r), with u1(0) = 1.
struct RadialMode {
    int dim;
    double k;  ///< u1(r) = J0(k r) (d = 2) or sin(k r)/(k r) (d = 3)
    double lambda() const { return k * k; }
    double value(double r) const;
    double d1(double r) const;  ///< u1'(r)
    double d2(double r) const;  ///< u1''(r)
    double min_value() const;   ///< minimum of u1 over [0, 1]
};

RadialMode radial_mode(int dim);

}  // namespace kdl
