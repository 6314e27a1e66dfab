#pragma once
/**
 * @file initial_data.hpp
 * @brief Builtin product initial data rho0(x) M0(v).
 *
 * Densities:
 *   uniform    mass / |Omega|                      (bounded domain only)
 *   bump       mass * c_d (1 - s^2/w^2)^2, s = |x - center| < w
 *   eigenmode  mass / |Omega| * (1 + a u1(|x|))    (unit ball only)
 *   gaussian   mass * N(center, sigma^2 I)         (free space only)
 * Velocities: standard Maxwellian, or a centered Gaussian with variance
 * velocity_variance per component.
 */

#include <cstdint>
#include <string>

#include "kdl/geometry.hpp"
#include "kdl/mesh.hpp"
#include "kdl/rng.hpp"

namespace kdl {

struct InitialSpec {
    std::string density = "uniform";
    std::string velocity = "maxwellian";  ///< maxwellian | scaled
    double velocity_variance = 1.0;
    double mass = 1.0;
    Vec center{0.4, 0.0};
    double width = 0.3;      ///< bump radius
    double amplitude = 0.5;  ///< eigenmode coefficient a
    double sigma = 0.2;      ///< gaussian standard deviation
};

enum class BoundaryMode { Reflecting, FreeSpace };

/// Validate the initial datum against the domain and boundary mode; throws
/// ArgumentError for non-normalizable or unsupported combinations.
void validate(const InitialSpec& spec, const Domain& domain, BoundaryMode mode);

/// True when rho0 depends on |x| only.
bool is_radial(const InitialSpec& spec);

/// Pointwise initial density rho0(x).
double initial_density(const InitialSpec& spec, const Domain& domain, const Vec& x);

/// Draw one position from rho0 / mass.
Vec sample_position(const InitialSpec& spec, const Domain& domain, BoundaryMode mode, Rng& rng);

/// Draw one velocity from M0.
Vec sample_velocity(const InitialSpec& spec, int dim, Rng& rng);

/// Cell averages of rho0: exact for uniform and eigenmode, erf products for the
/// gaussian on Cartesian meshes, otherwise q x q midpoint quadrature per cell.
ScalarField project_initial(const InitialSpec& spec, const Mesh& mesh, int quadrature = 8);

/// Exact free-space heat solution from a gaussian initial datum: N(center, (sigma^2 + 2t) I),
/// averaged over Cartesian cells.
ScalarField gaussian_heat_solution(const InitialSpec& spec, const Mesh& mesh, double t);

}  // namespace kdl
