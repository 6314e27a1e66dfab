#pragma once
/**
 * @file heat_solver.hpp
 * @brief Finite-volume heat equation with zero-flux boundary.
 *
 * Semi-discrete form V du/dt = -L u, where V holds cell volumes and L is the
 * weighted graph Laplacian of the mesh faces. The outer sphere carries no face,
 * which is the homogeneous Neumann condition. Mass sum(V u) is conserved by
 * construction.
 */

#include <functional>
#include <string>

#include "kdl/mesh.hpp"

namespace kdl {

enum class TimeScheme { BackwardEuler, CrankNicolson, Explicit };

TimeScheme parse_scheme(const std::string& name);
std::string to_string(TimeScheme s);

struct HeatState {
    ScalarField rho;
    double t = 0.0;
    long steps = 0;
    double dt = 0.0;  ///< step actually used (t_end / steps)
};

/// Largest stable explicit step: min_c V_c / sum_faces T.
double explicit_step_limit(const Mesh& mesh);

/// Advance rho_in to t_end with ceil(t_end/dt) equal steps. on_step(state) is
/// called after every step when given.
HeatState heat_solve(const ScalarField& rho_in, double t_end, double dt,
                     TimeScheme scheme = TimeScheme::BackwardEuler,
                     const std::function<void(const HeatState&)>& on_step = {});

/// First radial Neumann eigenvalue of the unit ball (j_{1,1}^2 in d = 2).
double neumann_lambda1(int dim);

/// Fit the decay rate of ||rho(t) - mean|| for rho_in = 1 + a u1 on a radial
/// mesh of n_r cells, over t in [t0, t1].
struct DecayFit {
    double rate;
    double lambda1;
    double rel_error;
    int n_r;
};

DecayFit eigenmode_decay_rate(int dim, int n_r, double dt = 1e-4, double t0 = 0.05, double t1 = 0.2,
                              TimeScheme scheme = TimeScheme::CrankNicolson);

}  // namespace kdl
