#pragma once
/**
 * @file kinetic.hpp
 * @brief Particle solver for the scaled kinetic Fokker-Planck dynamics.
 *
 *   dX = V/eps dt,   dV = -V/eps^2 dt + sqrt(2)/eps dW
 *
 * Each step is Strang split: exact Ornstein-Uhlenbeck half step, reflected
 * ballistic transport over the full step, exact OU half step. Every particle
 * owns its RNG stream, so results are identical for any thread count.
 */

#include <cstdint>
#include <functional>
#include <vector>

#include "kdl/geometry.hpp"
#include "kdl/initial_data.hpp"
#include "kdl/mesh.hpp"
#include "kdl/rng.hpp"

namespace kdl {

struct ParticleEnsemble {
    Domain domain = Domain::unit_ball(2);
    BoundaryMode mode = BoundaryMode::Reflecting;
    double eps = 0.1;
    double t = 0.0;
    double mass = 1.0;
    std::uint64_t seed = 0;
    unsigned threads = 0;  ///< 0 = hardware concurrency
    std::vector<Vec> x;
    std::vector<Vec> v;
    std::vector<Rng> rng;
    long reflections = 0;  ///< total reflection events so far

    std::size_t size() const { return x.size(); }
    int dim() const { return domain.dim(); }
    double weight() const { return mass / static_cast<double>(x.size()); }
};

inline double default_dt(double eps) { return eps * eps / 8.0; }

ParticleEnsemble sample_initial(const InitialSpec& spec, std::size_t n, std::uint64_t seed, const Domain& domain,
                                BoundaryMode mode, double eps);

/// Move x a path length `length` along v with specular reflections; the speed
/// of v is kept and only its direction changes. Returns the reflection count.
long transport_particle(const Domain& domain, Vec& x, Vec& v, double length);

/// One Strang step of size dt (requires 0 < dt <= eps^2 / 4).
void step(ParticleEnsemble& ens, double dt);

/// Advance to t_end with ceil((t_end - t)/dt) equal steps; on_step is called
/// after each step.
void advance(ParticleEnsemble& ens, double t_end, double dt,
             const std::function<void(const ParticleEnsemble&)>& on_step = {});

// --- diagnostics -----------------------------------------------------------

/// Histogram density: weight / cell volume per particle. Particles outside the
/// mesh are not counted.
ScalarField density(const ParticleEnsemble& ens, const Mesh& mesh);

/// Cell averages of the velocity-weighted particle measure.
VectorField current_density(const ParticleEnsemble& ens, const Mesh& mesh);

struct FluxEstimate {
    double value;  ///< mean normal current density over the boundary cells
    double se;     ///< Monte Carlo standard error
};

/// Normal component v . x/|x| of the current averaged over the outermost cells.
FluxEstimate boundary_flux(const ParticleEnsemble& ens, const Mesh& mesh);

struct MaxwellianDeviation {
    double value;    ///< sqrt(sum c_alpha^2), 1 <= |alpha| <= K
    double null_se;  ///< sqrt(#alpha / N): typical value for exact Maxwellian samples
    int n_coeff;
    std::vector<std::vector<int>> alpha;
    std::vector<double> coeff;  ///< normalized Hermite coefficients E[He_alpha(v)] / sqrt(alpha!)
};

MaxwellianDeviation maxwellian_deviation(const ParticleEnsemble& ens, int K);

/// sum_cells rho^2 vol * (1 + D^2), D = maxwellian_deviation(ens, K).value.
double weighted_energy(const ParticleEnsemble& ens, const Mesh& mesh, int K = 2);

/// Componentwise velocity variance pooled over components.
double velocity_variance(const ParticleEnsemble& ens);

/// Probabilists' Hermite polynomial He_n(x) for n <= 4.
double hermite(int n, double x);

}  // namespace kdl
