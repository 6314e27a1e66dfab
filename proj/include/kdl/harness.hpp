#pragma once
/**
 * @file harness.hpp
 * @brief Experiment drivers: diffusion-limit convergence, weak residual,
 *        chord integrability, and their JSON reports.
 *
 * Every report embeds the fully resolved configuration it was produced from.
 */

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdl/billiards.hpp"
#include "kdl/heat_solver.hpp"
#include "kdl/initial_data.hpp"
#include "kdl/kinetic.hpp"

namespace kdl {

using json = nlohmann::ordered_json;

struct StudyConfig {
    // domain
    std::string domain = "unit-ball";
    int dim = 2;
    std::vector<double> semi_axes;
    std::vector<double> center;
    std::string boundary_mode = "reflecting";  ///< reflecting | free-space

    // kinetic runs
    std::vector<double> eps{0.4, 0.2, 0.1};
    std::size_t n_particles = 200000;
    double dt = 0.0;  ///< 0 selects eps^2 / 8 per eps
    double t_end = 0.25;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    unsigned threads = 0;
    InitialSpec initial;

    // comparison mesh (polar n_r x n_theta; Cartesian n_cart^2 on [-extent, extent]^2 in free space)
    int n_r = 8;
    int n_theta = 16;
    int n_cart = 16;
    double extent = 2.5;

    // heat reference
    int heat_refine = 4;
    double heat_dt = 1e-4;
    std::string heat_scheme = "crank-nicolson";

    // weak residual
    int snapshots = 20;  ///< time intervals of the trapezoid rule
    std::vector<int> test_functions{0, 1, 2, 3};

    // integrability
    double p = 2.0;
    std::vector<std::size_t> schedule{100000, 300000, 1000000};
    std::string sampler = "grid";  ///< grid | sobol | random

    // output
    std::string output_dir;
    double kde_bandwidth = 0.0;  ///< > 0 also writes a kernel-smoothed density

    BoundaryMode mode() const;
    Domain make_domain() const;
    Mesh comparison_mesh() const;
    double dt_for(double eps) const;
};

json to_json(const StudyConfig& c);
/// Apply keys present in j on top of base; unknown keys raise ArgumentError.
StudyConfig config_from_json(const json& j, StudyConfig base = {});
/// Stable 64-bit FNV-1a hash of the canonical JSON dump.
std::uint64_t config_hash(const StudyConfig& c);
std::string hex64(std::uint64_t h);

json to_json(const InitialSpec& s);

// --- convergence -----------------------------------------------------------

struct ConvergenceEntry {
    double eps;
    std::size_t n;
    double dt;
    double t_end;
    std::vector<double> errors;  ///< per seed
    double mean_error;
    double se;           ///< sd / sqrt(#seeds)
    double noise_floor;  ///< expected histogram noise, sqrt(sum m^2 p(1-p) / (N vol))
    double error_bar;    ///< max(se, noise_floor / sqrt(#seeds)), used by the verdict
    ScalarField density;  ///< seed-averaged kinetic density
};

struct ConvergenceReport {
    std::vector<ConvergenceEntry> entries;  ///< eps descending
    std::string verdict;                    ///< monotone | non-monotone | inconclusive
    ScalarField reference;
    StudyConfig config;
};

ConvergenceReport converge_study(const StudyConfig& config);
/// Verdict from sorted entries: monotone when each step down in eps lowers the
/// error by more than the sum of the two error bars, non-monotone when some step
/// raises it by more than that, inconclusive otherwise.
std::string monotone_verdict(const std::vector<double>& mean, const std::vector<double>& se);
json to_json(const ConvergenceReport& r);

// --- weak residual ---------------------------------------------------------

struct WeakResidualEntry {
    double eps;
    int index;  ///< neumann_family index
    std::string name;
    double R;         ///< time derivative taken at the particle position
    double R_se;
    double R_exact;   ///< time derivative taken at eta (exact identity, ~0)
    double R_exact_se;
    long skipped;     ///< grazing evaluations left out
};

struct WeakResidualReport {
    std::vector<WeakResidualEntry> entries;
    std::vector<int> indices;
    std::vector<double> R_heat;  ///< heat-equation residual per test function
    std::vector<std::string> per_function_verdict;  ///< decreasing | not-decreasing | n/a
    int decreasing_count = 0;
    double mass_only_residual = 0.0;
    std::string verdict;  ///< pass | fail
    StudyConfig config;
};

WeakResidualReport weak_residual_study(const StudyConfig& config);
json to_json(const WeakResidualReport& r);

// --- integrability ---------------------------------------------------------

struct IntegrabilityReport {
    double p;
    std::vector<std::size_t> schedule;
    std::vector<double> estimates;
    std::vector<double> se;           ///< Monte Carlo standard error (0 for the grid)
    std::vector<std::size_t> counts;  ///< integrand evaluations behind each estimate
    std::string verdict;              ///< converging | diverging | inconclusive
    std::string sampler;
    std::uint64_t seed;
};

/// Mean of (2/L)^p over uniform (x, v_hat) in the unit disk x S^1, reported at
/// each schedule entry. grid is a deterministic midpoint rule in (|x|^2, angle
/// between x and v) with about n nodes, refined anisotropically toward the
/// tangent set; the seed is unused. sobol (seed-shifted) and random report
/// running prefix means.
IntegrabilityReport integrability_study(double p, const std::vector<std::size_t>& schedule, std::uint64_t seed,
                                        const std::string& sampler = "grid");
json to_json(const IntegrabilityReport& r);

// --- misc ------------------------------------------------------------------

json to_json(const SpecularCycle& c, const Vec& eta);
json vec_json(const Vec& v);

/// Gaussian kernel smoothing of a histogram field (bandwidth in length units),
/// renormalized to keep the integral.
ScalarField kde_smooth(const ScalarField& f, double bandwidth);

}  // namespace kdl
