#include "kdl/heat_solver.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "kdl/endpoint_calculus.hpp"
#include "kdl/errors.hpp"
#include "kdl/initial_data.hpp"

namespace kdl {
namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat laplacian(const Mesh& mesh) {
    std::vector<Eigen::Triplet<double>> trip;
    for (const Face& f : mesh.faces()) {
        trip.emplace_back(f.a, f.a, f.T);
        trip.emplace_back(f.b, f.b, f.T);
        trip.emplace_back(f.a, f.b, -f.T);
        trip.emplace_back(f.b, f.a, -f.T);
    }
    SpMat L(mesh.size(), mesh.size());
    L.setFromTriplets(trip.begin(), trip.end());
    return L;
}

}  // namespace

TimeScheme parse_scheme(const std::string& name) {
    if (name == "implicit" || name == "backward-euler") return TimeScheme::BackwardEuler;
    if (name == "cn" || name == "crank-nicolson") return TimeScheme::CrankNicolson;
    if (name == "explicit") return TimeScheme::Explicit;
    throw ArgumentError("unknown time scheme '" + name + "'");
}

std::string to_string(TimeScheme s) {
    switch (s) {
        case TimeScheme::BackwardEuler:
            return "implicit";
        case TimeScheme::CrankNicolson:
            return "crank-nicolson";
        case TimeScheme::Explicit:
            return "explicit";
    }
    return "?";
}

double explicit_step_limit(const Mesh& mesh) {
    std::vector<double> diag(mesh.size(), 0.0);
    for (const Face& f : mesh.faces()) {
        diag[f.a] += f.T;
        diag[f.b] += f.T;
    }
    double lim = std::numeric_limits<double>::infinity();
    for (int c = 0; c < mesh.size(); ++c)
        if (diag[c] > 0.0) lim = std::min(lim, mesh.volume(c) / diag[c]);
    return lim;
}

HeatState heat_solve(const ScalarField& rho_in, double t_end, double dt, TimeScheme scheme,
                     const std::function<void(const HeatState&)>& on_step) {
    const Mesh& mesh = rho_in.mesh;
    if (mesh.empty()) throw ArgumentError("empty mesh");
    if (!(dt > 0.0)) throw ArgumentError("dt must be positive");
    if (!(t_end >= 0.0)) throw ArgumentError("t_end must be nonnegative");
    HeatState st;
    st.rho = rho_in;
    const long steps = t_end > 0.0 ? static_cast<long>(std::ceil(t_end / dt - 1e-12)) : 0;
    if (steps == 0) return st;
    const double h = t_end / static_cast<double>(steps);
    st.dt = h;
    if (scheme == TimeScheme::Explicit && h > explicit_step_limit(mesh) * (1.0 + 1e-12))
        throw ArgumentError("explicit step exceeds the stability limit");

    const int n = mesh.size();
    Eigen::VectorXd V(n);
    for (int c = 0; c < n; ++c) V[c] = mesh.volume(c);
    const SpMat L = laplacian(mesh);
    Eigen::Map<Eigen::VectorXd> u(st.rho.values.data(), n);

    Eigen::SimplicialLDLT<SpMat> solver;
    if (scheme != TimeScheme::Explicit) {
        const double theta = scheme == TimeScheme::BackwardEuler ? 1.0 : 0.5;
        SpMat A = L * (theta * h);
        for (int c = 0; c < n; ++c) A.coeffRef(c, c) += V[c];
        solver.compute(A);
        if (solver.info() != Eigen::Success) throw ArgumentError("heat matrix factorization failed");
    }
    Eigen::VectorXd rhs(n);
    for (long k = 0; k < steps; ++k) {
        switch (scheme) {
            case TimeScheme::Explicit:
                u -= (h * (L * u)).cwiseQuotient(V);
                break;
            case TimeScheme::BackwardEuler:
                rhs = V.cwiseProduct(u);
                u = solver.solve(rhs);
                break;
            case TimeScheme::CrankNicolson:
                rhs = V.cwiseProduct(u) - (0.5 * h) * (L * u);
                u = solver.solve(rhs);
                break;
        }
        st.t = h * static_cast<double>(k + 1);
        st.steps = k + 1;
        if (on_step) on_step(st);
    }
    return st;
}

double neumann_lambda1(int dim) { return radial_mode(dim).lambda(); }

DecayFit eigenmode_decay_rate(int dim, int n_r, double dt, double t0, double t1, TimeScheme scheme) {
    const Mesh mesh = Mesh::radial(dim, n_r);
    InitialSpec spec;
    spec.density = "eigenmode";
    spec.amplitude = 0.5;
    const ScalarField rho0 = project_initial(spec, mesh);
    const double mean = rho0.integral() / mesh.total_volume();

    // Least-squares slope of log ||rho - mean|| over the snapshots in [t0, t1].
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    heat_solve(rho0, t1, dt, scheme, [&](const HeatState& s) {
        if (s.t < t0 - 1e-12) return;
        ScalarField dev = s.rho;
        for (double& v : dev.values) v -= mean;
        const double y = std::log(l2_norm(dev));
        sx += s.t;
        sy += y;
        sxx += s.t * s.t;
        sxy += s.t * y;
        ++cnt;
    });
    if (cnt < 2) throw ArgumentError("decay fit window holds fewer than two steps");
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    const double lam = neumann_lambda1(dim);
    return {-slope, lam, std::abs(-slope - lam) / lam, n_r};
}

}  // namespace kdl
