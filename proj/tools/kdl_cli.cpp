// kdl: command-line harness for the kinetic diffusion-limit simulator.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kdl/endpoint_calculus.hpp"
#include "kdl/harness.hpp"

#ifndef KDL_GIT_REV
#define KDL_GIT_REV "unknown"
#endif

namespace fs = std::filesystem;
using namespace kdl;

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

Vec parse_vec(const std::vector<double>& v, const char* what) {
    if (v.empty() || v.size() > 3) throw ArgumentError(std::string(what) + " needs 1 to 3 components");
    return Vec::from_span(v);
}

struct Output {
    fs::path dir;
    std::vector<std::string> files;

    void write(const std::string& name, const std::string& text) {
        if (dir.empty()) return;
        fs::create_directories(dir);
        std::ofstream f(dir / name);
        if (!f) throw ArgumentError("cannot write " + (dir / name).string());
        f << text;
        files.push_back(name);
    }
};

// Flags that override the config file. Unset flags leave the config untouched.
struct Overrides {
    std::string config_file;
    std::string domain, boundary, initial, scheme, sampler, out;
    int dim = 0, n_r = 0, n_theta = 0, snapshots = 0;
    std::vector<double> semi_axes, center, eps, schedule_d;
    std::vector<std::uint64_t> seeds;
    std::vector<int> test_functions;
    std::size_t n = 0;
    double dt = -1.0, t_end = -1.0, heat_dt = -1.0, p = -1.0, kde = -1.0;
    unsigned threads = 0;
    bool threads_set = false;

    void add(CLI::App* app) {
        app->add_option("--config", config_file, "JSON config file")->check(CLI::ExistingFile);
        app->add_option("--domain", domain, "unit-ball | ellipse | ellipsoid");
        app->add_option("--dim", dim, "spatial dimension (2 or 3)");
        app->add_option("--semi-axes", semi_axes, "ellipsoid semi-axes")->delimiter(',');
        app->add_option("--center", center, "ellipsoid center")->delimiter(',');
        app->add_option("--boundary", boundary, "reflecting | free-space");
        app->add_option("--eps", eps, "Knudsen numbers, e.g. 0.4,0.2,0.1")->delimiter(',');
        app->add_option("--n", n, "particles per run");
        app->add_option("--dt", dt, "kinetic time step (0 = eps^2/8)");
        app->add_option("--t-end", t_end, "final time");
        app->add_option("--seed", seeds, "seeds, comma separated")->delimiter(',');
        app->add_option("--threads", threads, "worker threads (0 = all)")->each([this](const std::string&) {
            threads_set = true;
        });
        app->add_option("--initial", initial, "uniform | bump | eigenmode | gaussian");
        app->add_option("--n-r", n_r, "radial cells of the comparison mesh");
        app->add_option("--n-theta", n_theta, "angular cells of the comparison mesh");
        app->add_option("--heat-scheme", scheme, "implicit | crank-nicolson | explicit");
        app->add_option("--heat-dt", heat_dt, "heat solver time step");
        app->add_option("--snapshots", snapshots, "trapezoid intervals of the weak residual");
        app->add_option("--test-functions", test_functions, "builtin test function indices")->delimiter(',');
        app->add_option("--p", p, "integrability exponent");
        app->add_option("--schedule", schedule_d, "sample counts, e.g. 1e5,3e5,1e6")->delimiter(',');
        app->add_option("--sampler", sampler, "grid | sobol | random");
        app->add_option("--kde", kde, "kernel bandwidth for a smoothed density (0 = off)");
        app->add_option("--out", out, "output directory");
    }

    StudyConfig resolve() const {
        StudyConfig c;
        if (!config_file.empty()) {
            std::ifstream f(config_file);
            json j;
            try {
                j = json::parse(f);
            } catch (const json::exception& e) {
                throw ArgumentError("cannot parse " + config_file + ": " + e.what());
            }
            c = config_from_json(j, c);
        }
        if (!domain.empty()) c.domain = domain;
        if (dim) c.dim = dim;
        if (!semi_axes.empty()) c.semi_axes = semi_axes;
        if (!center.empty()) c.center = center;
        if (!boundary.empty()) c.boundary_mode = boundary;
        if (!eps.empty()) c.eps = eps;
        if (n) c.n_particles = n;
        if (dt >= 0.0) c.dt = dt;
        if (t_end >= 0.0) c.t_end = t_end;
        if (!seeds.empty()) c.seeds = seeds;
        if (threads_set) c.threads = threads;
        if (!initial.empty()) {
            c.initial.density = initial;
        } else if (c.boundary_mode == "free-space" && c.initial.density == "uniform") {
            c.initial.density = "gaussian";
        }
        if (n_r) c.n_r = n_r;
        if (n_theta) c.n_theta = n_theta;
        if (!scheme.empty()) c.heat_scheme = scheme;
        if (heat_dt > 0.0) c.heat_dt = heat_dt;
        if (snapshots) c.snapshots = snapshots;
        if (!test_functions.empty()) c.test_functions = test_functions;
        if (p > 0.0) c.p = p;
        if (!schedule_d.empty()) {
            c.schedule.clear();
            for (double s : schedule_d) {
                if (!(s >= 1.0)) throw ArgumentError("schedule entries must be >= 1");
                c.schedule.push_back(static_cast<std::size_t>(std::llround(s)));
            }
        }
        if (!sampler.empty()) c.sampler = sampler;
        if (kde >= 0.0) c.kde_bandwidth = kde;
        if (!out.empty()) c.output_dir = out;
        return c;
    }
};

void write_density(Output& out, const std::string& tag, double eps, double t, const ScalarField& rho, double bw) {
    const std::string stem = tag + (eps > 0.0 ? "_eps" + num(eps) : "") + "_t" + num(t);
    out.write(stem + ".csv", to_csv(rho));
    if (bw > 0.0) out.write(stem + "_kde.csv", to_csv(kde_smooth(rho, bw)));
}

json ensemble_summary(const ParticleEnsemble& ens, const Mesh& mesh) {
    const ScalarField rho = density(ens, mesh);
    const MaxwellianDeviation md = maxwellian_deviation(ens, 2);
    json j{{"eps", ens.eps},
           {"t", ens.t},
           {"n_particles", ens.size()},
           {"seed", ens.seed},
           {"reflections", ens.reflections},
           {"mass_in_mesh", rho.integral()},
           {"velocity_variance", velocity_variance(ens)},
           {"maxwellian_deviation", md.value},
           {"maxwellian_null_se", md.null_se}};
    if (ens.mode == BoundaryMode::Reflecting) {
        const FluxEstimate fl = boundary_flux(ens, mesh);
        j["boundary_flux"] = fl.value;
        j["boundary_flux_se"] = fl.se;
        j["weighted_energy"] = weighted_energy(ens, mesh);
    }
    return j;
}

// Runs one subcommand; returns the exit code.
int run(const std::string& cmd, const StudyConfig& c, Output& out, json& report, const std::vector<double>& xv,
        const std::vector<double>& vv, int samples, double max_speed, bool fd) {
    if (cmd == "trace") {
        const Domain dom = c.make_domain();
        const Vec x = parse_vec(xv, "--x"), v = parse_vec(vv, "--v");
        const EndpointResult r = endpoint(dom, x, v);
        report = to_json(r.cycle, r.eta);
        return 0;
    }
    if (cmd == "endpoint") {
        const Domain dom = c.make_domain();
        const int d = dom.dim();
        std::ostringstream csv;
        csv.precision(17);
        for (int k = 0; k < d; ++k) csv << "x" << k << ",";
        for (int k = 0; k < d; ++k) csv << "v" << k << ",";
        for (int k = 0; k < d; ++k) csv << "eta" << k << ",";
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) csv << "J" << i << k << ",";
        for (int k = 0; k < d; ++k) csv << "lap" << k << ",";
        csv << "N,L,near_grazing\n";
        std::vector<std::pair<Vec, Vec>> pts;
        if (samples > 0) {
            Rng rng(c.seeds.front(), 0xe9d);
            InitialSpec uni;
            for (int s = 0; s < samples; ++s) {
                const Vec x = sample_position(uni, dom, BoundaryMode::Reflecting, rng);
                Vec v(d);
                for (int k = 0; k < d; ++k) v[k] = rng.normal();
                v *= max_speed * std::pow(rng.uniform(), 1.0 / d) / norm(v);
                pts.emplace_back(x, v);
            }
        } else {
            pts.emplace_back(parse_vec(xv, "--x"), parse_vec(vv, "--v"));
        }
        long rows = 0, failed = 0;
        for (const auto& [x, v] : pts) {
            EndpointDerivatives e;
            try {
                e = endpoint_derivatives(dom, x, v, fd ? DerivMode::FiniteDifference : DerivMode::Analytic);
            } catch (const DiscontinuityError&) {
                ++failed;
                continue;
            } catch (const GrazingError&) {
                ++failed;
                continue;
            }
            for (int k = 0; k < d; ++k) csv << x[k] << ",";
            for (int k = 0; k < d; ++k) csv << v[k] << ",";
            for (int k = 0; k < d; ++k) csv << e.eta[k] << ",";
            for (int i = 0; i < d; ++i)
                for (int k = 0; k < d; ++k) csv << e.J(i, k) << ",";
            for (int k = 0; k < d; ++k) csv << e.lap[k] << ",";
            const double L = dom.is_ball() && d == 2 ? chord_length(x, v) : std::nan("");
            csv << e.n << "," << L << "," << (e.near_grazing ? 1 : 0) << "\n";
            ++rows;
        }
        out.write("endpoint.csv", csv.str());
        if (out.dir.empty()) std::cout << csv.str();
        report = {{"study", "endpoint"}, {"rows", rows}, {"skipped", failed}, {"mode", fd ? "finite-difference" : "analytic"}};
        if (samples == 0 && rows == 0) return 2;
        return 0;
    }
    if (cmd == "simulate") {
        const Domain dom = c.make_domain();
        const Mesh mesh = c.comparison_mesh();
        json runs = json::array();
        for (double eps : c.eps) {
            ParticleEnsemble ens = sample_initial(c.initial, c.n_particles, c.seeds.front(), dom, c.mode(), eps);
            ens.threads = c.threads;
            advance(ens, c.t_end, c.dt_for(eps));
            json s = ensemble_summary(ens, mesh);
            s["dt"] = c.dt_for(eps);
            runs.push_back(s);
            write_density(out, "density", eps, c.t_end, density(ens, mesh), c.kde_bandwidth);
        }
        report = {{"study", "simulate"}, {"config", to_json(c)}, {"mesh", mesh.describe()}, {"runs", runs}};
        return 0;
    }
    if (cmd == "heat") {
        if (c.mode() != BoundaryMode::Reflecting || !c.make_domain().is_ball())
            throw ArgumentError("heat runs on the reflecting unit ball");
        const Mesh mesh = c.dim == 3 ? Mesh::radial(3, c.n_r) : Mesh::polar(c.n_r, c.n_theta);
        const ScalarField rho0 = project_initial(c.initial, mesh);
        const HeatState st = heat_solve(rho0, c.t_end, c.heat_dt, parse_scheme(c.heat_scheme));
        const double m0 = rho0.integral(), m1 = st.rho.integral();
        write_density(out, "heat", 0.0, c.t_end, st.rho, c.kde_bandwidth);
        report = {{"study", "heat"},       {"config", to_json(c)},     {"mesh", mesh.describe()},
                  {"steps", st.steps},     {"dt", st.dt},              {"mass_initial", m0},
                  {"mass_final", m1},      {"mass_drift", std::abs(m1 - m0) / std::max(1.0, std::abs(m0))},
                  {"min", st.rho.min()},   {"max", st.rho.max()}};
        return 0;
    }
    if (cmd == "converge") {
        const ConvergenceReport r = converge_study(c);
        report = to_json(r);
        out.write("reference_t" + num(c.t_end) + ".csv", to_csv(r.reference));
        for (const auto& e : r.entries) write_density(out, "density", e.eps, e.t_end, e.density, c.kde_bandwidth);
        return r.verdict == "non-monotone" ? 2 : 0;
    }
    if (cmd == "weak-residual") {
        const WeakResidualReport r = weak_residual_study(c);
        report = to_json(r);
        return r.verdict == "pass" ? 0 : 2;
    }
    if (cmd == "integrability") {
        const IntegrabilityReport r = integrability_study(c.p, c.schedule, c.seeds.front(), c.sampler);
        report = to_json(r);
        // A verdict contradicting the p = 3 threshold is a failure; divergence for p > 3 is expected.
        const bool contradiction =
            (c.p < 3.0 && r.verdict == "diverging") || (c.p > 3.0 && r.verdict == "converging");
        return contradiction ? 2 : 0;
    }
    throw ArgumentError("unknown subcommand " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kinetic Fokker-Planck diffusion-limit simulator"};
    app.require_subcommand(1);
    Overrides ov;
    std::vector<double> xv, vv;
    int samples = 0;
    double max_speed = 3.0;
    bool fd = false;

    auto* trace = app.add_subcommand("trace", "specular cycle and end point of one phase point");
    auto* endp = app.add_subcommand("endpoint", "end point and its velocity derivatives");
    auto* sim = app.add_subcommand("simulate", "particle run to t_end for each eps");
    auto* heat = app.add_subcommand("heat", "heat equation with Neumann data on the ball");
    auto* conv = app.add_subcommand("converge", "L2 error against the heat reference as eps decreases");
    auto* weak = app.add_subcommand("weak-residual", "weak-formulation residual with end-point test functions");
    auto* integ = app.add_subcommand("integrability", "mean of (2/L)^p over the disk");
    for (auto* sub : {trace, endp, sim, heat, conv, weak, integ}) ov.add(sub);
    for (auto* sub : {trace, endp}) {
        sub->add_option("--x", xv, "position")->delimiter(',');
        sub->add_option("--v", vv, "velocity")->delimiter(',');
    }
    trace->get_option("--x")->required();
    trace->get_option("--v")->required();
    endp->add_option("--samples", samples, "random samples instead of one point");
    endp->add_option("--max-speed", max_speed, "speed bound for random samples");
    endp->add_flag("--fd", fd, "finite differences instead of exact derivatives");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const StudyConfig c = ov.resolve();
        Output out{c.output_dir, {}};
        json report;
        const int rc = run(cmd, c, out, report, xv, vv, samples, max_speed, fd);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.write("report.json", report.dump(2) + "\n");
        json manifest{{"command", cmd},
                      {"config_hash", hex64(config_hash(c))},
                      {"seeds", c.seeds},
                      {"git_revision", KDL_GIT_REV},
                      {"wall_time_s", wall},
                      {"exit_code", rc},
                      {"files", out.files}};
        out.write("manifest.json", manifest.dump(2) + "\n");
        if (cmd != "endpoint" || !out.dir.empty()) std::cout << report.dump(2) << "\n";
        return rc;
    } catch (const ArgumentError& e) {
        std::cerr << "kdl " << cmd << ": " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "kdl " << cmd << ": " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "kdl " << cmd << ": " << e.what() << "\n";
        return 2;
    }
}
