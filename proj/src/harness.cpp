#include "kdl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/random/sobol.hpp>

#include "kdl/endpoint_calculus.hpp"
#include "kdl/parallel.hpp"

namespace kdl {

// --- config ----------------------------------------------------------------

BoundaryMode StudyConfig::mode() const {
    if (boundary_mode == "reflecting") return BoundaryMode::Reflecting;
    if (boundary_mode == "free-space") return BoundaryMode::FreeSpace;
    throw ArgumentError("unknown boundary_mode '" + boundary_mode + "'");
}

Domain StudyConfig::make_domain() const { return Domain::builtin(domain, dim, semi_axes, center); }

Mesh StudyConfig::comparison_mesh() const {
    if (mode() == BoundaryMode::FreeSpace) return Mesh::cartesian(n_cart, -extent, extent);
    if (dim == 3) return Mesh::radial(3, n_r);
    return Mesh::polar(n_r, n_theta);
}

double StudyConfig::dt_for(double e) const { return dt > 0.0 ? dt : default_dt(e); }

json vec_json(const Vec& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

namespace {

Vec vec_from(const json& j) {
    std::vector<double> v = j.get<std::vector<double>>();
    if (v.empty() || v.size() > 3) throw ArgumentError("vector must have 1 to 3 entries");
    return Vec::from_span(v);
}

template <class T>
void take(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : keys) ok = ok || it.key() == k;
        if (!ok) throw ArgumentError("unknown config key '" + where + it.key() + "'");
    }
}

}  // namespace

json to_json(const InitialSpec& s) {
    return json{{"density", s.density},   {"velocity", s.velocity}, {"velocity_variance", s.velocity_variance},
                {"mass", s.mass},         {"center", vec_json(s.center)}, {"width", s.width},
                {"amplitude", s.amplitude}, {"sigma", s.sigma}};
}

json to_json(const StudyConfig& c) {
    json j;
    j["domain"] = {{"kind", c.domain}, {"dim", c.dim}, {"semi_axes", c.semi_axes}, {"center", c.center}};
    j["boundary_mode"] = c.boundary_mode;
    j["eps"] = c.eps;
    j["n_particles"] = c.n_particles;
    j["dt"] = c.dt;
    j["t_end"] = c.t_end;
    j["seeds"] = c.seeds;
    j["threads"] = c.threads;
    j["initial"] = to_json(c.initial);
    j["mesh"] = {{"n_r", c.n_r}, {"n_theta", c.n_theta}, {"n_cart", c.n_cart}, {"extent", c.extent}};
    j["heat"] = {{"refine", c.heat_refine}, {"dt", c.heat_dt}, {"scheme", c.heat_scheme}};
    j["snapshots"] = c.snapshots;
    j["test_functions"] = c.test_functions;
    j["p"] = c.p;
    j["schedule"] = c.schedule;
    j["sampler"] = c.sampler;
    j["output_dir"] = c.output_dir;
    j["kde_bandwidth"] = c.kde_bandwidth;
    return j;
}

StudyConfig config_from_json(const json& j, StudyConfig c) {
    if (!j.is_object()) throw ArgumentError("config must be a JSON object");
    reject_unknown(j,
                   {"domain", "boundary_mode", "eps", "n_particles", "dt", "t_end", "seeds", "threads", "initial", "mesh",
                    "heat", "snapshots", "test_functions", "p", "schedule", "sampler", "output_dir", "kde_bandwidth"},
                   "");
    try {
        if (j.contains("domain")) {
            const json& d = j.at("domain");
            reject_unknown(d, {"kind", "dim", "semi_axes", "center"}, "domain.");
            take(d, "kind", c.domain);
            take(d, "dim", c.dim);
            take(d, "semi_axes", c.semi_axes);
            take(d, "center", c.center);
        }
        take(j, "boundary_mode", c.boundary_mode);
        take(j, "eps", c.eps);
        take(j, "n_particles", c.n_particles);
        take(j, "dt", c.dt);
        take(j, "t_end", c.t_end);
        take(j, "seeds", c.seeds);
        take(j, "threads", c.threads);
        if (j.contains("initial")) {
            const json& s = j.at("initial");
            reject_unknown(s, {"density", "velocity", "velocity_variance", "mass", "center", "width", "amplitude", "sigma"},
                           "initial.");
            take(s, "density", c.initial.density);
            take(s, "velocity", c.initial.velocity);
            take(s, "velocity_variance", c.initial.velocity_variance);
            take(s, "mass", c.initial.mass);
            if (s.contains("center")) c.initial.center = vec_from(s.at("center"));
            take(s, "width", c.initial.width);
            take(s, "amplitude", c.initial.amplitude);
            take(s, "sigma", c.initial.sigma);
        }
        if (j.contains("mesh")) {
            const json& m = j.at("mesh");
            reject_unknown(m, {"n_r", "n_theta", "n_cart", "extent"}, "mesh.");
            take(m, "n_r", c.n_r);
            take(m, "n_theta", c.n_theta);
            take(m, "n_cart", c.n_cart);
            take(m, "extent", c.extent);
        }
        if (j.contains("heat")) {
            const json& h = j.at("heat");
            reject_unknown(h, {"refine", "dt", "scheme"}, "heat.");
            take(h, "refine", c.heat_refine);
            take(h, "dt", c.heat_dt);
            take(h, "scheme", c.heat_scheme);
        }
        take(j, "snapshots", c.snapshots);
        take(j, "test_functions", c.test_functions);
        take(j, "p", c.p);
        take(j, "schedule", c.schedule);
        take(j, "sampler", c.sampler);
        take(j, "output_dir", c.output_dir);
        take(j, "kde_bandwidth", c.kde_bandwidth);
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("bad config value: ") + e.what());
    }
    return c;
}

std::uint64_t config_hash(const StudyConfig& c) {
    const std::string s = to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) s[i] = digits[h & 0xf];
    return s;
}

// --- convergence -----------------------------------------------------------

namespace {

double mean_of(const std::vector<double>& x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double se_of(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double m = mean_of(x);
    double s2 = 0.0;
    for (double v : x) s2 += (v - m) * (v - m);
    return std::sqrt(s2 / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

ScalarField heat_reference(const StudyConfig& c, const Mesh& coarse) {
    if (c.mode() == BoundaryMode::FreeSpace) {
        if (c.initial.density != "gaussian")
            throw ArgumentError("free-space comparison needs the gaussian initial density");
        return gaussian_heat_solution(c.initial, coarse, c.t_end);
    }
    if (!c.make_domain().is_ball()) throw ArgumentError("heat reference needs the unit ball");
    const Mesh fine = coarse.kind() == MeshKind::Polar
                          ? Mesh::polar(coarse.n_r() * c.heat_refine, coarse.n_theta() * c.heat_refine)
                          : Mesh::radial(coarse.dim(), coarse.n_r() * c.heat_refine);
    const ScalarField rho0 = project_initial(c.initial, fine);
    const HeatState st = heat_solve(rho0, c.t_end, c.heat_dt, parse_scheme(c.heat_scheme));
    return restrict_to(st.rho, coarse);
}

void check_common(const StudyConfig& c) {
    if (c.eps.empty()) throw ArgumentError("eps list is empty");
    for (double e : c.eps)
        if (!(e > 0.0)) throw ArgumentError("eps values must be positive");
    if (c.seeds.empty()) throw ArgumentError("seed list is empty");
    if (c.n_particles == 0) throw ArgumentError("n_particles must be positive");
    if (!(c.t_end > 0.0)) throw ArgumentError("t_end must be positive");
}

std::vector<double> sorted_desc(std::vector<double> e) {
    std::sort(e.begin(), e.end(), std::greater<>());
    return e;
}

}  // namespace

std::string monotone_verdict(const std::vector<double>& mean, const std::vector<double>& se) {
    bool all_down = true;
    for (std::size_t k = 0; k + 1 < mean.size(); ++k) {
        const double diff = mean[k] - mean[k + 1];
        const double bar = se[k] + se[k + 1];
        if (diff < -bar) return "non-monotone";
        if (!(diff > bar)) all_down = false;
    }
    if (all_down && mean.size() >= 2) return "monotone";
    return "inconclusive";
}

ConvergenceReport converge_study(const StudyConfig& config) {
    check_common(config);
    ConvergenceReport rep;
    rep.config = config;
    const Domain dom = config.make_domain();
    const BoundaryMode mode = config.mode();
    const Mesh mesh = config.comparison_mesh();
    rep.reference = heat_reference(config, mesh);

    // Histogram noise if the particles were drawn from the reference itself.
    const double m = config.initial.mass;
    double floor2 = 0.0;
    for (int c = 0; c < mesh.size(); ++c) {
        const double vol = mesh.volume(c);
        const double p = std::clamp(rep.reference.values[c] * vol / m, 0.0, 1.0);
        floor2 += m * m * p * (1.0 - p) / (static_cast<double>(config.n_particles) * vol);
    }

    for (double eps : sorted_desc(config.eps)) {
        ConvergenceEntry e;
        e.eps = eps;
        e.n = config.n_particles;
        e.dt = config.dt_for(eps);
        e.t_end = config.t_end;
        e.noise_floor = std::sqrt(floor2);
        e.density = ScalarField(mesh);
        for (std::uint64_t seed : config.seeds) {
            ParticleEnsemble ens = sample_initial(config.initial, config.n_particles, seed, dom, mode, eps);
            ens.threads = config.threads;
            advance(ens, config.t_end, e.dt);
            const ScalarField rho = density(ens, mesh);
            e.errors.push_back(l2_error(rho, rep.reference));
            for (int c = 0; c < mesh.size(); ++c)
                e.density.values[c] += rho.values[c] / static_cast<double>(config.seeds.size());
        }
        e.mean_error = mean_of(e.errors);
        e.se = se_of(e.errors);
        // A single seed has no spread; the histogram noise bounds what it can resolve.
        e.error_bar = std::max(e.se, e.noise_floor / std::sqrt(static_cast<double>(e.errors.size())));
        rep.entries.push_back(std::move(e));
    }
    std::vector<double> mean, se;
    for (const auto& e : rep.entries) {
        mean.push_back(e.mean_error);
        se.push_back(e.error_bar);
    }
    rep.verdict = monotone_verdict(mean, se);
    // An error bar larger than the error itself means the study cannot resolve anything.
    for (const auto& e : rep.entries)
        if (e.error_bar > e.mean_error && rep.verdict == "monotone") rep.verdict = "inconclusive";
    return rep;
}

json to_json(const ConvergenceReport& r) {
    json j;
    j["study"] = "converge";
    j["config"] = to_json(r.config);
    j["mesh"] = r.reference.mesh.describe();
    json rows = json::array();
    for (const auto& e : r.entries) {
        rows.push_back({{"eps", e.eps},
                        {"n_particles", e.n},
                        {"dt", e.dt},
                        {"t_end", e.t_end},
                        {"errors", e.errors},
                        {"mean_error", e.mean_error},
                        {"se", e.se},
                        {"noise_floor", e.noise_floor},
                        {"error_bar", e.error_bar}});
    }
    j["entries"] = rows;
    j["verdict"] = r.verdict;
    return j;
}

// --- weak residual ---------------------------------------------------------

namespace {

// Cell average of g over polar/radial cell c by q x q midpoint quadrature.
template <class G>
double cell_average(const Mesh& mesh, int c, const G& g, int q = 3) {
    const Mesh::Box b = mesh.bounds(c);
    double acc = 0.0, wsum = 0.0;
    for (int a = 0; a < q; ++a) {
        const double r = b.a0 + (a + 0.5) * (b.a1 - b.a0) / q;
        for (int k = 0; k < q; ++k) {
            const double th = b.b0 + (k + 0.5) * (b.b1 - b.b0) / q;
            Vec x(mesh.dim());
            double w = r;
            if (mesh.dim() == 2) {
                x[0] = r * std::cos(th);
                x[1] = r * std::sin(th);
            } else {
                x[0] = r;
                w = r * r;
            }
            acc += w * g(x);
            wsum += w;
        }
    }
    return acc / wsum;
}

double heat_weak_residual(const StudyConfig& c, const TestFunction& psi, int index) {
    // Radial shells carry no angular information: only radial data and radial psi.
    if (c.dim == 3 && (index == 3 || !is_radial(c.initial))) return std::nan("");
    const Mesh fine = c.dim == 2 ? Mesh::polar(c.n_r * c.heat_refine, c.n_theta * c.heat_refine)
                                 : Mesh::radial(3, c.n_r * c.heat_refine);
    const ScalarField rho0 = project_initial(c.initial, fine);
    const double T = c.t_end;
    const int K = c.snapshots;
    auto integrand = [&](const ScalarField& rho, double t) {
        double s = 0.0;
        for (int k = 0; k < fine.size(); ++k)
            s += rho.values[k] * fine.volume(k) *
                 cell_average(fine, k, [&](const Vec& x) { return psi.dt(t, x) + psi.laplacian(t, x); });
        return s;
    };
    double R = 0.0;
    for (int k = 0; k < fine.size(); ++k)
        R += rho0.values[k] * fine.volume(k) * cell_average(fine, k, [&](const Vec& x) { return psi.value(0.0, x); });
    ScalarField rho = rho0;
    double prev = integrand(rho, 0.0);
    for (int s = 1; s <= K; ++s) {
        const double t0 = T * (s - 1) / K, t1 = T * s / K;
        rho = heat_solve(rho, t1 - t0, std::min(c.heat_dt, t1 - t0), parse_scheme(c.heat_scheme)).rho;
        const double cur = integrand(rho, t1);
        R += 0.5 * (t1 - t0) * (prev + cur);
        prev = cur;
    }
    return R;
}

}  // namespace

WeakResidualReport weak_residual_study(const StudyConfig& config) {
    check_common(config);
    if (config.snapshots < 1) throw ArgumentError("snapshots must be positive");
    if (config.mode() != BoundaryMode::Reflecting) throw ArgumentError("weak residual study needs the reflecting ball");
    const Domain dom = config.make_domain();
    if (!dom.is_ball()) throw ArgumentError("weak residual study needs the unit ball");
    WeakResidualReport rep;
    rep.config = config;
    rep.indices = config.test_functions;
    const double T = config.t_end;
    std::vector<TestFunction> psis;
    for (int idx : config.test_functions) {
        TestFunction psi = with_time_factor(neumann_family(idx, config.dim), T);
        if (!psi.neumann_ok) throw ContractError("test function '" + psi.name + "' fails the Neumann condition");
        psis.push_back(std::move(psi));
    }
    const std::size_t F = psis.size();
    for (const TestFunction& psi : psis) rep.R_heat.push_back(heat_weak_residual(config, psi, config.test_functions[&psi - psis.data()]));

    const int K = config.snapshots;
    for (double eps : sorted_desc(config.eps)) {
        const std::size_t N = config.n_particles;
        const std::size_t total = N * config.seeds.size();
        std::vector<double> accR(total * F, 0.0), accE(total * F, 0.0);
        std::vector<long> skipped(total, 0);
        const double dt = config.dt_for(eps);
        for (std::size_t s = 0; s < config.seeds.size(); ++s) {
            ParticleEnsemble ens = sample_initial(config.initial, N, config.seeds[s], dom, BoundaryMode::Reflecting, eps);
            ens.threads = config.threads;
            for (int k = 0; k <= K; ++k) {
                const double t = T * k / K;
                if (k > 0) advance(ens, t, dt);
                const double w = (k == 0 || k == K) ? 0.5 * T / K : T / K;
                parallel_for(N, config.threads, [&](std::size_t lo, std::size_t hi) {
                    for (std::size_t i = lo; i < hi; ++i) {
                        const std::size_t row = (s * N + i) * F;
                        EndpointDerivatives d;
                        try {
                            d = endpoint_derivatives(dom, ens.x[i], eps * ens.v[i]);
                        } catch (const GrazingError&) {
                            ++skipped[s * N + i];
                            continue;
                        }
                        for (std::size_t f = 0; f < F; ++f) {
                            const double lap = test_function_laplacian(d, psis[f], t);
                            accR[row + f] += w * (psis[f].dt(t, ens.x[i]) + lap);
                            accE[row + f] += w * (psis[f].dt(t, d.eta) + lap);
                            if (k == 0) {
                                const double init = psis[f].value(0.0, d.eta);
                                accR[row + f] += init;
                                accE[row + f] += init;
                            }
                        }
                    }
                });
            }
        }
        const double mass = config.initial.mass;
        const long skip_total = std::accumulate(skipped.begin(), skipped.end(), 0L);
        for (std::size_t f = 0; f < F; ++f) {
            auto stats = [&](const std::vector<double>& acc) {
                double m = 0.0, m2 = 0.0;
                for (std::size_t i = 0; i < total; ++i) {
                    m += acc[i * F + f];
                    m2 += acc[i * F + f] * acc[i * F + f];
                }
                const double n = static_cast<double>(total);
                m /= n;
                const double var = std::max(0.0, m2 / n - m * m) * n / (n - 1.0);
                return std::pair<double, double>{mass * m, mass * std::sqrt(var / n)};
            };
            const auto [R, Rse] = stats(accR);
            const auto [E, Ese] = stats(accE);
            rep.entries.push_back({eps, config.test_functions[f], psis[f].name, R, Rse, E, Ese, skip_total});
        }
    }

    // Per-function verdict between the largest and the smallest eps.
    const double e_hi = *std::max_element(config.eps.begin(), config.eps.end());
    const double e_lo = *std::min_element(config.eps.begin(), config.eps.end());
    for (std::size_t f = 0; f < F; ++f) {
        const int idx = config.test_functions[f];
        const WeakResidualEntry* hi = nullptr;
        const WeakResidualEntry* lo = nullptr;
        for (const auto& e : rep.entries) {
            if (e.index != idx) continue;
            if (e.eps == e_hi) hi = &e;
            if (e.eps == e_lo) lo = &e;
            if (idx == 0) rep.mass_only_residual = std::max(rep.mass_only_residual, std::abs(e.R));
        }
        if (idx == 0 || e_hi == e_lo) {
            rep.per_function_verdict.push_back("n/a");
            continue;
        }
        const bool down = std::abs(hi->R) - std::abs(lo->R) > hi->R_se + lo->R_se;
        rep.per_function_verdict.push_back(down ? "decreasing" : "not-decreasing");
        if (down) ++rep.decreasing_count;
    }
    int nonconst = 0;
    for (int idx : config.test_functions) nonconst += idx != 0;
    const bool mass_ok = rep.mass_only_residual <= 1e-12;
    rep.verdict = (rep.decreasing_count >= std::min(2, nonconst) && mass_ok) ? "pass" : "fail";
    return rep;
}

json to_json(const WeakResidualReport& r) {
    json j;
    j["study"] = "weak-residual";
    j["config"] = to_json(r.config);
    json rows = json::array();
    for (const auto& e : r.entries) {
        rows.push_back({{"eps", e.eps},
                        {"test_function", e.index},
                        {"name", e.name},
                        {"R", e.R},
                        {"R_se", e.R_se},
                        {"R_exact", e.R_exact},
                        {"R_exact_se", e.R_exact_se},
                        {"skipped", e.skipped}});
    }
    j["entries"] = rows;
    json heat = json::array();
    for (std::size_t f = 0; f < r.indices.size(); ++f) {
        const double v = r.R_heat[f];
        heat.push_back({{"test_function", r.indices[f]}, {"R_heat", std::isfinite(v) ? json(v) : json(nullptr)},
                        {"verdict", r.per_function_verdict[f]}});
    }
    j["per_function"] = heat;
    j["decreasing_count"] = r.decreasing_count;
    j["mass_only_residual"] = r.mass_only_residual;
    j["verdict"] = r.verdict;
    return j;
}

// --- integrability ---------------------------------------------------------

namespace {

double chord_power(double r, double alpha, double p) {
    return std::pow(2.0 / chord_length(Vec{r, 0.0}, Vec{std::cos(alpha), std::sin(alpha)}), p);
}

// Midpoint product rule in (u = r^2, alpha), alpha the angle between x and v.
// Near the tangent set the integrand behaves like (du + dalpha^2)^(-p/2), so
// the alpha cells scale as n^(1/3) and the u cells as n^(2/3).
std::pair<double, std::size_t> grid_mean(double p, std::size_t n) {
    const int ma = std::max(4, 4 * static_cast<int>(std::lround(0.5 * std::cbrt(static_cast<double>(n)))));
    const int mu = std::max(1, static_cast<int>(std::lround(static_cast<double>(n) / ma)));
    long double sum = 0.0L;
    for (int i = 0; i < mu; ++i) {
        const double r = std::sqrt((i + 0.5) / mu);
        for (int j = 0; j < ma; ++j) sum += chord_power(r, 2.0 * std::numbers::pi * (j + 0.5) / ma, p);
    }
    const std::size_t count = static_cast<std::size_t>(mu) * static_cast<std::size_t>(ma);
    return {static_cast<double>(sum / static_cast<long double>(count)), count};
}

}  // namespace

IntegrabilityReport integrability_study(double p, const std::vector<std::size_t>& schedule, std::uint64_t seed,
                                        const std::string& sampler) {
    if (!(p > 0.0)) throw ArgumentError("p must be positive");
    if (schedule.empty()) throw ArgumentError("schedule is empty");
    for (std::size_t k = 0; k < schedule.size(); ++k)
        if (schedule[k] == 0 || (k > 0 && schedule[k] <= schedule[k - 1]))
            throw ArgumentError("schedule must be strictly increasing and positive");
    if (sampler != "grid" && sampler != "sobol" && sampler != "random")
        throw ArgumentError("unknown sampler '" + sampler + "' (grid | sobol | random)");

    IntegrabilityReport rep{p, schedule, {}, {}, {}, "", sampler, seed};
    if (sampler == "grid") {
        for (std::size_t n : schedule) {
            const auto [m, count] = grid_mean(p, n);
            rep.estimates.push_back(m);
            rep.se.push_back(0.0);
            rep.counts.push_back(count);
        }
    } else {
        Rng rng(seed, 0x1a7e);
        double shift[3];
        for (double& s : shift) s = rng.uniform();
        boost::random::sobol qrng(3);
        auto draw = [&](double u[3]) {
            if (sampler == "random") {
                for (int k = 0; k < 3; ++k) u[k] = rng.uniform();
                return;
            }
            for (int k = 0; k < 3; ++k) {
                const double q = static_cast<double>(qrng() >> 11) * 0x1.0p-53 + shift[k];
                u[k] = q - std::floor(q);
            }
        };
        long double sum = 0.0L, sum2 = 0.0L;
        std::size_t next = 0;
        for (std::size_t i = 1; i <= schedule.back(); ++i) {
            double u[3];
            draw(u);
            // The chord only depends on |x| and the angle between x and v.
            const double y = chord_power(std::sqrt(u[0]), 2.0 * std::numbers::pi * (u[2] - u[1]), p);
            sum += y;
            sum2 += static_cast<long double>(y) * y;
            if (i == schedule[next]) {
                const long double n = static_cast<long double>(i);
                const long double m = sum / n;
                rep.estimates.push_back(static_cast<double>(m));
                rep.se.push_back(static_cast<double>(std::sqrt(std::max(0.0L, sum2 / n - m * m) / n)));
                rep.counts.push_back(i);
                ++next;
            }
        }
    }
    bool converging = true;
    for (std::size_t k = 0; k + 1 < rep.estimates.size(); ++k)
        if (std::abs(rep.estimates[k + 1] - rep.estimates[k]) >= 0.05 * std::abs(rep.estimates[k])) converging = false;
    if (converging) {
        rep.verdict = "converging";
    } else if (rep.estimates.back() / rep.estimates.front() >= 2.0) {
        rep.verdict = "diverging";
    } else {
        rep.verdict = "inconclusive";
    }
    return rep;
}

json to_json(const IntegrabilityReport& r) {
    json j;
    j["study"] = "integrability";
    j["p"] = r.p;
    j["schedule"] = r.schedule;
    j["estimates"] = r.estimates;
    j["se"] = r.se;
    j["counts"] = r.counts;
    j["sampler"] = r.sampler;
    j["seed"] = r.seed;
    j["verdict"] = r.verdict;
    return j;
}

// --- misc ------------------------------------------------------------------

json to_json(const SpecularCycle& c, const Vec& eta) {
    json j;
    j["x0"] = vec_json(c.x0);
    j["v0"] = vec_json(c.v0);
    j["speed"] = c.speed;
    j["N"] = c.n;
    j["breakpoints"] = c.breakpoints();
    j["arc_length"] = c.arc;
    json pts = json::array();
    for (const Vec& p : c.points) pts.push_back(vec_json(p));
    j["reflection_points"] = pts;
    json vel = json::array();
    for (const Vec& w : c.velocities) vel.push_back(vec_json(w));
    j["segment_velocities"] = vel;
    j["eta"] = vec_json(eta);
    j["near_grazing"] = c.near_grazing;
    return j;
}

ScalarField kde_smooth(const ScalarField& f, double bandwidth) {
    if (!(bandwidth > 0.0)) throw ArgumentError("bandwidth must be positive");
    const Mesh& m = f.mesh;
    ScalarField out(m);
    const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    std::vector<Vec> centers(m.size());
    for (int c = 0; c < m.size(); ++c) centers[c] = m.center(c);
    for (int c = 0; c < m.size(); ++c) {
        double num = 0.0, den = 0.0;
        for (int k = 0; k < m.size(); ++k) {
            const double w = std::exp(-squared_norm(centers[c] - centers[k]) * inv2h2) * m.volume(k);
            num += w * f.values[k];
            den += w;
        }
        out.values[c] = num / den;
    }
    const double before = f.integral(), after = out.integral();
    if (after > 0.0)
        for (double& v : out.values) v *= before / after;
    return out;
}

}  // namespace kdl
