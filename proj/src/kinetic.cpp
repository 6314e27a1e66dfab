#include "kdl/kinetic.hpp"

#include <cmath>

#include "kdl/parallel.hpp"

namespace kdl {
namespace {

constexpr long kMaxReflectionsPerStep = 1'000'000;

void enumerate_alpha(int d, int K, std::vector<int>& cur, int pos, std::vector<std::vector<int>>& out) {
    if (pos == d) {
        int s = 0;
        for (int a : cur) s += a;
        if (s >= 1 && s <= K) out.push_back(cur);
        return;
    }
    for (int a = 0; a <= K; ++a) {
        cur[pos] = a;
        enumerate_alpha(d, K, cur, pos + 1, out);
    }
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

double hermite(int n, double x) {
    switch (n) {
        case 0:
            return 1.0;
        case 1:
            return x;
        case 2:
            return x * x - 1.0;
        case 3:
            return x * (x * x - 3.0);
        case 4: {
            const double x2 = x * x;
            return x2 * x2 - 6.0 * x2 + 3.0;
        }
        default:
            throw ArgumentError("hermite order must be at most 4");
    }
}

ParticleEnsemble sample_initial(const InitialSpec& spec, std::size_t n, std::uint64_t seed, const Domain& domain,
                                BoundaryMode mode, double eps) {
    if (n == 0) throw ArgumentError("ensemble needs at least one particle");
    if (!(eps > 0.0)) throw ArgumentError("eps must be positive");
    validate(spec, domain, mode);
    ParticleEnsemble ens;
    ens.domain = domain;
    ens.mode = mode;
    ens.eps = eps;
    ens.mass = spec.mass;
    ens.seed = seed;
    ens.x.resize(n);
    ens.v.resize(n);
    ens.rng.resize(n);
    parallel_for(n, ens.threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            Rng rng(seed, i);
            ens.x[i] = sample_position(spec, domain, mode, rng);
            ens.v[i] = sample_velocity(spec, domain.dim(), rng);
            ens.rng[i] = rng;
        }
    });
    return ens;
}

long transport_particle(const Domain& dom, Vec& x, Vec& v, double length) {
    const double speed = norm(v);
    if (!(speed > 0.0) || !(length > 0.0)) return 0;
    Vec u = v / speed;
    long refl = 0;
    bool from_boundary = false;
    if (dom.zeta(x) > -kBoundaryTol) {
        x = dom.project_to_boundary(x);
        const Vec n = normal_t(dom, x);
        if (dot(u, n) > 0.0) {
            u = reflect_t(n, u);
            u /= norm(u);
            ++refl;
        }
        from_boundary = true;
    }
    double remaining = length;
    for (;;) {
        const double s = dom.exit_distance(x, u, from_boundary);
        if (s >= remaining) {
            x += remaining * u;
            break;
        }
        remaining -= s;
        x = dom.project_to_boundary(x + s * u);
        u = reflect_t(normal_t(dom, x), u);
        u /= norm(u);
        from_boundary = true;
        if (++refl > kMaxReflectionsPerStep) throw IntegrationError("particle trapped in a grazing reflection chain");
    }
    v = speed * u;
    if (dom.zeta(x) > kBoundaryTol) throw IntegrationError("particle escaped the domain");
    return refl;
}

void step(ParticleEnsemble& ens, double dt) {
    const double eps = ens.eps;
    if (!(dt > 0.0)) throw ArgumentError("dt must be positive");
    if (dt > 0.25 * eps * eps * (1.0 + 1e-12)) throw ArgumentError("dt must resolve the OU time scale (dt <= eps^2/4)");
    const double a = std::exp(-dt / (2.0 * eps * eps));
    const double b = std::sqrt(-std::expm1(-dt / (eps * eps)));
    const double flight = dt / eps;
    const int d = ens.dim();
    const bool reflecting = ens.mode == BoundaryMode::Reflecting;
    std::vector<long> refl_chunks;
    std::mutex mu;
    parallel_for(ens.size(), ens.threads, [&](std::size_t lo, std::size_t hi) {
        long refl = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            Vec& x = ens.x[i];
            Vec& v = ens.v[i];
            Rng& rng = ens.rng[i];
            for (int k = 0; k < d; ++k) v[k] = a * v[k] + b * rng.normal();
            if (reflecting) {
                refl += transport_particle(ens.domain, x, v, norm(v) * flight);
            } else {
                x += flight * v;
            }
            for (int k = 0; k < d; ++k) v[k] = a * v[k] + b * rng.normal();
        }
        std::lock_guard<std::mutex> lock(mu);
        refl_chunks.push_back(refl);
    });
    for (long r : refl_chunks) ens.reflections += r;
    ens.t += dt;
}

void advance(ParticleEnsemble& ens, double t_end, double dt, const std::function<void(const ParticleEnsemble&)>& on_step) {
    const double span = t_end - ens.t;
    if (span <= 0.0) return;
    const long steps = static_cast<long>(std::ceil(span / dt - 1e-9));
    const double h = span / static_cast<double>(steps);
    const double t0 = ens.t;
    for (long k = 0; k < steps; ++k) {
        step(ens, h);
        ens.t = t0 + h * static_cast<double>(k + 1);
        if (on_step) on_step(ens);
    }
}

ScalarField density(const ParticleEnsemble& ens, const Mesh& mesh) {
    if (mesh.empty()) throw ArgumentError("empty mesh");
    std::vector<long> count(mesh.size(), 0);
    for (const Vec& x : ens.x) {
        const int c = mesh.locate(x);
        if (c >= 0) ++count[c];
    }
    ScalarField f(mesh);
    const double w = ens.weight();
    for (int c = 0; c < mesh.size(); ++c) f.values[c] = static_cast<double>(count[c]) * w / mesh.volume(c);
    return f;
}

VectorField current_density(const ParticleEnsemble& ens, const Mesh& mesh) {
    if (mesh.empty()) throw ArgumentError("empty mesh");
    VectorField f{mesh, std::vector<Vec>(mesh.size(), Vec(ens.dim()))};
    for (std::size_t i = 0; i < ens.size(); ++i) {
        const int c = mesh.locate(ens.x[i]);
        if (c >= 0) f.values[c] += ens.v[i];
    }
    const double w = ens.weight();
    for (int c = 0; c < mesh.size(); ++c) f.values[c] *= w / mesh.volume(c);
    return f;
}

FluxEstimate boundary_flux(const ParticleEnsemble& ens, const Mesh& mesh) {
    if (mesh.empty()) throw ArgumentError("empty mesh");
    const std::vector<int> cells = mesh.boundary_cells();
    std::vector<char> is_outer(mesh.size(), 0);
    double vol = 0.0;
    for (int c : cells) {
        is_outer[c] = 1;
        vol += mesh.volume(c);
    }
    const double scale = ens.weight() / vol;
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < ens.size(); ++i) {
        const int c = mesh.locate(ens.x[i]);
        if (c < 0 || !is_outer[c]) continue;
        const double r = norm(ens.x[i]);
        if (r == 0.0) continue;
        const double y = dot(ens.v[i], ens.x[i]) / r * scale;
        s += y;
        s2 += y * y;
    }
    const double n = static_cast<double>(ens.size());
    return {s, std::sqrt(std::max(0.0, s2 - s * s / n))};
}

MaxwellianDeviation maxwellian_deviation(const ParticleEnsemble& ens, int K) {
    if (K < 1 || K > 4) throw ArgumentError("moment order K must be in 1..4");
    const int d = ens.dim();
    MaxwellianDeviation out;
    std::vector<int> cur(d, 0);
    enumerate_alpha(d, K, cur, 0, out.alpha);
    out.n_coeff = static_cast<int>(out.alpha.size());
    out.coeff.assign(out.alpha.size(), 0.0);
    for (const Vec& v : ens.v) {
        double he[kMaxDim][5];
        for (int k = 0; k < d; ++k)
            for (int n = 0; n <= K; ++n) he[k][n] = hermite(n, v[k]);
        for (std::size_t a = 0; a < out.alpha.size(); ++a) {
            double p = 1.0;
            for (int k = 0; k < d; ++k) p *= he[k][out.alpha[a][k]];
            out.coeff[a] += p;
        }
    }
    const double n = static_cast<double>(ens.size());
    double sum2 = 0.0;
    for (std::size_t a = 0; a < out.alpha.size(); ++a) {
        double norm2 = 1.0;
        for (int k = 0; k < d; ++k) norm2 *= factorial(out.alpha[a][k]);
        out.coeff[a] /= n * std::sqrt(norm2);
        sum2 += out.coeff[a] * out.coeff[a];
    }
    out.value = std::sqrt(sum2);
    out.null_se = std::sqrt(out.n_coeff / n);
    return out;
}

double weighted_energy(const ParticleEnsemble& ens, const Mesh& mesh, int K) {
    const ScalarField rho = density(ens, mesh);
    double e = 0.0;
    for (int c = 0; c < mesh.size(); ++c) e += rho.values[c] * rho.values[c] * mesh.volume(c);
    const double D = maxwellian_deviation(ens, K).value;
    return e * (1.0 + D * D);
}

double velocity_variance(const ParticleEnsemble& ens) {
    const int d = ens.dim();
    double acc = 0.0;
    for (int k = 0; k < d; ++k) {
        double m = 0.0, m2 = 0.0;
        for (const Vec& v : ens.v) {
            m += v[k];
            m2 += v[k] * v[k];
        }
        const double n = static_cast<double>(ens.size());
        m /= n;
        acc += m2 / n - m * m;
    }
    return acc / d;
}

}  // namespace kdl
