#include "kdl/billiards.hpp"

namespace kdl {

std::vector<double> SpecularCycle::breakpoints() const {
    std::vector<double> tau;
    tau.reserve(arc.size() + 1);
    tau.push_back(0.0);
    for (double a : arc) tau.push_back(speed > 0.0 ? a / speed : 0.0);
    return tau;
}

SpecularCycle specular_cycle(const Domain& domain, const Vec& x0, const Vec& v0, long max_reflections) {
    SpecularCycle cycle;
    const TraceOut<double> out = trace_t(domain, x0, v0, max_reflections, &cycle);
    cycle.n = out.n;
    cycle.near_grazing = out.near_grazing;
    return cycle;
}

EndpointResult endpoint(const Domain& domain, const Vec& x0, const Vec& v0, long max_reflections) {
    EndpointResult res;
    const TraceOut<double> out = trace_t(domain, x0, v0, max_reflections, &res.cycle);
    res.cycle.n = out.n;
    res.cycle.near_grazing = out.near_grazing;
    res.eta = out.eta;
    res.path_length = res.cycle.speed;
    return res;
}

EndpointResult disk_endpoint_analytic(const Vec& x0, const Vec& v0, bool detail, long max_reflections) {
    if (x0.dim() != v0.dim() || (x0.dim() != 2 && x0.dim() != 3)) throw ArgumentError("dimension mismatch");
    if (squared_norm(x0) - 1.0 > kBoundaryTol) throw DomainError("start point is outside the domain");
    EndpointResult res;
    SpecularCycle* rec = detail ? &res.cycle : nullptr;
    const TraceOut<double> out = *disk_analytic_t(x0, v0, rec, max_reflections);
    res.cycle.x0 = x0;
    res.cycle.v0 = v0;
    res.cycle.speed = norm(v0);
    res.cycle.n = out.n;
    res.cycle.near_grazing = out.near_grazing;
    res.cycle.materialized = detail;
    res.eta = out.eta;
    res.path_length = res.cycle.speed;
    return res;
}

long reflection_count(const Domain& domain, const Vec& x0, const Vec& v0) {
    detail::check_phase_point(domain, x0, v0);
    if (domain.is_ball()) return disk_analytic_t(x0, v0, nullptr, kDefaultReflectionCap)->n;
    return trace_t(domain, x0, v0, kDefaultReflectionCap, nullptr).n;
}

}  // namespace kdl
