#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kdl/endpoint_calculus.hpp"
#include "kdl/errors.hpp"
#include "kdl/harness.hpp"

namespace py = pybind11;
using namespace kdl;

namespace {

Vec to_vec(const std::vector<double>& v) {
    if (v.empty() || v.size() > 3) throw ArgumentError("vectors need 1 to 3 components");
    return Vec::from_span(v);
}

std::vector<double> from_vec(const Vec& v) { return {v.begin(), v.end()}; }

py::array_t<double> to_array(const Mat& m) {
    const int d = m.dim();
    py::array_t<double> a({d, d});
    auto r = a.mutable_unchecked<2>();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) r(i, j) = m(i, j);
    return a;
}

py::array_t<double> to_array(const std::vector<Vec>& xs, int d) {
    py::array_t<double> a({static_cast<py::ssize_t>(xs.size()), static_cast<py::ssize_t>(d)});
    auto r = a.mutable_unchecked<2>();
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (int k = 0; k < d; ++k) r(i, k) = xs[i][k];
    return a;
}

StudyConfig config_from(const std::string& text) { return config_from_json(json::parse(text)); }

Domain make_domain(const std::string& kind, int dim, const std::vector<double>& semi_axes,
                   const std::vector<double>& center) {
    return Domain::builtin(kind, dim, semi_axes, center);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Kinetic Fokker-Planck diffusion-limit simulator";

    static py::exception<Error> base(m, "KdlError", PyExc_RuntimeError);
    static py::exception<ArgumentError> arg(m, "ArgumentError", PyExc_ValueError);
    static py::exception<DomainError> domain_err(m, "DomainError", PyExc_ValueError);
    static py::exception<GrazingError> grazing(m, "GrazingError", base.ptr());
    static py::exception<DiscontinuityError> disc(m, "DiscontinuityError", base.ptr());
    static py::exception<ContractError> contract(m, "ContractError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ArgumentError& e) {
            py::set_error(arg, e.what());
        } catch (const DomainError& e) {
            py::set_error(domain_err, e.what());
        } catch (const GrazingError& e) {
            py::set_error(grazing, e.what());
        } catch (const DiscontinuityError& e) {
            py::set_error(disc, e.what());
        } catch (const ContractError& e) {
            py::set_error(contract, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        } catch (const json::exception& e) {
            py::set_error(arg, e.what());
        }
    });

    py::class_<Domain>(m, "Domain")
        .def(py::init(&make_domain), py::arg("kind") = "unit-ball", py::arg("dim") = 2,
             py::arg("semi_axes") = std::vector<double>{}, py::arg("center") = std::vector<double>{})
        .def_property_readonly("dim", &Domain::dim)
        .def_property_readonly("volume", &Domain::volume)
        .def("zeta", [](const Domain& d, const std::vector<double>& x) { return d.zeta(to_vec(x)); })
        .def("normal", [](const Domain& d, const std::vector<double>& x) { return from_vec(d.normal_at(to_vec(x))); })
        .def("reflect",
             [](const Domain& d, const std::vector<double>& x, const std::vector<double>& v) {
                 return from_vec(d.reflect(to_vec(x), to_vec(v)));
             })
        .def("__repr__", &Domain::describe);

    m.def(
        "endpoint",
        [](const Domain& d, const std::vector<double>& x, const std::vector<double>& v) {
            return from_vec(endpoint(d, to_vec(x), to_vec(v)).eta);
        },
        py::arg("domain"), py::arg("x"), py::arg("v"));
    m.def(
        "disk_endpoint",
        [](const std::vector<double>& x, const std::vector<double>& v) {
            return from_vec(disk_endpoint_analytic(to_vec(x), to_vec(v)).eta);
        },
        py::arg("x"), py::arg("v"), "closed-form end point in the unit ball");
    m.def(
        "trace",
        [](const Domain& d, const std::vector<double>& x, const std::vector<double>& v) {
            const EndpointResult r = endpoint(d, to_vec(x), to_vec(v));
            return to_json(r.cycle, r.eta).dump();
        },
        py::arg("domain"), py::arg("x"), py::arg("v"), "specular cycle as a JSON string");
    m.def("reflection_count", [](const Domain& d, const std::vector<double>& x, const std::vector<double>& v) {
        return reflection_count(d, to_vec(x), to_vec(v));
    });
    m.def(
        "endpoint_derivatives",
        [](const Domain& d, const std::vector<double>& x, const std::vector<double>& v, bool fd) {
            const EndpointDerivatives e =
                endpoint_derivatives(d, to_vec(x), to_vec(v), fd ? DerivMode::FiniteDifference : DerivMode::Analytic);
            py::dict out;
            out["eta"] = from_vec(e.eta);
            out["J"] = to_array(e.J);
            out["lap"] = from_vec(e.lap);
            out["N"] = e.n;
            out["near_grazing"] = e.near_grazing;
            return out;
        },
        py::arg("domain"), py::arg("x"), py::arg("v"), py::arg("finite_difference") = false);
    m.def("chord_data", [](const std::vector<double>& x, const std::vector<double>& v) {
        const ChordData c = chord_data(to_vec(x), to_vec(v));
        return py::make_tuple(c.L, c.A, c.k);
    });
    m.def("trajectory_boundary_distance", &trajectory_boundary_distance, py::arg("L"));
    m.def("neumann_lambda1", &neumann_lambda1, py::arg("dim") = 2);
    m.def(
        "eigenmode_decay_rate",
        [](int dim, int n_r) {
            const DecayFit f = eigenmode_decay_rate(dim, n_r);
            return py::make_tuple(f.rate, f.lambda1, f.rel_error);
        },
        py::arg("dim") = 2, py::arg("n_r") = 128);

    py::class_<ParticleEnsemble>(m, "Ensemble")
        .def(py::init([](const std::string& config, std::size_t n, std::uint64_t seed, double eps) {
                 const StudyConfig c = config_from(config);
                 ParticleEnsemble e = sample_initial(c.initial, n, seed, c.make_domain(), c.mode(), eps);
                 e.threads = c.threads;
                 return e;
             }),
             py::arg("config"), py::arg("n"), py::arg("seed"), py::arg("eps"))
        .def_property_readonly("t", [](const ParticleEnsemble& e) { return e.t; })
        .def_property_readonly("size", &ParticleEnsemble::size)
        .def_property_readonly("reflections", [](const ParticleEnsemble& e) { return e.reflections; })
        .def(
            "advance", [](ParticleEnsemble& e, double t_end, double dt) { advance(e, t_end, dt > 0 ? dt : default_dt(e.eps)); },
            py::arg("t_end"), py::arg("dt") = 0.0, py::call_guard<py::gil_scoped_release>())
        .def("positions", [](const ParticleEnsemble& e) { return to_array(e.x, e.dim()); })
        .def("velocities", [](const ParticleEnsemble& e) { return to_array(e.v, e.dim()); })
        .def("velocity_variance", &velocity_variance)
        .def(
            "density",
            [](const ParticleEnsemble& e, int n_r, int n_theta) {
                return density(e, e.dim() == 3 ? Mesh::radial(3, n_r) : Mesh::polar(n_r, n_theta)).values;
            },
            py::arg("n_r") = 8, py::arg("n_theta") = 16);

    m.def(
        "converge_study", [](const std::string& config) { return to_json(converge_study(config_from(config))).dump(); },
        py::arg("config"), py::call_guard<py::gil_scoped_release>());
    m.def(
        "weak_residual_study",
        [](const std::string& config) { return to_json(weak_residual_study(config_from(config))).dump(); },
        py::arg("config"), py::call_guard<py::gil_scoped_release>());
    m.def(
        "integrability_study",
        [](double p, const std::vector<std::size_t>& schedule, std::uint64_t seed, const std::string& sampler) {
            return to_json(integrability_study(p, schedule, seed, sampler)).dump();
        },
        py::arg("p"), py::arg("schedule"), py::arg("seed") = 1, py::arg("sampler") = "grid");
    m.def("default_config", []() { return to_json(StudyConfig{}).dump(); });
}
