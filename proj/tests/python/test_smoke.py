import math

import numpy as np
import pytest

import kinetic_diffusion as kd


def test_disk_endpoint_matches_generic():
    disk = kd.Domain("unit-ball", 2)
    x, v = [0.1, -0.2], [2.3, 1.7]
    assert np.allclose(kd.endpoint(disk, x, v), kd.disk_endpoint(x, v), atol=1e-12)


def test_trace_reports_two_reflections():
    cyc = kd.trace(kd.Domain(), [0.0, 0.0], [3.0, 0.0])
    assert cyc["N"] == 2
    assert np.allclose(cyc["eta"], [-1.0, 0.0], atol=1e-12)


def test_derivatives_shapes_and_fd_agreement():
    dom = kd.Domain("ellipse", 2, [1.5, 1.0])
    x, v = [0.2, 0.1], [1.1, 0.7]
    a = kd.endpoint_derivatives(dom, x, v)
    f = kd.endpoint_derivatives(dom, x, v, finite_difference=True)
    assert a["J"].shape == (2, 2)
    assert a["N"] == f["N"]
    assert np.allclose(a["J"], f["J"], atol=1e-6)


def test_chord_and_distance():
    L, A, k = kd.chord_data([0.0, 0.0], [3.0, 0.0])
    assert L == pytest.approx(2.0)
    assert k == 2
    assert kd.trajectory_boundary_distance(0.02) == pytest.approx(5.000125006250391e-05, rel=1e-12)


def test_lambda1():
    assert kd.neumann_lambda1(2) == pytest.approx(14.681970642123893, rel=1e-10)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        kd.endpoint(kd.Domain(), [2.0, 0.0], [1.0, 0.0])
    with pytest.raises(ValueError):
        kd.Domain("torus", 2)
    with pytest.raises(ValueError):
        kd.converge_study({"no_such_key": 1})


def test_ensemble_conserves_mass_and_stays_inside():
    ens = kd.Ensemble({"initial": {"density": "bump"}}, n=2000, seed=3, eps=0.3)
    ens.advance(0.02)
    assert ens.t == pytest.approx(0.02)
    x = ens.positions()
    assert x.shape == (2000, 2)
    assert np.all(np.hypot(x[:, 0], x[:, 1]) <= 1.0 + 1e-9)
    rho = np.asarray(ens.density(8, 16))
    assert rho.size > 0 and np.all(rho >= 0)


def test_integrability_verdict():
    r = kd.integrability_study(2.0, [10000, 100000])
    assert r["verdict"] == "converging"
    assert math.isfinite(r["estimates"][-1])
