"""Kinetic Fokker-Planck diffusion-limit simulator (Python front end)."""

import json

from . import _core
from ._core import (
    ArgumentError,
    ContractError,
    DiscontinuityError,
    Domain,
    DomainError,
    GrazingError,
    KdlError,
    chord_data,
    disk_endpoint,
    eigenmode_decay_rate,
    endpoint,
    endpoint_derivatives,
    neumann_lambda1,
    reflection_count,
    trajectory_boundary_distance,
)

__all__ = [
    "ArgumentError",
    "ContractError",
    "DiscontinuityError",
    "Domain",
    "DomainError",
    "Ensemble",
    "GrazingError",
    "KdlError",
    "chord_data",
    "converge_study",
    "default_config",
    "disk_endpoint",
    "eigenmode_decay_rate",
    "endpoint",
    "endpoint_derivatives",
    "integrability_study",
    "neumann_lambda1",
    "reflection_count",
    "trace",
    "trajectory_boundary_distance",
    "weak_residual_study",
]


def default_config():
    return json.loads(_core.default_config())


def trace(domain, x, v):
    return json.loads(_core.trace(domain, list(x), list(v)))


def converge_study(config=None, **overrides):
    cfg = dict(config or {}, **overrides)
    return json.loads(_core.converge_study(json.dumps(cfg)))


def weak_residual_study(config=None, **overrides):
    cfg = dict(config or {}, **overrides)
    return json.loads(_core.weak_residual_study(json.dumps(cfg)))


def integrability_study(p, schedule=(100000, 300000, 1000000), seed=1, sampler="grid"):
    return json.loads(_core.integrability_study(p, list(schedule), seed, sampler))


class Ensemble(_core.Ensemble):
    """Particle ensemble built from a config dict (same keys as the CLI config)."""

    def __init__(self, config=None, n=10000, seed=1, eps=0.1):
        super().__init__(json.dumps(config or {}), n, seed, eps)
