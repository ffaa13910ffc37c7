"""Camera parameterizations, projection-covariance preconditioning and a
synthetic refinement harness."""

import json

from ._core import (
    Camera,
    Error,
    apply_residual,
    build_preconditioner,
    covariance,
    motion_magnitudes,
    param_dim,
    param_kinds,
    param_layout,
    project,
    projection_jacobian,
    sample_frustum,
    unproject,
)
from . import _core


def default_config():
    """Full default configuration tree as a dict."""
    return json.loads(_core.default_config_json())


def run_grid(config=None, jobs=1):
    """Run the kinds x modes x seeds grid; returns one summary dict per arm.

    `config` is a (possibly partial) configuration dict using the same schema
    as the CLI's --config file.
    """
    return json.loads(_core.run_grid_json(json.dumps(config or {}), jobs))


__all__ = [
    "Camera",
    "Error",
    "apply_residual",
    "build_preconditioner",
    "covariance",
    "default_config",
    "motion_magnitudes",
    "param_dim",
    "param_kinds",
    "param_layout",
    "project",
    "projection_jacobian",
    "run_grid",
    "sample_frustum",
    "unproject",
]
