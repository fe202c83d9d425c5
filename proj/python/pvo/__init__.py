"""Python bindings of the distribution-matching collision avoidance library."""

import json as _json

from ._core import (
    ConfigError,
    DesiredDistributionInfeasible,
    Error,
    NoFeasibleControl,
    ShapeError,
    benchmark_timing,
    consistency_report,
    estimate_eta,
    fit_gmm,
    kl_divergence,
    mmd_squared,
    poly_kernel,
    pvo_samples,
    reduced_set_weights,
    vo_value,
)
from ._core import run_scenario as _run_scenario


def run_scenario(path, method=None, degree=None, rho=None, eta=None, seed=None, wall_clock=True):
    """Runs a scenario file and returns (summary dict, trajectory CSV text)."""
    summary, csv = _run_scenario(str(path), method, degree, rho, eta, seed, wall_clock)
    return _json.loads(summary), csv


__all__ = [
    "ConfigError",
    "DesiredDistributionInfeasible",
    "Error",
    "NoFeasibleControl",
    "ShapeError",
    "benchmark_timing",
    "consistency_report",
    "estimate_eta",
    "fit_gmm",
    "kl_divergence",
    "mmd_squared",
    "poly_kernel",
    "pvo_samples",
    "reduced_set_weights",
    "run_scenario",
    "vo_value",
]
