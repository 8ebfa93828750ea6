"""Markov semigroups, resolvents and executable Feller-property checks."""

import json

from ._core import (
    CancellationError,
    OperatorFamily,
    birth_death,
    build,
    catalog,
    expm,
    from_generator,
    heat_kernel,
    inversion_sweep,
    invert,
    killed_chain,
    non_feller_drift,
    two_state,
)
from . import _core


def battery(fam, t_grid=None, lambda_grid=None, decay_tol=1e-3, seed=42):
    """Run the full battery on an operator family; returns the report as a dict."""
    return json.loads(_core.battery_json(fam, t_grid, lambda_grid, decay_tol, seed))


def check(name, n=None, L=None, h=None, seed=42):
    """Battery for a catalog process, including the expected-verdict comparison."""
    return json.loads(_core.check_json(name, n, L, h, seed))


def cli(*args):
    """In-process `feller-kit` call; returns (exit_code, stdout, stderr)."""
    return _core.cli([str(a) for a in args])


__all__ = [
    "CancellationError",
    "OperatorFamily",
    "battery",
    "birth_death",
    "build",
    "catalog",
    "check",
    "cli",
    "expm",
    "from_generator",
    "heat_kernel",
    "inversion_sweep",
    "invert",
    "killed_chain",
    "non_feller_drift",
    "two_state",
]
