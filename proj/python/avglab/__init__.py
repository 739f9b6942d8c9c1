"""Python access to the avglab solvers, bounds and scenarios."""

import json

from ._avglab import (
    BlowUpError,
    ConfigError,
    PreconditionError,
    absorbing_constants,
    bounds_report,
    burgers_D,
    gershgorin_log_norm,
    log_norm,
    nonresonance_scan,
    normalize_config,
    sum_S,
    toy_ode_attractor,
)
from ._avglab import run_config as _run_config

__all__ = [
    "BlowUpError",
    "ConfigError",
    "PreconditionError",
    "absorbing_constants",
    "bounds_report",
    "burgers_D",
    "gershgorin_log_norm",
    "log_norm",
    "nonresonance_scan",
    "normalize_config",
    "run",
    "sum_S",
    "toy_ode_attractor",
]


def run(config):
    """Run a scenario from a dict or a JSON string and return its summary dict."""
    if not isinstance(config, str):
        config = json.dumps(config)
    return _run_config(config)
