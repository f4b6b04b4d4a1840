"""Python bindings for the ract toolkit: PPO lander training, action-space
PGD attacks, adversarial training, and evaluation.

The heavy lifting lives in the _ract extension; this package adds small
JSON-friendly wrappers around the run/evaluate entry points.
"""

import json as _json

try:
    from ract._ract import (  # type: ignore
        LanderEnv,
        Policy,
        compute_gae,
        compute_returns,
        default_training_config_json,
        density_gradient,
        entropy,
        evaluate_json,
        histogram,
        log_density,
        moving_average,
        pgd_attack,
        project,
        run_training_json,
    )
except ImportError:  # cmake build-tree layout
    from _ract import (  # type: ignore
        LanderEnv,
        Policy,
        compute_gae,
        compute_returns,
        default_training_config_json,
        density_gradient,
        entropy,
        evaluate_json,
        histogram,
        log_density,
        moving_average,
        pgd_attack,
        project,
        run_training_json,
    )

__all__ = [
    "LanderEnv",
    "Policy",
    "compute_gae",
    "compute_returns",
    "default_training_config",
    "density_gradient",
    "entropy",
    "evaluate",
    "histogram",
    "log_density",
    "moving_average",
    "pgd_attack",
    "project",
    "run_training",
]


def default_training_config():
    """Resolved training configuration with library defaults, as a dict."""
    return _json.loads(default_training_config_json())


def run_training(config):
    """Run one training run from a config dict; returns a summary dict."""
    return _json.loads(run_training_json(_json.dumps(config)))


def evaluate(scenario):
    """Evaluate a scenario dict; returns the report dict."""
    return _json.loads(evaluate_json(_json.dumps(scenario)))
