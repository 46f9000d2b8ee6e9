"""Python access to the fwsim simulation core."""

from ._fwsim import (
    Error,
    RunConfig,
    aggregate,
    atmosphere,
    load_run_config,
    monte_carlo,
    run_single,
    seed_table,
    trajectory_metrics,
)

__all__ = [
    "Error",
    "RunConfig",
    "aggregate",
    "atmosphere",
    "load_run_config",
    "monte_carlo",
    "run_single",
    "seed_table",
    "trajectory_metrics",
]
