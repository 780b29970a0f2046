"""Python bindings for the rgbdsde Monte Carlo solver."""

from ._rgbdsde import (
    ConfigError,
    NumericError,
    PreconditionError,
    default_config,
    evaluate_field,
    make_grid,
    parse_config,
    project,
    regress,
    run_experiment,
    sample_paths,
    simulate_reflected,
    solve,
    solve_fd,
    version,
)

__all__ = [
    "ConfigError",
    "NumericError",
    "PreconditionError",
    "default_config",
    "evaluate_field",
    "make_grid",
    "parse_config",
    "project",
    "regress",
    "run_experiment",
    "sample_paths",
    "simulate_reflected",
    "solve",
    "solve_fd",
    "version",
]
__version__ = version()
