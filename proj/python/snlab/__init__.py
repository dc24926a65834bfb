"""Schrodinger-Newton and collapse-model solvers (C++ core)."""

from ._core import (
    ConvergenceError,
    NumericalBlowup,
    ParseError,
    SnlabError,
    ValidationError,
    __version__,
    drift_decomposition,
    evolve,
    gaussian,
    ground_state,
    heating_rate,
    kinetic_energy,
    parse_config,
    potential,
    regime,
    run,
    run_scenario,
    signalling_distance,
    unit_system,
)

__all__ = [
    "ConvergenceError",
    "NumericalBlowup",
    "ParseError",
    "SnlabError",
    "ValidationError",
    "__version__",
    "drift_decomposition",
    "evolve",
    "gaussian",
    "ground_state",
    "heating_rate",
    "kinetic_energy",
    "parse_config",
    "potential",
    "regime",
    "run",
    "run_scenario",
    "signalling_distance",
    "unit_system",
]
