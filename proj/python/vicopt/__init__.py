"""Safe online variable impedance control (C++ core bindings)."""

from ._vicopt import (
    ParseError,
    NonFiniteError,
    Scenario,
    ValidationError,
    barrier_rows,
    compare_baselines,
    fitave,
    input_from_gains,
    integrate_step,
    itae,
    load_scenario,
    parse_scenario,
    qp_solve,
    recover_gains,
    reproduce_fig2,
    run_episode,
    safety_filter,
)

__all__ = [
    "ParseError",
    "NonFiniteError",
    "Scenario",
    "ValidationError",
    "barrier_rows",
    "compare_baselines",
    "fitave",
    "input_from_gains",
    "integrate_step",
    "itae",
    "load_scenario",
    "parse_scenario",
    "qp_solve",
    "recover_gains",
    "reproduce_fig2",
    "run_episode",
    "safety_filter",
]
