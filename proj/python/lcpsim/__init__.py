"""Linear competition process toolkit.

Rates and drifts are exchanged as :class:`fractions.Fraction`; complex
quantities as Python ``complex``.
"""

from ._lcpsim import (
    Error,
    Model,
    ParseError,
    PreconditionError,
    ValidationError,
    __version__,
    count_limit_sets,
    enumerate_limit_sets,
    extinction_bound,
    family_model,
    first_extinction,
    load_model,
    parse_model,
    reproduce_tables,
    run_batch,
    second_moment_drift,
    simulate,
    survivor_support,
    spectrum,
    t_report,
    total_rate,
    transitions,
    v_drift_triangular,
)

__all__ = [
    "Error",
    "Model",
    "ParseError",
    "PreconditionError",
    "ValidationError",
    "count_limit_sets",
    "enumerate_limit_sets",
    "extinction_bound",
    "family_model",
    "first_extinction",
    "load_model",
    "parse_model",
    "reproduce_tables",
    "run_batch",
    "second_moment_drift",
    "simulate",
    "survivor_support",
    "spectrum",
    "t_report",
    "total_rate",
    "transitions",
    "v_drift_triangular",
]
