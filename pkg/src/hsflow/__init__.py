"""Global conservative solutions of the Hunter-Saxton equation for
piecewise-linear data, computed exactly through closed-form characteristics."""

__version__ = "0.1.0"

from .estimator import HunterSaxtonSolver
from .evolution import (
    InternalConsistencyError,
    SingularEvent,
    SingularTimeError,
    Snapshot,
    check_semigroup,
    evaluate_u,
    evolve,
    flow_map_X,
    predict_singular_times,
    restart,
)
from .lagrangian import AlphaParametrization, InitialDatum, build
from .measure import RadonMeasure, cdf, cdf_sup_distance, pushforward_decompose
from .pwfun import PiecewiseConstant, PiecewiseLinear

__all__ = [
    "AlphaParametrization",
    "HunterSaxtonSolver",
    "InitialDatum",
    "InternalConsistencyError",
    "PiecewiseConstant",
    "PiecewiseLinear",
    "RadonMeasure",
    "SingularEvent",
    "SingularTimeError",
    "Snapshot",
    "build",
    "cdf",
    "cdf_sup_distance",
    "check_semigroup",
    "evaluate_u",
    "evolve",
    "flow_map_X",
    "predict_singular_times",
    "pushforward_decompose",
    "restart",
]
