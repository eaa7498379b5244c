"""Input validation shared by the estimator and the command line."""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils import check_array, check_scalar

from .lagrangian import InitialDatum
from .pwfun import PiecewiseLinear


def check_tolerances(tol_x, tol_slope):
    check_scalar(tol_x, "tol_x", target_type=numbers.Real, min_val=0.0)
    check_scalar(tol_slope, "tol_slope", target_type=numbers.Real, min_val=0.0)
    return float(tol_x), float(tol_slope)


def check_atoms(atoms):
    if atoms is None or len(atoms) == 0:
        return np.empty(0), np.empty(0)
    arr = check_array(atoms, dtype=float)
    if arr.shape[1] != 2:
        raise ValueError("atoms must be (location, mass) pairs")
    if np.any(arr[:, 1] <= 0):
        raise ValueError("atom mass must be positive")
    return arr[:, 0], arr[:, 1]


def check_datum(X, atoms=None) -> InitialDatum:
    """Coerce ``X`` into an :class:`InitialDatum`.

    ``X`` may already be a datum, a :class:`PiecewiseLinear` with flat tails,
    or an ``(n, 2)`` array of ``(x, u_bar(x))`` nodes with increasing ``x``.
    """
    if isinstance(X, InitialDatum):
        if atoms is not None:
            raise ValueError("atoms given twice")
        return X
    locs, masses = check_atoms(atoms)
    if isinstance(X, PiecewiseLinear):
        return InitialDatum(X, locs, masses)
    nodes = check_array(X, dtype=float)
    if nodes.shape[1] != 2:
        raise ValueError(f"expected (x, u) node pairs, got {nodes.shape[1]} columns")
    order = np.argsort(nodes[:, 0], kind="stable")
    nodes = nodes[order]
    if np.any(np.diff(nodes[:, 0]) <= 0):
        raise ValueError("node abscissae must be distinct")
    return InitialDatum(PiecewiseLinear(nodes[:, 0], nodes[:, 1]), locs, masses)


def check_queries(X) -> np.ndarray:
    Q = check_array(X, dtype=float)
    if Q.shape[1] != 2:
        raise ValueError(f"queries must have columns (x, t), got {Q.shape[1]} columns")
    return Q
