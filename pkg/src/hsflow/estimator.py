"""Estimator-style front end for the conservative solution."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_datum, check_queries, check_tolerances
from .evolution import evaluate_u, evolve, predict_singular_times, restart
from .lagrangian import build
from .measure import TOL_SLOPE
from .pwfun import TOL_X


class HunterSaxtonSolver(BaseEstimator):
    """Global conservative solution of the Hunter-Saxton equation.

    ``fit`` takes the initial datum; afterwards ``predict`` evaluates ``u`` at
    arbitrary ``(x, t)`` pairs and ``snapshot`` returns the velocity together
    with the energy measure at one time.

    Parameters
    ----------
    tol_x : float
        Abscissae closer than this are the same point (atom merging).
    tol_slope : float
        Characteristic slopes at or below this are treated as flat.

    Attributes
    ----------
    datum_ : InitialDatum
    param_ : AlphaParametrization
    energy_ : float
        Total energy, conserved for all times.
    """

    def __init__(self, tol_x=TOL_X, tol_slope=TOL_SLOPE):
        self.tol_x = tol_x
        self.tol_slope = tol_slope

    def fit(self, X, y=None, atoms=None):
        """X is an InitialDatum, a flat-tailed PiecewiseLinear or an (n, 2)
        array of ``(x, u_bar(x))`` nodes; ``atoms`` holds ``(x, mass)`` rows."""
        check_tolerances(self.tol_x, self.tol_slope)
        self.datum_ = check_datum(X, atoms)
        self.param_ = build(self.datum_)
        self.energy_ = self.param_.energy
        return self

    def _tols(self):
        return {"tol_slope": self.tol_slope, "tol_x": self.tol_x}

    def predict(self, X):
        """Velocity ``u(x, t)`` for each row ``(x, t)`` of ``X``."""
        check_is_fitted(self, "param_")
        Q = check_queries(X)
        out = np.empty(Q.shape[0])
        for t in np.unique(Q[:, 1]):
            rows = Q[:, 1] == t
            out[rows] = evaluate_u(self.param_, Q[rows, 0], float(t))
        return out

    def snapshot(self, t):
        check_is_fitted(self, "param_")
        return evolve(self.param_, float(t), **self._tols())

    def energy_measure(self, t):
        return self.snapshot(t).mu

    def singular_events(self):
        check_is_fitted(self, "param_")
        return predict_singular_times(self.param_, **self._tols())

    def restart(self, s):
        """A new solver fitted on the atom-free datum ``u(., s)``."""
        check_is_fitted(self, "param_")
        datum = restart(self.param_, float(s), **self._tols())
        return type(self)(**self.get_params()).fit(datum)
