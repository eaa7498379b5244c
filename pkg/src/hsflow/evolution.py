"""Conservative solution at any time, singular-event prediction and the
restart (semi-group) construction."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lagrangian import (
    AlphaParametrization,
    InitialDatum,
    u_along,
    u_along_curve,
    y_alpha_curve,
    y_at,
    y_curve,
)
from .measure import TOL_SLOPE, RadonMeasure, cdf, cdf_sup_distance, pushforward_decompose
from .pwfun import TOL_X, PiecewiseLinear


class SingularTimeError(ValueError):
    """Raised when an operation needs an absolutely continuous energy measure."""


class InternalConsistencyError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Snapshot:
    t: float
    u: PiecewiseLinear
    mu: RadonMeasure
    energy: float

    @property
    def is_singular(self) -> bool:
        return self.mu.n_atoms > 0


@dataclass(frozen=True)
class EventAtom:
    location: float
    mass: float
    source: tuple[float, float]
    alpha_span: tuple[float, float]


@dataclass(frozen=True)
class SingularEvent:
    t_star: float
    slope: float
    atoms: tuple[EventAtom, ...]

    @property
    def total_mass(self) -> float:
        return float(sum(a.mass for a in self.atoms))


def evolve(
    param: AlphaParametrization,
    t: float,
    tol_slope: float = TOL_SLOPE,
    tol_x: float = TOL_X,
) -> Snapshot:
    """Solution ``(u(., t), mu(t))``.

    ``mu(t)`` is the push-forward of ``f dalpha`` under ``y(., t)``.  ``u`` pairs
    ``y`` with the characteristic velocity; each flat span of ``y`` collapses
    to one point where the velocity must be constant.
    """
    t = float(t)
    y = snapped_characteristics(param, t, tol_slope)
    w = u_along_curve(param, t)
    mu = pushforward_decompose(y, param.f, tol_slope=tol_slope, tol_x=tol_x)

    a = y.breakpoints
    yv, wv = y.values, w.values
    da = np.diff(a)
    flat = np.diff(yv) <= np.maximum(tol_slope * da, tol_x)
    # a flat y-slope below tol_slope bounds the velocity slope by sqrt(tol_slope)
    drift_bound = math.sqrt(tol_slope) * da + 1e-9 * (1.0 + np.abs(wv[1:]))
    bad = flat & (np.abs(np.diff(wv)) > drift_bound)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise InternalConsistencyError(
            f"velocity not constant on collapsed span [{a[i]}, {a[i + 1]}] at t={t}"
        )
    # an initial atom at tiny |t| spreads over less than tol_x while u still
    # rises by t m / 2 across it: keep that rise as a one-ulp steep piece
    spreading = param.flat_pieces() & (t != 0.0)
    xs = [yv[0]]
    us = [wv[0]]
    for i in range(da.size):
        if flat[i]:
            if spreading[i] and wv[i + 1] != us[-1]:
                xs.append(np.nextafter(xs[-1], np.inf))
                us.append(wv[i + 1])
            continue
        if yv[i + 1] <= xs[-1]:
            continue
        xs.append(yv[i + 1])
        us.append(wv[i + 1])
    left = w.left_slope / y.left_slope if y.left_slope > 0 else 0.0
    right = w.right_slope / y.right_slope if y.right_slope > 0 else 0.0
    u = PiecewiseLinear(xs, us, left, right)
    return Snapshot(t, u, mu, param.energy)


def snapped_characteristics(param: AlphaParametrization, t: float, tol_slope: float) -> PiecewiseLinear:
    """``y(., t)`` with analytically flat spans made exactly flat."""
    y = y_curve(param, t)
    flat = y_alpha_curve(param, t).interior_values <= tol_slope
    if not np.any(flat):
        return y
    vals = y.values.copy()
    for i in np.flatnonzero(flat):
        vals[i + 1] = vals[i]
    vals = np.maximum.accumulate(vals)
    return PiecewiseLinear(y.breakpoints, vals, y.left_slope, y.right_slope)


def evaluate_u(param: AlphaParametrization, x, t: float):
    """``u(x, t)`` by inverting ``y(., t)`` with a binary search."""
    x = np.asarray(x, dtype=float)
    y = y_curve(param, t)
    w = u_along_curve(param, t)
    a = y.breakpoints
    yv = np.maximum.accumulate(y.values)
    wv = w.values
    i = np.searchsorted(yv, x, side="right")
    out = np.empty_like(x, dtype=float)
    inner = (i > 0) & (i < yv.size)
    lo = np.where(inner, i - 1, 0)
    hi = np.where(inner, i, 0)
    span = yv[hi] - yv[lo]
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(span > 0, (x - yv[lo]) / span, 0.0)
    alpha = a[lo] + frac * (a[hi] - a[lo])
    out = np.where(inner, u_along(param, alpha, t), out)
    at_right = (i == yv.size) & (x == yv[-1])
    out = np.where(at_right, wv[-1], out)
    left = i == 0
    if np.any(left):
        al = a[0] + (x - yv[0]) / y.left_slope
        out = np.where(left, wv[0] + w.left_slope * (al - a[0]), out)
    right = (i == yv.size) & ~at_right
    if np.any(right):
        ar = a[-1] + (x - yv[-1]) / y.right_slope
        out = np.where(right, wv[-1] + w.right_slope * (ar - a[-1]), out)
    return out if out.ndim else float(out)


def _slope_groups(param: AlphaParametrization, tol_slope: float) -> list[float]:
    c = param.u_slope.interior_values
    xs = param.x_bar.slopes
    lengths = np.diff(param.x_bar.values)
    cand = np.sort(c[(xs > 0) & (lengths > 0) & (c != 0.0)])
    groups: list[list[float]] = []
    for v in cand:
        if groups and v - groups[-1][-1] <= tol_slope:
            groups[-1].append(v)
        else:
            groups.append([v])
    return [g[0] for g in groups]


def predict_singular_times(
    param: AlphaParametrization,
    tol_slope: float = TOL_SLOPE,
    tol_x: float = TOL_X,
) -> list[SingularEvent]:
    """Every time at which energy concentrates into atoms.

    A nonzero slope ``c`` of ``u_bar`` on a piece of positive length collapses
    that piece at ``t = -2 / c``; the atoms are read off the evolved measure.
    """
    events = []
    for c in _slope_groups(param, tol_slope):
        t_star = float(-2.0 / c)
        snap = evolve(param, t_star, tol_slope=tol_slope, tol_x=tol_x)
        atoms = tuple(
            EventAtom(
                float(loc),
                float(m),
                (float(param.x_bar(lab[0])), float(param.x_bar(lab[1]))),
                lab,
            )
            for loc, m, lab in zip(snap.mu.locations, snap.mu.masses, snap.mu.labels)
        )
        events.append(SingularEvent(t_star, float(c), atoms))
    events.sort(key=lambda e: (abs(e.t_star), e.t_star))
    return events


def flow_map_X(datum: InitialDatum, xi=None, t: float = 0.0):
    """Flow map ``xi + u(xi) t + (t^2/4) F(xi)`` of an atom-free datum.

    With ``xi=None`` the whole map is returned as a piecewise-linear function.
    """
    if datum.atom_locations.size:
        raise ValueError("flow map is only defined for data without atoms")
    F = datum.density.antiderivative()
    X = PiecewiseLinear.identity() + datum.u_bar * t + F * (0.25 * t * t)
    if xi is None:
        return X
    return X(xi)


def restart(
    param: AlphaParametrization,
    s: float,
    tol_slope: float = TOL_SLOPE,
    tol_x: float = TOL_X,
) -> InitialDatum:
    """Atom-free datum ``u(., s)`` from which the same solution continues."""
    snap = evolve(param, s, tol_slope=tol_slope, tol_x=tol_x)
    if snap.mu.n_atoms:
        raise SingularTimeError(f"energy measure has atoms at s={s}; cannot restart there")
    return InitialDatum(snap.u)


def semigroup_deviations(
    param: AlphaParametrization,
    s: float,
    t: float,
    alphas,
    tol_slope: float = TOL_SLOPE,
    tol_x: float = TOL_X,
) -> dict[str, float]:
    """Deviation of each restart identity between times ``s`` and ``t``."""
    alphas = np.asarray(alphas, dtype=float)
    restarted = restart(param, s, tol_slope=tol_slope, tol_x=tol_x)
    dt = t - s
    xi = y_at(param, alphas, s)
    X = flow_map_X(restarted, None, dt)
    char = float(np.max(np.abs(X(xi) - y_at(param, alphas, t)), initial=0.0))
    F_tilde = restarted.density.antiderivative()
    u_pred = restarted.u_bar(xi) + 0.5 * dt * F_tilde(xi)
    vel = float(np.max(np.abs(u_pred - u_along(param, alphas, t)), initial=0.0))
    mu_t = evolve(param, t, tol_slope=tol_slope, tol_x=tol_x).mu
    nu = pushforward_decompose(X, restarted.density, tol_slope=tol_slope, tol_x=tol_x)
    meas = cdf_sup_distance(mu_t, nu)
    return {"characteristics": char, "velocity": vel, "measure": meas}


def check_semigroup(param: AlphaParametrization, s: float, t: float, alphas, **tols) -> float:
    """Largest deviation from ``y(., t) = X(., t - s) o y(., s)`` and the two
    companion identities, over the sample ``alphas``."""
    return max(semigroup_deviations(param, s, t, alphas, **tols).values())


def cumulative_energy_gap(param: AlphaParametrization, alphas, t: float, tol_slope=TOL_SLOPE, tol_x=TOL_X):
    """Violation of ``mu(t)((-inf, y)) <= alpha - x_bar <= mu(t)((-inf, y])``.

    ``y`` is the snapped characteristic map that ``mu(t)`` is built from, so a
    span treated as flat is evaluated at its collapse point.
    """
    alphas = np.asarray(alphas, dtype=float)
    mu = evolve(param, t, tol_slope=tol_slope, tol_x=tol_x).mu
    yv = snapped_characteristics(param, t, tol_slope)(alphas)
    target = alphas - param.x_bar(alphas)
    below = cdf(mu, yv, "open") - target
    above = target - cdf(mu, yv, "closed")
    return float(max(np.max(below, initial=0.0), np.max(above, initial=0.0), 0.0))

