"""Verification suites and brute-force oracles.

Each suite returns a :class:`CheckReport`; ``passed`` is simply
``max_error <= tolerance``.  Everything is a deterministic function of its
arguments and the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.utils import check_random_state

from .evolution import evolve, predict_singular_times, semigroup_deviations, snapped_characteristics
from .lagrangian import AlphaParametrization, u_along, y_at
from .measure import TOL_SLOPE, cdf, pushforward_decompose
from .pwfun import PiecewiseConstant, PiecewiseLinear


@dataclass(frozen=True)
class CheckReport:
    name: str
    max_error: float
    tolerance: float
    details: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.max_error <= self.tolerance)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "details": self.details,
        }


def _report(name, errors, tolerance, keep=5) -> CheckReport:
    """Collect ``(error, info)`` pairs into a report with the worst offenders."""
    errors = sorted(errors, key=lambda e: -e[0])
    worst = [dict(error=float(e), **info) for e, info in errors[:keep]]
    max_error = float(errors[0][0]) if errors else 0.0
    return CheckReport(name, max_error, tolerance, worst)


def alpha_grid(param: AlphaParametrization, random_state=None, n_random: int = 256, offset: float = 1e-6):
    """Piece midpoints, breakpoints shifted by ``+-offset`` and uniform draws
    over the breakpoint window widened by one on each side."""
    rng = check_random_state(random_state)
    a = param.alpha_nodes
    mids = 0.5 * (a[:-1] + a[1:])
    near = np.concatenate((a - offset, a + offset))
    draws = rng.uniform(a[0] - 1.0, a[-1] + 1.0, size=n_random)
    return np.unique(np.concatenate((mids, near, draws)))


def suite_conservation(param: AlphaParametrization, times, tolerance: float = 1e-10, **tols) -> CheckReport:
    errors = []
    for t in times:
        mu = evolve(param, t, **tols).mu
        mass = mu.ac_mass + mu.pp_mass
        errors.append((abs(mass - param.energy), {"t": float(t), "mass": mass}))
    return _report("conservation", errors, tolerance)


def suite_weak_form(param: AlphaParametrization, times, grid, tolerance: float = 1e-10, **tols) -> CheckReport:
    """Characteristic form of the momentum equation: the velocity along
    ``y(alpha, .)`` changes at rate ``(alpha - x_bar(alpha)) / 2``, which must
    equal half the cumulative energy to the left of ``y(alpha, t)``."""
    grid = np.asarray(grid, dtype=float)
    rate = 0.5 * (grid - param.x_bar(grid))
    errors = []
    for t in times:
        mu = evolve(param, t, **tols).mu
        F = cdf(mu, y_at(param, grid, t), "open")
        err = np.abs(rate - 0.5 * F)
        k = int(np.argmax(err))
        errors.append((err[k], {"t": float(t), "alpha": float(grid[k])}))
    return _report("weak_form", errors, tolerance)


def suite_characteristic_ode(param: AlphaParametrization, grid, times, h: float = 1e-3, tolerance: float = 1e-9) -> CheckReport:
    if not h > 0:
        raise ValueError("h must be positive")
    grid = np.asarray(grid, dtype=float)
    errors = []
    for t in times:
        fd = (y_at(param, grid, t + h) - y_at(param, grid, t - h)) / (2.0 * h)
        err = np.abs(fd - u_along(param, grid, t))
        k = int(np.argmax(err))
        errors.append((err[k], {"t": float(t), "alpha": float(grid[k]), "h": h}))
    return _report("characteristic_ode", errors, tolerance)


def brute_force_cdf(X: PiecewiseLinear, g: PiecewiseConstant, x) -> np.ndarray:
    """``integral of g over {xi : X(xi) <= x}``.

    Knows nothing about flat spans or densities: for each ``x`` it finds the
    right end of the sublevel set ``{X <= x}`` (a half-line, since ``X`` is
    nondecreasing) and integrates ``g`` up to it.
    """
    x = np.asarray(x, dtype=float)
    G = g.antiderivative()
    bp = np.union1d(X.breakpoints, g.breakpoints)
    span = np.max(np.abs(x), initial=0.0) + np.max(np.abs(X(bp))) + 1.0
    reach = (bp[-1] - bp[0] + 1.0) + span / max(min(X.left_slope, X.right_slope), 1e-3)
    nodes = np.concatenate(([bp[0] - reach], bp, [bp[-1] + reach]))
    vals = np.maximum.accumulate(X(nodes))
    k = np.searchsorted(vals, x, side="right")
    below = k == 0
    above = k == nodes.size
    k = np.clip(k, 1, nodes.size - 1)
    lo, hi = nodes[k - 1], nodes[k]
    v_lo, v_hi = vals[k - 1], vals[k]
    # vals[k-1] <= x < vals[k], so the bracketing piece is strictly increasing
    with np.errstate(divide="ignore", invalid="ignore"):
        end = lo + (x - v_lo) * (hi - lo) / (v_hi - v_lo)
    end = np.clip(np.where(np.isfinite(end), end, lo), lo, hi)
    out = np.where(below, 0.0, G(end))
    return np.where(above, G(nodes[-1]), out)


def oracle_pushforward(X: PiecewiseLinear, g: PiecewiseConstant, cells: int = 1_000_000, tolerance: float = 1e-6, **tols) -> CheckReport:
    """Compare the closed distribution function of ``pushforward_decompose``
    with :func:`brute_force_cdf` on a uniform grid of ``cells`` points."""
    if cells < 1000:
        raise ValueError("cells must be at least 1000")
    mu = pushforward_decompose(X, g, **tols)
    bp = np.union1d(X.breakpoints, g.breakpoints)
    Xb = X(bp)
    grid = np.linspace(Xb.min() - 1.0, Xb.max() + 1.0, cells)
    grid = np.union1d(grid, mu.locations)
    err = np.abs(brute_force_cdf(X, g, grid) - cdf(mu, grid, "closed"))
    k = int(np.argmax(err))
    return _report("oracle_pushforward", [(err[k], {"x": float(grid[k])})], tolerance)


def suite_structure(param: AlphaParametrization, t: float, tolerance: float = 1e-10, slope_tolerance: float = 1e-9, **tols) -> CheckReport:
    """Every atom at time ``t`` must come from an interval where
    ``u_bar_x = -2/t``, carry mass ``(4/t^2)`` times that interval's length and
    sit where the interval's characteristics meet."""
    if t == 0:
        raise ValueError("structure suite needs t != 0")
    mu = evolve(param, t, **tols).mu
    datum = param.datum
    mu_bar = datum.mu_bar
    errors = []
    for loc, m, (a1, a2) in zip(mu.locations, mu.masses, mu.labels):
        inside = (param.alpha_nodes > a1) & (param.alpha_nodes < a2)
        probes = np.concatenate(([a1], param.alpha_nodes[inside], [a2]))
        mids = 0.5 * (probes[:-1] + probes[1:])
        info = {"t": float(t), "x": float(loc), "mass": float(m)}
        if np.any(param.x_bar_slope(mids) == 0.0):
            errors.append((np.inf, dict(info, check="source in initial atom span")))
            continue
        slope_err = float(np.max(np.abs(param.u_slope(mids) + 2.0 / t)))
        errors.append((slope_err if slope_err > slope_tolerance else 0.0, dict(info, check="slope")))
        x1, x2 = float(param.x_bar(a1)), float(param.x_bar(a2))
        errors.append((abs(m - 4.0 / t**2 * (x2 - x1)), dict(info, check="mass", source=[x1, x2])))
        xm = 0.5 * (x1 + x2)
        where = xm + datum.u_bar(xm) * t + 0.25 * t * t * cdf(mu_bar, xm, "open")
        errors.append((abs(where - loc), dict(info, check="location", source=[x1, x2])))
    return _report("structure", errors, tolerance)


def suite_semigroup(param: AlphaParametrization, pairs, grid, tolerance: float = 1e-9, **tols) -> CheckReport:
    errors = []
    for s, t in pairs:
        dev = semigroup_deviations(param, s, t, grid, **tols)
        for key, val in dev.items():
            errors.append((val, {"s": float(s), "t": float(t), "check": key}))
    return _report("semigroup", errors, tolerance)


def nonsingular_time(param: AlphaParametrization, random_state=None, low=-3.0, high=3.0, margin=0.05, shifts=()) -> float:
    """Random time at which no piece is within ``margin`` of collapsing,
    i.e. ``|1 + s c / 2| >= margin`` for every slope ``c`` and ``s != 0``
    when the datum carries atoms.  Each ``s + shift`` must satisfy the same
    margin, so a restart from ``s`` can be compared at well-conditioned
    target times."""
    rng = check_random_state(random_state)
    c = param.u_slope.interior_values[param.x_bar.slopes > 0]
    has_atoms = param.datum.atom_locations.size > 0
    for _ in range(10_000):
        s = float(rng.uniform(low, high))
        if has_atoms and abs(s) < margin:
            continue
        ok = True
        for r in (s, *(s + d for d in shifts)):
            if c.size and np.min(np.abs(1.0 + 0.5 * r * c)) < margin:
                ok = False
                break
        if ok:
            return s
    raise RuntimeError("no nonsingular time found")


def event_times(param: AlphaParametrization, **tols) -> list[float]:
    return [e.t_star for e in predict_singular_times(param, **tols)]


SUITES = ("conservation", "weak", "ode", "structure", "oracle", "semigroup")


def run_suites(param: AlphaParametrization, suite: str = "all", random_state=None, tol_slope=TOL_SLOPE, tol_x=None) -> list[CheckReport]:
    """Run one named suite or all of them with default sampling."""
    tols = {"tol_slope": tol_slope}
    if tol_x is not None:
        tols["tol_x"] = tol_x
    rng = check_random_state(random_state)
    names = SUITES if suite == "all" else (suite,)
    unknown = set(names) - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suite {sorted(unknown)}")
    events = [e.t_star for e in predict_singular_times(param, **tols)]
    times = sorted({-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, *events})
    grid = alpha_grid(param, rng)
    regular = [nonsingular_time(param, rng, shifts=(1.0, -1.0)) for _ in range(4)]
    reports = []
    for name in names:
        if name == "conservation":
            reports.append(suite_conservation(param, times, **tols))
        elif name == "weak":
            reports.append(suite_weak_form(param, regular, grid, **tols))
        elif name == "ode":
            # far events (|t| >> 3) sit on a rounding floor eps |y| / h
            window = [t for t in times if abs(t) <= 3.0]
            reports.append(suite_characteristic_ode(param, grid, window))
        elif name == "structure":
            reps = [suite_structure(param, t, **tols) for t in times if t != 0]
            worst = max(reps, key=lambda r: r.max_error) if reps else CheckReport("structure", 0.0, 1e-10)
            reports.append(worst)
        elif name == "oracle":
            t = events[0] if events else 1.0
            reports.append(oracle_pushforward(snapped_characteristics(param, t, tols.get("tol_slope", TOL_SLOPE)), param.f, cells=100_000, **tols))
        elif name == "semigroup":
            pairs = [(s, s + 1.0) for s in regular[:2]] + [(s, s - 1.0) for s in regular[2:]]
            reports.append(suite_semigroup(param, pairs, grid, **tols))
    return reports

