"""Finite nonnegative measures on the line: density part plus atoms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pwfun import TOL_X, PiecewiseConstant, PiecewiseLinear, _frozen, integrate

TOL_SLOPE = 1e-10


@dataclass(frozen=True, eq=False)
class RadonMeasure:
    """``density dx`` plus ``sum(masses[i] * delta(locations[i]))``.

    ``labels`` optionally records, for each atom, the ``(lo, hi)`` span of the
    parameter interval that was collapsed onto it.
    """

    density: PiecewiseConstant
    locations: np.ndarray = ()
    masses: np.ndarray = ()
    labels: tuple | None = None

    def __post_init__(self):
        locs = _frozen(self.locations)
        masses = _frozen(self.masses)
        if locs.shape != masses.shape:
            raise ValueError("atom locations and masses must match")
        if locs.size > 1 and not np.all(np.diff(locs) > 0):
            raise ValueError("atom locations must be strictly increasing")
        if np.any(masses <= 0):
            raise ValueError("atom masses must be positive")
        if np.any(self.density.values < 0):
            raise ValueError("density must be nonnegative")
        if not self.density.is_integrable():
            raise ValueError("density must vanish on both tails")
        if self.labels is not None:
            labels = tuple(tuple(map(float, lab)) for lab in self.labels)
            if len(labels) != locs.size:
                raise ValueError("one label per atom")
            object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "masses", masses)

    @classmethod
    def zero(cls) -> RadonMeasure:
        return cls(PiecewiseConstant.zero(), labels=())

    @classmethod
    def from_atoms(cls, atoms, density: PiecewiseConstant | None = None) -> RadonMeasure:
        atoms = sorted((float(x), float(m)) for x, m in atoms)
        locs = [a[0] for a in atoms]
        masses = [a[1] for a in atoms]
        return cls(density if density is not None else PiecewiseConstant.zero(), locs, masses)

    @property
    def n_atoms(self) -> int:
        return int(self.locations.size)

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.locations.tolist(), self.masses.tolist()))

    @property
    def ac_mass(self) -> float:
        return integrate(self.density)

    @property
    def pp_mass(self) -> float:
        return float(self.masses.sum())

    def cumulative(self) -> PiecewiseLinear:
        """Distribution function of the density part alone."""
        return self.density.antiderivative()

    def __repr__(self):
        return f"RadonMeasure(ac_mass={self.ac_mass!r}, atoms={self.atoms!r})"


def cdf(mu: RadonMeasure, x, endpoint: str = "closed"):
    """``mu((-inf, x])`` (closed) or ``mu((-inf, x))`` (open)."""
    if endpoint not in ("open", "closed"):
        raise ValueError("endpoint must be 'open' or 'closed'")
    x = np.asarray(x, dtype=float)
    ac = mu.cumulative()(x)
    cum = np.concatenate(([0.0], np.cumsum(mu.masses)))
    side = "right" if endpoint == "closed" else "left"
    out = ac + cum[np.searchsorted(mu.locations, x, side=side)]
    return out if np.ndim(out) else float(out)


def total_mass(mu: RadonMeasure) -> float:
    return mu.ac_mass + mu.pp_mass


def pushforward_decompose(
    X: PiecewiseLinear,
    g: PiecewiseConstant,
    tol_slope: float = TOL_SLOPE,
    tol_x: float = TOL_X,
) -> RadonMeasure:
    """Lebesgue decomposition of the push-forward ``X # (g dxi)``.

    Pieces of ``X`` with slope above ``tol_slope`` carry density ``g / X'`` on
    their image; each maximal run of flat pieces with positive ``g``-mass
    collapses to one atom at its image point, labelled by the run's span.
    A piece whose image is shorter than ``tol_x`` also counts as flat, and
    atoms whose locations agree to ``tol_x`` are merged.
    """
    if np.any(g.values < 0):
        raise ValueError("push-forward weight must be nonnegative")
    if not g.is_integrable():
        raise ValueError("push-forward weight has a non-integrable tail")
    if X.left_slope < -tol_slope or X.right_slope < -tol_slope:
        raise ValueError("push-forward map must be nondecreasing")

    xi = np.union1d(X.breakpoints, g.breakpoints)
    if xi.size < 2:
        return RadonMeasure.zero()
    Xv = X(xi)
    dxi = np.diff(xi)
    dX = np.diff(Xv)
    # increments below tol_x are coincident image points, not a decrease
    step_tol = np.maximum(tol_slope * dxi, tol_x)
    if np.any(dX < -step_tol):
        raise ValueError("push-forward map must be nondecreasing")
    gv = g(0.5 * (xi[:-1] + xi[1:]))
    mass = gv * dxi
    flat = dX <= step_tol

    edges: list[float] = []
    dens: list[float] = []
    for i in np.flatnonzero(~flat):
        a, b = Xv[i], Xv[i + 1]
        if edges and b <= edges[-1]:
            # sliver swallowed by rounding: keep its mass on the last piece
            dens[-1] += mass[i] / (edges[-1] - edges[-2])
            continue
        if not edges:
            edges.extend((a, b))
            dens.append(mass[i] / (b - a))
        elif a <= edges[-1] + tol_x:
            edges.append(b)
            dens.append(mass[i] / (b - edges[-2]))
        else:
            dens.append(0.0)
            edges.extend((a, b))
            dens.append(mass[i] / (b - a))
    density = PiecewiseConstant(edges, [0.0, *dens, 0.0]) if edges else PiecewiseConstant.zero()

    locs: list[float] = []
    masses: list[float] = []
    labels: list[tuple[float, float]] = []
    i = 0
    n = flat.size
    while i < n:
        if not flat[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and flat[j + 1]:
            j += 1
        m = float(mass[i : j + 1].sum())
        if m > 0:
            loc = float(Xv[i])
            if locs and loc - locs[-1] <= tol_x:
                masses[-1] += m
                labels[-1] = (labels[-1][0], float(xi[j + 1]))
            else:
                locs.append(loc)
                masses.append(m)
                labels.append((float(xi[i]), float(xi[j + 1])))
        i = j + 1
    return RadonMeasure(density, locs, masses, tuple(labels))


def cdf_sup_distance(mu: RadonMeasure, nu: RadonMeasure) -> float:
    """Sup-distance between distribution functions, both endpoint conventions."""
    pts = np.union1d(
        np.union1d(mu.density.breakpoints, nu.density.breakpoints),
        np.union1d(mu.locations, nu.locations),
    )
    if pts.size == 0:
        return 0.0
    closed = np.abs(cdf(mu, pts, "closed") - cdf(nu, pts, "closed"))
    opened = np.abs(cdf(mu, pts, "open") - cdf(nu, pts, "open"))
    return float(max(closed.max(), opened.max()))
