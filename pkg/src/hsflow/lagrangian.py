"""Energy-coordinate (alpha) parametrization of an initial datum and the
closed-form characteristics built on it.

For a datum ``(u_bar, mu_bar)`` the map ``x -> x + mu_bar((-inf, x])`` is
inverted to give ``x_bar(alpha)``.  Every atom of ``mu_bar`` becomes a flat
span of ``x_bar`` whose length is the atom's mass, and the energy density in
the alpha variable is ``f = 1 - x_bar'``.  Characteristics are then quadratic
in time::

    y(alpha, t) = x_bar + u_bar(x_bar) t + (t^2 / 4) (alpha - x_bar)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .measure import TOL_SLOPE, RadonMeasure
from .pwfun import (
    MonotoneGraph,
    PiecewiseConstant,
    PiecewiseLinear,
    _frozen,
    compose_monotone,
    integrate,
    pseudo_inverse,
)


@dataclass(frozen=True, eq=False)
class InitialDatum:
    """Initial velocity ``u_bar`` and the atoms of the initial energy measure.

    The absolutely continuous part of the energy measure is always
    ``u_bar_x**2 dx``; only the pure-point part is supplied.
    """

    u_bar: PiecewiseLinear
    atom_locations: np.ndarray = ()
    atom_masses: np.ndarray = ()
    pieces: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.u_bar.left_slope != 0.0 or self.u_bar.right_slope != 0.0:
            raise ValueError("u_bar must be constant outside a bounded window")
        locs = _frozen(self.atom_locations)
        masses = _frozen(self.atom_masses)
        if locs.shape != masses.shape:
            raise ValueError("atom locations and masses must match")
        if np.any(masses <= 0):
            raise ValueError("atom mass must be positive")
        if not np.all(np.isfinite(locs)) or not np.all(np.isfinite(masses)):
            raise ValueError("atoms must be finite")
        order = np.argsort(locs, kind="stable")
        locs, masses = locs[order], masses[order]
        if locs.size > 1 and not np.all(np.diff(locs) > 0):
            raise ValueError("atom locations must be distinct")
        object.__setattr__(self, "atom_locations", _frozen(locs))
        object.__setattr__(self, "atom_masses", _frozen(masses))

    @classmethod
    def from_pieces(cls, u_left: float, pieces, atoms=()) -> InitialDatum:
        """Build from ``[[x_start, x_end, slope], ...]`` contiguous pieces."""
        pieces = tuple((float(a), float(b), float(c)) for a, b, c in pieces)
        atoms = list(atoms)
        locs = [float(a[0]) for a in atoms]
        masses = [float(a[1]) for a in atoms]
        if not pieces:
            return cls(PiecewiseLinear.constant(float(u_left)), locs, masses, pieces=())
        xs = [pieces[0][0]]
        vals = [float(u_left)]
        for a, b, c in pieces:
            if a != xs[-1]:
                raise ValueError(f"pieces are not contiguous at x={a!r}")
            if not b > a:
                raise ValueError(f"piece [{a!r}, {b!r}] is empty or reversed")
            if not np.isfinite(c):
                raise ValueError("slopes must be finite")
            xs.append(b)
            vals.append(vals[-1] + c * (b - a))
        return cls(PiecewiseLinear(xs, vals), locs, masses, pieces=pieces)

    @property
    def u_x(self) -> PiecewiseConstant:
        # slopes as supplied are exact; differencing cumulative values is not
        if self.pieces:
            slopes = [c for _, _, c in self.pieces]
            return PiecewiseConstant(self.u_bar.breakpoints, [0.0, *slopes, 0.0])
        return self.u_bar.derivative()

    @property
    def density(self) -> PiecewiseConstant:
        return self.u_x.map(np.square)

    @property
    def mu_bar(self) -> RadonMeasure:
        return RadonMeasure(self.density, self.atom_locations, self.atom_masses)

    @property
    def energy(self) -> float:
        return integrate(self.density) + float(self.atom_masses.sum())

    @property
    def u_left(self) -> float:
        return float(self.u_bar.values[0])

    @property
    def u_right(self) -> float:
        return float(self.u_bar.values[-1])

    def piece_table(self) -> list[tuple[float, float, float]]:
        if self.pieces is not None:
            return list(self.pieces)
        bp = self.u_bar.breakpoints
        return [(float(a), float(b), float(c)) for a, b, c in zip(bp[:-1], bp[1:], self.u_bar.slopes)]

    def __repr__(self):
        return f"InitialDatum(u_bar={self.u_bar!r}, atoms={list(zip(self.atom_locations.tolist(), self.atom_masses.tolist()))})"


@dataclass(frozen=True, eq=False)
class AlphaParametrization:
    """Lagrangian state ``(x_bar, f, v_bar = u_bar o x_bar, E)``.

    ``u_slope`` is ``u_bar_x(x_bar(alpha))`` on the pieces where ``x_bar`` is
    increasing and zero on the flat spans coming from atoms.  All four
    piecewise objects share the same breakpoints.
    """

    x_bar: PiecewiseLinear
    f: PiecewiseConstant
    v_bar: PiecewiseLinear
    energy: float
    u_slope: PiecewiseConstant
    datum: InitialDatum

    @property
    def alpha_nodes(self) -> np.ndarray:
        return self.x_bar.breakpoints

    @property
    def x_bar_slope(self) -> PiecewiseConstant:
        return self.x_bar.derivative()

    def flat_pieces(self) -> np.ndarray:
        """Mask over bounded pieces: True where ``x_bar`` is flat (atom spans)."""
        return self.x_bar.slopes == 0.0


def build(datum: InitialDatum) -> AlphaParametrization:
    density = datum.density
    base = PiecewiseLinear.identity() + density.antiderivative()
    G = MonotoneGraph(base, datum.atom_locations, datum.atom_masses)
    x_bar = pseudo_inverse(G)
    nodes = x_bar.breakpoints
    x_bar_slope = x_bar.derivative()
    f = x_bar_slope.map(lambda v: 1.0 - v)
    # interior of an atom span has f == 1 exactly; clip rounding below zero
    f = f.map(lambda v: np.clip(v, 0.0, 1.0))
    v_bar = compose_monotone(datum.u_bar, x_bar)
    if v_bar.breakpoints.size != nodes.size or not np.array_equal(v_bar.breakpoints, nodes):
        v_bar = v_bar.on(nodes)
        nodes = v_bar.breakpoints
        x_bar = x_bar.on(nodes)
        f = f.on(nodes)
    mids = np.concatenate(([nodes[0] - 1.0], 0.5 * (nodes[:-1] + nodes[1:]), [nodes[-1] + 1.0]))
    flat = x_bar.derivative()(mids) == 0.0
    slope_vals = np.where(flat, 0.0, datum.u_x(x_bar(mids)))
    u_slope = PiecewiseConstant(nodes, slope_vals)
    return AlphaParametrization(x_bar, f, v_bar, datum.energy, u_slope, datum)


def _nodes(param: AlphaParametrization) -> np.ndarray:
    return param.alpha_nodes


def y_curve(param: AlphaParametrization, t: float) -> PiecewiseLinear:
    """``y(., t)`` as a piecewise-linear function of alpha."""
    a = _nodes(param)
    xb = param.x_bar.values
    vb = param.v_bar(a)
    vals = xb + vb * t + 0.25 * t * t * (a - xb)
    left = _tail_slope(param, t, "left")
    right = _tail_slope(param, t, "right")
    return PiecewiseLinear(a, vals, left, right)


def _tail_slope(param, t, side):
    xs = param.x_bar.left_slope if side == "left" else param.x_bar.right_slope
    vs = param.v_bar.left_slope if side == "left" else param.v_bar.right_slope
    return xs + vs * t + 0.25 * t * t * (1.0 - xs)


def y_at(param: AlphaParametrization, alpha, t: float):
    alpha = np.asarray(alpha, dtype=float)
    xb = param.x_bar(alpha)
    out = xb + param.v_bar(alpha) * t + 0.25 * t * t * (alpha - xb)
    return out if np.ndim(out) else float(out)


def u_along(param: AlphaParametrization, alpha, t: float):
    """Velocity carried by the characteristic through ``alpha``; equals
    ``d/dt y(alpha, t)``."""
    alpha = np.asarray(alpha, dtype=float)
    out = param.v_bar(alpha) + 0.5 * t * (alpha - param.x_bar(alpha))
    return out if np.ndim(out) else float(out)


def u_along_curve(param: AlphaParametrization, t: float) -> PiecewiseLinear:
    a = _nodes(param)
    vals = param.v_bar(a) + 0.5 * t * (a - param.x_bar.values)
    left = param.v_bar.left_slope + 0.5 * t * (1.0 - param.x_bar.left_slope)
    right = param.v_bar.right_slope + 0.5 * t * (1.0 - param.x_bar.right_slope)
    return PiecewiseLinear(a, vals, left, right)


def y_alpha_curve(param: AlphaParametrization, t: float) -> PiecewiseConstant:
    """Analytic ``y_alpha(., t)``: ``x_bar' (1 + t c / 2)^2`` where ``x_bar``
    increases, ``t^2 / 4`` on atom spans."""
    xs = param.x_bar_slope.values
    c = param.u_slope.values
    vals = np.where(xs == 0.0, 0.25 * t * t, xs * (1.0 + 0.5 * t * c) ** 2)
    return PiecewiseConstant(_nodes(param), vals)


def y_alpha(param: AlphaParametrization, alpha, t: float):
    return y_alpha_curve(param, t)(alpha)


@dataclass(frozen=True)
class AlphaPartition:
    """Labels of the alpha pieces at a fixed time.

    ``labels[i]`` refers to the piece between ``breakpoints[i-1]`` and
    ``breakpoints[i]`` (tails at both ends) and is ``"B"`` where ``y`` is
    strictly increasing or ``"A_pp"`` on flat spans.  No piece is ever
    singular continuous in this function class, so ``sc_pieces`` is empty.
    """

    t: float
    breakpoints: np.ndarray
    labels: tuple[str, ...]

    @property
    def sc_pieces(self) -> tuple:
        return ()

    def spans(self, label: str) -> list[tuple[float, float]]:
        bp = np.concatenate(([-np.inf], self.breakpoints, [np.inf]))
        return [(float(bp[i]), float(bp[i + 1])) for i, lab in enumerate(self.labels) if lab == label]


def classify_alpha(param: AlphaParametrization, t: float, tol_slope: float = TOL_SLOPE) -> AlphaPartition:
    ya = y_alpha_curve(param, t).values
    labels = tuple("A_pp" if v <= tol_slope else "B" for v in ya)
    return AlphaPartition(float(t), _nodes(param), labels)
