"""Piecewise-linear and piecewise-constant functions of one real variable.

Both classes are immutable.  A :class:`PiecewiseLinear` is continuous, given
by its values at strictly increasing breakpoints and affine tails beyond the
first and last breakpoint.  A :class:`PiecewiseConstant` holds one value per
open piece, including the two unbounded tails, and is evaluated with the
right-limit convention at breakpoints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL_X = 1e-12
TOL_V = 1e-12


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


def _check_increasing(bp: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(bp)):
        raise ValueError(f"{name} must be finite")
    if bp.size > 1 and not np.all(np.diff(bp) > 0):
        raise ValueError(f"{name} must be strictly increasing")


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    """Continuous piecewise-linear function with affine tails."""

    breakpoints: np.ndarray
    values: np.ndarray
    left_slope: float = 0.0
    right_slope: float = 0.0

    def __post_init__(self):
        bp = _frozen(self.breakpoints)
        vals = _frozen(self.values)
        if bp.size == 0:
            raise ValueError("at least one breakpoint is required")
        if bp.shape != vals.shape:
            raise ValueError("breakpoints and values must have the same length")
        _check_increasing(bp, "breakpoints")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "left_slope", float(self.left_slope))
        object.__setattr__(self, "right_slope", float(self.right_slope))

    @classmethod
    def identity(cls) -> PiecewiseLinear:
        return cls([0.0], [0.0], 1.0, 1.0)

    @classmethod
    def constant(cls, c: float) -> PiecewiseLinear:
        return cls([0.0], [c], 0.0, 0.0)

    @property
    def slopes(self) -> np.ndarray:
        """Slopes of the bounded pieces (length ``n - 1``)."""
        return np.diff(self.values) / np.diff(self.breakpoints)

    def all_slopes(self) -> np.ndarray:
        """Slopes of every piece, tails included (length ``n + 1``)."""
        return np.concatenate(([self.left_slope], self.slopes, [self.right_slope]))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        bp, vals = self.breakpoints, self.values
        out = np.interp(x, bp, vals)
        left = x < bp[0]
        right = x > bp[-1]
        out = np.where(left, vals[0] + self.left_slope * (x - bp[0]), out)
        out = np.where(right, vals[-1] + self.right_slope * (x - bp[-1]), out)
        return out if out.ndim else float(out)

    def derivative(self) -> PiecewiseConstant:
        return PiecewiseConstant(self.breakpoints, self.all_slopes())

    def on(self, points) -> PiecewiseLinear:
        """Re-express on a superset of breakpoints (tails unchanged)."""
        pts = np.union1d(self.breakpoints, np.asarray(points, dtype=float))
        return PiecewiseLinear(pts, self(pts), self.left_slope, self.right_slope)

    def _binary(self, other, op) -> PiecewiseLinear:
        if not isinstance(other, PiecewiseLinear):
            c = float(other)
            if op is np.multiply:
                return PiecewiseLinear(self.breakpoints, self.values * c, self.left_slope * c, self.right_slope * c)
            return PiecewiseLinear(self.breakpoints, op(self.values, c), self.left_slope, self.right_slope)
        if op is np.multiply:
            raise TypeError("product of two piecewise-linear functions is not piecewise linear")
        pts = np.union1d(self.breakpoints, other.breakpoints)
        return PiecewiseLinear(
            pts,
            op(self(pts), other(pts)),
            op(self.left_slope, other.left_slope),
            op(self.right_slope, other.right_slope),
        )

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, c):
        return self._binary(c, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __repr__(self):
        return (
            f"PiecewiseLinear(breakpoints={self.breakpoints.tolist()}, values={self.values.tolist()}, "
            f"left_slope={self.left_slope}, right_slope={self.right_slope})"
        )


@dataclass(frozen=True, eq=False)
class PiecewiseConstant:
    """Piecewise-constant function; ``values[i]`` holds on
    ``(breakpoints[i-1], breakpoints[i])`` with the tails at both ends."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = _frozen(self.breakpoints)
        vals = _frozen(self.values)
        if vals.size != bp.size + 1:
            raise ValueError("need exactly one value per piece (len(breakpoints) + 1)")
        _check_increasing(bp, "breakpoints")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, c: float) -> PiecewiseConstant:
        return cls([], [c])

    @classmethod
    def zero(cls) -> PiecewiseConstant:
        return cls([], [0.0])

    @property
    def left_tail(self) -> float:
        return float(self.values[0])

    @property
    def right_tail(self) -> float:
        return float(self.values[-1])

    @property
    def interior_values(self) -> np.ndarray:
        return self.values[1:-1]

    def __call__(self, x):
        # right-limit at breakpoints
        x = np.asarray(x, dtype=float)
        out = self.values[np.searchsorted(self.breakpoints, x, side="right")]
        return out if out.ndim else float(out)

    def left_limit(self, x):
        x = np.asarray(x, dtype=float)
        out = self.values[np.searchsorted(self.breakpoints, x, side="left")]
        return out if out.ndim else float(out)

    def is_integrable(self) -> bool:
        return self.values[0] == 0.0 and self.values[-1] == 0.0

    def antiderivative(self) -> PiecewiseLinear:
        """Antiderivative vanishing at the first breakpoint."""
        bp = self.breakpoints
        if bp.size == 0:
            return PiecewiseLinear([0.0], [0.0], self.values[0], self.values[0])
        cum = np.concatenate(([0.0], np.cumsum(self.interior_values * np.diff(bp))))
        return PiecewiseLinear(bp, cum, self.values[0], self.values[-1])

    def on(self, points) -> PiecewiseConstant:
        pts = np.union1d(self.breakpoints, np.asarray(points, dtype=float))
        return PiecewiseConstant(pts, _piece_values(self, pts))

    def map(self, func) -> PiecewiseConstant:
        return PiecewiseConstant(self.breakpoints, func(self.values))

    def __add__(self, other):
        if isinstance(other, PiecewiseConstant):
            pts = np.union1d(self.breakpoints, other.breakpoints)
            return PiecewiseConstant(pts, _piece_values(self, pts) + _piece_values(other, pts))
        return self.map(lambda v: v + float(other))

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, PiecewiseConstant):
            pts = np.union1d(self.breakpoints, other.breakpoints)
            return PiecewiseConstant(pts, _piece_values(self, pts) * _piece_values(other, pts))
        return self.map(lambda v: v * float(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __repr__(self):
        return f"PiecewiseConstant(breakpoints={self.breakpoints.tolist()}, values={self.values.tolist()})"


def _piece_values(g: PiecewiseConstant, pts: np.ndarray) -> np.ndarray:
    """Values of ``g`` on every piece cut by ``pts`` (tails included)."""
    if pts.size == 0:
        return g.values.copy()
    probes = np.concatenate(([pts[0] - 1.0], 0.5 * (pts[:-1] + pts[1:]), [pts[-1] + 1.0]))
    return np.asarray(g(probes), dtype=float).reshape(-1)


@dataclass(frozen=True, eq=False)
class MonotoneGraph:
    """Nondecreasing map ``x -> base(x) + sum of jumps at locations <= x``."""

    base: PiecewiseLinear
    jump_locations: np.ndarray = ()
    jump_heights: np.ndarray = ()

    def __post_init__(self):
        locs = _frozen(self.jump_locations)
        heights = _frozen(self.jump_heights)
        if locs.shape != heights.shape:
            raise ValueError("jump locations and heights must match")
        _check_increasing(locs, "jump locations")
        if np.any(heights <= 0):
            raise ValueError("jump heights must be positive")
        if np.any(self.base.all_slopes() < 0):
            raise ValueError("base of a monotone graph must be nondecreasing")
        object.__setattr__(self, "jump_locations", locs)
        object.__setattr__(self, "jump_heights", heights)

    def __call__(self, x, endpoint: str = "closed"):
        x = np.asarray(x, dtype=float)
        side = "right" if endpoint == "closed" else "left"
        cum = np.concatenate(([0.0], np.cumsum(self.jump_heights)))
        out = self.base(x) + cum[np.searchsorted(self.jump_locations, x, side=side)]
        return out if np.ndim(out) else float(out)


def evaluate(f, x):
    """Evaluate a piecewise function (right limit for piecewise-constant)."""
    return f(x)


def derivative(f: PiecewiseLinear) -> PiecewiseConstant:
    return f.derivative()


def pseudo_inverse(G: MonotoneGraph, alpha=None):
    """Generalized inverse ``sup{x : G(x-) <= alpha}`` of a monotone graph.

    With ``alpha=None`` the whole inverse is returned as a
    :class:`PiecewiseLinear`; each jump of ``G`` becomes a flat segment whose
    length is the jump height.  The continuous part of ``G`` must be strictly
    increasing, tails included.
    """
    base = G.base
    if np.any(base.all_slopes() <= 0):
        raise ValueError("pseudo-inverse needs a strictly increasing continuous part")
    xs = np.union1d(base.breakpoints, G.jump_locations)
    heights = np.zeros_like(xs)
    heights[np.searchsorted(xs, G.jump_locations)] = G.jump_heights
    before = np.concatenate(([0.0], np.cumsum(heights)[:-1]))
    lower = base(xs) + before
    jumped = heights > 0
    n_nodes = xs.size + int(jumped.sum())
    alphas = np.empty(n_nodes)
    xbar = np.empty(n_nodes)
    pos = np.arange(xs.size) + np.concatenate(([0], np.cumsum(jumped)[:-1]))
    alphas[pos] = lower
    xbar[pos] = xs
    alphas[pos[jumped] + 1] = lower[jumped] + heights[jumped]
    xbar[pos[jumped] + 1] = xs[jumped]
    inv = PiecewiseLinear(alphas, xbar, 1.0 / base.left_slope, 1.0 / base.right_slope)
    if alpha is None:
        return inv
    return inv(alpha)


def compose_monotone(f: PiecewiseLinear, g: PiecewiseLinear) -> PiecewiseLinear:
    """Exact composition ``f o g`` for nondecreasing ``g``."""
    if np.any(g.all_slopes() < 0):
        raise ValueError("inner function of compose_monotone must be nondecreasing")
    ga, gv = g.breakpoints, g.values
    b = f.breakpoints
    idx = np.searchsorted(gv, b, side="left")
    pre = []
    for bi, i in zip(b, idx):
        if i < gv.size and gv[i] == bi:
            continue
        if 0 < i < gv.size:
            pre.append(ga[i - 1] + (bi - gv[i - 1]) * (ga[i] - ga[i - 1]) / (gv[i] - gv[i - 1]))
        elif i == 0 and g.left_slope > 0:
            pre.append(ga[0] + (bi - gv[0]) / g.left_slope)
        elif i == gv.size and g.right_slope > 0:
            pre.append(ga[-1] + (bi - gv[-1]) / g.right_slope)
    pts = np.union1d(ga, np.asarray(pre, dtype=float))
    inner = g(pts)
    df = f.derivative()
    # probe one unit into each tail: every breakpoint of f already has its
    # preimage in pts, so no rounding at inner[0] / inner[-1] can leak in
    left = g.left_slope * df(g(pts[0] - 1.0)) if g.left_slope > 0 else 0.0
    right = g.right_slope * df(g(pts[-1] + 1.0)) if g.right_slope > 0 else 0.0
    return PiecewiseLinear(pts, f(inner), left, right)


def integrate(g: PiecewiseConstant, a: float = -np.inf, b: float = np.inf) -> float:
    """Exact integral of ``g`` over ``(a, b)``."""
    if a > b:
        raise ValueError("integrate expects a <= b")
    if (np.isneginf(a) and g.left_tail != 0.0) or (np.isposinf(b) and g.right_tail != 0.0):
        raise ValueError("non-integrable tail")
    if a == b:
        return 0.0
    F = g.antiderivative()
    lo = 0.0 if np.isneginf(a) else F(a)
    hi = F.values[-1] if np.isposinf(b) else F(b)
    return float(hi - lo)


def consolidate(f, tol_x: float = TOL_X, tol_v: float = TOL_V):
    """Drop redundant breakpoints.

    Breakpoints closer than ``tol_x`` to the previously kept one are merged;
    interior breakpoints of a :class:`PiecewiseLinear` lying within ``tol_v``
    of the chord through their kept neighbours are removed, as are
    :class:`PiecewiseConstant` breakpoints separating values within ``tol_v``.
    Both tolerances are strict, so zero tolerances return the input unchanged.
    """
    if tol_x < 0 or tol_v < 0:
        raise ValueError("tolerances must be nonnegative")
    if isinstance(f, PiecewiseLinear):
        return _consolidate_linear(f, tol_x, tol_v)
    if isinstance(f, PiecewiseConstant):
        return _consolidate_constant(f, tol_x, tol_v)
    raise TypeError(f"cannot consolidate {type(f).__name__}")


def _consolidate_linear(f: PiecewiseLinear, tol_x, tol_v) -> PiecewiseLinear:
    bp, vals = f.breakpoints, f.values
    keep = [0]
    for i in range(1, bp.size):
        if bp[i] - bp[keep[-1]] < tol_x and abs(vals[i] - vals[keep[-1]]) < tol_v + tol_x:
            continue
        keep.append(i)
    if keep[-1] != bp.size - 1 and bp.size > 1:
        keep[-1] = bp.size - 1
    xs, vs = bp[keep], vals[keep]
    out = [0]
    j = 1
    while j < xs.size:
        anchor = out[-1]
        end = j
        while end + 1 < xs.size and _chord_ok(xs, vs, anchor, end + 1, tol_v):
            end += 1
        out.append(end)
        j = end + 1
    return PiecewiseLinear(xs[out], vs[out], f.left_slope, f.right_slope)


def _chord_ok(xs, vs, a, b, tol_v) -> bool:
    inner = slice(a + 1, b)
    chord = vs[a] + (vs[b] - vs[a]) * (xs[inner] - xs[a]) / (xs[b] - xs[a])
    return bool(np.all(np.abs(chord - vs[inner]) < tol_v))


def _consolidate_constant(f: PiecewiseConstant, tol_x, tol_v) -> PiecewiseConstant:
    bp, vals = f.breakpoints, f.values
    new_bp, new_vals = [], [vals[0]]
    for i, x in enumerate(bp):
        v = vals[i + 1]
        if new_bp and x - new_bp[-1] < tol_x:
            # the sliver (new_bp[-1], x) is dropped
            new_vals[-1] = v
            continue
        if abs(v - new_vals[-1]) < tol_v:
            continue
        new_bp.append(x)
        new_vals.append(v)
    return PiecewiseConstant(new_bp, new_vals)
