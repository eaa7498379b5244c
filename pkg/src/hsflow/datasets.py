"""Initial data generators: the worked examples and seeded random data."""

from __future__ import annotations

import numpy as np
from sklearn.utils import check_random_state

from .lagrangian import InitialDatum
from .pwfun import PiecewiseConstant, PiecewiseLinear


def make_intro_datum() -> InitialDatum:
    """``u = 0`` for ``x <= 0``, ``-x`` on ``(0, 1)``, ``-1`` afterwards.

    Blows up at ``t = 2`` into a unit atom at the origin.
    """
    return InitialDatum.from_pieces(0.0, [[0.0, 1.0, -1.0]])


def make_atom_datum(mass: float = 1.0, location: float = 0.0) -> InitialDatum:
    if not mass > 0:
        raise ValueError("atom mass must be positive")
    return InitialDatum.from_pieces(0.0, [], [[location, mass]])


def fat_cantor_intervals(depth: int):
    """Kept and removed intervals of the depth-``depth`` fat Cantor construction.

    Step ``n`` removes an open middle interval of length ``4**-n`` from each of
    the ``2**(n-1)`` intervals kept so far.  Returns ``(kept, removed)`` where
    ``removed`` holds ``(a, b, n)`` triples.
    """
    if depth < 1:
        raise ValueError("cantor depth must be at least 1")
    kept = [(0.0, 1.0)]
    removed = []
    for n in range(1, depth + 1):
        gap = 4.0**-n
        nxt = []
        for a, b in kept:
            mid = 0.5 * (a + b)
            lo, hi = mid - 0.5 * gap, mid + 0.5 * gap
            nxt.extend(((a, lo), (hi, b)))
            removed.append((lo, hi, n))
        kept = nxt
    return kept, sorted(removed)


def make_fat_cantor_datum(depth: int) -> InitialDatum:
    """Slope ``-1`` on the kept intervals and ``-1 + 1/n`` on the intervals
    removed at step ``n``; zero outside ``[0, 1]``.

    At ``t = 2`` every kept interval collapses to an atom, and the intervals
    removed at step ``n >= 2`` collapse at ``t = 2n / (n - 1)``.
    """
    kept, removed = fat_cantor_intervals(depth)
    pieces = [(a, b, -1.0) for a, b in kept] + [(a, b, -1.0 + 1.0 / n) for a, b, n in removed]
    pieces.sort()
    return InitialDatum.from_pieces(0.0, pieces)


def make_random_datum(random_state=None, max_pieces: int = 8, max_atoms: int = 3) -> InitialDatum:
    """Random datum: 1-8 pieces with slopes in [-4, 4] inside [-10, 10] and
    0-3 atoms with masses in (0, 2]."""
    rng = check_random_state(random_state)
    n_pieces = rng.randint(1, max_pieces + 1)
    lo, hi = np.sort(rng.uniform(-10.0, 10.0, size=2))
    if hi - lo < 0.5:
        hi = min(lo + 0.5, 10.0)
        lo = hi - 0.5
    cuts = np.sort(rng.uniform(lo, hi, size=n_pieces - 1))
    xs = np.concatenate(([lo], cuts, [hi]))
    slopes = rng.uniform(-4.0, 4.0, size=n_pieces)
    pieces = [(float(a), float(b), float(c)) for a, b, c in zip(xs[:-1], xs[1:], slopes) if b > a]
    n_atoms = rng.randint(0, max_atoms + 1)
    locs = np.unique(rng.uniform(-10.0, 10.0, size=n_atoms))
    masses = 2.0 - rng.uniform(0.0, 2.0, size=locs.size)
    u_left = float(rng.uniform(-2.0, 2.0))
    return InitialDatum.from_pieces(u_left, pieces, list(zip(locs.tolist(), masses.tolist())))


def make_random_pushforward(random_state=None, max_pieces: int = 12):
    """Random nondecreasing map ``X`` (roughly a third of its pieces flat)
    and a nonnegative compactly supported weight ``g``."""
    rng = check_random_state(random_state)
    n = rng.randint(2, max_pieces + 1)
    xi = np.unique(rng.uniform(-5.0, 5.0, size=n))
    steps = rng.uniform(0.0, 3.0, size=xi.size - 1) * (rng.uniform(size=xi.size - 1) > 0.35)
    values = rng.uniform(-2.0, 2.0) + np.concatenate(([0.0], np.cumsum(steps)))
    X = PiecewiseLinear(xi, values, *rng.uniform(0.1, 2.0, size=2))
    gx = np.unique(rng.uniform(-6.0, 6.0, size=rng.randint(2, 9)))
    g = PiecewiseConstant(gx, [0.0, *rng.uniform(0.0, 3.0, size=gx.size - 1), 0.0])
    return X, g
