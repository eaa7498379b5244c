import numpy as np
import pytest
from hypothesis import given, strategies as st

from hsflow.datasets import make_intro_datum
from hsflow.pwfun import (
    MonotoneGraph,
    PiecewiseConstant,
    PiecewiseLinear,
    compose_monotone,
    consolidate,
    derivative,
    evaluate,
    integrate,
    pseudo_inverse,
)


def random_pl(seed, n=6, monotone=False, flat_tails=False):
    rng = np.random.default_rng(seed)
    x = np.sort(rng.uniform(-5, 5, n))
    x = x[np.concatenate(([True], np.diff(x) > 1e-3))]
    if monotone:
        v = np.cumsum(rng.uniform(0, 2, x.size) * (rng.uniform(size=x.size) > 0.2))
        tails = (0.0, 0.0) if flat_tails else tuple(rng.uniform(0.1, 2, 2))
    else:
        v = rng.uniform(-3, 3, x.size)
        tails = (0.0, 0.0) if flat_tails else tuple(rng.uniform(-2, 2, 2))
    return PiecewiseLinear(x, v, *tails)


def random_density(seed, n=5):
    rng = np.random.default_rng(seed)
    x = np.unique(rng.uniform(-5, 5, n))
    return PiecewiseConstant(x, [0.0, *rng.uniform(0, 3, x.size - 1), 0.0])


def intro_graph():
    d = make_intro_datum()
    return MonotoneGraph(PiecewiseLinear.identity() + d.density.antiderivative(), [], [])


class TestEvaluate:
    def test_identity(self):
        assert evaluate(PiecewiseLinear.identity(), 3.5) == 3.5

    def test_intro_value(self):
        assert evaluate(make_intro_datum().u_bar, 0.5) == -0.5

    def test_intro_derivative_value(self):
        assert evaluate(derivative(make_intro_datum().u_bar), 0.5) == -1.0

    def test_tails_are_affine(self):
        f = PiecewiseLinear([0.0, 1.0], [0.0, 2.0], left_slope=-1.0, right_slope=3.0)
        assert f(-2.0) == 2.0
        assert f(3.0) == 8.0

    def test_right_limit_convention(self):
        g = PiecewiseConstant([0.0, 1.0], [1.0, 2.0, 3.0])
        assert g(0.0) == 2.0
        assert g.left_limit(0.0) == 1.0
        assert g(1.0) == 3.0


class TestDerivative:
    def test_identity(self):
        d = derivative(PiecewiseLinear.identity())
        assert np.all(d(np.linspace(-10, 10, 11)) == 1.0)

    def test_intro(self):
        d = derivative(make_intro_datum().u_bar)
        assert d(-0.5) == 0.0 and d(0.5) == -1.0 and d(1.5) == 0.0

    def test_intro_x_bar(self):
        G = intro_graph()
        d = derivative(pseudo_inverse(G))
        assert d(-1.0) == 1.0 and d(1.0) == 0.5 and d(3.0) == 1.0


class TestPseudoInverse:
    def test_identity(self):
        G = MonotoneGraph(PiecewiseLinear.identity(), [], [])
        a = np.linspace(-4, 4, 17)
        np.testing.assert_array_equal(pseudo_inverse(G, a), a)

    def test_intro(self):
        assert pseudo_inverse(intro_graph(), 1.0) == 0.5

    @pytest.mark.parametrize("m", [0.5, 1.0, 3.0])
    def test_atom_flat_span(self, m):
        G = MonotoneGraph(PiecewiseLinear.identity(), [0.0], [m])
        a = np.linspace(0.0, m, 11)
        np.testing.assert_array_equal(pseudo_inverse(G, a), 0.0)
        assert pseudo_inverse(G, m + 1.0) == 1.0
        assert pseudo_inverse(G, -1.0) == -1.0

    @given(st.integers(0, 10**6))
    def test_sandwich_and_lipschitz(self, seed):
        rng = np.random.default_rng(seed)
        base = PiecewiseLinear.identity() + random_density(seed).antiderivative()
        locs = np.sort(rng.choice(np.linspace(-4, 4, 33), size=rng.integers(0, 4), replace=False))
        G = MonotoneGraph(base, locs, rng.uniform(0.1, 2, locs.size))
        x_bar = pseudo_inverse(G)
        a = np.sort(rng.uniform(-20, 20, 400))
        xb = x_bar(a)
        assert np.all(G(xb, "open") <= a + 1e-12)
        assert np.all(a <= G(xb, "closed") + 1e-12)
        assert np.all(np.diff(xb) >= 0)
        assert np.all(np.diff(xb) <= np.diff(a) + 1e-12)


class TestCompose:
    def test_identity_inner(self):
        f = random_pl(3)
        h = compose_monotone(f, PiecewiseLinear.identity())
        x = np.linspace(-10, 10, 101)
        np.testing.assert_allclose(h(x), f(x), rtol=0, atol=1e-12)

    def test_intro(self, intro):
        v = intro.v_bar
        assert v(-1.0) == 0.0
        np.testing.assert_allclose(v([0.5, 1.0, 1.5]), [-0.25, -0.5, -0.75], atol=1e-15)
        assert v(3.0) == -1.0

    def test_atom(self, atom):
        np.testing.assert_array_equal(atom.v_bar(np.linspace(-3, 3, 13)), 0.0)

    @given(st.integers(0, 10**6))
    def test_matches_pointwise_evaluation(self, seed):
        f = random_pl(seed)
        g = random_pl(seed + 1, monotone=True)
        h = compose_monotone(f, g)
        a = np.random.default_rng(seed).uniform(-10, 10, 1000)
        np.testing.assert_allclose(h(a), f(g(a)), rtol=0, atol=1e-12 * (1 + np.abs(f(g(a)))).max())

    def test_rejects_decreasing_inner(self):
        with pytest.raises(ValueError):
            compose_monotone(PiecewiseLinear.identity(), PiecewiseLinear([0.0, 1.0], [1.0, 0.0]))


class TestIntegrate:
    def test_zero(self):
        assert integrate(PiecewiseConstant.zero()) == 0.0

    def test_intro_f(self, intro):
        assert integrate(intro.f) == pytest.approx(1.0, abs=1e-15)

    def test_atom_f(self):
        from hsflow.datasets import make_atom_datum
        from hsflow.lagrangian import build

        assert integrate(build(make_atom_datum(2.0)).f, 0.0, 2.0) == 2.0

    def test_non_integrable_tail(self):
        with pytest.raises(ValueError, match="non-integrable"):
            integrate(PiecewiseConstant.constant(1.0))

    @given(st.integers(0, 10**6))
    def test_antiderivative_differentiates_back(self, seed):
        g = random_density(seed)
        d = g.antiderivative().derivative()
        x = np.random.default_rng(seed).uniform(-6, 6, 200)
        np.testing.assert_allclose(d(x), g(x), atol=1e-12)


class TestConsolidate:
    def test_duplicate_breakpoints(self):
        f = PiecewiseLinear([0.0, 1.0, 1.0 + 1e-14, 2.0], [0.0, 1.0, 1.0, 0.0])
        out = consolidate(f)
        np.testing.assert_array_equal(out.breakpoints, [0.0, 1.0, 2.0])

    def test_collinear(self):
        out = consolidate(PiecewiseLinear([0.0, 1.0, 2.0], [0.0, 1.0, 2.0]))
        np.testing.assert_array_equal(out.breakpoints, [0.0, 2.0])

    def test_zero_tolerance_is_noop(self):
        f = PiecewiseLinear([0.0, 1.0, 2.0], [0.0, 1.0, 2.0])
        out = consolidate(f, 0.0, 0.0)
        np.testing.assert_array_equal(out.breakpoints, f.breakpoints)
        np.testing.assert_array_equal(out.values, f.values)

    def test_constant_merges_equal_values(self):
        g = PiecewiseConstant([0.0, 1.0, 2.0], [0.0, 1.0, 1.0, 0.0])
        np.testing.assert_array_equal(consolidate(g).breakpoints, [0.0, 2.0])

    @given(st.integers(0, 10**6))
    def test_preserves_function(self, seed):
        f = random_pl(seed)
        out = consolidate(f)
        x = np.linspace(-12, 12, 301)
        np.testing.assert_allclose(out(x), f(x), atol=1e-10)


class TestValidation:
    def test_breakpoints_must_increase(self):
        with pytest.raises(ValueError):
            PiecewiseLinear([0.0, 0.0], [1.0, 2.0])

    def test_value_count(self):
        with pytest.raises(ValueError):
            PiecewiseConstant([0.0, 1.0], [1.0, 2.0])

    def test_immutable(self):
        f = PiecewiseLinear([0.0, 1.0], [0.0, 1.0])
        with pytest.raises(ValueError):
            f.values[0] = 3.0

    def test_arithmetic(self):
        f = PiecewiseLinear([0.0, 1.0], [0.0, 1.0])
        g = PiecewiseLinear([0.5, 2.0], [1.0, 0.0])
        x = np.linspace(-2, 3, 21)
        np.testing.assert_allclose((f + g)(x), f(x) + g(x), atol=1e-14)
        np.testing.assert_allclose((f - g)(x), f(x) - g(x), atol=1e-14)
        np.testing.assert_allclose((f * 2.5)(x), 2.5 * f(x), atol=1e-14)
