import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vanya.differentials import (
    DerivativeTriple,
    build_supervised_pairs,
    build_triple,
    first_difference,
    second_difference,
)
from vanya.errors import InvalidInputError, TooShortError
from vanya.lv import DEFAULT_INITIAL, DEFAULT_PARAMS, integrate_rk4


class TestFirstDifference:
    def test_constant(self):
        np.testing.assert_array_equal(first_difference([5, 5, 5]), [0, 0])

    @pytest.mark.parametrize("dt", [0.25, 1.0, 3.0])
    def test_linear(self, dt):
        s = 2.5 * np.arange(6) * dt + 1.0
        np.testing.assert_allclose(first_difference(s, dt), 2.5, rtol=1e-12)

    def test_hand_example(self):
        np.testing.assert_array_equal(first_difference([1, 2, 4, 8], 0.5), [2, 4, 8])

    def test_too_short(self):
        with pytest.raises(TooShortError):
            first_difference([1.0])

    def test_bad_dt(self):
        with pytest.raises(InvalidInputError):
            first_difference([1, 2], 0.0)

    def test_approximates_lv_rate_at_first_order(self):
        errors = []
        for dt in (0.02, 0.01, 0.005):
            traj = integrate_rk4(DEFAULT_PARAMS, DEFAULT_INITIAL, dt, int(round(5 / dt)))
            x, y = traj.x, traj.y
            rate = DEFAULT_PARAMS.alpha * x - DEFAULT_PARAMS.beta * x * y
            errors.append(np.max(np.abs(first_difference(x, dt) - rate[:-1])))
        for coarse, fine in zip(errors, errors[1:]):
            assert 1.8 <= coarse / fine <= 2.2


class TestSecondDifference:
    def test_affine_is_zero(self):
        np.testing.assert_allclose(second_difference(3 * np.arange(7) - 2), 0, atol=1e-12)

    @pytest.mark.parametrize("dt", [0.5, 1.0, 0.1])
    def test_quadratic(self, dt):
        s = (np.arange(8) * dt) ** 2
        np.testing.assert_allclose(second_difference(s, dt), 2.0, rtol=1e-9)

    def test_hand_example(self):
        np.testing.assert_array_equal(second_difference([1, 2, 4, 8], 0.5), [4, 8])

    def test_too_short(self):
        with pytest.raises(TooShortError):
            second_difference([1.0, 2.0])

    def test_is_first_difference_twice(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            s = rng.normal(size=rng.integers(3, 40))
            dt = float(rng.uniform(0.1, 2))
            np.testing.assert_array_equal(
                second_difference(s, dt), first_difference(first_difference(s, dt), dt)
            )


class TestTriple:
    def test_minimal(self):
        t = build_triple([1.0, 2.0, 4.0])
        assert len(t.v) == len(t.v1) == len(t.v2) == 1

    def test_hand_example(self):
        t = build_triple([1, 2, 4, 8], 1.0)
        np.testing.assert_array_equal(t.v, [1, 2])
        np.testing.assert_array_equal(t.v1, [1, 2])
        np.testing.assert_array_equal(t.v2, [1, 2])

    def test_constant(self):
        t = build_triple([3.0] * 6)
        np.testing.assert_array_equal(t.v, 3.0)
        np.testing.assert_array_equal(t.v1, 0.0)
        np.testing.assert_array_equal(t.v2, 0.0)

    def test_as_array_columns(self):
        t = build_triple([1, 2, 4, 8, 16])
        np.testing.assert_array_equal(t.as_array()[:, 1], t.v1)

    def test_unequal_channels(self):
        with pytest.raises(InvalidInputError):
            DerivativeTriple(np.ones(3), np.ones(2), np.ones(3))

    def test_too_short(self):
        with pytest.raises(TooShortError):
            build_triple([1.0, 2.0])


class TestPairs:
    def test_window_plus_one(self):
        pairs = build_supervised_pairs(build_triple(np.arange(7.0) ** 2), 4)
        assert len(pairs) == 1

    def test_counting_example(self):
        s = np.arange(12.0) ** 2
        triple = build_triple(s)
        assert len(triple) == 10
        pairs = build_supervised_pairs(triple, 4)
        assert len(pairs) == 6 and pairs.window == 4
        np.testing.assert_array_equal(pairs.targets[-1], triple.as_array()[9])

    def test_window_one(self):
        triple = build_triple(np.arange(5.0) ** 3)
        pairs = build_supervised_pairs(triple, 1)
        np.testing.assert_array_equal(pairs.targets, triple.as_array()[1:3])

    def test_too_short(self):
        with pytest.raises(TooShortError):
            build_supervised_pairs(build_triple(np.arange(6.0)), 4)

    @given(n=st.integers(3, 60), w=st.integers(1, 10))
    def test_index_fuzz(self, n, w):
        s = np.arange(n, dtype=float) * 10.0 + 0.5
        triple = build_triple(s)
        if len(triple) < w + 1:
            with pytest.raises(TooShortError):
                build_supervised_pairs(triple, w)
            return
        pairs = build_supervised_pairs(triple, w)
        assert len(pairs) == len(triple) - w
        # value channel encodes the source index; nothing beyond the triple is read
        idx = (pairs.inputs[..., 0] - 0.5) / 10.0
        assert idx.max() < len(triple)
        for k in range(len(pairs)):
            np.testing.assert_array_equal(idx[k], np.arange(k, k + w))
            assert (pairs.targets[k, 0] - 0.5) / 10.0 == k + w
