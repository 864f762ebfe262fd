import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _oracles import residual_closed_form
from vanya.errors import ShapeError, SingularityError
from vanya.losses import PretrainLoss, ResidualInputs, pretrain_loss, residual_Y, train_loss
from vanya.lv import DEFAULT_PARAMS, LVParams

UNIT = LVParams(1.0, 1.0, 1.0, 1.0)


def random_inputs(rng, n):
    y = rng.uniform(0.1, 5, n) * rng.choice([-1, 1], n)
    return y, rng.normal(0, 2, n), rng.normal(0, 2, n)


class TestPretrainLoss:
    def test_identical(self):
        t = np.random.default_rng(0).normal(size=(5, 3))
        assert pretrain_loss(t, t) == 0.0

    def test_single_channel_example(self):
        assert pretrain_loss([4.0, 1.0, 1.0], [1.0, 1.0, 1.0]) == pytest.approx(math.sqrt(3), rel=1e-15)

    def test_value_channel_only(self):
        assert pretrain_loss([4.0, 9.0, 9.0], [1.0, 1.0, 1.0], pooled=False) == 3.0

    def test_symmetric(self):
        rng = np.random.default_rng(1)
        a, b = rng.normal(size=(2, 6, 3))
        assert pretrain_loss(a, b) == pretrain_loss(b, a)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            pretrain_loss(np.ones((3, 3)), np.ones((2, 3)))
        with pytest.raises(ShapeError):
            pretrain_loss(np.ones((0, 3)), np.ones((0, 3)))

    def test_callable_matches_function(self):
        rng = np.random.default_rng(2)
        a, b = rng.normal(size=(2, 6, 3))
        assert PretrainLoss()(a, b)[0] == pretrain_loss(a, b)
        assert PretrainLoss(pooled=False)(a, b)[0] == pretrain_loss(a, b, pooled=False)


class TestResidual:
    def test_hand_example(self):
        assert residual_Y(1.0, 0.0, 0.0, LVParams(1.0, 0.5, 1.0, 1.0)) == -2.0

    def test_accepts_record(self):
        rec = ResidualInputs(1.0, 0.0, 0.0, LVParams(1.0, 0.5, 1.0, 1.0))
        assert residual_Y(rec) == -2.0

    @given(y=st.floats(0.01, 100), a=st.floats(0.1, 3))
    def test_vanishing_factor(self, y, a):
        params = LVParams(a, 0.4, 0.4, 0.1)
        assert residual_Y(y, a * y, 0.0, params) == pytest.approx(-a * a * y, rel=1e-12)

    def test_beta_example(self):
        out = [residual_Y(1.3, 0.2, -0.7, LVParams(1.1, b, 0.4, 0.1)) for b in (0.5, 7.3)]
        assert out[0] == pytest.approx(out[1], rel=1e-14)

    def test_beta_invariance(self):
        rng = np.random.default_rng(3)
        y, y1, y2 = random_inputs(rng, 1000)
        betas = rng.uniform(0.05, 10, (2, 1000))
        for i in range(1000):
            r1 = residual_Y(y[i], y1[i], y2[i], LVParams(1.1, betas[0, i], 0.4, 0.1))
            r2 = residual_Y(y[i], y1[i], y2[i], LVParams(1.1, betas[1, i], 0.4, 0.1))
            assert abs(r1 - r2) <= 1e-10 * max(abs(r1), 1e-300)

    def test_closed_form(self):
        rng = np.random.default_rng(4)
        y, y1, y2 = random_inputs(rng, 1000)
        params = rng.uniform(0.1, 3, (1000, 4))
        for i in range(1000):
            a, b, g, d = params[i]
            got = residual_Y(y[i], y1[i], y2[i], LVParams(a, b, g, d))
            want = residual_closed_form(y[i], y1[i], y2[i], a, g, d)
            assert abs(got - want) <= 1e-10 * max(abs(want), 1.0)

    def test_vectorised_matches_scalar(self):
        rng = np.random.default_rng(5)
        y, y1, y2 = random_inputs(rng, 20)
        vec = residual_Y(y, y1, y2, DEFAULT_PARAMS)
        for i in range(20):
            assert vec[i] == residual_Y(float(y[i]), float(y1[i]), float(y2[i]), DEFAULT_PARAMS)

    def test_singularity_names_sample(self):
        with pytest.raises(SingularityError) as err:
            residual_Y(np.array([1.0, 0.5, 1e-12]), np.zeros(3), np.zeros(3), DEFAULT_PARAMS)
        assert err.value.index == 2

    def test_nan_is_rejected(self):
        with pytest.raises(SingularityError):
            residual_Y(float("nan"), 0.0, 0.0, DEFAULT_PARAMS)


class TestTrainLoss:
    def test_identical(self):
        t = np.column_stack([np.linspace(0.5, 1.5, 6), np.ones(6), np.zeros(6)])
        assert train_loss(t, t, DEFAULT_PARAMS) == 0.0

    def test_hand_example(self):
        assert train_loss([1.0, 0.0, 0.0], [2.0, 0.0, 0.0], UNIT) == 2.0

    @given(
        p=st.tuples(st.floats(0.5, 2), st.floats(-1, 1), st.floats(-1, 1)),
        r=st.tuples(st.floats(0.5, 2), st.floats(-1, 1), st.floats(-1, 1)),
    )
    def test_single_sample_is_absolute_difference(self, p, r):
        expected = abs(residual_Y(*p, DEFAULT_PARAMS) - residual_Y(*r, DEFAULT_PARAMS))
        got = train_loss(p, r, DEFAULT_PARAMS)
        assert got >= 0
        assert got == pytest.approx(expected, rel=1e-12, abs=1e-15)

    def test_singularity_propagates(self):
        with pytest.raises(SingularityError):
            train_loss([[0.0, 0.0, 0.0]], [[1.0, 0.0, 0.0]], DEFAULT_PARAMS)
