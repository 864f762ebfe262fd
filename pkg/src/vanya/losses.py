"""Physics-informed objectives.

``pretrain_loss`` is the RMSE between forecast and real derivative triples.
``train_loss`` compares the predator-equation residual of the forecast
triples with that of the real ones, where for a value y with first and
second derivatives y1, y2

    residual = y2 - a^2 y + (a y - y1) * (2a - d - g + (b y1 - a b y) / (b y))

with (a, b, g, d) = (alpha, beta, gamma, delta). The expression is evaluated
exactly as written; note that b cancels from the fraction.

Both losses come in two flavours: plain functions returning the scalar,
and loss objects usable with :func:`vanya.neural.gradient`, which also
return the derivative with respect to the predictions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, SingularityError
from .lv import LVParams

EPS_Y = 1e-8

__all__ = [
    "EPS_Y",
    "ResidualInputs",
    "pretrain_loss",
    "residual_Y",
    "residual_Y_grad",
    "train_loss",
    "PretrainLoss",
    "ResidualLoss",
]


@dataclass(frozen=True)
class ResidualInputs:
    y: float
    y1: float
    y2: float
    params: LVParams


def _pair(pred, real):
    p = np.asarray(pred, dtype=np.float64)
    r = np.asarray(real, dtype=np.float64)
    if p.ndim == 1:
        p = p[None]
    if r.ndim == 1:
        r = r[None]
    if p.shape != r.shape:
        raise ShapeError(f"prediction shape {p.shape} != target shape {r.shape}")
    if p.shape[0] == 0:
        raise ShapeError("loss needs at least one sample")
    return p, r


def pretrain_loss(pred, real, pooled: bool = True) -> float:
    """RMSE over all three channels (``pooled``) or the value channel only."""
    p, r = _pair(pred, real)
    diff = p - r if pooled else p[:, :1] - r[:, :1]
    return float(np.sqrt(np.mean(diff * diff)))


def _check_floor(y, eps_y):
    bad = np.flatnonzero(~(np.abs(y) >= eps_y))
    if bad.size:
        k = int(bad[0])
        raise SingularityError(f"|y| = {abs(float(y[k])):.3g} below floor {eps_y:g}", k)


def residual_Y(y, y1=None, y2=None, params: LVParams | None = None, eps_y: float = EPS_Y):
    """Residual for scalars or arrays; also accepts a single :class:`ResidualInputs`."""
    if isinstance(y, ResidualInputs):
        y, y1, y2, params = y.y, y.y1, y.y2, y.params
    scalar = np.ndim(y) == 0
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    y1 = np.atleast_1d(np.asarray(y1, dtype=np.float64))
    y2 = np.atleast_1d(np.asarray(y2, dtype=np.float64))
    _check_floor(y, eps_y)
    a, b, g, d = params.alpha, params.beta, params.gamma, params.delta
    out = y2 - a * a * y + (a * y - y1) * (2 * a - d - g + (b * y1 - a * b * y) / (b * y))
    return float(out[0]) if scalar else out


def residual_Y_grad(y, y1, y2, params: LVParams):
    """Partial derivatives of the residual with respect to (y, y1, y2)."""
    a, g, d = params.alpha, params.gamma, params.delta
    u = a * y - y1
    k = 2 * a - d - g + y1 / y - a
    dy = -a * a + a * k - u * y1 / (y * y)
    dy1 = -k + u / y
    return dy, dy1, np.ones_like(y2)


def _residuals(triples, params, eps_y):
    t = np.asarray(triples, dtype=np.float64)
    return residual_Y(t[:, 0], t[:, 1], t[:, 2], params, eps_y)


def train_loss(pred, real, params: LVParams, eps_y: float = EPS_Y) -> float:
    """RMSE between residuals of predicted and real triples."""
    p, r = _pair(pred, real)
    diff = _residuals(p, params, eps_y) - _residuals(r, params, eps_y)
    return float(np.sqrt(np.mean(diff * diff)))


def _rmse_grad(diff):
    """RMSE of ``diff`` and its derivative; zero gradient at a zero root."""
    n = diff.size
    value = float(np.sqrt(np.sum(diff * diff) / n))
    if value == 0.0:
        return value, np.zeros_like(diff)
    with np.errstate(invalid="ignore"):
        return value, diff / (n * value)


@dataclass(frozen=True)
class PretrainLoss:
    """Triple RMSE. ``root=False`` gives the raw sum of squared residuals."""

    pooled: bool = True
    root: bool = True

    def __call__(self, pred, real):
        p, r = _pair(pred, real)
        mask = np.ones(p.shape[1]) if self.pooled else np.eye(p.shape[1])[0]
        diff = (p - r) * mask
        if not self.root:
            return float(np.sum(diff * diff)), 2.0 * diff
        if self.pooled:
            return _rmse_grad(diff)
        value, g = _rmse_grad(diff[:, :1])
        out = np.zeros_like(diff)
        out[:, :1] = g
        return value, out


@dataclass(frozen=True)
class ResidualLoss:
    """Residual-matching RMSE between predicted and real triples."""

    params: LVParams
    eps_y: float = EPS_Y

    def __call__(self, pred, real):
        p, r = _pair(pred, real)
        yp = _residuals(p, self.params, self.eps_y)
        yr = _residuals(r, self.params, self.eps_y)
        value, dres = _rmse_grad(yp - yr)
        dy, dy1, dy2 = residual_Y_grad(p[:, 0], p[:, 1], p[:, 2], self.params)
        return value, np.stack([dres * dy, dres * dy1, dres * dy2], axis=1)
