"""Two-phase pipeline: pretrain on simulated LV triples, transfer, fine-tune.

Forecasts are single-step-ahead. With forward stencils, the triple that
follows the last complete window is anchored two points before the first
unseen value ``s[n]``: its value ``s[n-2]`` and slope ``s[n-1] - s[n-2]`` are
already observed and only its curvature involves ``s[n]``. A forecast
therefore keeps the observed channels and takes the curvature from the model:

* a triple-trained network (pretrained or vanilla) supplies its predicted
  curvature directly;
* a residual-trained network supplies its predicted residual, which is
  solved for the curvature given the observed value and slope.

In both cases ``s[n] = 2 s[n-1] - s[n-2] + curvature`` (unit step).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

import numpy as np

from . import __version__
from .data import AnnualSeries, Normalization, atomic_write
from .differentials import (
    DerivativeTriple,
    SupervisedSet,
    build_supervised_pairs,
    build_triple,
)
from .errors import (
    ConfigError,
    FormatVersionError,
    NumericalError,
    SingularityError,
    TooShortError,
    WrongPhaseError,
)
from .losses import EPS_Y, PretrainLoss, ResidualLoss, residual_Y
from .lv import DEFAULT_INITIAL, DEFAULT_PARAMS, LVParams, LVState, integrate_rk4
from .neural import NetworkParams, adam_state, forward_batch, gradient, init_params, optimizer_step

__all__ = [
    "TrainConfig",
    "TrainedModel",
    "FinetuneState",
    "MODEL_FORMAT_VERSION",
    "pretrain_pairs",
    "pretrain",
    "transfer",
    "finetune",
    "fit_vanya",
    "forecast_one_step",
    "rolling_forecast",
    "predicted_curvature",
    "real_pairs",
    "fit_network",
]

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    lv: LVParams = DEFAULT_PARAMS
    initial: LVState = DEFAULT_INITIAL
    dt: float = 0.01
    steps: int = 30000
    sample_every: int = 100
    normalize_pretrain: bool = True
    window: int = 4
    hidden: int = 32
    pretrain_epochs: int = 200
    finetune_epochs: int = 500
    lr: float = 1e-3
    seed: int = 0
    eps_y: float = EPS_Y
    pooled: bool = True

    def __post_init__(self):
        if self.window < 1:
            raise ConfigError("window must be >= 1")
        for name in ("hidden", "steps", "sample_every"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        for name in ("pretrain_epochs", "finetune_epochs"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if not (self.dt > 0 and self.lr > 0 and self.eps_y > 0):
            raise ConfigError("dt, lr and eps_y must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lv"] = self.lv.to_dict()
        d["initial"] = {"x": self.initial.x, "y": self.initial.y}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> TrainConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown training config keys: {sorted(unknown)}")
        kw = dict(d)
        if "lv" in kw:
            kw["lv"] = LVParams.from_dict({**DEFAULT_PARAMS.to_dict(), **kw["lv"]})
        if "initial" in kw:
            kw["initial"] = LVState(float(kw["initial"]["x"]), float(kw["initial"]["y"]))
        return cls(**kw)


@dataclass
class TrainedModel:
    net: NetworkParams
    lv: LVParams
    phase: str
    loss_history: list[float]
    config: TrainConfig
    normalization: Optional[Normalization] = None
    kind: str = "vanya"

    def to_dict(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "model_kind": self.kind,
            "tool_version": __version__,
            "phase": self.phase,
            "network": self.net.to_dict(),
            "normalization": self.normalization.to_dict() if self.normalization else None,
            "lv": self.lv.to_dict(),
            "loss_history": list(self.loss_history),
            "config": self.config.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> TrainedModel:
        if d.get("format_version") != MODEL_FORMAT_VERSION:
            raise FormatVersionError(f"unsupported model format_version {d.get('format_version')!r}")
        if d.get("model_kind") not in ("vanya", "vanilla_lstm"):
            raise FormatVersionError(f"not an LSTM model file (kind {d.get('model_kind')!r})")
        norm = d.get("normalization")
        return cls(
            net=NetworkParams.from_dict(d["network"]),
            lv=LVParams.from_dict(d["lv"]),
            phase=d["phase"],
            loss_history=[float(v) for v in d["loss_history"]],
            config=TrainConfig.from_dict(d["config"]),
            normalization=Normalization.from_dict(norm) if norm else None,
            kind=d["model_kind"],
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    def save(self, path):
        atomic_write(path, self.dumps())

    @classmethod
    def load(cls, path) -> TrainedModel:
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


def fit_network(net: NetworkParams, pairs: SupervisedSet, loss, epochs: int, lr: float):
    """Full-batch Adam. Returns the final parameters and the loss history.

    The history starts with the loss of the initial parameters and then
    records the loss after every epoch, so it has ``epochs + 1`` entries.
    """
    state = adam_state(net, lr=lr)
    history = []
    for _ in range(epochs):
        value, grads = gradient(net, pairs, loss)
        history.append(value)
        net, state = optimizer_step(net, grads, state)
    value, _ = gradient(net, pairs, loss)
    history.append(value)
    if not np.all(np.isfinite(history)):
        raise NumericalError(f"non-finite loss at epoch {int(np.argmin(np.isfinite(history)))}")
    return net, history


def pretrain_pairs(config: TrainConfig) -> SupervisedSet:
    """Supervised one-step pairs built from the simulated prey channel."""
    traj = integrate_rk4(config.lv, config.initial, config.dt, config.steps)
    x = traj.x[:: config.sample_every]
    if config.normalize_pretrain:
        x = Normalization.fit(x).apply(x)
    triple = build_triple(x, config.dt * config.sample_every)
    return build_supervised_pairs(triple, config.window)


def pretrain(config: TrainConfig = TrainConfig()) -> TrainedModel:
    pairs = pretrain_pairs(config)
    net = init_params(config.seed, 3, config.hidden, 3)
    net, history = fit_network(net, pairs, PretrainLoss(pooled=config.pooled),
                               config.pretrain_epochs, config.lr)
    return TrainedModel(net=net, lv=config.lv, phase="pretrained",
                        loss_history=history, config=config)


@dataclass
class FinetuneState:
    net: NetworkParams
    normalization: Normalization
    triple: DerivativeTriple
    pairs: SupervisedSet
    lv: LVParams
    pretrain_history: list[float] = field(default_factory=list)


def _series_values(series) -> np.ndarray:
    if isinstance(series, AnnualSeries):
        return series.values
    return np.asarray(series, dtype=np.float64)


def real_pairs(values, window: int):
    """Normalization, triple and pairs for a real (training) series."""
    values = _series_values(values)
    if len(values) < window + 3:
        raise TooShortError(f"series needs at least {window + 3} points, got {len(values)}")
    norm = Normalization.fit(values)
    triple = build_triple(norm.apply(values), 1.0)
    return norm, triple, build_supervised_pairs(triple, window)


def transfer(pretrained: TrainedModel, series, config: TrainConfig | None = None) -> FinetuneState:
    if pretrained.phase != "pretrained":
        raise WrongPhaseError(f"transfer needs a pretrained model, got phase {pretrained.phase!r}")
    config = config or pretrained.config
    norm, triple, pairs = real_pairs(series, config.window)
    return FinetuneState(
        net=pretrained.net.copy(),
        normalization=norm,
        triple=triple,
        pairs=pairs,
        lv=pretrained.lv,
        pretrain_history=list(pretrained.loss_history),
    )


def finetune(state: FinetuneState, config: TrainConfig) -> TrainedModel:
    low = float(np.min(np.abs(state.triple.v)))
    if low < config.eps_y:
        raise SingularityError(f"normalized value {low:g} below floor", int(np.argmin(np.abs(state.triple.v))))
    loss = ResidualLoss(state.lv, config.eps_y)
    net, history = fit_network(state.net, state.pairs, loss, config.finetune_epochs, config.lr)
    return TrainedModel(net=net, lv=state.lv, phase="finetuned", loss_history=history,
                        config=config, normalization=state.normalization, kind="vanya")


def fit_vanya(series, config: TrainConfig = TrainConfig(), pretrained: TrainedModel | None = None):
    """Pretrain (unless ``pretrained`` is given), transfer and fine-tune."""
    if pretrained is None:
        pretrained = pretrain(config)
    return finetune(transfer(pretrained, series, config), config)


def _forecast_windows(z: np.ndarray, ends, window: int) -> np.ndarray:
    """Triple windows whose histories are ``z[:end]`` for each end."""
    out = []
    for end in ends:
        if end < window + 2:
            raise TooShortError(f"forecast needs {window + 2} observed points, got {end}")
        out.append(build_triple(z[end - window - 2:end], 1.0).as_array())
    return np.stack(out)


def _require_finetuned(model: TrainedModel):
    if model.phase != "finetuned" or model.normalization is None:
        raise WrongPhaseError("forecasting needs a fine-tuned model with a normalization record")


def predicted_curvature(model: TrainedModel, pred: np.ndarray, y: np.ndarray, y1: np.ndarray):
    """Second difference implied by network outputs ``pred`` (B, 3).

    ``y`` and ``y1`` are the observed value and slope of the predicted
    triple's anchor, in normalized units.
    """
    if model.kind == "vanya":
        res = residual_Y(pred[:, 0], pred[:, 1], pred[:, 2], model.lv, model.config.eps_y)
        rest = residual_Y(y, y1, np.zeros_like(y), model.lv, model.config.eps_y)
        return res - rest
    return pred[:, 2]


def forecast_one_step(model: TrainedModel, series) -> float:
    """Next value (original units) after the last observation of ``series``."""
    values = _series_values(series)
    return float(rolling_forecast(model, np.append(values, np.nan), len(values))[0])


def rolling_forecast(model: TrainedModel, full_series, test_start: int) -> np.ndarray:
    """Teacher-forced one-step forecasts for every index from ``test_start`` on.

    The forecast for index ``t`` only reads ``full_series[:t]``.
    """
    _require_finetuned(model)
    values = _series_values(full_series)
    w = model.config.window
    if test_start < w + 2:
        raise TooShortError(f"test_start must leave {w + 2} points before it, got {test_start}")
    ends = np.arange(test_start, len(values))
    if len(ends) == 0:
        return np.empty(0)
    norm = model.normalization
    z = norm.apply(values)
    pred = forward_batch(model.net, _forecast_windows(z, ends, w))
    prev, prev2 = z[ends - 1], z[ends - 2]
    curv = predicted_curvature(model, pred, prev2, prev - prev2)
    return norm.invert(2.0 * prev - prev2 + curv)
