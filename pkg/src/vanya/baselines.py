"""Comparison forecasters: vanilla LSTM, echo-state network, persistence."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .data import AnnualSeries, Normalization, atomic_write
from .errors import ConfigError, FormatVersionError, RegularizationError, TooShortError
from .losses import PretrainLoss
from .neural import init_params
from .training import TrainConfig, TrainedModel, fit_network, real_pairs

__all__ = [
    "train_vanilla_lstm",
    "ESNParams",
    "make_reservoir",
    "spectral_radius",
    "esn_states",
    "ridge_readout",
    "train_esn",
    "esn_rolling_forecast",
    "esn_training_predictions",
    "persistence_forecast",
]

ESN_FORMAT_VERSION = 1


def _values(series) -> np.ndarray:
    if isinstance(series, AnnualSeries):
        return series.values
    return np.asarray(series, dtype=np.float64)


def train_vanilla_lstm(series, config: TrainConfig = TrainConfig()) -> TrainedModel:
    """Same backbone and pairs as VANYA, pooled triple RMSE, no pretraining."""
    norm, _, pairs = real_pairs(series, config.window)
    net = init_params(config.seed, 3, config.hidden, 3)
    net, history = fit_network(net, pairs, PretrainLoss(pooled=config.pooled),
                               config.finetune_epochs, config.lr)
    return TrainedModel(net=net, lv=config.lv, phase="finetuned", loss_history=history,
                        config=config, normalization=norm, kind="vanilla_lstm")


def spectral_radius(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(matrix))))


def make_reservoir(size: int, radius: float, input_scaling: float, seed: int):
    """Dense uniform reservoir rescaled to ``radius``, plus input weights."""
    rng = np.random.default_rng(seed)
    W = rng.uniform(-1.0, 1.0, size=(size, size))
    W *= radius / spectral_radius(W)
    W_in = rng.uniform(-input_scaling, input_scaling, size=size)
    return W, W_in


@dataclass
class ESNParams:
    reservoir_size: int = 50
    spectral_radius: float = 0.9
    input_scaling: float = 0.5
    ridge: float = 1e-6
    seed: int = 0
    warmup: int = 2
    reservoir: np.ndarray | None = None
    input_weights: np.ndarray | None = None
    readout: np.ndarray | None = None
    normalization: Normalization | None = None

    def __post_init__(self):
        if self.reservoir_size < 1 or self.warmup < 0:
            raise ConfigError("reservoir_size must be >= 1 and warmup >= 0")
        if not 0 < self.spectral_radius < 1:
            raise ConfigError(f"spectral radius must lie in (0, 1), got {self.spectral_radius}")
        if self.ridge < 0 or self.input_scaling <= 0:
            raise ConfigError("ridge must be >= 0 and input_scaling > 0")
        if self.reservoir is None:
            self.reservoir, self.input_weights = make_reservoir(
                self.reservoir_size, self.spectral_radius, self.input_scaling, self.seed
            )

    def config_dict(self) -> dict:
        return {
            "reservoir_size": self.reservoir_size,
            "spectral_radius": self.spectral_radius,
            "input_scaling": self.input_scaling,
            "ridge": self.ridge,
            "seed": self.seed,
            "warmup": self.warmup,
        }

    def to_dict(self) -> dict:
        return {
            "format_version": ESN_FORMAT_VERSION,
            "model_kind": "esn",
            "tool_version": __version__,
            "config": self.config_dict(),
            "reservoir": self.reservoir.ravel().tolist(),
            "input_weights": self.input_weights.tolist(),
            "readout": None if self.readout is None else self.readout.tolist(),
            "normalization": None if self.normalization is None else self.normalization.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> ESNParams:
        if d.get("format_version") != ESN_FORMAT_VERSION or d.get("model_kind") != "esn":
            raise FormatVersionError("not a supported ESN model file")
        cfg = d["config"]
        r = cfg["reservoir_size"]
        return cls(
            **cfg,
            reservoir=np.asarray(d["reservoir"], dtype=np.float64).reshape(r, r),
            input_weights=np.asarray(d["input_weights"], dtype=np.float64),
            readout=None if d["readout"] is None else np.asarray(d["readout"], dtype=np.float64),
            normalization=None if d["normalization"] is None
            else Normalization.from_dict(d["normalization"]),
        )

    def save(self, path):
        atomic_write(path, json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n")


def esn_states(params: ESNParams, inputs: np.ndarray) -> np.ndarray:
    """Reservoir state after reading each input, from a zero initial state."""
    states = np.zeros((len(inputs), params.reservoir_size))
    r = np.zeros(params.reservoir_size)
    for t, u in enumerate(inputs):
        r = np.tanh(params.reservoir @ r + params.input_weights * u)
        states[t] = r
    return states


def _design(states: np.ndarray) -> np.ndarray:
    return np.hstack([states, np.ones((len(states), 1))])


def ridge_readout(states: np.ndarray, targets: np.ndarray, ridge: float) -> np.ndarray:
    """Closed-form ridge weights for ``[states, 1] @ w ~ targets``.

    The last weight is the bias and is not penalized, so a constant target
    is reproduced exactly for any ridge strength.
    """
    X = _design(np.asarray(states, dtype=np.float64))
    y = np.asarray(targets, dtype=np.float64)
    if ridge == 0 and np.linalg.matrix_rank(X) < X.shape[1]:
        raise RegularizationError(
            "normal matrix is singular at ridge = 0; use a positive ridge coefficient"
        )
    penalty = np.full(X.shape[1], float(ridge))
    penalty[-1] = 0.0
    try:
        return np.linalg.solve(X.T @ X + np.diag(penalty), X.T @ y)
    except np.linalg.LinAlgError:
        raise RegularizationError("normal matrix is singular; increase the ridge coefficient") from None


def train_esn(series, params: ESNParams | None = None) -> ESNParams:
    """Drive the reservoir with the normalized series and fit the readout.

    The state after reading ``u[t]`` is mapped to ``u[t+1]``; the first
    ``warmup`` states are discarded.
    """
    params = params if params is not None else ESNParams()
    values = _values(series)
    if len(values) < max(5, params.warmup + 2):
        raise TooShortError(f"ESN needs at least {max(5, params.warmup + 2)} points, got {len(values)}")
    norm = Normalization.fit(values)
    u = norm.apply(values)
    states = esn_states(params, u)[params.warmup:-1]
    readout = ridge_readout(states, u[params.warmup + 1:], params.ridge)
    return replace(params, readout=readout, normalization=norm)


def _require_trained(params: ESNParams):
    if params.readout is None or params.normalization is None:
        raise FormatVersionError("ESN readout has not been trained")


def esn_training_predictions(params: ESNParams, series) -> tuple[np.ndarray, np.ndarray]:
    """(predictions, targets) over the training indices, normalized units."""
    _require_trained(params)
    u = params.normalization.apply(_values(series))
    X = _design(esn_states(params, u)[params.warmup:-1])
    return X @ params.readout, u[params.warmup + 1:]


def esn_rolling_forecast(params: ESNParams, full_series, test_start: int) -> np.ndarray:
    """Teacher-forced one-step forecasts for indices ``test_start`` onwards."""
    _require_trained(params)
    values = _values(full_series)
    if not 1 <= test_start <= len(values):
        raise TooShortError(f"test_start {test_start} out of range")
    u = params.normalization.apply(values[:-1])
    states = esn_states(params, u)[test_start - 1:]
    return params.normalization.invert(_design(states) @ params.readout)


def persistence_forecast(series, test_start: int) -> np.ndarray:
    """Each value predicted as its predecessor."""
    values = _values(series)
    if not 1 <= test_start <= len(values):
        raise TooShortError(f"test_start must be in [1, {len(values)}], got {test_start}")
    return values[test_start - 1:-1].copy()
