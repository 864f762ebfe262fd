"""Single-layer LSTM with a dense head, backpropagation through time and Adam.

Gate weights are stored stacked in the order (input, forget, output,
candidate): ``Wx`` is (4H, D), ``Wh`` is (4H, H) and ``b`` is (4H,). The head
maps the last hidden state to ``O`` outputs. Everything is float64.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import ConfigError, FormatVersionError, NumericalError, ShapeError

__all__ = [
    "GATES",
    "FORMAT_VERSION",
    "LSTMParams",
    "DenseParams",
    "NetworkParams",
    "OptimizerState",
    "init_params",
    "lstm_forward",
    "forward",
    "forward_batch",
    "gradient",
    "adam_state",
    "optimizer_step",
]

GATES = ("input", "forget", "output", "candidate")
FORMAT_VERSION = 1

LossFn = Callable[[np.ndarray, np.ndarray], "tuple[float, np.ndarray]"]


@dataclass(frozen=True)
class LSTMParams:
    Wx: np.ndarray
    Wh: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        four_h, d = self.Wx.shape
        if four_h % 4 or self.Wh.shape != (four_h, four_h // 4) or self.b.shape != (four_h,):
            raise ShapeError(
                f"inconsistent LSTM shapes Wx={self.Wx.shape} Wh={self.Wh.shape} b={self.b.shape}"
            )

    @property
    def hidden_size(self) -> int:
        return self.Wh.shape[1]

    @property
    def input_size(self) -> int:
        return self.Wx.shape[1]

    def gate(self, name: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(input weights, recurrent weights, bias) views for one gate."""
        k = GATES.index(name)
        h = self.hidden_size
        s = slice(k * h, (k + 1) * h)
        return self.Wx[s], self.Wh[s], self.b[s]


@dataclass(frozen=True)
class DenseParams:
    W: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        if self.W.ndim != 2 or self.b.shape != (self.W.shape[0],):
            raise ShapeError(f"inconsistent dense shapes W={self.W.shape} b={self.b.shape}")


@dataclass(frozen=True)
class NetworkParams:
    lstm: LSTMParams
    head: DenseParams
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.head.W.shape[1] != self.lstm.hidden_size:
            raise ShapeError(
                f"head expects {self.head.W.shape[1]} inputs, LSTM has {self.lstm.hidden_size}"
            )

    @property
    def sizes(self) -> tuple[int, int, int]:
        """(D, H, O)."""
        return self.lstm.input_size, self.lstm.hidden_size, self.head.W.shape[0]

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            "lstm.Wx": self.lstm.Wx,
            "lstm.Wh": self.lstm.Wh,
            "lstm.b": self.lstm.b,
            "head.W": self.head.W,
            "head.b": self.head.b,
        }

    @classmethod
    def from_arrays(cls, arrays: dict[str, np.ndarray], format_version: int = FORMAT_VERSION):
        return cls(
            LSTMParams(arrays["lstm.Wx"], arrays["lstm.Wh"], arrays["lstm.b"]),
            DenseParams(arrays["head.W"], arrays["head.b"]),
            format_version,
        )

    def map(self, fn, *others: NetworkParams) -> NetworkParams:
        """Apply ``fn`` array-wise across this and ``others`` (same shapes)."""
        mine = self.arrays()
        theirs = [o.arrays() for o in others]
        for o in theirs:
            for k, a in mine.items():
                if o[k].shape != a.shape:
                    raise ShapeError(f"{k}: shape {o[k].shape} != {a.shape}")
        return NetworkParams.from_arrays(
            {k: fn(a, *(o[k] for o in theirs)) for k, a in mine.items()}, self.format_version
        )

    def copy(self) -> NetworkParams:
        return self.map(np.copy)

    def flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays().values()])

    def equals(self, other: NetworkParams) -> bool:
        """Bitwise equality of every array."""
        a, b = self.arrays(), other.arrays()
        return all(
            a[k].shape == b[k].shape and a[k].tobytes() == b[k].tobytes() for k in a
        )

    def to_dict(self) -> dict:
        d, h, o = self.sizes
        return {
            "format_version": self.format_version,
            "D": d,
            "H": h,
            "O": o,
            "gate_order": list(GATES),
            "arrays": {k: {"shape": list(a.shape), "data": a.ravel().tolist()}
                       for k, a in self.arrays().items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> NetworkParams:
        version = d.get("format_version")
        if version != FORMAT_VERSION:
            raise FormatVersionError(f"unsupported network format_version {version!r}")
        arrays = {
            k: np.asarray(v["data"], dtype=np.float64).reshape(v["shape"])
            for k, v in d["arrays"].items()
        }
        net = cls.from_arrays(arrays, version)
        if net.sizes != (d["D"], d["H"], d["O"]):
            raise ShapeError(f"declared sizes {(d['D'], d['H'], d['O'])} != arrays {net.sizes}")
        return net


def init_params(seed: int, D: int, H: int, O: int) -> NetworkParams:
    """Uniform(-1/sqrt(H), 1/sqrt(H)) weights, forget bias 1, other biases 0."""
    if min(D, H, O) < 1:
        raise ConfigError(f"sizes must be >= 1, got D={D} H={H} O={O}")
    rng = np.random.default_rng(seed)
    bound = 1.0 / np.sqrt(H)
    Wx = rng.uniform(-bound, bound, size=(4 * H, D))
    Wh = rng.uniform(-bound, bound, size=(4 * H, H))
    Wy = rng.uniform(-bound, bound, size=(O, H))
    b = np.zeros(4 * H)
    b[H:2 * H] = 1.0
    return NetworkParams(LSTMParams(Wx, Wh, b), DenseParams(Wy, np.zeros(O)))


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _run_lstm(lstm: LSTMParams, x: np.ndarray):
    """Forward pass over x of shape (B, T, D), keeping everything BPTT needs."""
    B, T, D = x.shape
    if D != lstm.input_size:
        raise ShapeError(f"input size {D} != LSTM input size {lstm.input_size}")
    H = lstm.hidden_size
    hs = np.zeros((T + 1, B, H))
    cs = np.zeros((T + 1, B, H))
    gates = np.empty((T, B, 4 * H))
    for t in range(T):
        z = x[:, t] @ lstm.Wx.T + hs[t] @ lstm.Wh.T + lstm.b
        a = np.empty_like(z)
        a[:, :3 * H] = _sigmoid(z[:, :3 * H])
        a[:, 3 * H:] = np.tanh(z[:, 3 * H:])
        i, f, o, g = a[:, :H], a[:, H:2 * H], a[:, 2 * H:3 * H], a[:, 3 * H:]
        cs[t + 1] = f * cs[t] + i * g
        hs[t + 1] = o * np.tanh(cs[t + 1])
        gates[t] = a
    return hs, cs, gates


def lstm_forward(lstm: LSTMParams, inputs) -> tuple[np.ndarray, np.ndarray]:
    """Run the recurrence from zero hidden and cell states.

    Parameters
    ----------
    lstm : LSTMParams
    inputs : array_like of shape (T, D) or (B, T, D)

    Returns
    -------
    hidden : ndarray of shape (T, H) or (B, T, H)
    cell : ndarray of shape (H,) or (B, H), the final cell state
    """
    x = np.asarray(inputs, dtype=np.float64)
    single = x.ndim == 2 or (x.ndim == 1 and x.size == 0)
    if x.ndim == 1 and x.size == 0:
        x = x.reshape(0, lstm.input_size)
    if single:
        x = x[None]
    if x.ndim != 3:
        raise ShapeError(f"inputs must be (T, D) or (B, T, D), got shape {x.shape}")
    hs, cs, _ = _run_lstm(lstm, x)
    hidden = np.moveaxis(hs[1:], 0, 1)
    cell = cs[-1]
    if single:
        return hidden[0], cell[0]
    return hidden, cell


def forward_batch(net: NetworkParams, inputs) -> np.ndarray:
    """Predictions of shape (B, O) for windows of shape (B, W, D)."""
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 3 or x.shape[1] == 0:
        raise ShapeError(f"windows must be non-empty (B, W, D), got shape {x.shape}")
    hs, _, _ = _run_lstm(net.lstm, x)
    return hs[-1] @ net.head.W.T + net.head.b


def forward(net: NetworkParams, window) -> np.ndarray:
    """Predicted next triple for one window of shape (W, D)."""
    x = np.asarray(window, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError(f"window must be (W, D), got shape {x.shape}")
    return forward_batch(net, x[None])[0]


def _locate_bad_sample(pred, targets, loss):
    for k in range(len(pred)):
        if not np.all(np.isfinite(pred[k])):
            return k
        v, _ = loss(pred[k:k + 1], targets[k:k + 1])
        if not np.isfinite(v):
            return k
    return None


def gradient(net: NetworkParams, batch, loss: LossFn) -> tuple[float, NetworkParams]:
    """Loss value and its exact gradient with respect to every parameter.

    ``loss`` maps (predictions (B, O), targets (B, O)) to the scalar loss and
    its derivative with respect to the predictions.
    """
    x = np.asarray(batch.inputs, dtype=np.float64)
    targets = np.asarray(batch.targets, dtype=np.float64)
    if len(targets) == 0:
        raise ShapeError("empty batch")
    lstm, head = net.lstm, net.head
    H = lstm.hidden_size
    hs, cs, gates = _run_lstm(lstm, x)
    pred = hs[-1] @ head.W.T + head.b
    value, dpred = loss(pred, targets)
    if not np.isfinite(value) or not np.all(np.isfinite(dpred)):
        raise NumericalError("non-finite loss", _locate_bad_sample(pred, targets, loss))

    dWy = dpred.T @ hs[-1]
    dby = dpred.sum(axis=0)
    dWx = np.zeros_like(lstm.Wx)
    dWh = np.zeros_like(lstm.Wh)
    db = np.zeros_like(lstm.b)
    dh = dpred @ head.W
    dc = np.zeros_like(dh)
    dz = np.empty((len(targets), 4 * H))
    for t in range(x.shape[1] - 1, -1, -1):
        a = gates[t]
        i, f, o, g = a[:, :H], a[:, H:2 * H], a[:, 2 * H:3 * H], a[:, 3 * H:]
        tc = np.tanh(cs[t + 1])
        dc = dc + dh * o * (1.0 - tc * tc)
        dz[:, :H] = dc * g * i * (1.0 - i)
        dz[:, H:2 * H] = dc * cs[t] * f * (1.0 - f)
        dz[:, 2 * H:3 * H] = dh * tc * o * (1.0 - o)
        dz[:, 3 * H:] = dc * i * (1.0 - g * g)
        dWx += dz.T @ x[:, t]
        dWh += dz.T @ hs[t]
        db += dz.sum(axis=0)
        dh = dz @ lstm.Wh
        dc = dc * f
    grads = NetworkParams(LSTMParams(dWx, dWh, db), DenseParams(dWy, dby), net.format_version)
    return float(value), grads


@dataclass(frozen=True)
class OptimizerState:
    m: NetworkParams
    v: NetworkParams
    step: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def adam_state(net: NetworkParams, lr: float = 1e-3, beta1: float = 0.9,
               beta2: float = 0.999, eps: float = 1e-8) -> OptimizerState:
    zeros = net.map(np.zeros_like)
    return OptimizerState(m=zeros, v=zeros.copy(), lr=lr, beta1=beta1, beta2=beta2, eps=eps)


def optimizer_step(net: NetworkParams, grads: NetworkParams,
                   state: OptimizerState) -> tuple[NetworkParams, OptimizerState]:
    """One bias-corrected Adam update; returns new parameters and state."""
    b1, b2 = state.beta1, state.beta2
    step = state.step + 1
    m = state.m.map(lambda m, g: b1 * m + (1.0 - b1) * g, grads)
    v = state.v.map(lambda v, g: b2 * v + (1.0 - b2) * g * g, grads)
    c1 = 1.0 - b1 ** step
    c2 = 1.0 - b2 ** step
    lr, eps = state.lr, state.eps
    new = net.map(lambda p, m_, v_: p - lr * (m_ / c1) / (np.sqrt(v_ / c2) + eps), m, v)
    return new, replace(state, m=m, v=v, step=step)
