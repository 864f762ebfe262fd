"""Forward-difference derivative channels and one-step-ahead supervised pairs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, TooShortError

__all__ = [
    "DerivativeTriple",
    "SupervisedSet",
    "first_difference",
    "second_difference",
    "build_triple",
    "build_supervised_pairs",
]


def _as_series(series) -> np.ndarray:
    s = np.asarray(series, dtype=np.float64)
    if s.ndim != 1:
        raise InvalidInputError("series must be one-dimensional")
    return s


def _check_dt(dt):
    if not dt > 0:
        raise InvalidInputError(f"dt must be positive, got {dt!r}")


def first_difference(series, dt: float = 1.0) -> np.ndarray:
    """(s[i+1] - s[i]) / dt, length n - 1."""
    s = _as_series(series)
    _check_dt(dt)
    if len(s) < 2:
        raise TooShortError(f"first difference needs at least 2 points, got {len(s)}")
    return (s[1:] - s[:-1]) / dt


def second_difference(series, dt: float = 1.0) -> np.ndarray:
    """Forward difference applied twice, length n - 2."""
    s = _as_series(series)
    if len(s) < 3:
        raise TooShortError(f"second difference needs at least 3 points, got {len(s)}")
    return first_difference(first_difference(s, dt), dt)


@dataclass(frozen=True)
class DerivativeTriple:
    """Value, first and second forward differences sharing one index.

    Index ``i`` of every channel is anchored at ``t0 + i*dt``.
    """

    v: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    dt: float = 1.0

    def __post_init__(self):
        if not (len(self.v) == len(self.v1) == len(self.v2)):
            raise InvalidInputError("channels must have equal length")
        _check_dt(self.dt)

    def __len__(self):
        return len(self.v)

    def as_array(self) -> np.ndarray:
        """Stacked (n, 3) array with columns v, v1, v2."""
        return np.stack([self.v, self.v1, self.v2], axis=1)


def build_triple(series, dt: float = 1.0) -> DerivativeTriple:
    s = _as_series(series)
    if len(s) < 3:
        raise TooShortError(f"derivative triple needs at least 3 points, got {len(s)}")
    d1 = first_difference(s, dt)
    d2 = first_difference(d1, dt)
    n = len(s) - 2
    return DerivativeTriple(v=s[:n].copy(), v1=d1[:n], v2=d2, dt=float(dt))


@dataclass(frozen=True)
class SupervisedSet:
    """Windows of ``W`` consecutive triples and the triple that follows each.

    ``inputs`` has shape (N, W, 3), ``targets`` (N, 3).
    """

    inputs: np.ndarray
    targets: np.ndarray

    def __len__(self):
        return len(self.targets)

    @property
    def window(self) -> int:
        return self.inputs.shape[1]


def build_supervised_pairs(triple: DerivativeTriple, window: int) -> SupervisedSet:
    if window < 1:
        raise InvalidInputError("window must be at least 1")
    n = len(triple)
    if n < window + 1:
        raise TooShortError(f"need at least {window + 1} triples for window {window}, got {n}")
    arr = triple.as_array()
    idx = np.arange(n - window)[:, None] + np.arange(window)[None, :]
    return SupervisedSet(inputs=arr[idx], targets=arr[window:].copy())
