"""Annual series: CSV IO, min-max normalization and the synthetic generator."""

from __future__ import annotations

import csv
import hashlib
import io
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, ParseError, ValidationError
from .lv import DEFAULT_INITIAL, DEFAULT_PARAMS, LVParams, LVState, Trajectory, integrate_rk4

__all__ = [
    "AnnualSeries",
    "Normalization",
    "normalize",
    "load_csv",
    "write_csv",
    "series_to_csv",
    "write_trajectory_csv",
    "generate_synthetic",
    "atomic_write",
    "NORM_LOW",
    "NORM_HIGH",
]

NORM_LOW = 0.5
NORM_HIGH = 1.5


@dataclass(frozen=True)
class AnnualSeries:
    years: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        years = np.asarray(self.years)
        values = np.asarray(self.values, dtype=np.float64)
        if years.ndim != 1 or values.ndim != 1 or len(years) != len(values):
            raise InvalidInputError("years and values must be 1-D and of equal length")
        if len(years) and not np.all(np.diff(years) == 1):
            raise InvalidInputError("consecutive years must differ by exactly 1")
        if not np.all(np.isfinite(values)) or not np.all(values > 0):
            raise InvalidInputError("values must be finite and positive")
        object.__setattr__(self, "years", years.astype(np.int64))
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)

    def head(self, n: int) -> AnnualSeries:
        return AnnualSeries(self.years[:n], self.values[:n])

    @classmethod
    def from_values(cls, values, start_year: int = 1986) -> AnnualSeries:
        values = np.asarray(values, dtype=np.float64)
        return cls(start_year + np.arange(len(values)), values)

    def fingerprint(self) -> dict:
        digest = hashlib.sha256(series_to_csv(self).encode()).hexdigest()
        return {
            "length": len(self),
            "first_year": int(self.years[0]) if len(self) else None,
            "last_year": int(self.years[-1]) if len(self) else None,
            "sha256": digest,
        }


@dataclass(frozen=True)
class Normalization:
    """Affine map value -> scale*value + offset sending [min, max] to [0.5, 1.5]."""

    scale: float
    offset: float

    def __post_init__(self):
        if not (math.isfinite(self.scale) and self.scale > 0 and math.isfinite(self.offset)):
            raise InvalidInputError("normalization scale must be positive and finite")

    @classmethod
    def fit(cls, values) -> Normalization:
        v = np.asarray(values, dtype=np.float64)
        if len(v) == 0:
            raise InvalidInputError("cannot normalize an empty series")
        lo, hi = float(v.min()), float(v.max())
        if not hi > lo:
            raise InvalidInputError("cannot normalize a constant series (zero range)")
        scale = (NORM_HIGH - NORM_LOW) / (hi - lo)
        return cls(scale=scale, offset=NORM_LOW - scale * lo)

    def apply(self, values):
        return np.asarray(values, dtype=np.float64) * self.scale + self.offset

    def invert(self, values):
        return (np.asarray(values, dtype=np.float64) - self.offset) / self.scale

    def to_dict(self) -> dict:
        return {"scale": self.scale, "offset": self.offset}

    @classmethod
    def from_dict(cls, d: dict) -> Normalization:
        return cls(float(d["scale"]), float(d["offset"]))


def normalize(series) -> tuple[np.ndarray, Normalization]:
    values = series.values if isinstance(series, AnnualSeries) else series
    norm = Normalization.fit(values)
    return norm.apply(values), norm


def atomic_write(path, data: str | bytes):
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": ""})) as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def series_to_csv(series: AnnualSeries) -> str:
    buf = io.StringIO()
    buf.write("year,value\n")
    for y, v in zip(series.years, series.values):
        buf.write(f"{int(y)},{float(v)!r}\n")
    return buf.getvalue()


def write_csv(series: AnnualSeries, path):
    atomic_write(path, series_to_csv(series))


def load_csv(path) -> AnnualSeries:
    """Read a ``year,value`` CSV, validating every row.

    Errors carry the 1-based line number of the offending row.
    """
    with open(path, encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    if not rows or [c.strip() for c in rows[0]] != ["year", "value"]:
        raise ParseError("missing header 'year,value'", 1)
    years, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", lineno)
        try:
            year = int(row[0])
        except ValueError:
            raise ParseError(f"non-integer year {row[0]!r}", lineno) from None
        try:
            value = float(row[1])
        except ValueError:
            raise ParseError(f"non-numeric value {row[1]!r}", lineno) from None
        if not math.isfinite(value):
            raise ParseError(f"non-finite value {row[1]!r}", lineno)
        if value <= 0:
            raise ParseError(f"value must be positive, got {row[1]!r}", lineno)
        if years and year != years[-1] + 1:
            raise ParseError(f"year {year} does not follow {years[-1]}", lineno)
        years.append(year)
        values.append(value)
    if not years:
        raise ParseError("no data rows", 2)
    return AnnualSeries(np.array(years), np.array(values))


def write_trajectory_csv(traj: Trajectory, path):
    lines = ["t,x,y"]
    for t, (x, y) in zip(traj.t, traj.states):
        lines.append(f"{t:.17g},{x:.17g},{y:.17g}")
    atomic_write(path, "\n".join(lines) + "\n")


def generate_synthetic(
    params: LVParams = DEFAULT_PARAMS,
    noise_std: float = 0.1,
    seed: int = 0,
    n_years: int = 37,
    *,
    initial: LVState = DEFAULT_INITIAL,
    drift: float = 0.25,
    scale: float = 1e4,
    offset: float = 3.5e5,
    start_year: int = 1986,
    substeps: int = 100,
) -> AnnualSeries:
    """LV-derived stand-in for an annual forest-cover series.

    The prey trajectory is sampled once per unit of time; the value for year
    ``k`` is ``offset + scale * (x_k - drift*k + noise_k)`` with Gaussian
    noise of standard deviation ``noise_std`` in orbit units. With
    ``drift=0, noise_std=0, scale=1, offset=0`` the result is the sampled
    orbit itself.
    """
    if n_years < 5:
        raise InvalidInputError(f"n_years must be at least 5, got {n_years}")
    if noise_std < 0 or substeps < 1:
        raise InvalidInputError("noise_std must be >= 0 and substeps >= 1")
    traj = integrate_rk4(params, initial, 1.0 / substeps, (n_years - 1) * substeps)
    x = traj.x[::substeps]
    k = np.arange(n_years)
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, noise_std, size=n_years) if noise_std > 0 else 0.0
    values = offset + scale * (x - drift * k + noise)
    if not np.all(values > 0):
        raise ValidationError("synthetic series is not strictly positive; lower drift or raise offset")
    return AnnualSeries(start_year + k, values)
