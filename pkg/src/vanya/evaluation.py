"""Chronological-split benchmark: RMSE/MAE over seeded repeated runs."""

from __future__ import annotations

import csv
import io
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from . import __version__
from .baselines import (
    ESNParams,
    esn_rolling_forecast,
    persistence_forecast,
    train_esn,
    train_vanilla_lstm,
)
from .data import AnnualSeries, atomic_write
from .errors import FormatVersionError, InvalidInputError, ShapeError, TooShortError, VanyaError
from .training import TrainConfig, fit_vanya, pretrain, rolling_forecast

__all__ = [
    "rmse",
    "mae",
    "SplitSpec",
    "STANDARD_SPLITS",
    "MODELS",
    "split_series",
    "EvalRecord",
    "EvalReport",
    "run_experiment",
    "comparison_table",
    "table_csv",
    "table_text",
]

REPORT_FORMAT_VERSION = 1
MODELS = ("vanya", "vanilla_lstm", "esn", "persistence")
METRICS = ("RMSE", "MAE")


def _metric_args(observed, real):
    o = np.asarray(observed, dtype=np.float64)
    r = np.asarray(real, dtype=np.float64)
    if o.shape != r.shape or o.ndim != 1:
        raise ShapeError(f"series shapes differ or are not 1-D: {o.shape} vs {r.shape}")
    if o.size == 0:
        raise ShapeError("metrics need at least one point")
    return o, r


def rmse(observed, real) -> float:
    o, r = _metric_args(observed, real)
    return float(np.sqrt(np.mean((o - r) ** 2)))


def mae(observed, real) -> float:
    o, r = _metric_args(observed, real)
    return float(np.mean(np.abs(o - r)))


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise InvalidInputError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")

    @property
    def label(self) -> str:
        train = Decimal(str(self.train_fraction)) * 100
        return f"{train.normalize():f}-{(100 - train).normalize():f}"

    def counts(self, n: int) -> tuple[int, int]:
        """(train_count, test_count); the test count rounds half up."""
        test_fraction = 1 - Decimal(str(self.train_fraction))
        test = int((n * test_fraction).to_integral_value(rounding=ROUND_HALF_UP))
        return n - test, test


STANDARD_SPLITS = tuple(SplitSpec(f) for f in (0.9, 0.8, 0.7, 0.6))


def split_series(n: int, spec: SplitSpec, window: int = 4) -> tuple[int, int]:
    """Chronological split sizes; the training prefix must hold ``window + 3`` points."""
    train, test = spec.counts(n)
    minimum = window + 3
    if test < 1 or train < minimum:
        need = minimum + 1
        # smallest n meeting both constraints for this fraction
        while True:
            tr, te = spec.counts(need)
            if te >= 1 and tr >= minimum:
                break
            need += 1
        raise TooShortError(
            f"series of length {n} too short for split {spec.label}: need at least {need} points"
        )
    return train, test


@dataclass
class EvalRecord:
    model: str
    split: str
    metric: str
    values: list
    failures: list = field(default_factory=list)

    @property
    def ok_values(self) -> list[float]:
        return [v for v in self.values if v is not None]

    @property
    def mean(self):
        ok = self.ok_values
        return float(statistics.mean(ok)) if ok else None

    @property
    def std(self):
        ok = self.ok_values
        if not ok:
            return None
        if len(ok) == 1:
            return 0.0
        # exact rational arithmetic: identical runs give exactly 0
        return float(statistics.stdev(ok))

    @property
    def flags(self) -> list[str]:
        flags = []
        if len(self.ok_values) == 1:
            flags.append("single-run")
        if self.failures:
            flags.append("failures")
        return flags

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "split": self.split,
            "metric": self.metric,
            "values": self.values,
            "mean": self.mean,
            "std": self.std,
            "flags": self.flags,
            "failures": self.failures,
        }

    @classmethod
    def from_dict(cls, d: dict) -> EvalRecord:
        return cls(d["model"], d["split"], d["metric"], list(d["values"]), list(d.get("failures", [])))


@dataclass
class EvalReport:
    dataset: dict
    config: dict
    records: list[EvalRecord]
    tool_version: str = __version__

    def record(self, model: str, split: str, metric: str) -> EvalRecord:
        for r in self.records:
            if (r.model, r.split, r.metric) == (model, split, metric):
                return r
        raise KeyError((model, split, metric))

    @property
    def models(self) -> list[str]:
        return list(dict.fromkeys(r.model for r in self.records))

    @property
    def splits(self) -> list[str]:
        return list(dict.fromkeys(r.split for r in self.records))

    def to_dict(self) -> dict:
        return {
            "format_version": REPORT_FORMAT_VERSION,
            "tool_version": self.tool_version,
            "dataset": self.dataset,
            "config": self.config,
            "records": [r.to_dict() for r in self.records],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    def save(self, path):
        atomic_write(path, self.dumps())

    @classmethod
    def from_dict(cls, d: dict) -> EvalReport:
        if d.get("format_version") != REPORT_FORMAT_VERSION:
            raise FormatVersionError(f"unsupported report format_version {d.get('format_version')!r}")
        return cls(d["dataset"], d["config"], [EvalRecord.from_dict(r) for r in d["records"]],
                   d.get("tool_version", __version__))

    @classmethod
    def load(cls, path) -> EvalReport:
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


def _forecast(model: str, values, train_count: int, seed: int, config: TrainConfig,
              esn: dict, pretrained):
    train = values[:train_count]
    if model == "vanya":
        fitted = fit_vanya(train, config, pretrained=pretrained)
        return rolling_forecast(fitted, values, train_count)
    if model == "vanilla_lstm":
        return rolling_forecast(train_vanilla_lstm(train, config), values, train_count)
    if model == "esn":
        params = train_esn(train, ESNParams(**{**esn, "seed": seed}))
        return esn_rolling_forecast(params, values, train_count)
    if model == "persistence":
        return persistence_forecast(values, train_count)
    raise InvalidInputError(f"unknown model {model!r}")


def _run_seed(args):
    """All (model, split) cells for one seed; pretraining is shared across splits."""
    values, models, counts, seed, config_dict, esn = args
    config = TrainConfig.from_dict({**config_dict, "seed": seed})
    pretrained = None
    out = {}
    if "vanya" in models:
        try:
            pretrained = pretrain(config)
        except VanyaError as e:
            pretrained = e
    for model in models:
        for label, train_count in counts:
            truth = values[train_count:]
            try:
                if isinstance(pretrained, Exception) and model == "vanya":
                    raise pretrained
                pred = _forecast(model, values, train_count, seed, config, esn, pretrained)
                out[model, label] = (rmse(pred, truth), mae(pred, truth), None)
            except VanyaError as e:
                out[model, label] = (None, None, f"{type(e).__name__}: {e}")
    return out


def run_experiment(
    data: AnnualSeries,
    models=MODELS,
    splits=STANDARD_SPLITS,
    n_runs: int = 10,
    base_seed: int = 0,
    config: TrainConfig = TrainConfig(),
    esn: dict | None = None,
    n_jobs: int = 1,
) -> EvalReport:
    """Train and score every (model, split, run) cell with seed ``base_seed + run``.

    Metrics are computed on teacher-forced one-step forecasts of the test
    suffix, in original data units. A failing cell is recorded with its
    error message; the report is still produced.
    """
    if n_runs < 1:
        raise InvalidInputError("n_runs must be >= 1")
    models = tuple(models)
    for m in models:
        if m not in MODELS:
            raise InvalidInputError(f"unknown model {m!r}; choose from {MODELS}")
    splits = tuple(s if isinstance(s, SplitSpec) else SplitSpec(float(s)) for s in splits)
    esn = dict(ESNParams().config_dict() if esn is None else {**ESNParams().config_dict(), **esn})
    esn.pop("seed", None)
    values = data.values
    counts = [(s.label, split_series(len(values), s, config.window)[0]) for s in splits]
    seeds = [base_seed + k for k in range(n_runs)]
    # persistence has no randomness; every run still gets scored
    jobs = [(values, models, counts, seed, config.to_dict(), esn) for seed in seeds]
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as ex:
            results = list(ex.map(_run_seed, jobs))
    else:
        results = [_run_seed(j) for j in jobs]

    records = []
    for model in models:
        for label, _ in counts:
            cells = [(seed, res[model, label]) for seed, res in zip(seeds, results)]
            failures = [{"seed": seed, "error": c[2]} for seed, c in cells if c[2] is not None]
            for i, metric in enumerate(METRICS):
                records.append(EvalRecord(model, label, metric, [c[i] for _, c in cells],
                                          list(failures)))
    config_echo = {
        "models": list(models),
        "splits": [s.train_fraction for s in splits],
        "n_runs": n_runs,
        "base_seed": base_seed,
        "train": config.to_dict(),
        "esn": esn,
    }
    return EvalReport(dataset=data.fingerprint(), config=config_echo, records=records)


def rerun(data: AnnualSeries, config_echo: dict, n_jobs: int = 1) -> EvalReport:
    """Reproduce a report from its own config echo."""
    return run_experiment(
        data,
        models=config_echo["models"],
        splits=config_echo["splits"],
        n_runs=config_echo["n_runs"],
        base_seed=config_echo["base_seed"],
        config=TrainConfig.from_dict(config_echo["train"]),
        esn=config_echo["esn"],
        n_jobs=n_jobs,
    )


def comparison_table(report: EvalReport) -> list[dict]:
    """Rows (split, model, metric, mean, std, best, note), best-per-metric flagged.

    Ties on the mean go to the lexicographically first model name and are
    noted on the winning row.
    """
    if not report.records:
        raise InvalidInputError("empty report")
    rows = []
    for split in report.splits:
        for metric in METRICS:
            recs = [r for r in report.records if r.split == split and r.metric == metric]
            scored = sorted((r.mean, r.model) for r in recs if r.mean is not None)
            best, note = None, ""
            if scored:
                best_mean = scored[0][0]
                tied = sorted(m for v, m in scored if v == best_mean)
                best = tied[0]
                if len(tied) > 1:
                    note = "tie with " + ", ".join(tied[1:])
            for r in recs:
                rows.append({
                    "split": split,
                    "model": r.model,
                    "metric": metric,
                    "mean": r.mean,
                    "std": r.std,
                    "runs": len(r.ok_values),
                    "best": r.model == best,
                    "note": note if r.model == best else ("failed" if r.mean is None else ""),
                })
    order = {m: i for i, m in enumerate(report.models)}
    rows.sort(key=lambda row: (report.splits.index(row["split"]), order[row["model"]],
                               METRICS.index(row["metric"])))
    return rows


def _fmt(v) -> str:
    return "nan" if v is None else f"{v:.3f}"


def table_csv(report: EvalReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["split", "model", "metric", "mean", "std", "runs", "best", "note"])
    for r in comparison_table(report):
        w.writerow([r["split"], r["model"], r["metric"], _fmt(r["mean"]), _fmt(r["std"]),
                    r["runs"], "*" if r["best"] else "", r["note"]])
    return buf.getvalue()


def table_text(report: EvalReport) -> str:
    """Aligned plain-text tables, one per split."""
    rows = comparison_table(report)
    out = []
    for split in report.splits:
        body = [r for r in rows if r["split"] == split]
        cells = [(r["model"] + ("*" if r["best"] else ""), r["metric"], _fmt(r["mean"]),
                  _fmt(r["std"]), r["note"]) for r in body]
        head = ("Model", "Metric", "Mean", "Std", "Note")
        widths = [max(len(str(c[i])) for c in cells + [head]) for i in range(5)]
        line = lambda c: "  ".join(str(x).ljust(wd) if i < 2 or i == 4 else str(x).rjust(wd)
                                   for i, (x, wd) in enumerate(zip(c, widths))).rstrip()
        out.append(f"Split {split}")
        out.append(line(head))
        out.append("  ".join("-" * wd for wd in widths))
        out.extend(line(c) for c in cells)
        out.append("")
    return "\n".join(out)
