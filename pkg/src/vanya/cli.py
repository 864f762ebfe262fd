"""Command-line interface.

Exit status: 0 on success, 1 on validation errors (bad input, config or
files), 2 on numerical failures (integration, non-finite loss, residual
singularity).

A JSON config file may carry the sections ``train`` (TrainConfig fields),
``esn`` (ESN settings), ``synth`` (generator settings) and the evaluation
keys ``models``, ``splits``, ``n_runs``, ``base_seed``. Command-line flags
override the config file, which overrides built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .data import atomic_write, generate_synthetic, load_csv, write_csv, write_trajectory_csv
from .errors import ConfigError, NumericalFailure, ValidationError
from .evaluation import MODELS, EvalReport, run_experiment, table_csv, table_text
from .lv import LVParams, LVState, integrate_rk4
from .plotting import emit_plot
from .training import TrainConfig, TrainedModel, finetune, forecast_one_step, pretrain, transfer

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as f:
            cfg = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return cfg


_TRAIN_FLAGS = {
    "seed": "seed",
    "window": "window",
    "hidden": "hidden",
    "pretrain_epochs": "pretrain_epochs",
    "finetune_epochs": "finetune_epochs",
    "lr": "lr",
    "steps": "steps",
    "dt": "dt",
}


def _train_config(args, cfg: dict, base: TrainConfig | None = None) -> TrainConfig:
    d = (base or TrainConfig()).to_dict()
    d.update(cfg.get("train", {}))
    lv = dict(d["lv"])
    for k in ("alpha", "beta", "gamma", "delta"):
        if getattr(args, k, None) is not None:
            lv[k] = getattr(args, k)
    d["lv"] = lv
    init = dict(d["initial"])
    if getattr(args, "x0", None) is not None:
        init["x"] = args.x0
    if getattr(args, "y0", None) is not None:
        init["y"] = args.y0
    d["initial"] = init
    for flag, key in _TRAIN_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            d[key] = v
    return TrainConfig.from_dict(d)


def _add_train_flags(p, lv=True):
    p.add_argument("--config", help="JSON config file")
    if lv:
        for k in ("alpha", "beta", "gamma", "delta"):
            p.add_argument(f"--{k}", type=float)
        p.add_argument("--x0", type=float, help="initial prey abundance")
        p.add_argument("--y0", type=float, help="initial predator abundance")
        p.add_argument("--dt", type=float)
        p.add_argument("--steps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--hidden", type=int)
    p.add_argument("--pretrain-epochs", dest="pretrain_epochs", type=int)
    p.add_argument("--finetune-epochs", dest="finetune_epochs", type=int)
    p.add_argument("--lr", type=float)


def cmd_simulate(args):
    config = _train_config(args, _load_config(args.config))
    traj = integrate_rk4(config.lv, config.initial, config.dt, config.steps)
    write_trajectory_csv(traj, args.out)
    if args.svg:
        emit_plot(traj, "lines", args.svg, title="Lotka-Volterra trajectory")


def cmd_synth(args):
    cfg = _load_config(args.config)
    synth = dict(cfg.get("synth", {}))
    for k in ("n_years", "noise_std", "seed", "drift", "scale", "offset", "start_year"):
        v = getattr(args, k)
        if v is not None:
            synth[k] = v
    if "params" in synth:
        synth["params"] = LVParams.from_dict(synth["params"])
    if "initial" in synth:
        synth["initial"] = LVState(float(synth["initial"]["x"]), float(synth["initial"]["y"]))
    try:
        series = generate_synthetic(**synth)
    except TypeError as e:
        raise ConfigError(f"bad synth settings: {e}") from None
    write_csv(series, args.out)


def cmd_pretrain(args):
    config = _train_config(args, _load_config(args.config))
    pretrain(config).save(args.out)


def cmd_finetune(args):
    pre = TrainedModel.load(args.model)
    config = _train_config(args, _load_config(args.config), base=pre.config)
    series = load_csv(args.data)
    finetune(transfer(pre, series, config), config).save(args.out)


def cmd_forecast(args):
    model = TrainedModel.load(args.model)
    series = load_csv(args.data)
    value = forecast_one_step(model, series)
    print(f"{int(series.years[-1]) + 1},{value!r}")


def cmd_evaluate(args):
    cfg = _load_config(args.config)
    config = _train_config(args, cfg)
    models = args.models.split(",") if args.models else cfg.get("models", list(MODELS))
    splits = ([float(s) for s in args.splits.split(",")] if args.splits
              else cfg.get("splits", [0.9, 0.8, 0.7, 0.6]))
    n_runs = args.n_runs if args.n_runs is not None else cfg.get("n_runs", 10)
    base_seed = args.base_seed if args.base_seed is not None else cfg.get("base_seed", 0)
    data = load_csv(args.data)
    report = run_experiment(data, models=models, splits=splits, n_runs=n_runs,
                            base_seed=base_seed, config=config, esn=cfg.get("esn"),
                            n_jobs=args.jobs)
    report.save(args.out)
    if args.svg_dir:
        _write_report_files(report, Path(args.svg_dir), tables=False)


def _write_report_files(report: EvalReport, out: Path, tables=True):
    out.mkdir(parents=True, exist_ok=True)
    for metric in ("RMSE", "MAE"):
        emit_plot(report, "bars", out / f"{metric.lower()}.svg", metric=metric)
    if tables:
        atomic_write(out / "table.csv", table_csv(report))
        atomic_write(out / "table.txt", table_text(report))


def cmd_report(args):
    report = EvalReport.load(args.report)
    _write_report_files(report, Path(args.out_dir))
    print(table_text(report), end="")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vanya", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="integrate the LV system and write t,x,y CSV")
    _add_train_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", help="also write a line chart")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("synth", help="write an LV-derived synthetic year,value CSV")
    p.add_argument("--config")
    p.add_argument("--n-years", dest="n_years", type=int)
    p.add_argument("--noise-std", dest="noise_std", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--drift", type=float)
    p.add_argument("--scale", type=float)
    p.add_argument("--offset", type=float)
    p.add_argument("--start-year", dest="start_year", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("pretrain", help="pretrain on simulated LV triples")
    _add_train_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pretrain)

    p = sub.add_parser("finetune", help="transfer a pretrained model and fine-tune on data")
    _add_train_flags(p, lv=False)
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_finetune)

    p = sub.add_parser("forecast", help="print the next year's forecast as year,value")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("evaluate", help="run the split/seed benchmark and write a JSON report")
    _add_train_flags(p)
    p.add_argument("--data", required=True)
    p.add_argument("--models", help=f"comma-separated subset of {','.join(MODELS)}")
    p.add_argument("--splits", help="comma-separated train fractions, e.g. 0.9,0.8")
    p.add_argument("--n-runs", dest="n_runs", type=int)
    p.add_argument("--base-seed", dest="base_seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--svg-dir", dest="svg_dir", help="also write rmse.svg and mae.svg here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="render CSV/text tables and SVG bar charts from a report")
    p.add_argument("--report", required=True)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except NumericalFailure as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValidationError, OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
