"""Static SVG 1.1 charts built as plain text, so output bytes are reproducible."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .data import AnnualSeries, atomic_write
from .errors import InvalidInputError
from .evaluation import EvalReport
from .lv import Trajectory

__all__ = ["emit_plot", "bar_chart_svg", "line_chart_svg"]

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2")
WIDTH, HEIGHT = 720, 420
LEFT, RIGHT, TOP, BOTTOM = 80, 160, 50, 60


def _num(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = np.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(float(round(t / step) * step))
        t += step
    return ticks


def _tick_label(v: float) -> str:
    if v != 0 and (abs(v) >= 1e6 or abs(v) < 1e-3):
        return f"{v:.3g}"
    return f"{v:,.6g}"


def _header(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:g}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]


def _axes(parts, y_ticks, ymap, x_label, y_label):
    x0, x1 = LEFT, WIDTH - RIGHT
    y0, y1 = HEIGHT - BOTTOM, TOP
    for t in y_ticks:
        y = ymap(t)
        parts.append(f'<line x1="{x0}" y1="{_num(y)}" x2="{x1}" y2="{_num(y)}" stroke="#dddddd"/>')
        parts.append(f'<text x="{x0 - 6}" y="{_num(y + 4)}" text-anchor="end">{_tick_label(t)}</text>')
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')
    parts.append(f'<text x="{(x0 + x1) / 2:g}" y="{HEIGHT - 15}" text-anchor="middle">{escape(x_label)}</text>')
    parts.append(
        f'<text x="18" y="{(y0 + y1) / 2:g}" text-anchor="middle" '
        f'transform="rotate(-90 18 {(y0 + y1) / 2:g})">{escape(y_label)}</text>'
    )


def _legend(parts, names):
    x = WIDTH - RIGHT + 15
    for i, name in enumerate(names):
        y = TOP + 10 + 20 * i
        parts.append(f'<rect x="{x}" y="{y}" width="12" height="12" fill="{PALETTE[i % len(PALETTE)]}"/>')
        parts.append(f'<text x="{x + 18}" y="{y + 10}">{escape(name)}</text>')


def bar_chart_svg(report: EvalReport, metric: str = "RMSE") -> str:
    """Grouped bars: one group per split, one bar per model, std whiskers."""
    recs = [r for r in report.records if r.metric == metric]
    if not recs:
        raise InvalidInputError(f"no {metric} records to plot")
    splits, models = report.splits, report.models
    cell = {(r.split, r.model): r for r in recs}
    tops = [(r.mean or 0.0) + (r.std or 0.0) for r in recs]
    ticks = _nice_ticks(0.0, max(max(tops), 1e-12))
    ymax = ticks[-1] if ticks[-1] > 0 else 1.0
    y0, y1 = HEIGHT - BOTTOM, TOP
    ymap = lambda v: y0 - (v / ymax) * (y0 - y1)
    parts = _header(f"{metric} by model and train-test split")
    _axes(parts, ticks, ymap, "Train-test split", f"{metric} (mean ± std)")
    group_w = (WIDTH - RIGHT - LEFT) / len(splits)
    bar_w = 0.8 * group_w / len(models)
    for g, split in enumerate(splits):
        gx = LEFT + g * group_w + 0.1 * group_w
        parts.append(f'<g class="split" data-split="{escape(split)}">')
        for m, model in enumerate(models):
            r = cell.get((split, model))
            mean = r.mean if r is not None and r.mean is not None else 0.0
            x = gx + m * bar_w
            parts.append(
                f'<rect class="bar" x="{_num(x)}" y="{_num(ymap(mean))}" width="{_num(bar_w)}" '
                f'height="{_num(y0 - ymap(mean))}" fill="{PALETTE[m % len(PALETTE)]}">'
                f'<title>{escape(model)} {escape(split)}: {mean:.3f}</title></rect>'
            )
            if r is not None and r.std:
                cx = x + bar_w / 2
                lo, hi = ymap(max(mean - r.std, 0.0)), ymap(mean + r.std)
                parts.append(f'<line x1="{_num(cx)}" y1="{_num(lo)}" x2="{_num(cx)}" y2="{_num(hi)}" stroke="black"/>')
        parts.append("</g>")
        parts.append(
            f'<text x="{_num(LEFT + (g + 0.5) * group_w)}" y="{y0 + 18}" text-anchor="middle">{escape(split)}</text>'
        )
    _legend(parts, models)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _line_data(obj) -> tuple[dict, str, str]:
    if isinstance(obj, Trajectory):
        return {"x (prey)": (obj.t, obj.x), "y (predator)": (obj.t, obj.y)}, "t", "population"
    if isinstance(obj, AnnualSeries):
        return {"observed": (obj.years, obj.values)}, "year", "value"
    if isinstance(obj, dict):
        return {k: (np.asarray(x), np.asarray(y)) for k, (x, y) in obj.items()}, "t", "value"
    raise InvalidInputError(f"cannot draw lines for {type(obj).__name__}")


def line_chart_svg(obj, title: str = "") -> str:
    """Line chart of a trajectory, an annual series or a {name: (x, y)} mapping."""
    series, xlabel, ylabel = _line_data(obj)
    series = {k: v for k, v in series.items() if len(v[0])}
    if not series:
        raise InvalidInputError("nothing to plot")
    xs = np.concatenate([x for x, _ in series.values()]).astype(float)
    ys = np.concatenate([y for _, y in series.values()]).astype(float)
    ticks = _nice_ticks(float(ys.min()), float(ys.max()))
    lo, hi = min(ticks[0], ys.min()), max(ticks[-1], ys.max())
    xlo, xhi = float(xs.min()), float(xs.max())
    if xhi == xlo:
        xhi = xlo + 1.0
    if hi == lo:
        hi = lo + 1.0
    y0, y1 = HEIGHT - BOTTOM, TOP
    ymap = lambda v: y0 - (v - lo) / (hi - lo) * (y0 - y1)
    xmap = lambda v: LEFT + (v - xlo) / (xhi - xlo) * (WIDTH - RIGHT - LEFT)
    parts = _header(title or "Series")
    _axes(parts, [t for t in ticks if lo <= t <= hi], ymap, xlabel, ylabel)
    for t in _nice_ticks(xlo, xhi):
        parts.append(f'<text x="{_num(xmap(t))}" y="{y0 + 18}" text-anchor="middle">{_tick_label(t)}</text>')
    for i, (name, (x, y)) in enumerate(series.items()):
        pts = " ".join(f"{_num(xmap(a))},{_num(ymap(b))}" for a, b in zip(x, y))
        parts.append(
            f'<polyline class="line" fill="none" stroke="{PALETTE[i % len(PALETTE)]}" '
            f'stroke-width="1.5" points="{pts}"><title>{escape(name)}</title></polyline>'
        )
    _legend(parts, list(series))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_plot(obj, kind: str, path, metric: str = "RMSE", title: str = "") -> str:
    """Render ``obj`` as ``kind`` ('bars' or 'lines') and write it to ``path``.

    Nothing is written when rendering fails.
    """
    if kind == "bars":
        if not isinstance(obj, EvalReport):
            raise InvalidInputError("bar charts need an EvalReport")
        svg = bar_chart_svg(obj, metric)
    elif kind == "lines":
        svg = line_chart_svg(obj, title)
    else:
        raise InvalidInputError(f"unknown plot kind {kind!r}")
    atomic_write(path, svg)
    return svg
