"""CSV tables and standalone SVG line charts."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .integrator import Trajectory
from .model import TWO_PI, ModelParams, RateSet
from .regulation import RegulationParams, reserve_series

TRAJECTORY_HEADER = (
    "t", "D", "L", "r_D", "r_L", "r", "alpha_D", "alpha_L", "lambda",
    "gwm_ldr", "reserve_primary", "reserve_secondary", "reserve_total",
)

MAX_POINTS = 2000
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def fmt(x: float) -> str:
    return format(float(x), ".15g")


def derived_series(params: ModelParams, rates: RateSet, reg: RegulationParams,
                   trajectory: Trajectory) -> dict[str, np.ndarray]:
    """All CSV columns for ``trajectory`` keyed by header name."""
    t, D, L = trajectory.t, trajectory.D, trajectory.L
    rep = reserve_series(params, reg, trajectory)

    def wave(rate):
        w = TWO_PI * rate.freq * t
        return rate.mean + rate.sin_amp * np.sin(w) + rate.cos_amp * np.cos(w)

    rd, rl, r = wave(rates.deposit), wave(rates.loan), wave(rates.interbank)
    marginal_cost = params.k * (D + L)
    a_d = r * params.free_fraction + (params.r_b * params.delta + params.r_r2 * params.kappa2) - rd - marginal_cost
    a_l = rl + r * params.gamma - r - marginal_cost
    return {
        "t": t, "D": D, "L": L, "r_D": rd, "r_L": rl, "r": r,
        "alpha_D": a_d, "alpha_L": a_l, "lambda": rep.ldr, "gwm_ldr": rep.gwm_ldr,
        "reserve_primary": rep.primary, "reserve_secondary": rep.secondary,
        "reserve_total": rep.total,
    }


def write_table(path, header: Sequence[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def write_trajectory_csv(trajectory: Trajectory, derived: dict[str, np.ndarray], path) -> Path:
    if len(trajectory) == 0:
        raise ValueError("empty trajectory")
    data = np.column_stack([np.asarray(derived[name], dtype=float) for name in TRAJECTORY_HEADER])
    row_fmt = ",".join(["%.15g"] * len(TRAJECTORY_HEADER))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(TRAJECTORY_HEADER) + "\n")
        fh.writelines(row_fmt % tuple(row) + "\n" for row in data.tolist())
    return path


def read_trajectory_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader], dtype=float).reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


@dataclass
class Series:
    name: str
    x: Sequence[float]
    y: Sequence[float]
    dash: str = ""


@dataclass
class SeriesBundle:
    title: str
    x_label: str
    y_label: str
    series: list[Series] = field(default_factory=list)
    # (label, y) horizontal guide lines
    guides: list[tuple[str, float]] = field(default_factory=list)


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    span = hi - lo
    raw = span / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-12 * span:
        ticks.append(round(v, 12))
        v += step
    return ticks


def _decimate(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if len(x) <= MAX_POINTS:
        return x, y
    idx = np.unique(np.append(np.linspace(0, len(x) - 1, MAX_POINTS).astype(int), len(x) - 1))
    return x[idx], y[idx]


def render_svg_lines(bundle: SeriesBundle, path, width: int = 720, height: int = 440) -> Path:
    if not bundle.series:
        raise ValueError("need at least one series")
    left, right, top, bottom = 70, 170, 40, 55
    pw, ph = width - left - right, height - top - bottom

    xs = [np.asarray(s.x, dtype=float) for s in bundle.series]
    ys = [np.asarray(s.y, dtype=float) for s in bundle.series]
    finite_x = np.concatenate([x[np.isfinite(x)] for x in xs])
    finite_y = np.concatenate([y[np.isfinite(y)] for y in ys] + [np.array([g for _, g in bundle.guides])])
    x_lo, x_hi = float(finite_x.min()), float(finite_x.max())
    y_lo, y_hi = float(finite_y.min()), float(finite_y.max())
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        pad = abs(y_lo) * 0.1 or 0.5
        y_lo, y_hi = y_lo - pad, y_hi + pad
    else:
        pad = 0.05 * (y_hi - y_lo)
        y_lo, y_hi = y_lo - pad, y_hi + pad

    def px(v):
        return left + (v - x_lo) / (x_hi - x_lo) * pw

    def py(v):
        return top + (y_hi - v) / (y_hi - y_lo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left + pw / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" '
        f'font-size="15">{escape(bundle.title)}</text>',
        f'<g class="axes" stroke="black" stroke-width="1">'
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}"/>'
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}"/></g>',
    ]
    for v in _nice_ticks(x_lo, x_hi):
        out.append(f'<line x1="{px(v):.2f}" y1="{top + ph}" x2="{px(v):.2f}" y2="{top + ph + 5}" stroke="black"/>'
                   f'<text x="{px(v):.2f}" y="{top + ph + 18}" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="11">{v:g}</text>')
    for v in _nice_ticks(y_lo, y_hi):
        out.append(f'<line x1="{left - 5}" y1="{py(v):.2f}" x2="{left}" y2="{py(v):.2f}" stroke="black"/>'
                   f'<text x="{left - 8}" y="{py(v) + 4:.2f}" text-anchor="end" font-family="sans-serif" '
                   f'font-size="11">{v:g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="12">{escape(bundle.x_label)}</text>')
    out.append(f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" font-size="12" '
               f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(bundle.y_label)}</text>')

    for label, g in bundle.guides:
        out.append(f'<line class="guide" x1="{left}" y1="{py(g):.2f}" x2="{left + pw}" y2="{py(g):.2f}" '
                   f'stroke="black" stroke-width="2.5"><title>{escape(label)}</title></line>')

    for i, (s, x, y) in enumerate(zip(bundle.series, xs, ys)):
        color = PALETTE[i % len(PALETTE)]
        mask = np.isfinite(x) & np.isfinite(y)
        x, y = _decimate(x[mask], y[mask])
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{pts}">'
                   f'<title>{escape(s.name)}</title></polyline>')
        ly = top + 14 + 18 * i
        out.append(f'<line x1="{left + pw + 12}" y1="{ly}" x2="{left + pw + 36}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="2"{dash}/><text x="{left + pw + 42}" y="{ly + 4}" font-family="sans-serif" '
                   f'font-size="11">{escape(s.name)}</text>')
    out.append("</svg>")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path


def trajectory_charts(derived: dict[str, np.ndarray], reg: RegulationParams, stem: str) -> list[SeriesBundle]:
    """Volume/rate, phase, LDR and GWM charts for one run."""
    t = derived["t"]
    return [
        SeriesBundle(f"{stem}: volumes", "t (years)", "volume",
                     [Series("D", t, derived["D"]), Series("L", t, derived["L"])]),
        SeriesBundle(f"{stem}: rates", "t (years)", "rate",
                     [Series("r_D", t, derived["r_D"]), Series("r_L", t, derived["r_L"]),
                      Series("r", t, derived["r"])]),
        SeriesBundle(f"{stem}: L against D", "D", "L", [Series("L(D)", derived["D"], derived["L"])]),
        SeriesBundle(f"{stem}: LDR", "t (years)", "L/D", [Series("lambda", t, derived["lambda"])],
                     guides=[("lambda_l", reg.lambda_l), ("lambda_u", reg.lambda_u)]),
        SeriesBundle(f"{stem}: LDR reserve", "t (years)", "GWM", [Series("gwm_ldr", t, derived["gwm_ldr"])]),
    ]
