"""CSV, SVG and manifest writers used by the experiment front-end."""

from __future__ import annotations

import csv
import io
import json
import os
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

import numpy as np

SIG_DIGITS = 17


def format_value(value) -> str:
    """Decimal text for one CSV cell (floats at 17 significant digits)."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (float, np.floating)):
        return format(float(value), f".{SIG_DIGITS}g")
    return str(value)


def csv_text(rows: Sequence[Mapping], columns: Sequence[str] | None = None) -> str:
    if not rows:
        raise ValueError("cannot emit an empty table")
    if columns is None:
        columns = []
        for r in rows:
            for k in r:
                if k not in columns:
                    columns.append(k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(columns)
    for r in rows:
        w.writerow([format_value(r.get(c)) for c in columns])
    return buf.getvalue()


def _write_text(path, text: str):
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def emit_csv(rows: Sequence[Mapping], path, columns: Sequence[str] | None = None) -> Path:
    """Header plus one line per row, RFC-4180 quoting and CRLF line ends."""
    return _write_text(path, csv_text(rows, columns))


def read_csv(path) -> list[dict]:
    """Rows as dicts of the raw decimal strings."""
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


# --------------------------------------------------------------------------
# SVG line charts

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H = 640, 420
_L, _R, _T, _B = 80, 150, 30, 60


def _nice_ticks(lo, hi, count=5):
    if hi <= lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def svg_text(series: Mapping[str, tuple], x_label: str, y_label: str, log: bool = False,
             title: str | None = None) -> str:
    """One self-contained line chart; ``series`` maps a label to ``(xs, ys)``."""
    if not series:
        raise ValueError("cannot plot an empty series collection")
    prepared = {}
    for name, (xs, ys) in series.items():
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        keep = np.isfinite(xs) & np.isfinite(ys)
        if log:
            keep &= (xs > 0) & (ys > 0)
        xs, ys = xs[keep], ys[keep]
        if log:
            xs, ys = np.log10(xs), np.log10(ys)
        prepared[name] = (xs, ys)
    allx = np.concatenate([p[0] for p in prepared.values()] or [np.zeros(0)])
    ally = np.concatenate([p[1] for p in prepared.values()] or [np.zeros(0)])
    if allx.size == 0:
        allx = ally = np.array([0.0, 1.0])
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw, ph = _W - _L - _R, _H - _T - _B

    def px(x):
        return _L + (x - x0) / (x1 - x0) * pw

    def py(y):
        return _T + ph - (y - y0) / (y1 - y0) * ph

    def tick_label(v):
        return f"1e{v:.2g}" if log else f"{v:.4g}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_W} {_H}" '
           f'width="{_W}" height="{_H}" font-family="sans-serif" font-size="12">']
    if title:
        out.append(f'<text x="{_W / 2:.1f}" y="18" text-anchor="middle">{escape(title)}</text>')
    out.append(f'<rect x="{_L}" y="{_T}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>')
    for v in _nice_ticks(x0, x1):
        x = px(v)
        out.append(f'<line x1="{x:.2f}" y1="{_T + ph}" x2="{x:.2f}" y2="{_T + ph + 5}" stroke="#000"/>')
        out.append(f'<text x="{x:.2f}" y="{_T + ph + 18}" text-anchor="middle">{escape(tick_label(v))}</text>')
    for v in _nice_ticks(y0, y1):
        y = py(v)
        out.append(f'<line x1="{_L - 5}" y1="{y:.2f}" x2="{_L}" y2="{y:.2f}" stroke="#000"/>')
        out.append(f'<text x="{_L - 8}" y="{y + 4:.2f}" text-anchor="end">{escape(tick_label(v))}</text>')
    out.append(f'<text x="{_L + pw / 2:.1f}" y="{_H - 15}" text-anchor="middle">{escape(x_label)}</text>')
    out.append(f'<text x="20" y="{_T + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 20 {_T + ph / 2:.1f})">{escape(y_label)}</text>')
    for i, (name, (xs, ys)) in enumerate(prepared.items()):
        color = _PALETTE[i % len(_PALETTE)]
        if xs.size:
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs, ys))
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
            for a, b in zip(xs, ys):
                out.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="2.5" fill="{color}"/>')
        ly = _T + 14 + 18 * i
        out.append(f'<line x1="{_W - _R + 10}" y1="{ly}" x2="{_W - _R + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{_W - _R + 35}" y="{ly + 4}">{escape(str(name))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(series: Mapping[str, tuple], path, x_label: str, y_label: str, log: bool = False,
             title: str | None = None) -> Path:
    return _write_text(path, svg_text(series, x_label, y_label, log, title))


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def emit_json(obj, path) -> Path:
    text = json.dumps(obj, indent=2, sort_keys=True, default=_json_default, allow_nan=True)
    return _write_text(path, text + "\n")


def ensure_dir(path) -> Path:
    p = Path(path)
    try:
        os.makedirs(p, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {p}: {exc.strerror or exc}") from exc
    return p
