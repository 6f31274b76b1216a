"""Deterministic CSV tables and dependency-free SVG line plots."""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Sequence, Union
from xml.sax.saxutils import escape

import numpy as np

from .errors import ContractError

PathLike = Union[str, Path]


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if v == 0.0:
            return "0"  # fold -0.0 so output does not depend on signed zeros
        return format(v, ".12g")
    return str(v)


def csv_text(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    n = len(columns)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ContractError(f"row {i} has {len(row)} fields, header has {n}")
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(columns: Sequence[str], rows: Iterable[Sequence], path: PathLike) -> Path:
    """Header row then one line per row; floats at 12 significant digits."""
    p = Path(path)
    p.write_text(csv_text(columns, rows), encoding="utf-8", newline="")
    return p


def read_csv(path: PathLike) -> tuple:
    """Return ``(columns, float array of shape (rows, columns))``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            columns = next(reader)
        except StopIteration:
            raise ContractError(f"{path} is empty") from None
        data = [[float(x) for x in row] for row in reader if row]
    arr = np.array(data, dtype=float).reshape(len(data), len(columns))
    return columns, arr


# -- SVG -----------------------------------------------------------------------

_W, _H = 640, 420
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 20, 20, 50
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b")


def _num(v: float) -> str:
    return format(v, ".2f")


def svg_text(traces: Sequence, xlabel: str = "", ylabel: str = "", offset: float = 0.0, title: str = "") -> str:
    """Render traces (objects with ``freqs``/``values`` or ``(x, y)`` pairs) as an SVG string.

    Trace ``k`` is drawn shifted up by ``k * offset`` in data units.
    """
    series = []
    for k, t in enumerate(traces):
        x, y = (t.freqs, t.values) if hasattr(t, "freqs") else t
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float) + k * offset
        keep = np.isfinite(x) & np.isfinite(y)
        series.append((x[keep], y[keep], getattr(t, "label", "")))
    pw, ph = _W - _LEFT - _RIGHT, _H - _TOP - _BOTTOM
    xs = [s[0] for s in series if s[0].size]
    ys = [s[1] for s in series if s[1].size]
    x0, x1 = (min(a.min() for a in xs), max(a.max() for a in xs)) if xs else (0.0, 1.0)
    y0, y1 = (min(a.min() for a in ys), max(a.max() for a in ys)) if ys else (0.0, 1.0)
    if x1 <= x0:
        x0, x1 = x0 - 0.5, x0 + 0.5
    if y1 <= y0:
        y0, y1 = y0 - 0.5, y0 + 0.5

    def sx(v):
        return _LEFT + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return _TOP + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{_W / 2}" y="14" text-anchor="middle" font-size="12">{escape(title)}</text>')
    out.append('<g class="axes" stroke="black" stroke-width="1">')
    out.append(f'<line x1="{_LEFT}" y1="{_TOP + ph}" x2="{_LEFT + pw}" y2="{_TOP + ph}"/>')
    out.append(f'<line x1="{_LEFT}" y1="{_TOP}" x2="{_LEFT}" y2="{_TOP + ph}"/>')
    out.append("</g>")
    ticks = []
    for i in range(5):
        fx = x0 + (x1 - x0) * i / 4
        fy = y0 + (y1 - y0) * i / 4
        ticks.append(
            f'<text x="{_num(sx(fx))}" y="{_TOP + ph + 16}" text-anchor="middle" font-size="10">{fx:.6g}</text>'
        )
        ticks.append(
            f'<text x="{_LEFT - 6}" y="{_num(sy(fy) + 3)}" text-anchor="end" font-size="10">{fy:.4g}</text>'
        )
    out.extend(ticks)
    out.append(
        f'<text x="{_LEFT + pw / 2}" y="{_H - 10}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="14" y="{_TOP + ph / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {_TOP + ph / 2})">{escape(ylabel)}</text>'
    )
    for k, (x, y, label) in enumerate(series):
        pts = " ".join(f"{_num(sx(a))},{_num(sy(b))}" for a, b in zip(x, y))
        color = _COLORS[k % len(_COLORS)]
        title_el = f"<title>{escape(label)}</title>" if label else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}">{title_el}</polyline>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(traces: Sequence, path: PathLike, **kw) -> Path:
    p = Path(path)
    p.write_text(svg_text(traces, **kw), encoding="utf-8", newline="")
    return p
