"""CSV and SVG output for experiment results."""

from __future__ import annotations

import csv
import dataclasses
from html import escape
from pathlib import Path
from typing import Mapping, Sequence

from .harness import TrialResult

CSV_HEADER = [f.name for f in dataclasses.fields(TrialResult)]
_INT_FIELDS = {"trial", "qualifier_count", "fallback_used", "seed", "stream_id"}
_STR_FIELDS = {"method"}


def _fmt(name, value):
    if name in _STR_FIELDS:
        return value
    if name in _INT_FIELDS:
        return str(int(value))
    return f"{value:.17g}"


def _writer_rows(results, prefix=()):
    for r in results:
        yield list(prefix) + [_fmt(k, getattr(r, k)) for k in CSV_HEADER]


def emit_csv(results: Sequence[TrialResult], path) -> None:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            w.writerows(_writer_rows(results))
    except OSError as e:
        raise OSError(f"cannot write results to {path}: {e}") from e


def emit_sweep_csv(groups: Sequence[tuple[str, str, Sequence[TrialResult]]], path) -> None:
    """Like :func:`emit_csv` with two leading columns ``sweep_param,sweep_value``."""
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sweep_param", "sweep_value"] + CSV_HEADER)
            for param, value, results in groups:
                w.writerows(_writer_rows(results, (param, value)))
    except OSError as e:
        raise OSError(f"cannot write results to {path}: {e}") from e


def _parse(name, text):
    if name in _STR_FIELDS:
        return text
    if name in _INT_FIELDS:
        return int(text)
    return float(text)


def read_csv(path) -> list[TrialResult]:
    """Parse a file written by :func:`emit_csv` or :func:`emit_sweep_csv`."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [TrialResult(**{k: _parse(k, row[k]) for k in CSV_HEADER}) for row in rows]


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]


def emit_svg_curves(
    curves: Mapping[str, Sequence[tuple[float, float]]],
    path,
    title: str = "Empirical confidence",
    xlabel: str = "error threshold",
    ylabel: str = "fraction of trials with error <= threshold",
    width: int = 640,
    height: int = 420,
) -> None:
    """Write one polyline per curve, with axes, ticks and a legend."""
    left, right, top, bottom = 70, 150, 40, 55
    pw, ph = width - left - right, height - top - bottom
    xs = [x for c in curves.values() for x, _ in c]
    x0, x1 = (min(xs), max(xs)) if xs else (0.0, 1.0)
    if x1 <= x0:
        x1 = x0 + 1.0

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + (1.0 - y) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="14">'
        f"{escape(title)}</text>",
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for i in range(6):
        fx = x0 + (x1 - x0) * i / 5
        fy = i / 5
        out.append(
            f'<line x1="{sx(fx):.2f}" y1="{top + ph}" x2="{sx(fx):.2f}" y2="{top + ph + 5}" '
            f'stroke="black"/><text x="{sx(fx):.2f}" y="{top + ph + 18}" '
            f'text-anchor="middle">{fx:.3g}</text>'
        )
        out.append(
            f'<line x1="{left - 5}" y1="{sy(fy):.2f}" x2="{left}" y2="{sy(fy):.2f}" '
            f'stroke="black"/><text x="{left - 8}" y="{sy(fy) + 4:.2f}" '
            f'text-anchor="end">{fy:.1f}</text>'
        )
    out.append(
        f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle">'
        f"{escape(xlabel)}</text>"
    )
    out.append(
        f'<text x="18" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {top + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    for i, (name, pts) in enumerate(curves.items()):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}">'
            f"<title>{escape(name)}</title></polyline>"
        )
        ly = top + 10 + 20 * i
        lx = left + pw + 15
        out.append(
            f'<g class="legend"><line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2"/><text x="{lx + 26}" y="{ly + 4}">'
            f"{escape(name)}</text></g>"
        )
    out.append("</svg>")
    try:
        Path(path).write_text("\n".join(out) + "\n")
    except OSError as e:
        raise OSError(f"cannot write SVG to {path}: {e}") from e
