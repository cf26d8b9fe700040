"""Text artifacts of adaptation runs: CSV reports and SVG scatter plots.

Functions:
    format_value: Render a number with 9 significant digits.
    write_report: Write the evaluation rows of a report as CSV.
    write_sweep: Write several reports as one CSV of per-run stanzas.
    write_ranking: Write a layer ranking as CSV.
    render_svg: Render labeled sample sets as an SVG scatter plot.
    write_svg: Write render_svg output to a file.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence, TextIO, Union
import csv
import math
import pathlib

import numpy as np

from .sds import REPORT_COLUMNS, AdaptationReport, LayerRanking

__all__ = (
    "PALETTE",
    "format_value",
    "render_svg",
    "write_ranking",
    "write_report",
    "write_svg",
    "write_sweep",
)


VIEWPORT = 5.0
CANVAS = 500
PIXELS_PER_UNIT = CANVAS / (2 * VIEWPORT)
RADIUS = 2.0
PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")


def format_value(value: Union[int, float]) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if math.isnan(value):
        return "nan"
    return format(float(value), ".9g")


def _write_rows(
    stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[Union[int, float, str]]]
) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else format_value(v) for v in row])


def write_report(path: Union[pathlib.Path, TextIO], report: AdaptationReport) -> None:
    """Write one header line and one line per evaluation row."""
    _write_to(path, REPORT_COLUMNS, (row.values() for row in report.rows))


def write_sweep(
    path: Union[pathlib.Path, TextIO],
    param: str,
    runs: Sequence[tuple[str, AdaptationReport]],
) -> None:
    """Write one stanza per run, separated by blank lines.

    A stanza opens with a `# key = value` line naming the swept setting,
    followed by the run's report in the write_report layout.

    Args:
        path: The destination file or stream.
        param: The swept key.
        runs: (value, report) pairs in sweep order.
    """
    _emit(path, lambda stream: _write_stanzas(stream, param, runs))


def _write_stanzas(
    stream: TextIO, param: str, runs: Sequence[tuple[str, AdaptationReport]]
) -> None:
    for index, (value, report) in enumerate(runs):
        if index:
            stream.write("\n")
        stream.write(f"# {param} = {value}\n")
        _write_rows(stream, REPORT_COLUMNS, (row.values() for row in report.rows))


def write_ranking(path: Union[pathlib.Path, TextIO], ranking: LayerRanking) -> None:
    """Write `rank,layer,magnitude` for every layer, most moved first."""
    rows = (
        (rank, layer, ranking.magnitudes[layer - 1])
        for rank, layer in enumerate(ranking.order, start=1)
    )
    _write_to(path, ("rank", "layer", "magnitude"), rows)


def _write_to(path: Union[pathlib.Path, TextIO], header, rows) -> None:
    _emit(path, lambda stream: _write_rows(stream, header, rows))


def _emit(path: Union[pathlib.Path, TextIO], write: Callable[[TextIO], None]) -> None:
    if hasattr(path, "write"):
        write(path)
        return
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as stream:
        write(stream)


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def _px(x: float) -> str:
    return format((x + VIEWPORT) * PIXELS_PER_UNIT, ".2f")


def _py(y: float) -> str:
    return format((VIEWPORT - y) * PIXELS_PER_UNIT, ".2f")


def render_svg(sets: Sequence[tuple[str, np.ndarray]], title: str = "") -> str:
    """Render sample sets over the square [-5, 5] x [-5, 5].

    Every sample is one `<circle>`, drawn set by set in the given order; the
    frame, axes and legend use other elements, so the circle count equals the
    number of samples. Identical inputs render identical text.
    """
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" '
        f'viewBox="0 0 {CANVAS} {CANVAS}">',
        f'<rect x="0" y="0" width="{CANVAS}" height="{CANVAS}" fill="white" stroke="black"/>',
        f'<line x1="{_px(-VIEWPORT)}" y1="{_py(0)}" x2="{_px(VIEWPORT)}" y2="{_py(0)}" '
        'stroke="#cccccc"/>',
        f'<line x1="{_px(0)}" y1="{_py(-VIEWPORT)}" x2="{_px(0)}" y2="{_py(VIEWPORT)}" '
        'stroke="#cccccc"/>',
    ]
    if title:
        parts.append(f'<text x="8" y="16" font-size="12">{_escape(title)}</text>')
    for index, (label, points) in enumerate(sets):
        color = PALETTE[index % len(PALETTE)]
        parts.append(f'<g fill="{color}" fill-opacity="0.6">')
        for x, y in np.asarray(points, dtype=np.float64).reshape(-1, 2):
            parts.append(f'<circle cx="{_px(x)}" cy="{_py(y)}" r="{RADIUS}"/>')
        parts.append("</g>")
    for index, (label, _) in enumerate(sets):
        color = PALETTE[index % len(PALETTE)]
        top = 28 + 16 * index
        parts.append(
            f'<rect x="{CANVAS - 150}" y="{top}" width="10" height="10" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{CANVAS - 134}" y="{top + 9}" font-size="11">{_escape(label)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path: pathlib.Path, sets: Sequence[tuple[str, np.ndarray]], title: str = "") -> None:
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_svg(sets, title))

