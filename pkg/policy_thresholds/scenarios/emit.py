"""
Comparison output: one CSV per reported variable, an SVG figure grid and text tables.
"""

import logging
import os
from enum import Enum
from typing import List, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

from ..constants import REPORTED_VARIABLES, VARIABLE_TITLES
from ..series_store import Frequency, Panel, TimeSeries, format_period, write_csv
from ..util import ErrorCode, PolicyThresholdsException
from .runner import ComparisonResult

logger = logging.getLogger(__name__)

FIGURE_FILE = "figure.svg"

PANEL_COLUMNS = 2
PANEL_WIDTH = 420
PANEL_HEIGHT = 240
PANEL_MARGIN = 48
LEGEND_HEIGHT = 56
LINE_COLORS = ("#1f3b73", "#c0392b", "#2e8b57", "#d68910", "#7d3c98", "#148f96")
LINE_DASHES = ("", "6,3", "2,3", "8,3,2,3")


class OutputFormat(Enum):
    """What `emit` writes"""

    CSV = "csv"
    SVG = "svg"
    BOTH = "both"

    @property
    def csv(self) -> bool:
        """Per-variable CSV files are written"""
        return self in (OutputFormat.CSV, OutputFormat.BOTH)

    @property
    def svg(self) -> bool:
        """The figure grid is written"""
        return self in (OutputFormat.SVG, OutputFormat.BOTH)


def _io_failure(path: str, err: OSError) -> PolicyThresholdsException:
    return PolicyThresholdsException(
        code=ErrorCode.IO_FAILURE, message=f"Cannot write {path}: {err}"
    )


def _ensure_directory(directory: str):
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as err:
        raise _io_failure(directory, err) from err


def variable_panel(result: ComparisonResult, variable: str) -> Panel:
    """One column per variant of a single reported variable"""
    return Panel(
        tuple(
            TimeSeries(variant.name, Frequency.QUARTERLY, variant.start, variant.series[variable])
            for variant in result.variants
        )
    )


def write_variable_csvs(result: ComparisonResult, directory: str) -> List[str]:
    """Write `<variable>.csv` with a date column and one column per variant"""
    _ensure_directory(directory)
    paths = []
    for variable in REPORTED_VARIABLES:
        path = os.path.join(directory, f"{variable}.csv")
        write_csv(variable_panel(result, variable), path)
        paths.append(path)
    return paths


def _bounds(values: Sequence[np.ndarray]) -> Tuple[float, float]:
    low = float(min(np.min(series) for series in values))
    high = float(max(np.max(series) for series in values))
    if high - low < 1e-9:
        low, high = low - 0.5, high + 0.5
    pad = 0.08 * (high - low)
    return low - pad, high + pad


def _panel_svg(result: ComparisonResult, variable: str, left: float, top: float) -> List[str]:
    width = PANEL_WIDTH - 2 * PANEL_MARGIN
    height = PANEL_HEIGHT - 2 * PANEL_MARGIN
    x0, y0 = left + PANEL_MARGIN, top + PANEL_MARGIN
    series = [variant.series[variable] for variant in result.variants]
    low, high = _bounds(series)
    horizon = result.variants[0].horizon
    step = width / max(horizon - 1, 1)

    def y_of(value: float) -> float:
        return y0 + height * (high - value) / (high - low)

    periods = result.variants[0].periods
    parts = [
        f'<g class="panel" id="panel-{variable}">',
        f'<text x="{x0 + width / 2:.1f}" y="{top + PANEL_MARGIN / 2:.1f}" '
        f'text-anchor="middle" font-weight="bold">{escape(VARIABLE_TITLES[variable])}</text>',
        f'<rect x="{x0:.1f}" y="{y0:.1f}" width="{width:.1f}" height="{height:.1f}" '
        'fill="none" stroke="#999"/>',
        f'<text x="{x0 - 4:.1f}" y="{y0 + 4:.1f}" text-anchor="end">{high:.2f}</text>',
        f'<text x="{x0 - 4:.1f}" y="{y0 + height:.1f}" text-anchor="end">{low:.2f}</text>',
        f'<text x="{x0:.1f}" y="{y0 + height + 16:.1f}">{format_period(periods[0])}</text>',
        f'<text x="{x0 + width:.1f}" y="{y0 + height + 16:.1f}" text-anchor="end">'
        f"{format_period(periods[-1])}</text>",
    ]
    if low < 0 < high:
        parts.append(
            f'<line x1="{x0:.1f}" y1="{y_of(0):.1f}" x2="{x0 + width:.1f}" y2="{y_of(0):.1f}" '
            'stroke="#ccc"/>'
        )
    for index, values in enumerate(series):
        points = " ".join(
            f"{x0 + step * quarter:.1f},{y_of(value):.1f}" for quarter, value in enumerate(values)
        )
        dash = LINE_DASHES[index % len(LINE_DASHES)]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(
            f'<polyline points="{points}" fill="none" stroke-width="1.6" '
            f'stroke="{LINE_COLORS[index % len(LINE_COLORS)]}"{dash_attr}/>'
        )
    parts.append("</g>")
    return parts


def _legend_svg(result: ComparisonResult, total_width: float) -> List[str]:
    parts = [
        f'<text x="{total_width / 2:.1f}" y="22" text-anchor="middle" font-size="16">'
        f"{escape(result.title)}</text>"
    ]
    for index, variant in enumerate(result.variants):
        x = PANEL_MARGIN + index * 170
        dash = LINE_DASHES[index % len(LINE_DASHES)]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(
            f'<line x1="{x}" y1="42" x2="{x + 30}" y2="42" stroke-width="2" '
            f'stroke="{LINE_COLORS[index % len(LINE_COLORS)]}"{dash_attr}/>'
        )
        parts.append(f'<text x="{x + 36}" y="46">{escape(variant.name)}</text>')
    return parts


def render_svg(result: ComparisonResult) -> str:
    """Small-multiples grid of the reported variables, one line per variant"""
    rows = -(-len(REPORTED_VARIABLES) // PANEL_COLUMNS)
    total_width = PANEL_COLUMNS * PANEL_WIDTH
    total_height = LEGEND_HEIGHT + rows * PANEL_HEIGHT

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_width}" '
        f'height="{total_height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{total_width}" height="{total_height}" fill="white"/>',
    ]
    parts.extend(_legend_svg(result, total_width))
    for index, variable in enumerate(REPORTED_VARIABLES):
        row, column = divmod(index, PANEL_COLUMNS)
        parts.extend(
            _panel_svg(
                result, variable, column * PANEL_WIDTH, LEGEND_HEIGHT + row * PANEL_HEIGHT
            )
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(result: ComparisonResult, path: str):
    """Write the figure grid"""
    try:
        with open(path, "w", encoding="utf-8") as svg_file:
            svg_file.write(render_svg(result))
    except OSError as err:
        raise _io_failure(path, err) from err


def emit(
    result: ComparisonResult, directory: str, output_format: OutputFormat = OutputFormat.BOTH
) -> List[str]:
    """Write the requested outputs to `directory`; returns the written paths"""
    _ensure_directory(directory)
    paths = []
    if output_format.csv:
        paths.extend(write_variable_csvs(result, directory))
    if output_format.svg:
        figure = os.path.join(directory, FIGURE_FILE)
        write_svg(result, figure)
        paths.append(figure)
    logger.info("Wrote %d files to %s", len(paths), directory)
    return paths


def liftoff_table(result: ComparisonResult) -> str:
    """Variant and liftoff quarter, one row each"""
    width = max(len("variant"), *(len(name) for name in result.names))
    lines = [f"{'variant':<{width}}  liftoff"]
    for name in result.names:
        period = result.liftoff[name]
        lines.append(f"{name:<{width}}  {'none' if period is None else format_period(period)}")
    return "\n".join(lines)


def peak_table(result: ComparisonResult) -> str:
    """Largest absolute deviation from the first variant per reported variable"""
    others = result.names[1:]
    width = max(len("variable"), *(len(name) for name in REPORTED_VARIABLES))
    columns = [max(len(name), 10) for name in others]
    header = f"{'variable':<{width}}" + "".join(
        f"  {name:>{column}}" for name, column in zip(others, columns)
    )
    lines = [f"peak |deviation| from {result.base}", header]
    for variable in REPORTED_VARIABLES:
        lines.append(
            f"{variable:<{width}}"
            + "".join(
                f"  {result.peak_deviations[name][variable]:>{column}.4f}"
                for name, column in zip(others, columns)
            )
        )
    return "\n".join(lines)


def summary(result: ComparisonResult) -> str:
    """Title, liftoff table and peak deviations"""
    sections = [result.title, liftoff_table(result)] if result.title else [liftoff_table(result)]
    if len(result.variants) > 1:
        sections.append(peak_table(result))
    return "\n\n".join(sections)
