"""Deterministic figure emitters: word clouds, valence histograms and
information-bin charts, all as SVG 1.1 plus machine-readable payloads.

Layout geometry uses a fixed per-glyph width model (0.6 em per
grapheme), not real font metrics; collision guarantees apply to these
model boxes. Given identical inputs and seed the SVG output is
byte-identical.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

from .errors import DataError
from .infotheory import InfoBin, rescale_for_display
from .lexicon import grapheme_length
from .stats import (
    WeightedDistribution,
    histogram,
    histogram_edges,
    pos_neg_ratio,
    weighted_median,
)

GLYPH_WIDTH_EM = 0.6
MAX_SPIRAL_STEPS = 10_000


@dataclass(frozen=True)
class CloudWord:
    word: str
    font_size: float
    color: tuple[int, int, int]
    x: float
    y: float
    rotation: int  # 0 or 90 degrees

    def box(self) -> tuple[float, float, float, float]:
        """Axis-aligned model bounding box (x0, y0, x1, y1)."""
        w = GLYPH_WIDTH_EM * self.font_size * grapheme_length(self.word)
        h = self.font_size
        if self.rotation == 90:
            w, h = h, w
        return (self.x - w / 2, self.y - h / 2, self.x + w / 2, self.y + h / 2)


@dataclass(frozen=True)
class WordCloudFigure:
    svg: str
    words: tuple[CloudWord, ...]
    skipped: tuple[str, ...]
    width: float
    height: float

    def geometry(self) -> dict:
        return {
            "canvas": {"width": self.width, "height": self.height},
            "words": [
                {
                    "word": w.word,
                    "font_size": w.font_size,
                    "color": list(w.color),
                    "x": w.x,
                    "y": w.y,
                    "rotation": w.rotation,
                    "box": list(w.box()),
                }
                for w in self.words
            ],
            "skipped": list(self.skipped),
        }


def valence_color(v: float) -> tuple[int, int, int]:
    """Linear hue ramp: -1 -> pure red, 0 -> yellow midpoint, +1 -> pure green."""
    if not -1.0 <= v <= 1.0:
        raise DataError(f"valence must be in [-1, 1], got {v}")
    hue = (v + 1.0) * 60.0  # degrees along the red..green segment
    if hue <= 60.0:
        return (255, round(255 * hue / 60.0), 0)
    return (round(255 * (120.0 - hue) / 60.0), 255, 0)


def color_hex(rgb: tuple[int, int, int]) -> str:
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def boxes_overlap(a: tuple[float, ...], b: tuple[float, ...]) -> bool:
    """Strict interior intersection; shared edges do not count."""
    return a[0] < b[2] and b[0] < a[2] and a[1] < b[3] and b[1] < a[3]


def _fits_canvas(box: tuple[float, ...], width: float, height: float) -> bool:
    return box[0] >= 0 and box[1] >= 0 and box[2] <= width and box[3] <= height


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def wordcloud(
    entries: Sequence[tuple[str, float, float]],
    width: float = 800.0,
    height: float = 500.0,
    seed: int = 0,
    size_exponent: float = 0.5,
    max_font: float | None = None,
    vertical_fraction: float = 0.1,
) -> WordCloudFigure:
    """Word cloud over (word, frequency, valence) entries.

    Font size is max_font * (f/f_max)**size_exponent, so with the 0.5
    default the rendered area is proportional to frequency. When
    max_font is not given it is chosen so the model boxes together
    claim ~45% of the canvas. Words go on an outward spiral in
    descending frequency order with rectangle collision rejection; a
    word that finds no spot within MAX_SPIRAL_STEPS is dropped and
    listed in an SVG comment.
    """
    if not entries:
        raise DataError("word cloud needs at least one entry")
    if width <= 0 or height <= 0:
        raise DataError(f"canvas must be positive, got {width}x{height}")
    for word, freq, _ in entries:
        if freq <= 0:
            raise DataError(f"frequency for {word!r} must be positive, got {freq}")
    if max_font is None:
        f_top = max(e[1] for e in entries)
        demand = sum(
            GLYPH_WIDTH_EM * grapheme_length(word) * (freq / f_top) ** (2 * size_exponent)
            for word, freq, _ in entries
        )
        max_font = min(min(width, height) / 4.0, math.sqrt(0.45 * width * height / demand))

    rng = random.Random(seed)
    ordered = sorted(entries, key=lambda e: -e[1])
    f_max = ordered[0][1]
    cx, cy = width / 2.0, height / 2.0
    reach = math.hypot(width, height) / 2.0

    placed: list[CloudWord] = []
    boxes: list[tuple[float, float, float, float]] = []
    skipped: list[str] = []
    for word, freq, valence in ordered:
        size = max_font * (freq / f_max) ** size_exponent
        color = valence_color(valence)
        rotation = 90 if rng.random() < vertical_fraction else 0
        theta0 = rng.uniform(0.0, 2.0 * math.pi)
        # radial advance of half the word's height per turn: large words
        # clear the crowded center in few probes, small ones pack densely
        pitch = max(2.0, 0.5 * size)
        spot = None
        for step in range(MAX_SPIRAL_STEPS):
            theta = theta0 + 0.35 * step
            radius = pitch * 0.35 * step / (2.0 * math.pi)
            if radius > reach:
                break
            candidate = CloudWord(
                word=word,
                font_size=size,
                color=color,
                x=cx + radius * math.cos(theta),
                y=cy + radius * math.sin(theta),
                rotation=rotation,
            )
            box = candidate.box()
            if _fits_canvas(box, width, height) and not any(
                boxes_overlap(box, other) for other in boxes
            ):
                spot = candidate
                break
        if spot is None:
            skipped.append(word)
        else:
            placed.append(spot)
            boxes.append(spot.box())

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
    ]
    if skipped:
        lines.append(f"<!-- skipped (no collision-free spot): {escape(' '.join(skipped))} -->")
    for w in placed:
        transform = f' transform="rotate(90 {_fmt(w.x)} {_fmt(w.y)})"' if w.rotation else ""
        lines.append(
            f'<text x="{_fmt(w.x)}" y="{_fmt(w.y)}" font-size="{_fmt(w.font_size)}" '
            f'font-family="sans-serif" fill="{color_hex(w.color)}" text-anchor="middle" '
            f'dominant-baseline="central"{transform}>{escape(w.word)}</text>'
        )
    lines.append("</svg>")
    return WordCloudFigure(
        svg="\n".join(lines) + "\n",
        words=tuple(placed),
        skipped=tuple(skipped),
        width=width,
        height=height,
    )


# -- valence histogram figure --------------------------------------------------


def _histogram_panel(payload: dict, x0: float, y0: float, w: float, h: float, title: str) -> list[str]:
    masses = payload["masses"]
    bins = len(masses)
    top = max(masses) or 1.0
    bar_w = w / bins
    parts = [f'<text x="{_fmt(x0 + w / 2)}" y="{_fmt(y0 - 8)}" font-size="12" '
             f'font-family="sans-serif" text-anchor="middle">{escape(title)}</text>']
    edges = payload["edges"]
    for i, mass in enumerate(masses):
        bar_h = h * mass / top
        center = (edges[i] + edges[i + 1]) / 2.0
        fill = color_hex(valence_color(center))
        parts.append(
            f'<rect x="{_fmt(x0 + i * bar_w)}" y="{_fmt(y0 + h - bar_h)}" '
            f'width="{_fmt(bar_w)}" height="{_fmt(bar_h)}" fill="{fill}" stroke="none"/>'
        )
    median_x = x0 + (payload["median"] + 1.0) / 2.0 * w
    parts.append(
        f'<line x1="{_fmt(median_x)}" y1="{_fmt(y0)}" x2="{_fmt(median_x)}" '
        f'y2="{_fmt(y0 + h)}" stroke="#000000" stroke-dasharray="4 3"/>'
    )
    parts.append(
        f'<text x="{_fmt(x0 + w - 4)}" y="{_fmt(y0 + 14)}" font-size="11" '
        f'font-family="sans-serif" text-anchor="end">+/- ratio '
        f'{payload["pos_neg_ratio"]:.3f}</text>'
    )
    parts.append(
        f'<line x1="{_fmt(x0)}" y1="{_fmt(y0 + h)}" x2="{_fmt(x0 + w)}" '
        f'y2="{_fmt(y0 + h)}" stroke="#333333"/>'
    )
    return parts


def histogram_payload(
    unweighted: WeightedDistribution, weighted: WeightedDistribution, bins: int
) -> dict:
    """Exact numbers behind the histogram figure (also what analyze persists)."""
    return {
        "bins": bins,
        "edges": histogram_edges(bins),
        "unweighted": {
            "masses": histogram(unweighted, bins),
            "median": weighted_median(unweighted),
            "pos_neg_ratio": pos_neg_ratio(unweighted),
        },
        "weighted": {
            "masses": histogram(weighted, bins),
            "median": weighted_median(weighted),
            "pos_neg_ratio": pos_neg_ratio(weighted),
        },
    }


def histogram_figure(
    unweighted: WeightedDistribution,
    weighted: WeightedDistribution,
    bins: int,
    width: float = 720.0,
    height: float = 300.0,
) -> tuple[str, dict]:
    """Side-by-side normalized valence histograms with dashed median markers.

    Returns (svg, payload); the payload carries the exact masses,
    medians and positive/negative area ratios drawn in the figure.
    """
    payload = histogram_payload(unweighted, weighted, bins)
    panel_w = (width - 60.0) / 2.0
    panel_h = height - 50.0
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
    ]
    for panel, x0, title in (
        (payload["unweighted"], 20.0, "lexicon"),
        (payload["weighted"], 40.0 + panel_w, "frequency-weighted"),
    ):
        panel_payload = dict(panel)
        panel_payload["edges"] = payload["edges"]
        lines.extend(_histogram_panel(panel_payload, x0, 30.0, panel_w, panel_h, title))
    lines.append("</svg>")
    return "\n".join(lines) + "\n", payload


# -- information-bin figure ------------------------------------------------------


def info_bins_figure(
    bins_by_size: Mapping[int, Sequence[InfoBin]],
    width: float = 720.0,
    row_height: float = 120.0,
) -> str:
    """One bar row per context size; bar length tracks display-rescaled
    mean information, fill color the bin's mean valence, with a vertical
    gradient spread of one standard error to either side."""
    if not bins_by_size:
        raise DataError("no bins to draw")
    sizes = sorted(bins_by_size)
    lines: list[str] = []
    defs: list[str] = []
    height = 30.0 + row_height * len(sizes)
    for row, size in enumerate(sizes):
        row_bins = list(bins_by_size[size])
        if not row_bins:
            raise DataError(f"empty bin list for context size {size}")
        scaled = (
            rescale_for_display([b.mean_info for b in row_bins])
            if len({b.mean_info for b in row_bins}) > 1
            else [1.0] * len(row_bins)
        )
        y0 = 20.0 + row * row_height
        plot_h = row_height - 40.0
        bar_w = (width - 80.0) / len(row_bins)
        label = "self-information" if size == 1 else f"context size {size}"
        lines.append(
            f'<text x="12" y="{_fmt(y0 + plot_h / 2)}" font-size="11" '
            f'font-family="sans-serif">{escape(label)}</text>'
        )
        for i, (b, s) in enumerate(zip(row_bins, scaled)):
            gid = f"grad-{size}-{i}"
            lo = valence_color(max(-1.0, b.mean_valence - b.valence_stderr))
            mid = valence_color(b.mean_valence)
            hi = valence_color(min(1.0, b.mean_valence + b.valence_stderr))
            defs.append(
                f'<linearGradient id="{gid}" x1="0" y1="1" x2="0" y2="0">'
                f'<stop offset="0" stop-color="{color_hex(lo)}"/>'
                f'<stop offset="0.5" stop-color="{color_hex(mid)}"/>'
                f'<stop offset="1" stop-color="{color_hex(hi)}"/>'
                f"</linearGradient>"
            )
            bar_h = plot_h * (0.1 + 0.9 * s)
            x = 80.0 + i * bar_w
            lines.append(
                f'<rect x="{_fmt(x + 1)}" y="{_fmt(y0 + plot_h - bar_h)}" '
                f'width="{_fmt(bar_w - 2)}" height="{_fmt(bar_h)}" fill="url(#{gid})"/>'
            )
        lines.append(
            f'<line x1="80" y1="{_fmt(y0 + plot_h)}" x2="{_fmt(width - 10)}" '
            f'y2="{_fmt(y0 + plot_h)}" stroke="#333333"/>'
        )
    doc = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        "<defs>",
        *defs,
        "</defs>",
        *lines,
        "</svg>",
    ]
    return "\n".join(doc) + "\n"
