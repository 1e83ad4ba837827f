"""Static SVG heatmaps of SVP rates over the (n, d) grid.

Output is deterministic text: same summaries and spec give byte-identical
SVG. The color ramp interpolates linearly in RGB between two documented hex
stops, so fills are monotone in the rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

from .errors import EmptySelection

LOW_COLOR = "#f7fbff"
HIGH_COLOR = "#08306b"


@dataclass(frozen=True)
class HeatmapSpec:
    """Rendering parameters: cell size in pixels, color stops, overlays.

    `overlays` holds (label, n -> d) pairs drawn as polylines over the grid.
    """

    cell_width: int = 14
    cell_height: int = 6
    low_color: str = LOW_COLOR
    high_color: str = HIGH_COLOR
    overlays: tuple = ()


def _hex_to_rgb(color: str) -> tuple[int, int, int]:
    value = color.lstrip("#")
    return tuple(int(value[i : i + 2], 16) for i in (0, 2, 4))


def _ramp(rate: float, low: str, high: str) -> str:
    lo = _hex_to_rgb(low)
    hi = _hex_to_rgb(high)
    t = min(1.0, max(0.0, rate))
    channels = tuple(round(l + t * (h - l)) for l, h in zip(lo, hi))
    return "#{:02x}{:02x}{:02x}".format(*channels)


def _ticks(values: list[float], count: int = 6) -> list[float]:
    if len(values) <= count:
        return list(values)
    step = (len(values) - 1) / (count - 1)
    return [values[round(i * step)] for i in range(count)]


def render_heatmap_svg(summaries, spec: HeatmapSpec | None = None) -> str:
    """Render one rect per cell, colored by rate, with overlay curves.

    Axis mapping is linear in the values of n (x) and d (y, increasing
    upward), so overlays drawn from raw (n, d) functions line up with cells.
    """
    spec = spec or HeatmapSpec()
    cells = sorted(summaries, key=lambda s: (s.n, s.d))
    if not cells:
        raise EmptySelection("no summaries to render")
    n_values = sorted({s.n for s in cells})
    d_values = sorted({s.d for s in cells})
    n_lo, n_hi = min(n_values), max(n_values)
    d_lo, d_hi = min(d_values), max(d_values)
    n_span = max(n_hi - n_lo, 1)
    d_span = max(d_hi - d_lo, 1)

    plot_w = max(len(n_values) * spec.cell_width, 2 * spec.cell_width)
    plot_h = max(len(d_values) * spec.cell_height, 2 * spec.cell_height)
    left, top, right, bottom = 64, 24, 140, 48
    width = left + plot_w + right
    height = top + plot_h + bottom

    def x_of(n: float) -> float:
        return left + (n - n_lo) / n_span * (plot_w - spec.cell_width) + spec.cell_width / 2

    def y_of(d: float) -> float:
        return (
            top
            + plot_h
            - spec.cell_height / 2
            - (d - d_lo) / d_span * (plot_h - spec.cell_height)
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    for s in cells:
        cx, cy = x_of(s.n), y_of(s.d)
        fill = _ramp(s.rate, spec.low_color, spec.high_color)
        parts.append(
            f'<rect x="{cx - spec.cell_width / 2:.2f}" y="{cy - spec.cell_height / 2:.2f}" '
            f'width="{spec.cell_width:.2f}" height="{spec.cell_height:.2f}" fill="{fill}"/>'
        )

    overlay_colors = ("#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
    for index, (label, curve) in enumerate(spec.overlays):
        color = overlay_colors[index % len(overlay_colors)]
        points = []
        for n in n_values:
            d = curve(n)
            if d_lo - d_span * 0.05 <= d <= d_hi + d_span * 0.05:
                points.append(f"{x_of(n):.2f},{y_of(d):.2f}")
        if len(points) >= 2:
            parts.append(
                f'<polyline points="{" ".join(points)}" fill="none" '
                f'stroke="{color}" stroke-width="1.5"/>'
            )
        legend_y = top + 72 + 16 * index
        parts.append(
            f'<line x1="{left + plot_w + 12}" y1="{legend_y:.2f}" '
            f'x2="{left + plot_w + 36}" y2="{legend_y:.2f}" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{left + plot_w + 40}" y="{legend_y + 4:.2f}" font-size="10">'
            f"{escape(str(label))}</text>"
        )

    # color legend: discrete ramp swatches from rate 0 (bottom) to 1 (top)
    swatches = 12
    legend_h = 60
    legend_x = left + plot_w + 12
    for k in range(swatches):
        rate = k / (swatches - 1)
        sw_y = top + legend_h - (k + 1) * legend_h / swatches
        parts.append(
            f'<rect x="{legend_x}" y="{sw_y:.2f}" width="12" '
            f'height="{legend_h / swatches:.2f}" '
            f'fill="{_ramp(rate, spec.low_color, spec.high_color)}"/>'
        )
    parts.append(f'<text x="{legend_x + 16}" y="{top + 8}" font-size="10">rate 1</text>')
    parts.append(f'<text x="{legend_x + 16}" y="{top + legend_h}" font-size="10">rate 0</text>')

    axis_y = top + plot_h + 1
    parts.append(
        f'<line x1="{left}" y1="{axis_y}" x2="{left + plot_w}" y2="{axis_y}" stroke="#000000"/>'
    )
    parts.append(
        f'<line x1="{left - 1}" y1="{top}" x2="{left - 1}" y2="{axis_y}" stroke="#000000"/>'
    )
    for n in _ticks(n_values):
        parts.append(
            f'<text x="{x_of(n):.2f}" y="{axis_y + 14}" font-size="10" '
            f'text-anchor="middle">{n}</text>'
        )
    for d in _ticks(d_values):
        parts.append(
            f'<text x="{left - 6}" y="{y_of(d) + 3:.2f}" font-size="10" '
            f'text-anchor="end">{d}</text>'
        )
    parts.append(
        f'<text x="{left + plot_w / 2:.2f}" y="{height - 10}" font-size="12" '
        f'text-anchor="middle">n</text>'
    )
    parts.append(f'<text x="16" y="{top + plot_h / 2:.2f}" font-size="12">d</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
