"""Minimal deterministic SVG line plots for influence profiles.

Hand-rolled so the output is byte-reproducible (no renderer state, no
timestamps): one polyline per profile, y-axis min/max labels, a shared
x-axis label, one panel per (method, condition) arranged methods-by-rows
and conditions-by-columns with condition titles on the top row and the
method caption under each panel.
"""

import numpy as np

PANEL_W = 420
PANEL_H = 150
MARGIN_L = 72
MARGIN_T = 46
GAP_X = 36
GAP_Y = 58
CAPTION_H = 20


def _fmt(x):
    return f"{x:.2f}"


def _panel(values, x0, y0, caption):
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    vmin, vmax = float(values.min()), float(values.max())
    span = vmax - vmin
    if span == 0:
        vmin, vmax, span = vmin - 1.0, vmax + 1.0, 2.0
    xs = x0 + np.arange(n) * (PANEL_W / max(n - 1, 1))
    ys = y0 + PANEL_H - (values - vmin) / span * PANEL_H
    points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
    parts = [
        f'<rect x="{x0}" y="{y0}" width="{PANEL_W}" height="{PANEL_H}" '
        'fill="none" stroke="#888" stroke-width="1"/>',
        f'<polyline points="{points}" fill="none" stroke="#1f4e8c" stroke-width="1.5"/>',
        f'<text x="{x0 - 6}" y="{y0 + 10}" text-anchor="end" font-size="11">{vmax:.3g}</text>',
        f'<text x="{x0 - 6}" y="{y0 + PANEL_H}" text-anchor="end" font-size="11">{vmin:.3g}</text>',
        f'<text x="{x0 + PANEL_W / 2:.1f}" y="{y0 + PANEL_H + 16}" '
        f'text-anchor="middle" font-size="12" font-style="italic">{caption}</text>',
    ]
    return parts


def influence_grid_svg(rows, condition_titles, x_label="sample index",
                       y_label="influence value"):
    """Render a grid of influence profiles.

    ``rows`` is a list of ``(method_caption, [values, ...])`` with one
    value array per condition; ``condition_titles`` labels the columns.
    Returns the SVG document as a string.
    """
    ncol = len(condition_titles)
    nrow = len(rows)
    width = MARGIN_L + ncol * PANEL_W + (ncol - 1) * GAP_X + 20
    height = MARGIN_T + nrow * (PANEL_H + CAPTION_H + GAP_Y)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for c, title in enumerate(condition_titles):
        cx = MARGIN_L + c * (PANEL_W + GAP_X) + PANEL_W / 2
        parts.append(
            f'<text x="{cx:.1f}" y="24" text-anchor="middle" '
            f'font-size="16" font-weight="bold">{title}</text>'
        )
    for r, (caption, profiles) in enumerate(rows):
        y0 = MARGIN_T + r * (PANEL_H + CAPTION_H + GAP_Y)
        for c, values in enumerate(profiles):
            x0 = MARGIN_L + c * (PANEL_W + GAP_X)
            parts.extend(_panel(values, x0, y0, caption))
    parts.append(
        f'<text x="{width / 2:.1f}" y="{height - 8}" text-anchor="middle" '
        f'font-size="12">{x_label}</text>'
    )
    parts.append(
        f'<text x="16" y="{height / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {height / 2:.1f})">{y_label}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
