"""Deterministic SVG charts (fixed viewBox, fixed element order, fixed number format)."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH = 640
HEIGHT = 400
MARGIN = 50


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _svg(body: list[str], title: str) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="10">'
    )
    parts = [head, f"<title>{escape(title)}</title>", f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
    parts += body
    parts.append(f'<text x="{WIDTH / 2}" y="16" text-anchor="middle" font-size="12">{escape(title)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _shade(value: float, vmax: float) -> str:
    t = 0.0 if vmax <= 0 else min(1.0, value / vmax)
    level = int(round(255 * (1 - t)))
    return f"rgb(255,{level},{level})"


def heat_map_svg(matrix, mean_class=None, title: str = "class occupation by step") -> str:
    """Cells for (class row, step column); optional polyline through the mean class."""
    m = np.asarray(matrix)
    rows, cols = m.shape
    cw = (WIDTH - 2 * MARGIN) / max(cols, 1)
    ch = (HEIGHT - 2 * MARGIN) / max(rows, 1)
    vmax = float(np.log1p(m).max()) if m.size else 0.0
    body = []
    for r in range(rows):
        for c in range(cols):
            if m[r, c] > 0:
                y = HEIGHT - MARGIN - (r + 1) * ch
                body.append(
                    f'<rect x="{_fmt(MARGIN + c * cw)}" y="{_fmt(y)}" width="{_fmt(cw)}" height="{_fmt(ch)}" '
                    f'fill="{_shade(float(np.log1p(m[r, c])), vmax)}"><title>C{r} step {c}: {int(m[r, c])}</title></rect>'
                )
    if mean_class is not None:
        pts = [
            f"{_fmt(MARGIN + (c + 0.5) * cw)},{_fmt(HEIGHT - MARGIN - (v + 0.5) * ch)}"
            for c, v in enumerate(mean_class)
            if np.isfinite(v)
        ]
        if pts:
            body.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="black" stroke-width="1.5"/>')
    body += _axes("step", "class")
    return _svg(body, title)


def histogram_svg(pairs, title: str = "steps to the maximally entangled class") -> str:
    """Bars for ``(value, count)`` pairs."""
    pairs = sorted(pairs)
    if not pairs:
        return _svg(_axes("steps", "count"), title)
    lo, hi = pairs[0][0], pairs[-1][0]
    span = hi - lo + 1
    top = max(c for _, c in pairs)
    bw = (WIDTH - 2 * MARGIN) / span
    body = []
    for v, c in pairs:
        h = (HEIGHT - 2 * MARGIN) * c / top
        x = MARGIN + (v - lo) * bw
        body.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(HEIGHT - MARGIN - h)}" width="{_fmt(bw * 0.9)}" height="{_fmt(h)}" '
            f'fill="steelblue"><title>{v}: {c}</title></rect>'
        )
        body.append(f'<text x="{_fmt(x + bw * 0.45)}" y="{HEIGHT - MARGIN + 12}" text-anchor="middle">{v}</text>')
    body += _axes("steps", "count")
    return _svg(body, title)


def grid_svg(grid, row_values, col_values, title: str = "fraction of coefficients at first arrival") -> str:
    """Annotated heat map of a small 2-D grid."""
    g = np.asarray(grid, dtype=float)
    rows, cols = g.shape
    cw = (WIDTH - 2 * MARGIN) / cols
    ch = (HEIGHT - 2 * MARGIN) / rows
    vmax = float(np.nanmax(g)) if g.size else 0.0
    body = []
    for r in range(rows):
        for c in range(cols):
            x = MARGIN + c * cw
            y = MARGIN + r * ch
            body.append(f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(cw)}" height="{_fmt(ch)}" fill="{_shade(g[r, c], vmax)}"/>')
            body.append(f'<text x="{_fmt(x + cw / 2)}" y="{_fmt(y + ch / 2 + 3)}" text-anchor="middle">{g[r, c]:.2f}</text>')
    for c, v in enumerate(col_values):
        body.append(f'<text x="{_fmt(MARGIN + (c + 0.5) * cw)}" y="{MARGIN - 6}" text-anchor="middle">{v}</text>')
    for r, v in enumerate(row_values):
        body.append(f'<text x="{MARGIN - 8}" y="{_fmt(MARGIN + (r + 0.5) * ch + 3)}" text-anchor="end">{v}</text>')
    return _svg(body, title)


def stacked_bars_svg(rows, title: str = "patterns by length and class") -> str:
    """Stacked bars from ``(length, class_label, count)`` rows."""
    rows = sorted(rows)
    lengths = sorted({r[0] for r in rows})
    classes = sorted({r[1] for r in rows})
    totals = {L: sum(c for l, _, c in rows if l == L) for L in lengths}
    top = max(totals.values()) if totals else 1
    bw = (WIDTH - 2 * MARGIN) / max(len(lengths), 1)
    palette = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"]
    body = []
    for k, L in enumerate(lengths):
        base = HEIGHT - MARGIN
        for cls in classes:
            c = next((cnt for l, lab, cnt in rows if l == L and lab == cls), 0)
            if not c:
                continue
            h = (HEIGHT - 2 * MARGIN) * c / top
            base -= h
            body.append(
                f'<rect x="{_fmt(MARGIN + k * bw)}" y="{_fmt(base)}" width="{_fmt(bw * 0.85)}" height="{_fmt(h)}" '
                f'fill="{palette[cls % len(palette)]}"><title>L={L} C{cls}: {c}</title></rect>'
            )
        body.append(f'<text x="{_fmt(MARGIN + (k + 0.42) * bw)}" y="{HEIGHT - MARGIN + 12}" text-anchor="middle">{L}</text>')
    body += _axes("length", "patterns")
    return _svg(body, title)


def _axes(xlabel: str, ylabel: str) -> list[str]:
    return [
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="14" y="{HEIGHT / 2}" text-anchor="middle" transform="rotate(-90 14 {HEIGHT / 2})">{escape(ylabel)}</text>',
    ]
