"""Minimal SVG writers for diagnostics: persistence diagrams, grid heatmaps, box plots."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#d62728", "#1f77b4", "#e6b800", "#222222", "#2ca02c", "#9467bd")


def _num(x: float) -> str:
    return f"{x:.2f}"


def _doc(width: int, height: int, body: list) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">')
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *body, "</svg>"]) + "\n"


def diagram_svg(diags: dict, title: str = "", size: int = 320) -> str:
    """Scatter of (birth, death) for several diagrams; essential classes drawn on a top band."""
    pad = 40
    fin = [d.finite for d in diags.values() if len(d.finite)]
    hi = max([float(f.max()) for f in fin] + [1.0])
    lo = min([float(f.min()) for f in fin] + [0.0])
    span = (hi - lo) or 1.0
    inner = size - 2 * pad

    def sx(v):
        return pad + (v - lo) / span * inner

    def sy(v):
        return size - pad - (v - lo) / span * inner

    body = [f'<text x="{size / 2}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>',
            f'<line x1="{_num(sx(lo))}" y1="{_num(sy(lo))}" x2="{_num(sx(hi))}" y2="{_num(sy(hi))}" '
            'stroke="#999" stroke-dasharray="4 3"/>',
            f'<line x1="{pad}" y1="{pad - 10}" x2="{size - pad}" y2="{pad - 10}" stroke="#ccc"/>']
    for n, (name, d) in enumerate(diags.items()):
        color = PALETTE[n % len(PALETTE)]
        for b, e in d.finite:
            body.append(f'<circle cx="{_num(sx(b))}" cy="{_num(sy(e))}" r="3" fill="{color}" fill-opacity="0.7"/>')
        for b in d.essential:
            body.append(f'<path d="M{_num(sx(b))},{pad - 14} l4,8 l-8,0 z" fill="{color}"/>')
        body.append(f'<text x="{size - pad}" y="{size - pad - 14 * n - 6}" text-anchor="end" '
                    f'font-size="11" fill="{color}">{escape(str(name))}</text>')
    body.append(f'<text x="{size / 2}" y="{size - 8}" text-anchor="middle" font-size="11">birth</text>')
    body.append(f'<text x="12" y="{size / 2}" font-size="11" transform="rotate(-90 12 {size / 2})">death</text>')
    return _doc(size, size, body)


def heatmap_svg(values, row_labels, col_labels, title: str = "", categorical: bool = False,
                cell: int = 32) -> str:
    """Grid of cells; categorical values pick palette colours, real values a grey ramp with labels."""
    V = np.asarray(values, dtype=float)
    rows, cols = V.shape
    left, top = 60, 40
    width, height = left + cols * cell + 20, top + rows * cell + 50
    body = [f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>']
    vmin, vmax = (np.nanmin(V), np.nanmax(V)) if np.isfinite(V).any() else (0.0, 1.0)
    for r in range(rows):
        for c in range(cols):
            v = V[r, c]
            x, y = left + c * cell, top + (rows - 1 - r) * cell
            if math.isnan(v):
                fill = "#eeeeee"
            elif categorical:
                fill = PALETTE[int(v) % len(PALETTE)]
            else:
                t = 0.0 if vmax == vmin else (v - vmin) / (vmax - vmin)
                g = int(round(235 - 200 * t))
                fill = f"rgb({g},{g},{g})"
            body.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}" stroke="white"/>')
            if not categorical and not math.isnan(v):
                ink = "white" if (vmax > vmin and (v - vmin) / (vmax - vmin) > 0.5) else "black"
                body.append(f'<text x="{x + cell / 2}" y="{y + cell / 2 + 4}" text-anchor="middle" '
                            f'font-size="9" fill="{ink}">{v:.2f}</text>')
    for r, lab in enumerate(row_labels):
        y = top + (rows - 1 - r) * cell + cell / 2 + 4
        body.append(f'<text x="{left - 6}" y="{y}" text-anchor="end" font-size="10">{escape(str(lab))}</text>')
    for c, lab in enumerate(col_labels):
        x = left + c * cell + cell / 2
        body.append(f'<text x="{x}" y="{top + rows * cell + 14}" text-anchor="middle" '
                    f'font-size="10">{escape(str(lab))}</text>')
    return _doc(width, height, body)


def boxplot_svg(groups: dict, title: str = "", ylabel: str = "accuracy") -> str:
    """One box (quartiles, median, min-max whiskers) per named sample."""
    names = list(groups)
    width, height, pad = 80 + 90 * len(names), 320, 40
    allv = np.concatenate([np.asarray(v, dtype=float) for v in groups.values()]) if names else np.zeros(1)
    lo, hi = float(allv.min()), float(allv.max())
    if hi == lo:
        lo, hi = lo - 0.05, hi + 0.05

    def sy(v):
        return height - pad - (v - lo) / (hi - lo) * (height - 2 * pad)

    body = [f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>',
            f'<text x="12" y="{height / 2}" font-size="11" transform="rotate(-90 12 {height / 2})">'
            f'{escape(ylabel)}</text>']
    for tick in np.linspace(lo, hi, 5):
        body.append(f'<text x="{pad + 20}" y="{_num(sy(tick) + 4)}" text-anchor="end" font-size="9">{tick:.3f}</text>')
    for n, name in enumerate(names):
        v = np.asarray(groups[name], dtype=float)
        q1, med, q3 = np.percentile(v, [25, 50, 75])
        x = 70 + 90 * n
        color = PALETTE[n % len(PALETTE)]
        body += [
            f'<line x1="{x + 25}" y1="{_num(sy(v.min()))}" x2="{x + 25}" y2="{_num(sy(v.max()))}" stroke="#444"/>',
            f'<rect x="{x}" y="{_num(sy(q3))}" width="50" height="{_num(max(sy(q1) - sy(q3), 1))}" '
            f'fill="{color}" fill-opacity="0.35" stroke="{color}"/>',
            f'<line x1="{x}" y1="{_num(sy(med))}" x2="{x + 50}" y2="{_num(sy(med))}" stroke="black" stroke-width="2"/>',
            f'<text x="{x + 25}" y="{height - 14}" text-anchor="middle" font-size="10">{escape(str(name))}</text>',
        ]
    return _doc(width, height, body)
