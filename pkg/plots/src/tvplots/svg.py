"""Tiny deterministic SVG plotting backend.

Everything is a pure function of the input data and the fixed style block
below, so rendering the same figure twice produces identical bytes; that is
what makes golden-file tests viable. Only the features the figure pipeline
needs: panel grids, polylines, linear/log axes, legends.
"""

from __future__ import annotations

import math

STYLE = {
    "panel_w": 230.0,
    "panel_h": 150.0,
    "margin_left": 56.0,
    "margin_bottom": 30.0,
    "margin_top": 8.0,
    "margin_right": 10.0,
    "gap_x": 14.0,
    "gap_y": 16.0,
    "legend_h": 22.0,
    "title_h": 18.0,
    "row_label_w": 16.0,
    "font": "DejaVu Sans, Helvetica, sans-serif",
    "font_size": 10,
    "colors": ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
               "#8c564b", "#17becf", "#7f7f7f"],
}


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _esc(s: str) -> str:
    return (str(s).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _label(v: float) -> str:
    if v == 0:
        return "0"
    a = abs(v)
    if 1e-3 <= a < 1e5:
        out = f"{v:.4g}"
    else:
        out = f"{v:.1e}"
    return out


def nice_ticks(lo: float, hi: float, n: int = 4):
    """Deterministic 'nice' tick positions covering [lo, hi]."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return [0.0, 1.0]
    if lo == hi:
        pad = abs(lo) * 0.5 or 1.0
        lo, hi = lo - pad, hi + pad
    raw = (hi - lo) / max(n, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = 10.0 * mag
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * step and len(ticks) < 12:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks or [lo, hi]


def log_ticks(lo: float, hi: float):
    lo_e = math.floor(math.log10(lo))
    hi_e = math.ceil(math.log10(hi))
    stride = max(1, (hi_e - lo_e) // 6)
    return [10.0 ** e for e in range(lo_e, hi_e + 1, stride)]


class Panel:
    """One axes rectangle with its own data ranges and curves."""

    def __init__(self, title: str, log_y: bool = False):
        self.title = title
        self.log_y = log_y
        self.curves = []   # (label, xs, ys)

    def add_curve(self, label: str, xs, ys):
        self.curves.append((str(label), [float(v) for v in xs],
                            [float(v) for v in ys]))

    def y_values(self):
        for _, _, ys in self.curves:
            yield from ys


def _panel_ranges(panel: Panel):
    xs = [v for _, x, _ in panel.curves for v in x]
    x_lo, x_hi = (min(xs), max(xs)) if xs else (0.0, 1.0)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    ys = list(panel.y_values())
    if panel.log_y:
        pos = [v for v in ys if v > 0.0]
        if not pos:
            return (x_lo, x_hi), (0.1, 1.0), False
        y_lo, y_hi = min(pos), max(pos)
        if y_lo == y_hi:
            y_lo, y_hi = y_lo / 10.0, y_hi * 10.0
        return (x_lo, x_hi), (y_lo, y_hi), True
    y_lo, y_hi = (min(ys), max(ys)) if ys else (0.0, 1.0)
    if y_lo == y_hi:
        pad = abs(y_lo) * 0.5 or 1.0
        y_lo, y_hi = y_lo - pad, y_hi + pad
    return (x_lo, x_hi), (y_lo, y_hi), False


def render_svg(panels_grid, row_labels, legend, out_title: str = "") -> str:
    """Render a grid of panels (list of rows, each a list of Panel) to SVG."""
    S = STYLE
    n_rows = len(panels_grid)
    n_cols = max(len(row) for row in panels_grid)
    cell_w = S["margin_left"] + S["panel_w"] + S["margin_right"]
    cell_h = S["margin_top"] + S["panel_h"] + S["margin_bottom"]
    width = S["row_label_w"] + n_cols * cell_w + (n_cols - 1) * S["gap_x"]
    height = (S["legend_h"] + S["title_h"]
              + n_rows * cell_h + (n_rows - 1) * S["gap_y"])

    parts = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">')
    parts.append(f'<rect width="{_fmt(width)}" height="{_fmt(height)}" '
                 f'fill="#ffffff"/>')
    font = (f'font-family="{S["font"]}" font-size="{S["font_size"]}" '
            f'fill="#222222"')

    # legend line
    x = S["row_label_w"] + 4.0
    y = 14.0
    if out_title:
        parts.append(f'<text x="{_fmt(x)}" y="{_fmt(y)}" {font} '
                     f'font-weight="bold">{_esc(out_title)}</text>')
        x += 8.0 * len(out_title) + 18.0
    for k, label in enumerate(legend):
        color = S["colors"][k % len(S["colors"])]
        parts.append(f'<line x1="{_fmt(x)}" y1="{_fmt(y - 3)}" '
                     f'x2="{_fmt(x + 16)}" y2="{_fmt(y - 3)}" '
                     f'stroke="{color}" stroke-width="1.8"/>')
        parts.append(f'<text x="{_fmt(x + 20)}" y="{_fmt(y)}" {font}>'
                     f'{_esc(label)}</text>')
        x += 30.0 + 7.0 * len(str(label))

    for r, row in enumerate(panels_grid):
        oy = S["legend_h"] + S["title_h"] + r * (cell_h + S["gap_y"])
        if r < len(row_labels) and row_labels[r]:
            parts.append(
                f'<text x="10" y="{_fmt(oy + S["panel_h"] / 2)}" {font} '
                f'transform="rotate(-90 10 {_fmt(oy + S["panel_h"] / 2)})" '
                f'text-anchor="middle">{_esc(row_labels[r])}</text>')
        for c, panel in enumerate(row):
            ox = (S["row_label_w"] + c * (cell_w + S["gap_x"])
                  + S["margin_left"])
            parts.append(_render_panel(panel, ox, oy, r == 0, font))

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _render_panel(panel: Panel, ox: float, oy: float, with_title: bool,
                  font: str) -> str:
    S = STYLE
    w, h = S["panel_w"], S["panel_h"]
    (x_lo, x_hi), (y_lo, y_hi), log_y = _panel_ranges(panel)

    def tx(v):
        return ox + (v - x_lo) / (x_hi - x_lo) * w

    if log_y:
        l_lo, l_hi = math.log10(y_lo), math.log10(y_hi)
        if l_hi == l_lo:
            l_hi = l_lo + 1.0
        floor_v = y_lo / 10.0

        def ty(v):
            vv = max(v, floor_v)
            return oy + h - (math.log10(vv) - l_lo) / (l_hi - l_lo) * h
        y_ticks = log_ticks(y_lo, y_hi)
    else:
        def ty(v):
            return oy + h - (v - y_lo) / (y_hi - y_lo) * h
        y_ticks = nice_ticks(y_lo, y_hi)

    parts = [f'<rect x="{_fmt(ox)}" y="{_fmt(oy)}" width="{_fmt(w)}" '
             f'height="{_fmt(h)}" fill="none" stroke="#444444" '
             f'stroke-width="0.8"/>']
    if with_title:
        parts.append(f'<text x="{_fmt(ox + w / 2)}" y="{_fmt(oy - 6)}" {font} '
                     f'text-anchor="middle">{_esc(panel.title)}'
                     f'{" (log)" if log_y else ""}</text>')

    for t in nice_ticks(x_lo, x_hi):
        if x_lo <= t <= x_hi:
            parts.append(f'<line x1="{_fmt(tx(t))}" y1="{_fmt(oy + h)}" '
                         f'x2="{_fmt(tx(t))}" y2="{_fmt(oy + h + 4)}" '
                         f'stroke="#444444" stroke-width="0.8"/>')
            parts.append(f'<text x="{_fmt(tx(t))}" y="{_fmt(oy + h + 15)}" '
                         f'{font} text-anchor="middle">{_esc(_label(t))}</text>')
    for t in y_ticks:
        if y_lo * (1 - 1e-12) <= t <= y_hi * (1 + 1e-12) or not log_y:
            if not log_y and not (y_lo <= t <= y_hi):
                continue
            parts.append(f'<line x1="{_fmt(ox - 4)}" y1="{_fmt(ty(t))}" '
                         f'x2="{_fmt(ox)}" y2="{_fmt(ty(t))}" '
                         f'stroke="#444444" stroke-width="0.8"/>')
            parts.append(f'<text x="{_fmt(ox - 7)}" y="{_fmt(ty(t) + 3)}" '
                         f'{font} text-anchor="end">{_esc(_label(t))}</text>')

    for k, (label, xs, ys) in enumerate(panel.curves):
        color = STYLE["colors"][k % len(STYLE["colors"])]
        pts = " ".join(f"{_fmt(tx(x))},{_fmt(ty(y))}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.2"/>')
    return "\n".join(parts)
