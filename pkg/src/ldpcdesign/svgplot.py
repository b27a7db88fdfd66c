"""Self-contained SVG line charts for sweep results.

Hand-rolled so the output is deterministic byte-for-byte and references no
external assets or scripts: one polyline per solver, axes, tick labels.
"""

from __future__ import annotations

import math

WIDTH, HEIGHT = 640, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 30, 50

SOLVER_COLORS = {"lp": "#1f77b4", "sdp": "#d62728"}
FALLBACK_COLOR = "#2ca02c"


class NoPlottableRows(ValueError):
    pass


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * step:
        ticks.append(round(t / step) * step)
        t += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def emit_svg_plot(rows, y_field: str, path) -> None:
    """Write y_field ('rate' or 'gap') versus alpha, one polyline per solver."""
    if y_field not in ("rate", "gap"):
        raise ValueError(f"y_field must be 'rate' or 'gap', got {y_field!r}")
    series = {}
    for r in rows:
        y = getattr(r, y_field)
        if y is None:
            continue
        series.setdefault(r.solver, []).append((r.alpha, y))
    if not series:
        raise NoPlottableRows(f"no plottable rows for field {y_field!r}")
    for pts in series.values():
        pts.sort()

    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(ys), max(ys)
    if xhi - xlo < 1e-12:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    if yhi - ylo < 1e-12:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    xpad, ypad = 0.05 * (xhi - xlo), 0.05 * (yhi - ylo)
    xlo, xhi = xlo - xpad, xhi + xpad
    ylo, yhi = ylo - ypad, yhi + ypad

    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(x: float) -> float:
        return MARGIN_L + (x - xlo) / (xhi - xlo) * plot_w

    def py(y: float) -> float:
        return MARGIN_T + plot_h - (y - ylo) / (yhi - ylo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="black" stroke-width="1"/>',
    ]
    for t in _nice_ticks(xlo, xhi):
        x = px(t)
        parts.append(
            f'<line x1="{x:.2f}" y1="{MARGIN_T + plot_h}" x2="{x:.2f}" '
            f'y2="{MARGIN_T + plot_h + 5}" stroke="black" stroke-width="1"/>')
        parts.append(
            f'<text x="{x:.2f}" y="{MARGIN_T + plot_h + 20}" font-size="12" '
            f'font-family="sans-serif" text-anchor="middle">{_fmt(t)}</text>')
    for t in _nice_ticks(ylo, yhi):
        y = py(t)
        parts.append(
            f'<line x1="{MARGIN_L - 5}" y1="{y:.2f}" x2="{MARGIN_L}" '
            f'y2="{y:.2f}" stroke="black" stroke-width="1"/>')
        parts.append(
            f'<text x="{MARGIN_L - 8}" y="{y + 4:.2f}" font-size="12" '
            f'font-family="sans-serif" text-anchor="end">{_fmt(t)}</text>')
    parts.append(
        f'<text x="{MARGIN_L + plot_w / 2:.2f}" y="{HEIGHT - 12}" '
        f'font-size="14" font-family="sans-serif" text-anchor="middle">'
        f'alpha</text>')
    parts.append(
        f'<text x="18" y="{MARGIN_T + plot_h / 2:.2f}" font-size="14" '
        f'font-family="sans-serif" text-anchor="middle" '
        f'transform="rotate(-90 18 {MARGIN_T + plot_h / 2:.2f})">'
        f'{y_field}</text>')

    for idx, (solver, pts) in enumerate(sorted(series.items())):
        color = SOLVER_COLORS.get(solver, FALLBACK_COLOR)
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="2"/>')
        for x, y in pts:
            parts.append(
                f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3" '
                f'fill="{color}"/>')
        ly = MARGIN_T + 18 + 18 * idx
        parts.append(
            f'<line x1="{MARGIN_L + plot_w - 110}" y1="{ly - 4}" '
            f'x2="{MARGIN_L + plot_w - 85}" y2="{ly - 4}" stroke="{color}" '
            f'stroke-width="2"/>')
        parts.append(
            f'<text x="{MARGIN_L + plot_w - 80}" y="{ly}" font-size="12" '
            f'font-family="sans-serif">{solver}</text>')

    parts.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
