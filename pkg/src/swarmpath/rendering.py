"""SVG rendering: world snapshots and metric line charts.

Hand-rolled SVG keeps the element structure predictable — a snapshot contains
exactly one <circle> per landmark, per goal, and per agent, which downstream
checks count on.
"""

from __future__ import annotations

from pathlib import Path

_AGENT_COLORS = (
    "#e74c3c", "#27ae60", "#2980b9", "#f39c12", "#8e44ad",
    "#16a085", "#d35400", "#2c3e50", "#c0392b", "#7f8c8d",
)


def _fmt(v: float) -> str:
    return f"{v:.4f}".rstrip("0").rstrip(".")


def render_trace_svg(trace: dict, step: int = -1, show_paths: bool = True, size: int = 640) -> str:
    """Snapshot of one trace step: landmarks gray, goals outlined, agents
    filled; earlier positions as faded polylines when requested."""
    x0, y0, x1, y1 = trace["bounds"]
    span_x = max(x1 - x0, 1e-9)
    span_y = max(y1 - y0, 1e-9)
    scale = size / max(span_x, span_y)
    width = span_x * scale
    height = span_y * scale

    def sx(x: float) -> float:
        return (x - x0) * scale

    def sy(y: float) -> float:
        return height - (y - y0) * scale  # world y up, svg y down

    steps = trace["steps"]
    if steps:
        idx = step if step >= 0 else len(steps) + step
        frame = steps[idx]["positions"]
        history = [trace["initial_positions"]] + [s["positions"] for s in steps[: idx + 1]]
    else:
        frame = trace["initial_positions"]
        history = [frame]

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f'<rect width="{_fmt(width)}" height="{_fmt(height)}" fill="#fafafa"/>',
    ]
    for lx, ly, lr in trace["landmarks"]:
        parts.append(
            f'<circle cx="{_fmt(sx(lx))}" cy="{_fmt(sy(ly))}" r="{_fmt(lr * scale)}" '
            f'fill="#9e9e9e"/>'
        )
    for i, (gx, gy) in enumerate(trace["goals"]):
        color = _AGENT_COLORS[i % len(_AGENT_COLORS)]
        r = trace["goal_radii"][i] * scale
        parts.append(
            f'<circle cx="{_fmt(sx(gx))}" cy="{_fmt(sy(gy))}" r="{_fmt(r)}" '
            f'fill="none" stroke="{color}" stroke-width="1.5" stroke-dasharray="4 3"/>'
        )
    if show_paths and len(history) > 1:
        for i in range(len(frame)):
            pts = " ".join(f"{_fmt(sx(p[i][0]))},{_fmt(sy(p[i][1]))}" for p in history)
            color = _AGENT_COLORS[i % len(_AGENT_COLORS)]
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" '
                f'stroke-width="1" opacity="0.45"/>'
            )
    if "planned_paths" in trace and show_paths:
        for i, path in enumerate(trace["planned_paths"]):
            if not path:
                continue
            color = _AGENT_COLORS[i % len(_AGENT_COLORS)]
            pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in path)
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" '
                f'stroke-width="1" stroke-dasharray="2 3" opacity="0.7"/>'
            )
    for i, (px, py) in enumerate(frame):
        color = _AGENT_COLORS[i % len(_AGENT_COLORS)]
        r = trace["agent_radii"][i] * scale
        parts.append(
            f'<circle cx="{_fmt(sx(px))}" cy="{_fmt(sy(py))}" r="{_fmt(r)}" fill="{color}"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_chart_svg(
    series: dict[str, list[tuple[float, float]]],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    size: tuple[int, int] = (640, 400),
) -> str:
    """Simple multi-series line chart (axes, legend, polylines)."""
    width, height = size
    margin = 56
    plot_w = width - 2 * margin
    plot_h = height - 2 * margin

    xs = [p[0] for pts in series.values() for p in pts]
    ys = [p[1] for pts in series.values() for p in pts]
    if not xs:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def px(x: float) -> float:
        return margin + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return height - margin - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="#333"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="#333"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2}" y="{margin / 2}" text-anchor="middle" '
            f'font-size="14">{title}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle" '
            f'font-size="12">{x_label}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="14" y="{height / 2}" text-anchor="middle" font-size="12" '
            f'transform="rotate(-90 14 {height / 2})">{y_label}</text>'
        )
    for tick in range(5):
        frac = tick / 4
        xv = x_lo + frac * (x_hi - x_lo)
        yv = y_lo + frac * (y_hi - y_lo)
        parts.append(
            f'<text x="{_fmt(px(xv))}" y="{height - margin + 16}" text-anchor="middle" '
            f'font-size="10">{xv:.3g}</text>'
        )
        parts.append(
            f'<text x="{margin - 6}" y="{_fmt(py(yv) + 3)}" text-anchor="end" '
            f'font-size="10">{yv:.3g}</text>'
        )
    for i, (name, pts) in enumerate(series.items()):
        color = _AGENT_COLORS[i % len(_AGENT_COLORS)]
        if pts:
            coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in pts)
            parts.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
            )
        ly = margin + 14 * (i + 1)
        parts.append(
            f'<line x1="{width - margin - 70}" y1="{ly}" x2="{width - margin - 50}" '
            f'y2="{ly}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{width - margin - 44}" y="{ly + 4}" font-size="10">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(svg: str, path: str | Path) -> None:
    Path(path).write_text(svg)
