"""Static SVG plots for traces and Monte-Carlo batches.

Hand-rolled SVG keeps the output a deterministic byte stream (no library
version drift, no embedded ids or timestamps) so plots can be golden-tested.
No external resources are referenced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .dynamics import separation
from .sim import MonteCarloReport, SimTrace, metrics

WIDTH, HEIGHT = 800, 560
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 16, 28, 44

BLUE = "#1f4e9c"
RED = "#c0392b"
GREEN = "#2e8b57"
BLACK = "#202020"
GRAY = "#9a9a9a"


def _f(value: float) -> str:
    return format(float(value), ".2f")


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    power = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * power:
            step = mult * power
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 else t)
        t += step
    return ticks


@dataclass
class Frame:
    """Maps data coordinates onto the pixel viewport."""

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    equal_aspect: bool = False

    def __post_init__(self) -> None:
        if self.x_hi <= self.x_lo:
            self.x_hi = self.x_lo + 1.0
        if self.y_hi <= self.y_lo:
            self.y_hi = self.y_lo + 1.0
        if self.equal_aspect:
            span_x = self.x_hi - self.x_lo
            span_y = self.y_hi - self.y_lo
            width = WIDTH - MARGIN_L - MARGIN_R
            height = HEIGHT - MARGIN_T - MARGIN_B
            if span_x / width > span_y / height:
                extra = span_x * height / width - span_y
                self.y_lo -= extra / 2
                self.y_hi += extra / 2
            else:
                extra = span_y * width / height - span_x
                self.x_lo -= extra / 2
                self.x_hi += extra / 2

    def px(self, x: float) -> float:
        w = WIDTH - MARGIN_L - MARGIN_R
        return MARGIN_L + (x - self.x_lo) / (self.x_hi - self.x_lo) * w

    def py(self, y: float) -> float:
        h = HEIGHT - MARGIN_T - MARGIN_B
        return MARGIN_T + (self.y_hi - y) / (self.y_hi - self.y_lo) * h


def _polyline(frame: Frame, points, color: str, width: float = 1.5, dashed: bool = False, opacity: float = 1.0) -> str:
    coords = " ".join(f"{_f(frame.px(x))},{_f(frame.py(y))}" for x, y in points)
    dash = ' stroke-dasharray="6,4"' if dashed else ""
    op = f' stroke-opacity="{_f(opacity)}"' if opacity < 1.0 else ""
    return f'<polyline fill="none" stroke="{color}" stroke-width="{_f(width)}"{dash}{op} points="{coords}"/>'


def _circle(frame: Frame, cx: float, cy: float, r_data: float, color: str, fill: bool, dashed: bool = False) -> str:
    rx = abs(frame.px(cx + r_data) - frame.px(cx))
    fill_attr = f'fill="{color}" fill-opacity="0.25" stroke="{color}"' if fill else f'fill="none" stroke="{color}"'
    dash = ' stroke-dasharray="6,4"' if dashed else ""
    return f'<circle cx="{_f(frame.px(cx))}" cy="{_f(frame.py(cy))}" r="{_f(rx)}" {fill_attr}{dash}/>'


def _marker(frame: Frame, x: float, y: float, color: str) -> str:
    return f'<circle cx="{_f(frame.px(x))}" cy="{_f(frame.py(y))}" r="4" fill="{color}"/>'


def _text(x: float, y: float, content: str, size: int = 12, anchor: str = "start", color: str = BLACK) -> str:
    return (
        f'<text x="{_f(x)}" y="{_f(y)}" font-family="sans-serif" font-size="{size}" '
        f'text-anchor="{anchor}" fill="{color}">{escape(content)}</text>'
    )


def _axes(frame: Frame, x_label: str, y_label: str) -> list[str]:
    parts = []
    left, right = MARGIN_L, WIDTH - MARGIN_R
    top, bottom = MARGIN_T, HEIGHT - MARGIN_B
    parts.append(f'<rect x="{left}" y="{top}" width="{right-left}" height="{bottom-top}" fill="none" stroke="{BLACK}"/>')
    for t in _nice_ticks(frame.x_lo, frame.x_hi):
        px = frame.px(t)
        if left - 1e-6 <= px <= right + 1e-6:
            parts.append(f'<line x1="{_f(px)}" y1="{bottom}" x2="{_f(px)}" y2="{bottom+5}" stroke="{BLACK}"/>')
            parts.append(_text(px, bottom + 18, f"{t:g}", anchor="middle"))
    for t in _nice_ticks(frame.y_lo, frame.y_hi):
        py = frame.py(t)
        if top - 1e-6 <= py <= bottom + 1e-6:
            parts.append(f'<line x1="{left-5}" y1="{_f(py)}" x2="{left}" y2="{_f(py)}" stroke="{BLACK}"/>')
            parts.append(_text(left - 8, py + 4, f"{t:g}", anchor="end"))
    parts.append(_text((left + right) / 2, HEIGHT - 8, x_label, anchor="middle"))
    parts.append(f'<g transform="translate(14,{(top+bottom)/2}) rotate(-90)">{_text(0, 0, y_label, anchor="middle")}</g>')
    return parts


def _document(title: str, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    return "\n".join([head, f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>', _text(MARGIN_L, 18, title, 14)] + body + ["</svg>"]) + "\n"


def _own_points(trace: SimTrace):
    pts = [(s.own.x, s.own.y) for s in trace.steps]
    pts.append((trace.own_final.x, trace.own_final.y))
    return pts


def _intruder_points(trace: SimTrace):
    pts = [(s.intruder.x, s.intruder.y) for s in trace.steps]
    pts.append((trace.intruder_final.x, trace.intruder_final.y))
    return pts


def _bounds_of(points_lists) -> tuple[float, float, float, float]:
    xs = [p[0] for pts in points_lists for p in pts]
    ys = [p[1] for pts in points_lists for p in pts]
    pad_x = 0.05 * max(max(xs) - min(xs), 1.0)
    pad_y = 0.05 * max(max(ys) - min(ys), 1.0)
    return min(xs) - pad_x, max(xs) + pad_x, min(ys) - pad_y, max(ys) + pad_y


def plot_trajectories(trace: SimTrace) -> str:
    """Ownship (blue) and intruder (red) tracks, the target disc (green), and
    the separation floor circle at the closest-approach step."""
    own = _own_points(trace)
    intr = _intruder_points(trace)
    spec = trace.spec
    m = metrics(trace)
    worst = trace.steps[[s.t for s in trace.steps].index(m.min_separation_time)]

    x_lo, x_hi, y_lo, y_hi = _bounds_of([own, intr, [(spec.own_target.x, spec.own_target.y)]])
    frame = Frame(x_lo, x_hi, y_lo, y_hi, equal_aspect=True)
    body = _axes(frame, "x [m]", "y [m]")
    body.append(_circle(frame, spec.own_target.x, spec.own_target.y, spec.target_radius, GREEN, fill=True))
    body.append(_circle(frame, worst.intruder.x, worst.intruder.y, spec.min_separation, RED, fill=False, dashed=True))
    body.append(_polyline(frame, intr, RED, 2.0))
    body.append(_polyline(frame, own, BLUE, 2.0))
    body.append(_marker(frame, own[0][0], own[0][1], BLUE))
    body.append(_marker(frame, intr[0][0], intr[0][1], RED))
    body.append(_text(WIDTH - 180, 36, "ownship", color=BLUE))
    body.append(_text(WIDTH - 180, 52, "intruder", color=RED))
    body.append(_text(WIDTH - 180, 68, f"min sep {m.min_separation:.1f} m @ t={m.min_separation_time}", color=BLACK))
    return _document("trajectories", body)


def plot_separation(trace: SimTrace) -> str:
    """Separation over time with the floor as a dashed line."""
    seps = [(s.t, s.separation) for s in trace.steps]
    rho = trace.spec.min_separation
    hi = max(max(s for _, s in seps), rho) * 1.05
    frame = Frame(0.0, float(seps[-1][0]), 0.0, hi)
    body = _axes(frame, "time [s]", "separation [m]")
    body.append(_polyline(frame, [(frame.x_lo, rho), (frame.x_hi, rho)], RED, 1.5, dashed=True))
    body.append(_polyline(frame, seps, BLUE, 2.0))
    body.append(_text(WIDTH - 220, 36, f"floor rho = {rho:g} m", color=RED))
    return _document("ownship-intruder separation", body)


def plot_controls(trace: SimTrace) -> str:
    """Applied speed and angular rate with their box bounds."""
    spec = trace.spec
    ts = [s.t for s in trace.steps]
    vs = [(s.t, s.applied.speed) for s in trace.steps]
    us = [(s.t, s.applied.angular_rate) for s in trace.steps]
    ob = spec.own_bounds

    parts = [f'<rect width="{WIDTH}" height="{2*HEIGHT}" fill="#ffffff"/>']
    doc_open = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{2*HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {2*HEIGHT}">'
    )

    pad_v = 0.1 * (ob.v_max - ob.v_min + 1.0)
    frame_v = Frame(0.0, float(ts[-1]), ob.v_min - pad_v, ob.v_max + pad_v)
    parts.append(_text(MARGIN_L, 18, "applied linear velocity", 14))
    parts.extend(_axes(frame_v, "time [s]", "speed [m/s]"))
    for bound in (ob.v_min, ob.v_max):
        parts.append(_polyline(frame_v, [(frame_v.x_lo, bound), (frame_v.x_hi, bound)], GRAY, 1.0, dashed=True))
    parts.append(_polyline(frame_v, vs, BLUE, 2.0))

    pad_u = 0.15 * (ob.u_max - ob.u_min)
    frame_u = Frame(0.0, float(ts[-1]), ob.u_min - pad_u, ob.u_max + pad_u)
    group = [f'<g transform="translate(0,{HEIGHT})">']
    group.append(_text(MARGIN_L, 18, "applied angular velocity", 14))
    group.extend(_axes(frame_u, "time [s]", "angular rate [rad/s]"))
    for bound in (ob.u_min, 0.0, ob.u_max):
        group.append(_polyline(frame_u, [(frame_u.x_lo, bound), (frame_u.x_hi, bound)], GRAY, 1.0, dashed=True))
    group.append(_polyline(frame_u, us, RED, 2.0))
    group.append("</g>")
    parts.extend(group)
    return "\n".join([doc_open] + parts + ["</svg>"]) + "\n"


def plot_monte_carlo_trajectories(report: MonteCarloReport) -> str:
    """All realizations thin, the nominal run black."""
    traces = [o.trace for o in report.runs if o.trace is not None and o.trace.steps]
    all_pts = [_own_points(t) for t in traces] + [_intruder_points(t) for t in traces]
    all_pts.append(_own_points(report.nominal))
    all_pts.append(_intruder_points(report.nominal))
    x_lo, x_hi, y_lo, y_hi = _bounds_of(all_pts)
    frame = Frame(x_lo, x_hi, y_lo, y_hi, equal_aspect=True)
    spec = report.spec
    body = _axes(frame, "x [m]", "y [m]")
    body.append(_circle(frame, spec.own_target.x, spec.own_target.y, spec.target_radius, GREEN, fill=True))
    for t in traces:
        body.append(_polyline(frame, _intruder_points(t), RED, 0.8, opacity=0.5))
        body.append(_polyline(frame, _own_points(t), BLUE, 0.8, opacity=0.5))
    body.append(_polyline(frame, _intruder_points(report.nominal), BLACK, 2.0))
    body.append(_polyline(frame, _own_points(report.nominal), BLACK, 2.0))
    body.append(_text(WIDTH - 220, 36, f"{len(traces)} disturbed runs", color=BLUE))
    body.append(_text(WIDTH - 220, 52, "nominal in black", color=BLACK))
    return _document("Monte-Carlo trajectories", body)


def plot_monte_carlo_separation(report: MonteCarloReport) -> str:
    """Separation curves of every run with the floor dashed; nominal black."""
    traces = [o.trace for o in report.runs if o.trace is not None and o.trace.steps]
    rho = report.spec.min_separation
    hi = rho
    for t in traces + [report.nominal]:
        hi = max(hi, max(s.separation for s in t.steps))
    t_hi = max(len(t.steps) for t in traces + [report.nominal]) - 1
    frame = Frame(0.0, float(t_hi), 0.0, hi * 1.05)
    body = _axes(frame, "time [s]", "separation [m]")
    body.append(_polyline(frame, [(frame.x_lo, rho), (frame.x_hi, rho)], RED, 1.5, dashed=True))
    for t in traces:
        body.append(_polyline(frame, [(s.t, s.separation) for s in t.steps], BLUE, 0.8, opacity=0.5))
    body.append(_polyline(frame, [(s.t, s.separation) for s in report.nominal.steps], BLACK, 2.0))
    return _document("Monte-Carlo separation", body)
