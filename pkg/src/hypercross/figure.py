"""SVG rendering of a planar realisation at nested zoom levels.

One realisation of the restricted line process is drawn in four panels:
sampled lines clipped to the viewport, the restriction circle, the
intersection points and their convex hull. Panel half-widths shrink by a
configurable zoom factor (default x8 per panel, a presentation choice; the
outermost panel is sized to the farthest intersection point).
"""

import math

from .errors import UnsupportedDimension
from .hull import Degenerate, convex_hull
from .rng import derive_seed, replication_rng
from .samplers import SimConfig, intersection_process, sample_poisson_hyperplanes

_PANEL_PX = 360
_MARGIN_PX = 14
_COLORS = {"line": "#3a6ea5", "circle": "#c0392b", "point": "#111111", "hull": "#e67e22"}


def _f(x: float) -> str:
    return format(x, ".6g")


def _clip_line_to_square(normal, offset, w):
    """Segment of the line <normal, x> = offset inside [-w, w]^2, or None."""
    ux, uy = normal
    px, py = offset * ux, offset * uy
    vx, vy = -uy, ux
    t_lo, t_hi = -math.inf, math.inf
    for p, v in ((px, vx), (py, vy)):
        if abs(v) < 1e-300:
            if abs(p) > w:
                return None
            continue
        a, b = (-w - p) / v, (w - p) / v
        lo, hi = min(a, b), max(a, b)
        t_lo, t_hi = max(t_lo, lo), min(t_hi, hi)
    if t_lo >= t_hi:
        return None
    return (px + t_lo * vx, py + t_lo * vy, px + t_hi * vx, py + t_hi * vy)


class _Panel:
    def __init__(self, col, row, w, label):
        self.x0 = _MARGIN_PX + col * (_PANEL_PX + _MARGIN_PX)
        self.y0 = _MARGIN_PX + row * (_PANEL_PX + _MARGIN_PX)
        self.w = w
        self.label = label
        self.parts = []

    def to_px(self, x, y):
        sx = self.x0 + (x + self.w) / (2 * self.w) * _PANEL_PX
        sy = self.y0 + (self.w - y) / (2 * self.w) * _PANEL_PX
        return sx, sy

    def scale(self, length):
        return length / (2 * self.w) * _PANEL_PX

    def render(self):
        frame = (
            f'<rect x="{_f(self.x0)}" y="{_f(self.y0)}" width="{_PANEL_PX}" '
            f'height="{_PANEL_PX}" fill="white" stroke="#999" stroke-width="1"/>'
        )
        text = (
            f'<text x="{_f(self.x0 + 6)}" y="{_f(self.y0 + 16)}" '
            f'font-family="monospace" font-size="12">{self.label}</text>'
        )
        return "\n".join([frame] + self.parts + [text])


def render_figure(config: SimConfig, out_path, zoom: float = 8.0, panels: int = 4) -> dict:
    """Write the multi-panel SVG; returns a summary of the realisation."""
    if config.dim != 2:
        raise UnsupportedDimension("figure rendering is implemented for d = 2 only")
    t, radius = config.intensity, config.radius
    rng = replication_rng(derive_seed(config.master_seed, "figure"), 0)
    planes = sample_poisson_hyperplanes(t, radius, 2, rng)
    points = intersection_process(planes)

    if len(points):
        w0 = 1.05 * float(points.norms().max())
    else:
        w0 = 3.0 * radius
    hull_poly = None
    if len(points) >= 3:
        try:
            hull_poly = convex_hull(points.points)
        except Degenerate:
            hull_poly = None

    panel_objs = []
    for i in range(panels):
        w = w0 / zoom**i
        label = f"half-width {_f(w)}  t={_f(t)}  R=t^(-{_f(config.exponent)}) ~ {_f(radius)}"
        panel = _Panel(i % 2, i // 2, w, label)
        for normal, offset in zip(planes.normals, planes.offsets):
            seg = _clip_line_to_square(normal, offset, w)
            if seg is None:
                continue
            x1, y1 = panel.to_px(seg[0], seg[1])
            x2, y2 = panel.to_px(seg[2], seg[3])
            panel.parts.append(
                f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
                f'stroke="{_COLORS["line"]}" stroke-width="0.6"/>'
            )
        if hull_poly is not None:
            coords = " ".join(
                "{},{}".format(*map(_f, panel.to_px(v[0], v[1]))) for v in hull_poly.vertices
            )
            panel.parts.append(
                f'<polygon points="{coords}" fill="{_COLORS["hull"]}" fill-opacity="0.25" '
                f'stroke="{_COLORS["hull"]}" stroke-width="1"/>'
            )
        inside = points.points[points.norms() <= w * 1.45] if len(points) else []
        r_pt = max(1.2, panel.scale(w / 220.0))
        for p in inside:
            cx, cy = panel.to_px(p[0], p[1])
            if -10 < cx - panel.x0 < _PANEL_PX + 10 and -10 < cy - panel.y0 < _PANEL_PX + 10:
                panel.parts.append(
                    f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r_pt)}" '
                    f'fill="{_COLORS["point"]}"/>'
                )
        ccx, ccy = panel.to_px(0.0, 0.0)
        panel.parts.append(
            f'<circle cx="{_f(ccx)}" cy="{_f(ccy)}" r="{_f(panel.scale(radius))}" '
            f'fill="none" stroke="{_COLORS["circle"]}" stroke-width="1.2"/>'
        )
        panel_objs.append(panel)

    side = 2 * _PANEL_PX + 3 * _MARGIN_PX
    note = (
        f'<text x="{_MARGIN_PX}" y="{side - 3}" font-family="monospace" font-size="11">'
        f"zoom x{_f(zoom)} per panel (presentation choice); seed {config.master_seed}</text>"
    )
    body = "\n".join(p.render() for p in panel_objs)
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side + 14}" '
        f'viewBox="0 0 {side} {side + 14}">\n{body}\n{note}\n</svg>\n'
    )
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(svg)
    hull_contains_origin = bool(hull_poly is not None and hull_poly.contains([[0.0, 0.0]]))
    return {
        "planes": len(planes),
        "points": len(points),
        "skipped": planes.skipped_tuples,
        "hullContainsOrigin": hull_contains_origin,
        "outerHalfWidth": w0,
        "radius": radius,
    }
