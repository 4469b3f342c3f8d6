"""Static SVG route figures: square region, depot square, customer circles,
solid truck arcs, dashed sortie arcs (one dashed pair per sortie)."""

from __future__ import annotations

from .instance import Instance
from .schedule import Schedule

_SCALE = 60.0
_PAD = 40.0


def _project(inst: Instance) -> dict[int, tuple[float, float]]:
    assert inst.coords is not None
    xs = [p[0] for p in inst.coords]
    ys = [p[1] for p in inst.coords]
    x0, y1 = min(xs), max(ys)
    return {
        v: (_PAD + (inst.coords[v][0] - x0) * _SCALE,
            _PAD + (y1 - inst.coords[v][1]) * _SCALE)
        for v in inst.nodes()
    }


def schedule_svg(inst: Instance, sched: Schedule) -> str:
    """Deterministic SVG text for one schedule; requires instance coords."""
    if inst.coords is None:
        raise ValueError("instance has no coordinates to plot")
    pts = _project(inst)
    xs = [p[0] for p in pts.values()]
    ys = [p[1] for p in pts.values()]
    width, height = max(xs) + _PAD, max(ys) + _PAD

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect x="0" y="0" width="{width:.0f}" height="{height:.0f}" fill="white"/>',
    ]
    for h, k in zip(sched.route, sched.route[1:]):
        (x1, y1), (x2, y2) = pts[h], pts[k]
        lines.append(f'<line class="truck" x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
                     'stroke="black" stroke-width="2"/>')
    for s in sched.sorted_sorties():
        for a, b in ((s.launch, s.customer), (s.customer, s.rendezvous)):
            (x1, y1), (x2, y2) = pts[a], pts[b]
            lines.append(f'<line class="sortie" x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
                         'stroke="black" stroke-width="1.5" stroke-dasharray="6,4"/>')
    dx, dy = pts[0]
    lines.append(f'<rect class="depot" x="{dx - 7:.1f}" y="{dy - 7:.1f}" width="14" height="14" '
                 'fill="white" stroke="black" stroke-width="2"/>')
    for v in inst.customers():
        x, y = pts[v]
        lines.append(f'<circle class="customer" cx="{x:.1f}" cy="{y:.1f}" r="6" '
                     'fill="white" stroke="black" stroke-width="1.5"/>')
        lines.append(f'<text x="{x:.1f}" y="{y - 10:.1f}" font-size="11" '
                     f'text-anchor="middle">{v}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
