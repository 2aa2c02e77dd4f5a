"""SVG picture of the search space explored by one solver run.

Time runs along the x-axis and power levels along the y-axis.  Every arc
extended at least once is drawn gray, arcs extended by several partial paths
are black, and the returned optimal path is drawn on top in red.
"""
from __future__ import annotations

from collections import Counter
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .model import TimeExpandedGraph

GRAY = "#b0b0b0"
BLACK = "#000000"
OPTIMAL = "#d62728"


def explored_arc_counts(explored: Sequence[int]) -> Counter:
    return Counter(explored)


def render_svg(
    teg: TimeExpandedGraph,
    explored: Sequence[int],
    optimal_path: Optional[Sequence[int]] = None,
    title: str = "",
    width: int = 900,
    height: int = 420,
) -> str:
    inst = teg.instance
    g = teg.digraph
    T = inst.horizon
    margin_l, margin_r, margin_t, margin_b = 70, 20, 36, 40
    levels = sorted(inst.levels, key=lambda s: (s.power, str(s.id)))
    row = {s.id: i for i, s in enumerate(levels)}
    n_rows = max(len(levels) - 1, 1)

    def x_of(t):
        return margin_l + (width - margin_l - margin_r) * t / (T + 1)

    def y_of(r):
        return height - margin_b - (height - margin_t - margin_b) * r / n_rows

    def pos(v):
        if v == g.origin:
            return x_of(0), y_of(row[inst.initial_level])
        if v == g.destination:
            return x_of(T + 1), y_of(n_rows / 2)
        sid, t = teg.vertex_info[v]
        return x_of(t), y_of(row[sid])

    counts = explored_arc_counts(explored)
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="14">{escape(title)}</text>')
    # axes
    x0, y0 = margin_l, height - margin_b
    out.append(f'<line class="axis" x1="{x0}" y1="{y0}" x2="{width - margin_r}" y2="{y0}" stroke="black"/>')
    out.append(f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x0}" y2="{margin_t}" stroke="black"/>')
    out.append(f'<text x="{(width + margin_l) / 2:.1f}" y="{height - 8}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">time step</text>')
    for s in levels:
        out.append(f'<text x="{x0 - 6}" y="{y_of(row[s.id]) + 4:.1f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="10">{escape(str(s.id))}</text>')
    step = max(1, T // 12)
    for t in range(0, T + 1, step):
        out.append(f'<text x="{x_of(t):.1f}" y="{y0 + 14}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="10">{t}</text>')

    # gray first so black arcs stay visible
    for multi in (False, True):
        for a in sorted(counts):
            if (counts[a] > 1) != multi:
                continue
            (xa, ya), (xb, yb) = pos(g.tails[a]), pos(g.heads[a])
            color, cls = (BLACK, "explored multi") if multi else (GRAY, "explored single")
            out.append(f'<line class="{cls}" data-arc="{a}" data-count="{counts[a]}" x1="{xa:.1f}" '
                       f'y1="{ya:.1f}" x2="{xb:.1f}" y2="{yb:.1f}" stroke="{color}" stroke-width="1"/>')
    for a in optimal_path or ():
        (xa, ya), (xb, yb) = pos(g.tails[a]), pos(g.heads[a])
        out.append(f'<line class="optimal" data-arc="{a}" x1="{xa:.1f}" y1="{ya:.1f}" x2="{xb:.1f}" '
                   f'y2="{yb:.1f}" stroke="{OPTIMAL}" stroke-width="2.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
