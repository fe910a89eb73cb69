"""SVG drawing of a point set with a triangulation and a tour on top."""

from __future__ import annotations

from typing import Optional, Sequence

from .exact import tour_edges
from .instances import PointSet


def render_svg(ps: PointSet, tr=None, tour: Optional[Sequence[int]] = None, path=None, size: int = 400) -> str:
    pts = ps.points
    lo = pts.min(axis=0)
    span = float((pts.max(axis=0) - lo).max()) or 1.0
    pad = 20
    scale = (size - 2 * pad) / span

    def xy(v):
        x, y = pts[v]
        # flip y so the picture has the usual orientation
        return pad + (x - lo[0]) * scale, size - pad - (y - lo[1]) * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    if tr is not None:
        parts.append('<g stroke="#999999" stroke-width="1">')
        for i, j in sorted(tr.edges):
            (x1, y1), (x2, y2) = xy(i), xy(j)
            parts.append(f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}"/>')
        parts.append("</g>")
    if tour is not None:
        parts.append('<g stroke="#1f3fbf" stroke-width="3">')
        for i, j in tour_edges(tour):
            (x1, y1), (x2, y2) = xy(i), xy(j)
            parts.append(f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}"/>')
        parts.append("</g>")
    parts.append('<g fill="black" font-size="10" font-family="sans-serif">')
    for v in range(ps.n):
        x, y = xy(v)
        parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="3"/>')
        parts.append(f'<text x="{x + 4:.3f}" y="{y - 4:.3f}">{v + 1}</text>')
    parts.append("</g></svg>")
    text = "\n".join(parts) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
