"""SVG rendering of two-dimensional embeddings in the Poincare disc."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

COLLINEAR_TOL = 1e-12


@dataclass(frozen=True)
class Geodesic:
    """Geodesic between two disc points.

    ``center``/``radius`` describe the circle orthogonal to the unit circle
    that carries the arc; both are ``None`` for a straight chord through the
    origin.
    """

    start: np.ndarray
    end: np.ndarray
    center: Optional[np.ndarray] = None
    radius: Optional[float] = None

    @property
    def is_chord(self) -> bool:
        return self.center is None


def geodesic_arc(z1, z2) -> Geodesic:
    """Circle through ``z1`` and ``z2`` meeting the unit circle at right angles.

    Orthogonality means ``|c|^2 = rho^2 + 1``; combined with ``|c - z|^2 = rho^2``
    for both endpoints this gives the linear system ``c . z = (|z|^2 + 1) / 2``.
    """
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    M = np.vstack([z1, z2])
    det = z1[0] * z2[1] - z1[1] * z2[0]
    scale = max(np.linalg.norm(z1) * np.linalg.norm(z2), COLLINEAR_TOL)
    if abs(det) <= COLLINEAR_TOL * scale:
        return Geodesic(z1, z2)
    rhs = 0.5 * (np.sum(M * M, axis=1) + 1.0)
    c = np.linalg.solve(M, rhs)
    return Geodesic(z1, z2, c, float(np.sqrt(c @ c - 1.0)))


def sample_edges(adjacency: Sequence[Sequence[int]], per_node: int = 2, seed: int = 0):
    """Draw ``per_node`` incident edges per node, with replacement.

    Returns the distinct sampled edges as sorted ``(i, j)`` pairs with ``i < j``.
    """
    rng = np.random.default_rng(seed)
    chosen = set()
    for i, nbrs in enumerate(adjacency):
        if not nbrs:
            continue
        for j in rng.choice(np.asarray(nbrs), size=per_node, replace=True):
            chosen.add((min(i, int(j)), max(i, int(j))))
    return sorted(chosen)


def _fmt(v: float) -> str:
    return f"{v:.6f}".rstrip("0").rstrip(".") if v != 0 else "0"


def render_svg(
    Z,
    edges: Sequence[Tuple[int, int]] = (),
    labels: Optional[Sequence[str]] = None,
    size: int = 800,
    node_radius: float = 3.0,
    title: Optional[str] = None,
) -> str:
    """Render points ``Z`` (Cartesian disc coordinates) and geodesic edges."""
    Z = np.asarray(Z, dtype=float)
    half = size / 2.0
    margin = 10.0
    s = half - margin

    def to_px(p):
        # SVG y axis points down
        return half + s * p[0], half - s * p[1]

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append(f'<circle class="disc" cx="{_fmt(half)}" cy="{_fmt(half)}" r="{_fmt(s)}" '
               'fill="#eeeeee" stroke="#999999" stroke-width="1"/>')
    out.append('<g class="edges" fill="none" stroke="black" stroke-width="0.5">')
    for i, j in edges:
        geo = geodesic_arc(Z[i], Z[j])
        x1, y1 = to_px(geo.start)
        x2, y2 = to_px(geo.end)
        if geo.is_chord:
            out.append(f'<path d="M {_fmt(x1)} {_fmt(y1)} L {_fmt(x2)} {_fmt(y2)}"/>')
            continue
        cx, cy = to_px(geo.center)
        # in pixel coordinates a positive cross product means increasing angle
        cross = (x1 - cx) * (y2 - cy) - (y1 - cy) * (x2 - cx)
        sweep = 1 if cross > 0 else 0
        rho = _fmt(s * geo.radius)
        out.append(f'<path d="M {_fmt(x1)} {_fmt(y1)} A {rho} {rho} 0 0 {sweep} '
                   f'{_fmt(x2)} {_fmt(y2)}"/>')
    out.append("</g>")
    out.append('<g class="nodes" fill="red" stroke="none">')
    for k, p in enumerate(Z):
        x, y = to_px(p)
        label = f"<title>{escape(str(labels[k]))}</title>" if labels is not None else ""
        out.append(f'<circle class="node" cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(node_radius)}">'
                   f"{label}</circle>")
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
