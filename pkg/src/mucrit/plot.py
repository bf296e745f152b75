"""Deterministic SVG rendering of 2-D clouds, offset bands, scan heat layers
and flow traces."""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from .geometry import PointCloud
from .io import atomic_write


def _f(v: float) -> str:
    return f"{v:.5f}".rstrip("0").rstrip(".")


def _heat(norm: float) -> str:
    # 0 -> red (critical), 1 -> blue (regular)
    t = min(max(norm, 0.0), 1.0)
    return f"#{int(round(255 * (1 - t))):02x}40{int(round(255 * t)):02x}"


def render_svg(cloud: PointCloud, bands: Sequence[tuple] = (), scan=None,
               traces: Iterable = (), size: int = 600, margin: float = 0.1) -> str:
    """SVG document for a 2-D scene.

    ``bands`` are (a, b) pairs drawn as K_b minus the interior of K_a, ``scan``
    is a CriticalScanReport kept with samples, ``traces`` are FlowTrace objects.
    """
    if cloud.dim != 2:
        raise ValueError("plots are 2-D only")
    pts = [cloud.points]
    reach = max([b for _, b in bands], default=0.0)
    if scan is not None and scan.points is not None and len(scan.points):
        pts.append(scan.points)
    for tr in traces:
        pts.append(np.asarray(tr.points))
    allp = np.concatenate(pts)
    lo = allp.min(axis=0) - reach
    hi = allp.max(axis=0) + reach
    span = float(max(hi - lo)) * (1 + 2 * margin) or 1.0
    lo = lo - margin * span / (1 + 2 * margin)
    k = size / span

    def X(p):
        return _f((p[0] - lo[0]) * k), _f(size - (p[1] - lo[1]) * k)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
           '<rect width="100%" height="100%" fill="white"/>']
    for a, b in bands:
        out.append(f'<g class="band" data-a="{_f(a)}" data-b="{_f(b)}">')
        out.append(f'<g fill="#dddddd">' + "".join(
            f'<circle cx="{X(p)[0]}" cy="{X(p)[1]}" r="{_f(b * k)}"/>' for p in cloud.points) + "</g>")
        if a > 0:
            out.append(f'<g fill="white">' + "".join(
                f'<circle cx="{X(p)[0]}" cy="{X(p)[1]}" r="{_f(a * k)}"/>' for p in cloud.points) + "</g>")
        out.append("</g>")
    if scan is not None and scan.points is not None:
        w = _f(scan.spacing * k)
        out.append('<g class="heat">')
        for p, nv in zip(scan.points, scan.norms):
            cx, cy = X(p - scan.spacing / 2 * np.array([1, -1]))
            out.append(f'<rect x="{cx}" y="{cy}" width="{w}" height="{w}" fill="{_heat(float(nv))}"/>')
        out.append("</g>")
    out.append('<g class="cloud" fill="black">' + "".join(
        f'<circle cx="{X(p)[0]}" cy="{X(p)[1]}" r="1.5"/>' for p in cloud.points) + "</g>")
    for tr in traces:
        coords = " ".join(",".join(X(p)) for p in tr.points)
        out.append(f'<polyline class="trace" fill="none" stroke="#108010" stroke-width="1" points="{coords}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def save_plot(path, cloud: PointCloud, **kw) -> None:
    atomic_write(path, render_svg(cloud, **kw))
