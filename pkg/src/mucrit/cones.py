"""Spanning cones for offsets of point clouds, complementary cones and the
closed-form conditions under which an acute spanning cone exists."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .distance import AnnulusSpec, gradient
from .geometry import (
    Cone,
    GeometryError,
    PointCloud,
    angle_between,
    min_enclosing_cap,
    nearest_distance,
    nearest_distances,
    point_distances,
)

RIM_POINTS = 64
ACUTE_MARGIN = 1e-9


@dataclass(frozen=True)
class SpanningConeResult:
    cone: Cone
    acute: bool
    covered_count: int
    method: str  # "exact-directions" or "cap-inflated(m=...)"


def _orthonormal_complement(u: np.ndarray) -> np.ndarray:
    # rows spanning the plane orthogonal to u (3-D)
    e = np.eye(3)[int(np.argmin(np.abs(u)))]
    a = np.cross(u, e)
    a /= np.linalg.norm(a)
    b = np.cross(u, a)
    return np.stack([a, b])


def cap_rim(axis: np.ndarray, half_angle: float, m: int = RIM_POINTS) -> np.ndarray:
    """Unit vectors on the boundary of the cap C(axis, half_angle).

    In 2-D the rim is exactly two directions; in 3-D it is sampled at ``m``
    uniformly spaced points.
    """
    axis = np.asarray(axis, dtype=float)
    if axis.shape[0] == 2:
        c, s = math.cos(half_angle), math.sin(half_angle)
        rot = lambda sgn: np.array([c * axis[0] - sgn * s * axis[1], sgn * s * axis[0] + c * axis[1]])
        return np.stack([rot(1.0), rot(-1.0)])
    if axis.shape[0] != 3:
        raise GeometryError("cap inflation supports dimensions 2 and 3")
    plane = _orthonormal_complement(axis)
    t = 2 * np.pi * np.arange(m) / m
    ring = np.cos(t)[:, None] * plane[0] + np.sin(t)[:, None] * plane[1]
    rim = math.cos(half_angle) * axis + math.sin(half_angle) * ring
    return rim / np.linalg.norm(rim, axis=1)[:, None]


def spanning_cone(x, K: PointCloud, delta: float, r: float, m: int = RIM_POINTS) -> SpanningConeResult:
    """Minimal cone from ``x`` covering K_delta within distance r.

    delta = 0 uses the exact directions to the cloud points in the closed
    r-ball. delta > 0 replaces each point within r + delta by the cap of
    directions to its delta-ball and takes the minimal cap around the union
    (exact in 2-D, rim-sampled with ``m`` points in 3-D).
    """
    x = K.check_point(x)
    if delta < 0 or r <= 0:
        raise GeometryError("need delta >= 0 and r > 0")
    dK, _ = nearest_distance(x, K)
    if dK > r + delta:
        raise GeometryError("K_delta does not meet the closed r-ball around x")
    if delta == 0:
        idx = K.within(x, r)
        if dK <= 1e-12:
            raise GeometryError("x lies on K")
        vecs = K.points[idx] - x
        U = vecs / np.linalg.norm(vecs, axis=1)[:, None]
        method = "exact-directions"
    else:
        if K.dim not in (2, 3):
            raise GeometryError("cap inflation supports dimensions 2 and 3")
        idx = K.within(x, r + delta)
        d = point_distances(K.points[idx], x)
        if np.any(d <= delta):
            raise GeometryError("x inside K_delta")
        vecs = (K.points[idx] - x) / d[:, None]
        U = np.concatenate([cap_rim(u, math.asin(min(1.0, delta / di)), m) for u, di in zip(vecs, d)])
        method = "cap-inflated" if K.dim == 2 else f"cap-inflated(m={m})"
    cap = min_enclosing_cap(U)
    cone = Cone(cap.axis, cap.half_angle, base=x, degenerate=cap.degenerate)
    cos_all = U @ cone.axis
    # a posteriori coverage check on every direction that built the cap
    if not cap.degenerate and np.any(np.arccos(np.clip(cos_all, -1, 1)) > cone.half_angle + 1e-6):
        raise GeometryError("spanning cone failed its coverage check")  # pragma: no cover
    acute = (not cap.degenerate) and cone.half_angle < np.pi / 2 - ACUTE_MARGIN
    return SpanningConeResult(cone, acute, int(len(U)), method)


def complementary(c: Cone) -> Cone:
    """C(w, beta) -> C(w, pi/2 - beta) for an acute cone."""
    if not c.acute:
        raise GeometryError("complementary cone needs an acute cone")
    return Cone(c.axis, np.pi / 2 - c.half_angle, base=c.base)


def subordinate_vector(c: Cone) -> np.ndarray:
    """Axis of the cone: interior whenever the half-angle is positive."""
    return c.axis.copy()


def local_cone_condition(mu: float, r: float, delta: float, dKx: float) -> bool:
    """delta <= d_K(x) - r (4 - mu^2) / (4 + mu^2)."""
    return delta <= dKx - r * (4.0 - mu * mu) / (4.0 + mu * mu)


def local_cone_condition_hyperbolic(mu: float, r: float, delta: float, dKx: float) -> bool:
    return 9.0 * (r + delta - dKx) <= 4.0 * math.tanh(0.5 * (r - delta + dKx)) * mu * mu


def _sample_annulus(K: PointCloud, annulus: AnnulusSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    lo, hi = K.bounding_box()
    lo, hi = lo - annulus.b, hi + annulus.b
    out = []
    tries = 0
    while sum(len(o) for o in out) < n and tries < 200:
        X = rng.uniform(lo, hi, size=(4 * n, K.dim))
        D = nearest_distances(X, K)
        out.append(X[(D >= annulus.a) & (D <= annulus.b)])
        tries += 1
    X = np.concatenate(out) if out else np.empty((0, K.dim))
    return X[:n]


def probe_semicontinuity(K: PointCloud, delta: float, r: float, annulus: AnnulusSpec,
                         etas: Sequence[float] = (0.1, 0.03, 0.01, 0.003),
                         eps_grid: Sequence[float] = (0.0, 0.01, 0.05),
                         n_pairs: int = 200, seed: int = 0, field: str = "spanning",
                         pairs: Optional[Sequence[tuple]] = None) -> dict:
    """Empirical probe of upper semicontinuity of a cone field over an annulus.

    For pairs (x, y) with |x - y| <= eta the containment
    C(w_y, beta_y) in C(w_x, beta_x + eps) fails by
    angle(w_y, w_x) + beta_y - beta_x - eps. The largest positive failure is
    reported per (eta, eps). ``field`` selects the spanning-cone field
    (``"spanning"``) or the nearest-point cone field behind the gradient
    (``"gradient"``). Informational only.
    """
    def cone_at(p):
        if field == "gradient":
            g = gradient(p, K)
            return g.axis, g.half_angle
        res = spanning_cone(p, K, delta, r)
        return res.cone.axis, res.cone.half_angle

    def violation(p, q, eps):
        wx, bx = cone_at(p)
        wy, by = cone_at(q)
        return max(0.0, angle_between(wy, wx) + by - bx - eps)

    rng = np.random.default_rng(seed)
    if pairs is not None:
        table = {"explicit": {str(e): max((violation(np.asarray(p, float), np.asarray(q, float), e)
                                          for p, q in pairs), default=0.0) for e in eps_grid}}
        return {"kind": "semicontinuity_probe", "empirical": True, "field": field, "violations": table}
    X = _sample_annulus(K, annulus, n_pairs, rng)
    if len(X) == 0:
        raise GeometryError("empty annulus sample")
    table = {}
    for eta in etas:
        dirs = rng.normal(size=X.shape)
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        Y = X + eta * rng.uniform(0, 1, size=(len(X), 1)) * dirs
        DY = nearest_distances(Y, K)
        ok = (DY >= annulus.a) & (DY <= annulus.b)
        row = {}
        cones = [(cone_at(p), cone_at(q)) for p, q in zip(X[ok], Y[ok])]
        for eps in eps_grid:
            worst = 0.0
            for (wx, bx), (wy, by) in cones:
                worst = max(worst, angle_between(wy, wx) + by - bx - eps)
            row[str(eps)] = worst
        table[str(eta)] = row
    return {"kind": "semicontinuity_probe", "empirical": True, "field": field,
            "pairs": int(len(X)), "violations": table}
