"""Synthetic shapes with analytic Hausdorff bounds: circles, pairs of circles,
a cusp wedge, segments and spheres."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import PointCloud

KINDS = ("circle", "two-circles", "cusp-wedge", "sphere", "segment")


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class ShapeSpec:
    kind: str
    params: dict = field(default_factory=dict)
    noise: float = 0.0
    count: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ShapeError(f"unknown shape kind {self.kind!r}; expected one of {KINDS}")
        if self.count < 1:
            raise ShapeError("count must be >= 1")
        if self.noise < 0:
            raise ShapeError("noise must be >= 0")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params), "noise": self.noise,
                "count": self.count, "seed": self.seed}


def _circle(n: int, radius: float, center, phase: float = 0.0) -> np.ndarray:
    t = phase + 2 * np.pi * np.arange(n) / n
    return np.asarray(center, dtype=float) + radius * np.c_[np.cos(t), np.sin(t)]


def _circle_gap(n: int, radius: float) -> float:
    # farthest circle point from n equally spaced samples: the arc midpoint
    return 2 * radius * math.sin(math.pi / (2 * n))


def _radial_noise(P: np.ndarray, center, eta: float, rng) -> np.ndarray:
    if eta == 0:
        return P
    v = P - np.asarray(center, dtype=float)
    v /= np.linalg.norm(v, axis=1)[:, None]
    return P + rng.uniform(-eta, eta, size=(len(P), 1)) * v


def _ball_noise(P: np.ndarray, eta: float, rng) -> np.ndarray:
    if eta == 0:
        return P
    d = rng.normal(size=P.shape)
    d /= np.linalg.norm(d, axis=1)[:, None]
    rad = eta * rng.uniform(0, 1, size=(len(P), 1)) ** (1.0 / P.shape[1])
    return P + rad * d


def _segment_points(p0, p1, n: int, include_end: bool = True) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n) if include_end else np.arange(n) / n
    p0, p1 = np.asarray(p0, float), np.asarray(p1, float)
    return p0 + t[:, None] * (p1 - p0)


def fibonacci_sphere(n: int, radius: float = 1.0, center=(0.0, 0.0, 0.0)) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    phi = np.pi * (3 - math.sqrt(5)) * i
    rho = np.sqrt(1 - z * z)
    return np.asarray(center, float) + radius * np.c_[rho * np.cos(phi), rho * np.sin(phi), z]


def generate(spec: ShapeSpec) -> tuple[PointCloud, float]:
    """Sample the shape and return ``(cloud, dH_bound)``.

    ``dH_bound`` bounds the Hausdorff distance from the cloud to the ideal
    shape: the largest distance from a shape point to the noise-free samples,
    plus the noise amplitude. Output depends only on ``spec``.
    """
    rng = np.random.default_rng(spec.seed)
    p = spec.params
    n, eta = spec.count, spec.noise
    if spec.kind == "circle":
        R = float(p.get("radius", 1.0))
        c = p.get("center", (0.0, 0.0))
        if R <= 0:
            raise ShapeError("radius must be positive")
        P = _radial_noise(_circle(n, R, c, float(p.get("phase", 0.0))), c, eta, rng)
        return PointCloud(P), (_circle_gap(n, R) if n > 1 else 2 * R) + eta
    if spec.kind == "two-circles":
        r1, r2 = (float(v) for v in p.get("radii", (0.3, 0.5)))
        sep = float(p.get("separation", 2.0))
        if min(r1, r2) <= 0 or sep <= r1 + r2:
            raise ShapeError("two-circles needs positive radii and disjoint circles")
        # split proportionally to circumference; even counts keep the facing points on the axis
        n1 = max(2, 2 * round(n * r1 / (r1 + r2) / 2))
        n2 = max(2, n - n1)
        c2 = (sep, 0.0)
        P = np.concatenate([_radial_noise(_circle(n1, r1, (0.0, 0.0)), (0.0, 0.0), eta, rng),
                            _radial_noise(_circle(n2, r2, c2), c2, eta, rng)])
        return PointCloud(P), max(_circle_gap(n1, r1), _circle_gap(n2, r2)) + eta
    if spec.kind == "segment":
        length = float(p.get("length", 2.0))
        if length <= 0 or n < 2:
            raise ShapeError("segment needs positive length and count >= 2")
        P = _ball_noise(_segment_points((-length / 2, 0.0), (length / 2, 0.0), n), eta, rng)
        return PointCloud(P), length / (2 * (n - 1)) + eta
    if spec.kind == "cusp-wedge":
        alpha = float(p.get("angle", 0.3))
        length = float(p.get("length", 1.0))
        if not 0 < alpha < np.pi or length <= 0 or n < 3:
            raise ShapeError("cusp-wedge needs angle in (0, pi), positive length, count >= 3")
        m = (n + 1) // 2
        ends = [(length * math.cos(s * alpha / 2), length * math.sin(s * alpha / 2)) for s in (1, -1)]
        arm1 = _segment_points((0.0, 0.0), ends[0], m)
        arm2 = _segment_points((0.0, 0.0), ends[1], n - m + 1)[1:]
        P = _ball_noise(np.concatenate([arm1, arm2]), eta, rng)
        gap = max(length / (m - 1), length / max(1, n - m)) / 2
        return PointCloud(P), gap + eta
    # sphere
    R = float(p.get("radius", 1.0))
    if R <= 0:
        raise ShapeError("radius must be positive")
    P = fibonacci_sphere(n, R, p.get("center", (0.0, 0.0, 0.0)))
    bound = sphere_cover_radius(P, R, p.get("center", (0.0, 0.0, 0.0)))
    return PointCloud(_ball_noise(P, eta, rng)), bound + eta


def sphere_cover_radius(P: np.ndarray, R: float, center, reference: int = 20000) -> float:
    """Numerical covering radius of samples on a sphere.

    Measured against a dense Fibonacci reference and padded by that reference's
    own covering scale, so the value stays an upper bound.
    """
    from scipy.spatial import cKDTree

    ref = fibonacci_sphere(reference, R, center)
    d, _ = cKDTree(P).query(ref)
    return float(d.max()) + R * math.sqrt(4 * math.pi / reference)


def dense_reference(spec: ShapeSpec, resolution: int = 20000) -> tuple[np.ndarray, float]:
    """Dense noise-free sampling of the ideal shape and its own covering radius."""
    p = spec.params
    if spec.kind == "circle":
        R = float(p.get("radius", 1.0))
        return _circle(resolution, R, p.get("center", (0.0, 0.0))), _circle_gap(resolution, R)
    if spec.kind == "two-circles":
        r1, r2 = (float(v) for v in p.get("radii", (0.3, 0.5)))
        sep = float(p.get("separation", 2.0))
        P = np.concatenate([_circle(resolution, r1, (0.0, 0.0)), _circle(resolution, r2, (sep, 0.0))])
        return P, max(_circle_gap(resolution, r1), _circle_gap(resolution, r2))
    if spec.kind == "segment":
        length = float(p.get("length", 2.0))
        return _segment_points((-length / 2, 0), (length / 2, 0), resolution), length / (2 * (resolution - 1))
    if spec.kind == "cusp-wedge":
        alpha = float(p.get("angle", 0.3))
        length = float(p.get("length", 1.0))
        ends = [(length * math.cos(s * alpha / 2), length * math.sin(s * alpha / 2)) for s in (1, -1)]
        P = np.concatenate([_segment_points((0, 0), e, resolution) for e in ends])
        return P, length / (2 * (resolution - 1))
    R = float(p.get("radius", 1.0))
    return fibonacci_sphere(resolution, R, p.get("center", (0.0, 0.0, 0.0))), R * math.sqrt(4 * math.pi / resolution)
