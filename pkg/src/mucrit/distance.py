"""Generalized gradient of the distance function to a point cloud, mu-critical
tests and grid scans over annular regions.

The gradient at x is -cos(beta) w, where C(w, beta) is the minimal cap
containing the unit directions from x to its nearest cloud points. Grid scans
are empirical: a finite grid can miss critical points, so every report carries
its spacing and an ``empirical`` label.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .geometry import (
    DEGENERATE_CENTER_TOL,
    GeometryError,
    PointCloud,
    min_enclosing_cap,
    nearest_distance,
    nearest_distances,
    point_distances,
)

EPS_REL = 1e-6
EPS_ABS = 1e-9
ON_CLOUD_TOL = 1e-12
TAU_CRIT = 0.05


class ScanError(ValueError):
    pass


def thread_count() -> int:
    """Worker threads for grid evaluation, from ``MUCRIT_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("MUCRIT_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class AnnulusSpec:
    a: float
    b: float

    def __post_init__(self):
        if not (0.0 <= self.a < self.b) or not math.isfinite(self.b):
            raise ScanError(f"invalid annulus [{self.a}, {self.b}]: need 0 <= a < b")

    def contains(self, d: float) -> bool:
        return self.a <= d <= self.b

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True)
class GradientInfo:
    x: np.ndarray
    dist: float
    support: tuple
    axis: np.ndarray
    half_angle: float
    grad: np.ndarray
    norm: float
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "x": self.x.tolist(),
            "dist": self.dist,
            "support": list(self.support),
            "axis": self.axis.tolist(),
            "half_angle": self.half_angle,
            "grad": self.grad.tolist(),
            "norm": self.norm,
            "degenerate": self.degenerate,
        }


@dataclass
class CriticalScanReport:
    annulus: AnnulusSpec
    spacing: float
    samples: int
    min_norm: float
    argmin: np.ndarray
    argmin_dist: float
    profile: list
    eps_support: float
    mu_queried: Optional[float] = None
    mu_free: Optional[bool] = None
    empirical: bool = True
    # per-sample data kept for plotting; not serialized
    points: Optional[np.ndarray] = field(default=None, repr=False)
    dists: Optional[np.ndarray] = field(default=None, repr=False)
    norms: Optional[np.ndarray] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "kind": "critical_scan",
            "empirical": self.empirical,
            "annulus": self.annulus.to_dict(),
            "spacing": self.spacing,
            "eps_support": self.eps_support,
            "samples": self.samples,
            "min_norm": self.min_norm,
            "argmin": self.argmin.tolist(),
            "argmin_dist": self.argmin_dist,
            "profile": [[lvl, v] for lvl, v in self.profile],
            "mu_queried": self.mu_queried,
            "mu_free": self.mu_free,
        }


def default_eps(dist: float, eps_rel: float = EPS_REL) -> float:
    return max(EPS_ABS, eps_rel * dist)


def support_set(x, K: PointCloud, eps_support: Optional[float] = None) -> np.ndarray:
    """Indices of cloud points within ``eps_support`` of the nearest distance.

    ``None`` selects ``max(1e-9, 1e-6 * d_K(x))``.
    """
    x = K.check_point(x)
    d, _ = nearest_distance(x, K)
    if d <= ON_CLOUD_TOL:
        raise GeometryError("gradient undefined on K")
    eps = default_eps(d) if eps_support is None else float(eps_support)
    return K.within(x, d + eps)


def _gradient_from_support(x: np.ndarray, d: float, K: PointCloud, idx: np.ndarray) -> GradientInfo:
    vecs = K.points[idx] - x
    U = vecs / np.linalg.norm(vecs, axis=1)[:, None]
    if len(idx) == 1:
        axis = U[0] / np.linalg.norm(U[0])
        return GradientInfo(x, d, tuple(int(i) for i in idx), axis, 0.0, -axis, 1.0)
    # renormalize defensively; the cap routine rejects vectors off the sphere
    U = U / np.linalg.norm(U, axis=1)[:, None]
    cap = min_enclosing_cap(U)
    if cap.degenerate:
        return GradientInfo(x, d, tuple(int(i) for i in idx), cap.axis, np.pi / 2,
                            np.zeros_like(x), 0.0, degenerate=True)
    norm = float(np.clip(np.cos(cap.half_angle), 0.0, 1.0))
    return GradientInfo(x, d, tuple(int(i) for i in idx), cap.axis, cap.half_angle,
                        -norm * cap.axis, norm)


def gradient(x, K: PointCloud, eps_support: Optional[float] = None) -> GradientInfo:
    """Generalized gradient of d_K at ``x``.

    Parameters
    ----------
    x : array_like
        Query point, not on the cloud.
    K : PointCloud
    eps_support : float, optional
        Slack for the nearest-point set; defaults to ``max(1e-9, 1e-6 d_K(x))``.

    Returns
    -------
    GradientInfo
        ``axis`` points from x toward K; ``grad = -norm * axis`` points away.
        A degenerate cap (the directions surround x) gives ``norm == 0``.
    """
    x = K.check_point(x)
    d, _ = nearest_distance(x, K)
    if d <= ON_CLOUD_TOL:
        raise GeometryError("gradient undefined on K")
    eps = default_eps(d) if eps_support is None else float(eps_support)
    return _gradient_from_support(x, d, K, K.within(x, d + eps))


def is_mu_critical(x, K: PointCloud, mu: float, eps_support: Optional[float] = None) -> bool:
    return gradient(x, K, eps_support).norm <= mu


def grid_points(K: PointCloud, h: float, inflate: float) -> np.ndarray:
    """Axis-aligned grid of step ``h`` covering the bounding box of K grown by ``inflate``.

    Corners are snapped to integer multiples of ``h`` and rows come out in
    lexicographic grid-index order.
    """
    lo, hi = K.bounding_box()
    start = np.floor((lo - inflate) / h).astype(np.int64)
    stop = np.ceil((hi + inflate) / h).astype(np.int64)
    axes = [np.arange(s, e + 1) * h for s, e in zip(start, stop)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def cap_norm_2d(U: np.ndarray) -> float:
    """Norm of the gradient from planar unit directions, via the largest angular gap.

    The minimal covering arc is the complement of the largest gap G between
    consecutive directions, so cos(half_angle) = -cos(G / 2).
    """
    theta = np.sort(np.arctan2(U[:, 1], U[:, 0]))
    gaps = np.diff(theta, append=theta[0] + 2 * np.pi)
    c = -math.cos(0.5 * float(gaps.max()))
    return 0.0 if c <= DEGENERATE_CENTER_TOL else min(c, 1.0)


def _norms_for(X: np.ndarray, D: np.ndarray, K: PointCloud, eps: float, tree) -> np.ndarray:
    out = np.ones(len(X))
    if len(K) == 1:
        return out
    d2, _ = tree.query(X, k=2)
    multi = np.nonzero(d2[:, 1] <= (D + eps) * (1 + 1e-9) + 1e-12)[0]
    if multi.size == 0:
        return out
    cands = tree.query_ball_point(X[multi], (D[multi] + eps) * (1 + 1e-9) + 1e-12)
    for j, cand in zip(multi, cands):
        idx = np.sort(np.asarray(cand, dtype=int))
        x = X[j]
        vecs = K.points[idx] - x
        dist = np.sqrt(np.einsum("ij,ij->i", vecs, vecs))
        sel = dist <= D[j] + eps
        if np.count_nonzero(sel) < 2:
            continue
        U = vecs[sel] / dist[sel][:, None]
        if K.dim == 2:
            out[j] = cap_norm_2d(U)
        else:
            out[j] = _gradient_from_support(x, float(D[j]), K, idx[sel]).norm
    return out


def evaluate_norms(X: np.ndarray, K: PointCloud, eps_support: float,
                   dists: Optional[np.ndarray] = None) -> tuple[np.ndarray, np.ndarray]:
    """Gradient norms at many points with a fixed support slack.

    Chunks are spread over :func:`thread_count` workers and reassembled in input
    order, so results do not depend on the thread count.
    """
    X = np.asarray(X, dtype=float).reshape(-1, K.dim)
    D = nearest_distances(X, K) if dists is None else dists
    if np.any(D <= ON_CLOUD_TOL):
        raise GeometryError("gradient undefined on K")
    tree = K.tree if K.tree is not None else cKDTree(K.points)
    chunk = 4096
    bounds = [(s, min(s + chunk, len(X))) for s in range(0, len(X), chunk)]
    n_threads = thread_count()
    if n_threads == 1 or len(bounds) == 1:
        parts = [_norms_for(X[s:e], D[s:e], K, eps_support, tree) for s, e in bounds]
    else:
        with ThreadPoolExecutor(n_threads) as pool:
            parts = list(pool.map(
                lambda se: _norms_for(X[se[0]:se[1]], D[se[0]:se[1]], K, eps_support, tree), bounds))
    norms = np.concatenate(parts) if parts else np.empty(0)
    return D, norms


def scan_eps(h: float, dim: int) -> float:
    # a grid point sits within h*sqrt(dim)/2 of any location, which shifts
    # distance differences between two sites by at most h*sqrt(dim)
    return h * math.sqrt(dim)


def critical_scan(K: PointCloud, annulus: AnnulusSpec, h: float,
                  eps_support: Optional[float] = None, mu: Optional[float] = None,
                  points: Optional[np.ndarray] = None, keep_samples: bool = False) -> CriticalScanReport:
    """Empirical scan of gradient norms over the annulus K_[a, b].

    With ``points`` omitted, a grid of step ``h`` is laid over the bounding box
    of K inflated by ``b`` (2-D and 3-D only). ``eps_support`` defaults to the
    grid-scale slack ``h * sqrt(dim)`` so that critical points falling between
    grid nodes are still caught.
    """
    if not h > 0:
        raise ScanError("grid spacing must be positive")
    if points is None:
        if K.dim not in (2, 3):
            raise ScanError("grid mode supports dimensions 2 and 3; pass candidate points")
        X = grid_points(K, h, annulus.b)
    else:
        X = np.asarray(points, dtype=float).reshape(-1, K.dim)
    D = nearest_distances(X, K)
    keep = (D >= annulus.a) & (D <= annulus.b) & (D > ON_CLOUD_TOL)
    X, D = X[keep], D[keep]
    if len(X) == 0:
        raise ScanError("empty annulus sample")
    eps = scan_eps(h, K.dim) if eps_support is None else float(eps_support)
    D, norms = evaluate_norms(X, K, eps, D)
    i = int(np.argmin(norms))  # first occurrence = lexicographically smallest grid index
    bins = np.floor((D - annulus.a) / h).astype(np.int64)
    profile = []
    for k in np.unique(bins):
        profile.append((float(annulus.a + k * h), float(norms[bins == k].min())))
    min_norm = float(norms[i])
    report = CriticalScanReport(
        annulus=annulus, spacing=float(h), samples=int(len(X)), min_norm=min_norm,
        argmin=X[i].copy(), argmin_dist=float(D[i]), profile=profile, eps_support=eps,
        mu_queried=None if mu is None else float(mu),
        mu_free=None if mu is None else bool(min_norm > mu),
    )
    if keep_samples:
        report.points, report.dists, report.norms = X, D, norms
    return report


def _default_dmax(K: PointCloud, h: float) -> float:
    from .geometry import min_enclosing_ball
    # every critical point of a finite cloud lies in its convex hull
    return 1.05 * min_enclosing_ball(K.points).radius + 2 * h


def _first_level(K: PointCloud, threshold: float, h: float, d_max: Optional[float],
                 eps_support: Optional[float], strict: bool) -> float:
    d_max = _default_dmax(K, h) if d_max is None else d_max
    if d_max <= h:
        return math.inf
    try:
        rep = critical_scan(K, AnnulusSpec(h, d_max), h, eps_support, keep_samples=True)
    except ScanError:
        return math.inf
    hit = rep.norms < threshold if strict else rep.norms <= threshold
    if not np.any(hit):
        return math.inf
    return float(rep.dists[hit].min())


def estimate_wfs(K: PointCloud, h: float, d_max: Optional[float] = None,
                 tau_crit: float = TAU_CRIT, eps_support: Optional[float] = None) -> float:
    """Smallest scanned distance level carrying a near-critical point (norm < tau_crit).

    Returns ``inf`` when the scan over [h, d_max] finds none.
    """
    return _first_level(K, tau_crit, h, d_max, eps_support, strict=True)


def estimate_mu_reach(K: PointCloud, mu: float, h: float, d_max: Optional[float] = None,
                      eps_support: Optional[float] = None) -> float:
    """Smallest scanned distance level carrying a mu-critical point; ``inf`` if none."""
    return _first_level(K, mu, h, d_max, eps_support, strict=False)


__all__ = [
    "AnnulusSpec", "GradientInfo", "CriticalScanReport", "ScanError",
    "support_set", "gradient", "is_mu_critical", "critical_scan",
    "estimate_wfs", "estimate_mu_reach", "grid_points", "evaluate_norms", "scan_eps",
    "point_distances", "thread_count",
]
