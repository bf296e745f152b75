"""Euclidean primitives: point clouds, nearest neighbours, Hausdorff distance,
minimal enclosing balls and minimal enclosing spherical caps.

Every distance that feeds a comparison goes through :func:`point_distances`,
so the k-d tree path and the brute-force path return bit-identical values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

# clouds larger than this get a k-d tree for nearest-neighbour candidates
KDTREE_THRESHOLD = 256

UNIT_TOL = 1e-9
DEGENERATE_CENTER_TOL = 1e-12
_MEB_SEED = 20240607


class GeometryError(ValueError):
    """Raised on malformed geometric input (dimension mismatch, empty sets...)."""


def point_distances(points: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Euclidean distances from ``x`` to each row of ``points``."""
    diff = points - x
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Finite ordered point set in R^dim; row index is the point identifier."""

    points: np.ndarray
    _tree: Optional[cKDTree] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim == 1:
            pts = pts.reshape(1, -1)
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise GeometryError("point cloud must be a nonempty (n, dim) array")
        if not np.all(np.isfinite(pts)):
            raise GeometryError("point cloud has non-finite coordinates")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if pts.shape[0] > KDTREE_THRESHOLD:
            object.__setattr__(self, "_tree", cKDTree(pts))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def tree(self) -> Optional[cKDTree]:
        return self._tree

    def check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise GeometryError(f"point has dimension {x.shape} but cloud has dimension {self.dim}")
        return x

    def within(self, x: np.ndarray, radius: float) -> np.ndarray:
        """Sorted indices of points at distance <= radius from x (exact comparison)."""
        if self._tree is None:
            idx = np.arange(len(self))
        else:
            # pad the tree radius; the exact filter below decides membership
            idx = np.asarray(self._tree.query_ball_point(x, radius * (1 + 1e-9) + 1e-12), dtype=int)
            idx.sort()
        if idx.size == 0:
            return idx
        d = point_distances(self.points[idx], x)
        return idx[d <= radius]

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.points.min(axis=0), self.points.max(axis=0)

    def transformed(self, matrix=None, shift=None, scale: float = 1.0) -> "PointCloud":
        pts = self.points * scale
        if matrix is not None:
            pts = pts @ np.asarray(matrix, dtype=float).T
        if shift is not None:
            pts = pts + np.asarray(shift, dtype=float)
        return PointCloud(pts)


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def contains(self, p, tol: float = 1e-9) -> bool:
        return float(np.linalg.norm(np.asarray(p, dtype=float) - self.center)) <= self.radius + tol


@dataclass(frozen=True)
class Cone:
    """Closed spherical cap C(axis, half_angle), optionally based at a point.

    ``degenerate`` marks a cap built from directions whose convex hull
    contains the origin; its axis is then an arbitrary fixed choice.
    """

    axis: np.ndarray
    half_angle: float
    base: Optional[np.ndarray] = None
    degenerate: bool = False

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float)
        if abs(np.linalg.norm(axis) - 1.0) > 1e-12:
            raise GeometryError("cone axis must be a unit vector")
        if not (0.0 <= self.half_angle <= np.pi):
            raise GeometryError("cone half-angle must lie in [0, pi]")
        object.__setattr__(self, "axis", axis)
        if self.base is not None:
            object.__setattr__(self, "base", np.asarray(self.base, dtype=float))

    @property
    def acute(self) -> bool:
        return self.half_angle < np.pi / 2

    def contains_direction(self, u, tol: float = 1e-9) -> bool:
        u = np.asarray(u, dtype=float)
        return angle_between(u, self.axis) <= self.half_angle + tol


def angle_between(u: np.ndarray, v: np.ndarray) -> float:
    """Angle in [0, pi] between two nonzero vectors, stable near 0 and pi."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    a = u * nv
    b = v * nu
    return float(2.0 * np.arctan2(np.linalg.norm(a - b), np.linalg.norm(a + b)))


def nearest_distance(x, K: PointCloud) -> tuple[float, int]:
    """Distance from ``x`` to the cloud and the lowest index attaining it."""
    x = K.check_point(x)
    if K.tree is None:
        d = point_distances(K.points, x)
        i = int(np.argmin(d))
        return float(d[i]), i
    d_tree, _ = K.tree.query(x)
    cand = K.within(x, float(d_tree))
    if cand.size == 0:  # pragma: no cover - padding in within() makes this unreachable
        d = point_distances(K.points, x)
        i = int(np.argmin(d))
        return float(d[i]), i
    d = point_distances(K.points[cand], x)
    j = int(np.argmin(d))
    return float(d[j]), int(cand[j])


def nearest_distances(X: np.ndarray, K: PointCloud) -> np.ndarray:
    """Vectorized distance to ``K`` for many query points (rows of ``X``)."""
    X = np.asarray(X, dtype=float).reshape(-1, K.dim)
    if K.tree is None:
        out = np.empty(len(X))
        for s in range(0, len(X), 2048):
            chunk = X[s:s + 2048]
            diff = chunk[:, None, :] - K.points[None, :, :]
            out[s:s + 2048] = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)).min(axis=1)
        return out
    k = min(4, len(K))
    _, idx = K.tree.query(X, k=k)
    idx = idx.reshape(len(X), k)
    diff = X[:, None, :] - K.points[idx]
    d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return d.min(axis=1)


def hausdorff(K: PointCloud, L: PointCloud) -> float:
    """Symmetric Hausdorff distance between two point clouds."""
    if K.dim != L.dim:
        raise GeometryError(f"dimension mismatch: {K.dim} vs {L.dim}")
    return float(max(nearest_distances(K.points, L).max(), nearest_distances(L.points, K).max()))


# ---------------------------------------------------------------- balls -- #

def _circumball(B: Sequence[np.ndarray]) -> tuple[np.ndarray, float]:
    """Smallest ball with all of ``B`` on its boundary, within their affine hull."""
    p0 = B[0]
    if len(B) == 1:
        return p0.copy(), 0.0
    A = np.array([b - p0 for b in B[1:]])
    rhs = 0.5 * np.einsum("ij,ij->i", A, A)
    G = A @ A.T
    try:
        lam = np.linalg.solve(G, rhs)
    except np.linalg.LinAlgError:
        lam = np.linalg.lstsq(G, rhs, rcond=None)[0]
    c = p0 + lam @ A
    r = max(float(np.linalg.norm(b - c)) for b in B)
    return c, r


def _mtf(pts: list, n: int, boundary: list, dim: int) -> tuple[np.ndarray, float]:
    # move-to-front recursion; depth bounded by dim + 1
    c, r = _circumball(boundary) if boundary else (None, -1.0)
    if len(boundary) == dim + 1:
        return c, r
    i = 0
    while i < n:
        p = pts[i]
        if c is None or float(np.linalg.norm(p - c)) > r * (1 + 1e-12) + 1e-15:
            c, r = _mtf(pts, i, boundary + [p], dim)
            pts.insert(0, pts.pop(i))
        i += 1
    return c, r


def min_enclosing_ball(P) -> Ball:
    """Smallest enclosing ball by Welzl's move-to-front algorithm.

    Input order is shuffled with a fixed seed, so the output is deterministic.
    """
    P = np.asarray(P, dtype=float)
    if P.ndim == 1:
        P = P.reshape(1, -1)
    if P.size == 0 or len(P) == 0:
        raise GeometryError("min_enclosing_ball of an empty set")
    if len(P) == 1:
        return Ball(P[0].copy(), 0.0)
    order = np.random.default_rng(_MEB_SEED).permutation(len(P))
    pts = [P[i] for i in order]
    c, r = _mtf(pts, len(pts), [], P.shape[1])
    r = float(point_distances(P, c).max())
    return Ball(np.asarray(c, dtype=float), r)


def meb_radius_triangles(A: np.ndarray, B: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Vectorized minimal-enclosing-ball radius of triangles (rows of A, B, C).

    Obtuse or right triangles are enclosed by the ball on their longest edge;
    acute ones by the circumball.
    """
    a2 = np.einsum("ij,ij->i", B - C, B - C)
    b2 = np.einsum("ij,ij->i", A - C, A - C)
    c2 = np.einsum("ij,ij->i", A - B, A - B)
    longest = np.maximum(np.maximum(a2, b2), c2)
    obtuse = 2 * longest >= a2 + b2 + c2
    # 16 * area^2 via Heron in squared-length form
    area16 = 2 * (a2 * b2 + b2 * c2 + c2 * a2) - (a2 * a2 + b2 * b2 + c2 * c2)
    with np.errstate(divide="ignore", invalid="ignore"):
        circ = np.sqrt(a2 * b2 * c2 / np.where(area16 > 0, area16, np.nan))
    return np.where(obtuse | ~np.isfinite(circ), 0.5 * np.sqrt(longest), circ)


def min_enclosing_cap(U) -> Cone:
    """Minimal spherical cap containing the unit vectors ``U``.

    The cap axis is the normalized centre of the minimal enclosing ball of the
    directions. When that centre is (numerically) the origin the directions
    surround it, and a degenerate right-angled cap on the first basis vector
    is returned.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U.reshape(1, -1)
    if len(U) == 0 or U.size == 0:
        raise GeometryError("min_enclosing_cap of an empty set")
    norms = np.linalg.norm(U, axis=1)
    if np.any(np.abs(norms - 1.0) > UNIT_TOL):
        raise GeometryError("min_enclosing_cap requires unit vectors")
    ball = min_enclosing_ball(U)
    cn = float(np.linalg.norm(ball.center))
    if cn <= DEGENERATE_CENTER_TOL:
        axis = np.zeros(U.shape[1])
        axis[0] = 1.0
        return Cone(axis, np.pi / 2, degenerate=True)
    axis = ball.center / cn
    cos_min = float(np.clip((U @ axis).min(), -1.0, 1.0))
    return Cone(axis, float(np.arccos(cos_min)))
