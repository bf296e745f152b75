"""Curvature-comparison bounds and stability of mu-critical points under
Hausdorff perturbation, as closed-form evaluators plus an empirical witness
search on point clouds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

import numpy as np

from .distance import AnnulusSpec, ScanError, evaluate_norms, scan_eps
from .geometry import PointCloud, hausdorff, nearest_distance, nearest_distances


class CurvatureClass(IntEnum):
    SPHERICAL = 1
    FLAT = 0
    HYPERBOLIC = -1


class StabilityError(ValueError):
    pass


@dataclass(frozen=True)
class ToponogovValue:
    """Result of :func:`toponogov_bound`.

    ``lower_form`` is set for kappa = +1: the value is then the distance whose
    cosine bounds cos d_K(y) from below, not an upper bound on d_K(y).
    """

    value: float
    lower_form: bool = False

    def __float__(self) -> float:
        return self.value


def toponogov_bound(kappa, dKx: float, dxy: float, mu: float) -> ToponogovValue:
    """Comparison bound on d_K(y) given a mu-critical x at distance ``dKx``.

    kappa = 0 and -1 give upper bounds on d_K(y); kappa = +1 gives the
    lower-form value (see :class:`ToponogovValue`).
    """
    kappa = CurvatureClass(kappa)
    if dKx <= 0 or dxy < 0:
        raise StabilityError("need dKx > 0 and dxy >= 0")
    if kappa is CurvatureClass.FLAT:
        return ToponogovValue(math.sqrt(dKx * dKx + dxy * dxy + 2 * dxy * dKx * mu))
    if kappa is CurvatureClass.HYPERBOLIC:
        arg = math.cosh(dxy) * math.cosh(dKx) + math.sinh(dxy) * math.sinh(dKx) * mu
        return ToponogovValue(math.acosh(max(arg, 1.0)))
    arg = math.cos(dxy) * math.cos(dKx) - math.sin(dxy) * math.sin(dKx) * mu
    if not -1.0 <= arg <= 1.0:
        raise StabilityError("spherical domain violated")
    return ToponogovValue(math.acos(arg), lower_form=True)


def stability_condition(mu: float, C: float, delta: float, dKx: float) -> tuple[bool, float]:
    """Check C >= mu + 2 sqrt(delta / dKx); also return the search radius 4 delta / (C - mu)."""
    if not C > mu:
        raise StabilityError("need C > mu")
    ok = C >= mu + 2.0 * math.sqrt(delta / dKx)
    return ok, 4.0 * delta / (C - mu)


def stability_condition_hyperbolic(C: float, delta: float, dKx: float) -> bool:
    return 9.0 * delta <= 2.0 * math.tanh(dKx) * C * C


def transfer_annulus(a: float, b: float, delta: float, C: float, mu: float) -> AnnulusSpec:
    """Annulus free of mu-critical points for d_K, given a C-critical-free band [a, b] for d_L."""
    if not C > mu:
        raise StabilityError("need C > mu")
    lo = a + delta
    hi = b - 4.0 * delta / (C - mu) - delta
    if not lo < hi:
        raise StabilityError("annulus collapses")
    return AnnulusSpec(lo, hi)


@dataclass
class StabilityReport:
    found: bool
    witness: Optional[np.ndarray]
    witness_norm: Optional[float]
    witness_dist: Optional[float]
    x: np.ndarray
    dLx: float
    radius: float
    spacing: float
    tolerance: float
    candidates: int
    condition_ok: bool

    def to_dict(self) -> dict:
        return {
            "kind": "stability",
            "empirical": True,
            "found": self.found,
            "witness": None if self.witness is None else self.witness.tolist(),
            "witness_norm": self.witness_norm,
            "witness_dist": self.witness_dist,
            "x": self.x.tolist(),
            "dLx": self.dLx,
            "radius": self.radius,
            "spacing": self.spacing,
            "tolerance": self.tolerance,
            "candidates": self.candidates,
            "condition_ok": self.condition_ok,
        }


def verify_stability_empirical(K: PointCloud, L: PointCloud, x, mu: float, C: float, delta: float,
                               h: float, eps_support: Optional[float] = None,
                               tol: Optional[float] = None, check_hausdorff: bool = True) -> StabilityReport:
    """Grid-search B(x, 4 delta / (C - mu)) for a C-critical point y of d_L with d_L(y) >= d_L(x) - tol.

    The grid has step ``h`` and is anchored at integer multiples of ``h``;
    ``tol`` defaults to ``2 h``. The first witness in lexicographic grid order
    is reported.
    """
    x = K.check_point(x)
    if check_hausdorff and hausdorff(K, L) > delta:
        raise StabilityError("hausdorff(K, L) exceeds delta")
    eps = scan_eps(h, K.dim) if eps_support is None else float(eps_support)
    dKx, _ = nearest_distance(x, K)
    _, normK = evaluate_norms(x[None, :], K, eps)
    if normK[0] > mu:
        raise StabilityError(f"x is not mu-critical for K (norm {normK[0]:.4g} > {mu})")
    ok, radius = stability_condition(mu, C, delta, dKx)
    if not ok:
        raise StabilityError("stability condition C >= mu + 2 sqrt(delta / d_K(x)) fails")
    tol = 2.0 * h if tol is None else tol
    lo = np.floor((x - radius) / h).astype(np.int64)
    hi = np.ceil((x + radius) / h).astype(np.int64)
    mesh = np.meshgrid(*[np.arange(a, b + 1) * h for a, b in zip(lo, hi)], indexing="ij")
    Y = np.stack([m.ravel() for m in mesh], axis=1)
    diff = Y - x
    Y = Y[np.sqrt(np.einsum("ij,ij->i", diff, diff)) <= radius]
    dLx, _ = nearest_distance(x, L)
    DL = nearest_distances(Y, L)
    keep = (DL >= dLx - tol) & (DL > 1e-12)
    Y, DL = Y[keep], DL[keep]
    if len(Y) == 0:
        raise ScanError("empty search ball")
    DL, norms = evaluate_norms(Y, L, eps, DL)
    hits = np.nonzero(norms <= C)[0]
    if hits.size == 0:
        return StabilityReport(False, None, None, None, x, dLx, radius, h, tol, len(Y), ok)
    j = int(hits[0])
    return StabilityReport(True, Y[j].copy(), float(norms[j]), float(DL[j]), x, dLx, radius, h, tol, len(Y), ok)
