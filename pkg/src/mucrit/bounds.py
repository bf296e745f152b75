"""Sampling-condition inequalities for offset reconstruction, competing bound
formulas, crossover search and the end-to-end certificate."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .distance import AnnulusSpec, CriticalScanReport, critical_scan
from .geometry import PointCloud, hausdorff
from .stability import CurvatureClass

ROLES = ("critical-free-on-A", "critical-free-on-S")


class BoundsError(ValueError):
    pass


class Band(NamedTuple):
    """Closed distance band [lo, hi]; may be a single level."""

    lo: float
    hi: float


class Slack(NamedTuple):
    value: float
    threshold: float
    passed: bool
    relation: str

    def to_dict(self) -> dict:
        return {"value": self.value, "threshold": self.threshold, "pass": self.passed,
                "relation": self.relation, "margin": self.threshold - self.value}


def _check_mu(mu: float):
    if not 0.0 < mu < 1.0:
        raise BoundsError("mu must lie in (0, 1)")


def theorem_big_requirements(mu: float, r: float, delta: float, conservative: bool = False) -> tuple[Band, bool]:
    """Band that must be mu-critical-free, and whether (4 + mu^2) delta < mu^2 r.

    ``conservative`` widens the band to [r - delta, r + delta + 2 delta / mu].
    """
    _check_mu(mu)
    if not 0.0 <= delta < r:
        raise BoundsError("need 0 <= delta < r")
    hi = (r + delta if conservative else r - delta) + 2.0 * delta / mu
    return Band(r - delta, hi), (4.0 + mu * mu) * delta < mu * mu * r


def theorem_bigkappa_requirements(mu: float, r: float, delta: float, conservative: bool = False) -> tuple[Band, bool]:
    """Negative-curvature analogue: band [r - delta, r - delta + 4 delta / mu] and 9 delta < 2 tanh(r - delta) mu^2."""
    _check_mu(mu)
    if not 0.0 <= delta < r:
        raise BoundsError("need 0 <= delta < r")
    hi = (r + delta if conservative else r - delta) + 4.0 * delta / mu
    return Band(r - delta, hi), 9.0 * delta < 2.0 * math.tanh(r - delta) * mu * mu


def hyperbolic_delta_root(mu: float, r: float, tol: float = 1e-10) -> float:
    """Root of 9 delta = 2 tanh(r - delta) mu^2 on (0, r), by bisection."""
    f = lambda d: 9.0 * d - 2.0 * math.tanh(r - d) * mu * mu
    lo, hi = 0.0, r
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return lo


def corollary_sampling_bound(mu: float, r: float, a: float, b: float, kappa=0) -> float:
    """Largest admissible Hausdorff distance between sample and shape.

    kappa = 0: min{r - a, (b - r) mu / (4 - mu), mu^2 r / (4 + mu^2)}, where the
    last term is a strict bound. kappa = -1 replaces the last term by the
    root of 9 delta = 2 tanh(r - delta) mu^2 (also strict).
    """
    _check_mu(mu)
    kappa = CurvatureClass(kappa)
    if not a < r < b:
        raise BoundsError("need a < r < b")
    first = min(r - a, (b * mu - r * mu) / (4.0 - mu))
    if kappa is CurvatureClass.FLAT:
        third = mu * mu * r / (4.0 + mu * mu)
    elif kappa is CurvatureClass.HYPERBOLIC:
        third = hyperbolic_delta_root(mu, r)
    else:
        raise BoundsError("corollary bound is stated for kappa in {0, -1}")
    out = min(first, third)
    if out <= 0:
        raise BoundsError("infeasible geometry")
    return out


def corollary_slacks(mu: float, r: float, a: float, b: float, kappa, d_H: float) -> dict:
    """Each corollary inequality for a given Hausdorff distance, with its margin."""
    kappa = CurvatureClass(kappa)
    out = {
        "dH_le_r_minus_a": Slack(d_H, r - a, d_H <= r - a, "<="),
        "dH_le_outer_term": Slack(d_H, (b * mu - r * mu) / (4.0 - mu), d_H <= (b * mu - r * mu) / (4.0 - mu), "<="),
    }
    if kappa is CurvatureClass.FLAT:
        t = mu * mu * r / (4.0 + mu * mu)
        out["dH_lt_mu2r_over_4_plus_mu2"] = Slack(d_H, t, d_H < t, "<")
    else:
        t = 2.0 * math.tanh(r - d_H) * mu * mu
        out["9dH_lt_2tanh_mu2"] = Slack(9.0 * d_H, t, 9.0 * d_H < t, "<")
    return out


def annular_bound_this_paper(mu: float, a: float, b: float) -> tuple[float, float]:
    """(delta_max, r) for reconstructing from a mu-critical-free band [a, b].

    delta_max = min{mu (b - a) / 4, mu^2 b / (4 + 4 mu)}, r = b (4 + mu^2) / (4 + 4 mu).
    """
    _check_mu(mu)
    if not 0.0 <= a < b:
        raise BoundsError("need 0 <= a < b")
    delta = min(mu * (b - a) / 4.0, mu * mu * b / (4.0 + 4.0 * mu))
    return delta, b * (4.0 + mu * mu) / (4.0 + 4.0 * mu)


def annular_bound_ccl(mu: float, a: float, b: float) -> float:
    return (b - a) * bound_ccl(mu)


def annular_bound_rvc(mu: float, a: float, b: float) -> float:
    return (b - a) * bound_rvc(mu)


def bound_ours(mu: float) -> float:
    """delta / r_mu bound: mu^2 / (4 + 4 mu)."""
    return mu * mu / (4.0 + 4.0 * mu)


def bound_ccl(mu: float) -> float:
    """Earlier compact-set bound: mu^2 / (5 mu^2 + 12)."""
    return mu * mu / (5.0 * mu * mu + 12.0)


def bound_rvc(mu: float) -> float:
    """Rips-versus-Cech bound (closed-form radical)."""
    radicand = -8 * mu**2 + 4 * mu**3 + 18 * mu + 2 * mu**4 + 9 + mu**6 - 4 * mu**5
    if radicand < 0:
        raise BoundsError("negative radicand")
    num = -3 * mu + 3 * mu**2 - 3 + math.sqrt(radicand)
    den = 7 * mu**2 + 22 * mu + mu**4 - 4 * mu**3 + 1
    return num / den


BOUNDS = {"ours": bound_ours, "ccl": bound_ccl, "rvc": bound_rvc}


def crossover(f: Callable[[float], float], g: Callable[[float], float], lo: float, hi: float,
              grid_step: float = 1e-3, tol: float = 1e-6) -> Optional[float]:
    """First strict sign change of f - g on [lo, hi], refined by bisection.

    The interval is sampled at ``grid_step``; ``None`` means no sign change
    was seen on that grid.
    """
    n = max(1, int(math.ceil((hi - lo) / grid_step)))
    xs = np.linspace(lo, hi, n + 1)
    vals = np.array([f(x) - g(x) for x in xs])
    signs = np.sign(vals)
    nz = np.nonzero(signs)[0]
    for i, j in zip(nz[:-1], nz[1:]):
        if signs[i] != signs[j]:
            a, b = xs[i], xs[j]
            sa = signs[i]
            while b - a > tol:
                m = 0.5 * (a + b)
                sm = np.sign(f(m) - g(m))
                if sm == 0:
                    return float(m)
                if sm == sa:
                    a = m
                else:
                    b = m
            return float(0.5 * (a + b))
    return None


def bounds_table(mus) -> list[dict]:
    return [{"mu": float(m), "ours": bound_ours(m), "ccl": bound_ccl(m), "rvc": bound_rvc(m)} for m in mus]


# ---------------------------------------------------------------- certify -- #

@dataclass(frozen=True)
class CertificateQuery:
    mu: float
    r: float
    delta: float
    kappa: int = 0
    role: str = "critical-free-on-S"
    annulus_ab: Optional[AnnulusSpec] = None
    conservative: bool = False

    def __post_init__(self):
        _check_mu(self.mu)
        if not (self.r > 0 and 0 <= self.delta < self.r):
            raise BoundsError("need 0 <= delta < r")
        if CurvatureClass(self.kappa) not in (CurvatureClass.FLAT, CurvatureClass.HYPERBOLIC):
            raise BoundsError("certificates support kappa in {0, -1}")
        if self.role not in ROLES:
            raise BoundsError(f"role must be one of {ROLES}")

    def to_dict(self) -> dict:
        return {"mu": self.mu, "r": self.r, "delta": self.delta, "kappa": int(self.kappa),
                "role": self.role, "conservative": self.conservative,
                "annulus_ab": None if self.annulus_ab is None else self.annulus_ab.to_dict()}


@dataclass
class Certificate:
    verdict: bool
    required_band: Band
    scanned_annulus: AnnulusSpec
    inequality_slacks: dict
    theorem_applied: str
    conclusion: str
    query: CertificateQuery
    empirical_scan: Optional[CriticalScanReport] = None
    hausdorff_measured: Optional[float] = None
    caveats: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": "certificate",
            "verdict": self.verdict,
            "theorem_applied": self.theorem_applied,
            "conclusion": self.conclusion,
            "query": self.query.to_dict(),
            "required_band": {"lo": self.required_band.lo, "hi": self.required_band.hi},
            "scanned_annulus": self.scanned_annulus.to_dict(),
            "inequality_slacks": {k: v.to_dict() for k, v in self.inequality_slacks.items()},
            "hausdorff_measured": self.hausdorff_measured,
            "empirical_scan": None if self.empirical_scan is None else self.empirical_scan.to_dict(),
            "caveats": list(self.caveats),
        }


def certify(cloud: PointCloud, other: Optional[PointCloud], q: CertificateQuery, h: float = 0.01,
            eps_support: Optional[float] = None) -> Certificate:
    """Evaluate every hypothesis of the offset-reconstruction theorem for ``q``.

    ``cloud`` is the set whose distance function must be mu-critical-free: the
    shape A for role ``critical-free-on-A``, the sample S for
    ``critical-free-on-S``. When ``other`` is given the Hausdorff distance is
    measured and must not exceed ``q.delta``; otherwise ``q.delta`` is taken
    as asserted. The mu-critical-free hypothesis is checked by an empirical
    grid scan, never proved.
    """
    kappa = CurvatureClass(q.kappa)
    slacks: dict = {}
    caveats = ["scan is empirical: a grid scan cannot prove absence of mu-critical points"]
    if kappa is CurvatureClass.FLAT:
        band, ok = theorem_big_requirements(q.mu, q.r, q.delta, q.conservative)
        slacks["(4+mu^2)delta_lt_mu^2r"] = Slack((4 + q.mu**2) * q.delta, q.mu**2 * q.r, ok, "<")
        theorem = "offset-retraction (kappa=0)"
    else:
        band, ok = theorem_bigkappa_requirements(q.mu, q.r, q.delta, q.conservative)
        slacks["9delta_lt_2tanh(r-delta)mu^2"] = Slack(9 * q.delta, 2 * math.tanh(q.r - q.delta) * q.mu**2, ok, "<")
        theorem = "offset-retraction (kappa=-1)"
        caveats.append("kappa=-1 inequalities are closed-form only; the grid scan runs in Euclidean space")
    if q.conservative:
        caveats.append("conservative band [r-delta, r+delta+c*delta/mu] used")

    measured = None
    if other is not None:
        measured = hausdorff(cloud, other)
        slacks["hausdorff_le_delta"] = Slack(measured, q.delta, measured <= q.delta, "<=")
    else:
        caveats.append("Hausdorff bound delta asserted by caller, not measured")

    if q.annulus_ab is not None:
        a, b = q.annulus_ab.a, q.annulus_ab.b
        if not a < q.r < b:
            raise BoundsError("corollary form needs a < r < b")
        slacks.update({k: v for k, v in corollary_slacks(q.mu, q.r, a, b, kappa, q.delta).items()
                       if k.startswith("dH_le")})
        scan_annulus = q.annulus_ab
        theorem = "sampling corollary via " + theorem
    else:
        # a single-level band (delta = 0) is widened to one grid step
        scan_annulus = AnnulusSpec(max(0.0, band.lo), max(band.hi, band.lo + h))

    scan = critical_scan(cloud, scan_annulus, h, eps_support, mu=q.mu)
    slacks["scan_min_norm_gt_mu"] = Slack(scan.min_norm, q.mu, bool(scan.mu_free), ">")
    verdict = all(s.passed for s in slacks.values())
    if q.role == "critical-free-on-A":
        conclusion = f"S_r homotopy equivalent to A_(r-d_H), r={q.r}"
    else:
        conclusion = f"A_r deformation retracts to S_(r-d_H), r={q.r}"
    return Certificate(verdict, band, scan_annulus, slacks, theorem, conclusion, q, scan, measured, caveats)
