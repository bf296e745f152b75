"""Explicit-Euler integration of the descent flow of a distance function and an
empirical check that L_r retracts onto K_{r - delta} along it."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .distance import grid_points, gradient, thread_count
from .geometry import PointCloud, hausdorff, nearest_distance, nearest_distances

TAU_STALL = 1e-3
REACH_TOL = 1e-9


class FlowError(ValueError):
    pass


@dataclass
class FlowTrace:
    points: list
    dists: list
    terminated: str  # reached-target | max-steps | stalled
    steps: int

    def to_dict(self) -> dict:
        return {
            "points": [p.tolist() for p in self.points],
            "dists": list(self.dists),
            "terminated": self.terminated,
            "steps": self.steps,
        }


def integrate_flow(x0, K: PointCloud, target_level: float, step: float = 0.01, max_steps: int = 10000,
                   eps_support: Optional[float] = None, tau_stall: float = TAU_STALL) -> FlowTrace:
    """Follow the spanning-cone axis (toward K) until d_K drops to ``target_level``.

    Each step moves ``min(step, d_K(x) - target_level)``, so the flow never
    overshoots the target offset by more than rounding. A step that fails to
    decrease d_K, or a gradient norm below ``tau_stall``, ends the trace as
    ``"stalled"``.
    """
    x = K.check_point(x0).copy()
    d, _ = nearest_distance(x, K)
    if d <= target_level:
        raise FlowError("x0 inside target offset")
    g = gradient(x, K, eps_support)
    if g.degenerate or g.norm == 0.0:
        raise FlowError("critical start")
    points, dists = [x.copy()], [d]
    status = "max-steps"
    for _ in range(max_steps):
        if d - target_level <= REACH_TOL * max(1.0, target_level):
            status = "reached-target"
            break
        if g.norm < tau_stall:
            status = "stalled"
            break
        s = min(step, d - target_level)
        x_new = x + s * g.axis
        d_new, _ = nearest_distance(x_new, K)
        if not d_new < d:
            status = "stalled"
            break
        x, d = x_new, d_new
        points.append(x.copy())
        dists.append(d)
        if d - target_level <= REACH_TOL * max(1.0, target_level):
            status = "reached-target"
            break
        g = gradient(x, K, eps_support)
    return FlowTrace(points, dists, status, len(points) - 1)


@dataclass
class TraceCheck:
    start_index: int
    start: np.ndarray
    reached: bool
    stayed_in_Lr: bool
    monotone: bool
    max_dL: float
    steps: int
    terminated: str
    trace: Optional[FlowTrace] = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return self.reached and self.stayed_in_Lr and self.monotone

    def to_dict(self) -> dict:
        return {
            "start_index": self.start_index,
            "start": self.start.tolist(),
            "reached": self.reached,
            "stayed_in_Lr": self.stayed_in_Lr,
            "monotone": self.monotone,
            "max_dL": self.max_dL,
            "steps": self.steps,
            "terminated": self.terminated,
        }


@dataclass
class RetractionReport:
    r: float
    delta: float
    target_level: float
    step: float
    exit_slack: float
    checks: list

    @property
    def pass_fraction(self) -> float:
        return sum(c.passed for c in self.checks) / len(self.checks)

    @property
    def reached_fraction(self) -> float:
        return sum(c.reached for c in self.checks) / len(self.checks)

    def to_dict(self) -> dict:
        return {
            "kind": "retraction",
            "empirical": True,
            "r": self.r,
            "delta": self.delta,
            "target_level": self.target_level,
            "step": self.step,
            "exit_slack": self.exit_slack,
            "starts": len(self.checks),
            "pass_fraction": self.pass_fraction,
            "reached_fraction": self.reached_fraction,
            "traces": [c.to_dict() for c in self.checks],
        }


def shell_starts(L: PointCloud, r: float, h: float, n_starts: int, seed: int = 0) -> np.ndarray:
    """Deterministic sample of grid points with d_L in [r - h, r]."""
    X = grid_points(L, h, r + h)
    D = nearest_distances(X, L)
    X = X[(D >= r - h) & (D <= r)]
    if len(X) == 0:
        raise FlowError("empty boundary shell")
    if len(X) > n_starts:
        pick = np.sort(np.random.default_rng(seed).choice(len(X), size=n_starts, replace=False))
        X = X[pick]
    return X


def _check_start(i: int, x0: np.ndarray, K: PointCloud, L: PointCloud, r: float, target: float,
                 step: float, max_steps: int, slack: float, eps_support, keep: bool) -> TraceCheck:
    dK, _ = nearest_distance(x0, K)
    if dK <= target:
        trace = FlowTrace([x0.copy()], [dK], "reached-target", 0)
    else:
        trace = integrate_flow(x0, K, target, step, max_steps, eps_support)
    dL = nearest_distances(np.array(trace.points), L)
    monotone = bool(np.all(np.diff(trace.dists) < 0))
    return TraceCheck(i, x0, trace.terminated == "reached-target", bool(dL.max() <= r + slack),
                      monotone, float(dL.max()), trace.steps, trace.terminated, trace if keep else None)


def verify_retraction(K: PointCloud, L: PointCloud, r: float, delta: float, h: float = 0.01,
                      n_starts: int = 64, step: float = 0.01, max_steps: int = 10000, seed: int = 0,
                      eps_support: Optional[float] = None, starts: Optional[np.ndarray] = None,
                      keep_traces: bool = False, check_hausdorff: bool = True) -> RetractionReport:
    """Flow boundary-shell points of L_r toward K_{r - delta} and audit each trace.

    A trace passes when it reaches the target offset, decreases d_K at every
    step and keeps d_L <= r + 2 * step.
    """
    if check_hausdorff and hausdorff(K, L) > delta:
        raise FlowError("hausdorff(K, L) exceeds delta")
    if not delta < r / 2:
        raise FlowError("need delta < r / 2")
    X = shell_starts(L, r, h, n_starts, seed) if starts is None else np.asarray(starts, dtype=float)
    target = r - delta
    slack = 2.0 * step
    args = [(i, x) for i, x in enumerate(X)]
    run = lambda ix: _check_start(ix[0], ix[1], K, L, r, target, step, max_steps, slack, eps_support, keep_traces)
    n_threads = thread_count()
    if n_threads == 1:
        checks = [run(a) for a in args]
    else:
        with ThreadPoolExecutor(n_threads) as pool:
            checks = list(pool.map(run, args))
    return RetractionReport(r, delta, target, step, slack, checks)
