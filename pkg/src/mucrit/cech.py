"""Cech complexes of point clouds and Betti numbers over GF(2)."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .geometry import PointCloud, meb_radius_triangles, min_enclosing_ball


@dataclass
class SimplicialComplex:
    """Filtered simplicial complex; ``simplices[k]`` maps sorted k-simplex tuples to filtration values."""

    vertex_count: int
    simplices: list
    max_dim: int

    def count(self, k: int) -> int:
        return len(self.simplices[k]) if k < len(self.simplices) else 0

    def counts(self) -> list:
        return [len(s) for s in self.simplices]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.counts()))

    def all_simplices(self) -> list:
        return [(s, v) for level in self.simplices for s, v in level.items()]

    def audit(self) -> list:
        """Face-closure and filtration-order violations; empty when the complex is valid."""
        problems = []
        for k in range(1, len(self.simplices)):
            lower = self.simplices[k - 1]
            for s, v in self.simplices[k].items():
                if list(s) != sorted(set(s)):
                    problems.append(f"unsorted simplex {s}")
                for face in combinations(s, k):
                    if face not in lower:
                        problems.append(f"missing face {face} of {s}")
                    elif lower[face] > v:
                        problems.append(f"face {face} enters after {s}")
        return problems


def cech_complex(S: PointCloud, r: float, max_dim: int = 2) -> SimplicialComplex:
    """Cech complex of radius-``r`` balls around the points of ``S``.

    A simplex enters when the minimal enclosing ball of its vertices has
    radius <= r; that radius is its filtration value. Candidates are cliques of
    the graph {d(p, q) <= 2r}, grown one dimension at a time from accepted
    simplices (a face of an accepted simplex is always accepted).
    """
    if max_dim < 1:
        raise ValueError("max_dim must be >= 1")
    P = S.points
    n = len(P)
    levels: list = [{(i,): 0.0 for i in range(n)}]
    pairs = np.array(sorted(cKDTree(P).query_pairs(2 * r * (1 + 1e-12) + 1e-15)), dtype=np.int64).reshape(-1, 2)
    if len(pairs):
        diff = P[pairs[:, 0]] - P[pairs[:, 1]]
        rad = 0.5 * np.sqrt(np.einsum("ij,ij->i", diff, diff))
        keep = rad <= r
        pairs, rad = pairs[keep], rad[keep]
    else:
        rad = np.empty(0)
    levels.append({(int(i), int(j)): float(v) for (i, j), v in zip(pairs, rad)})
    nbrs = [set() for _ in range(n)]
    for i, j in pairs:
        nbrs[i].add(int(j))
        nbrs[j].add(int(i))
    up = [np.array(sorted(v for v in nb if v > i), dtype=np.int64) for i, nb in enumerate(nbrs)]

    if max_dim >= 2:
        tri = []
        for i, j in pairs:
            common = np.intersect1d(up[j], up[i], assume_unique=True)
            if common.size:
                tri.append(np.column_stack([np.full(common.size, i), np.full(common.size, j), common]))
        if tri:
            T = np.concatenate(tri)
            rad = meb_radius_triangles(P[T[:, 0]], P[T[:, 1]], P[T[:, 2]])
            keep = rad <= r
            T, rad = T[keep], rad[keep]
            edge = levels[1]
            rad = [max(float(v), edge[(int(a), int(b))], edge[(int(a), int(c))], edge[(int(b), int(c))])
                   for (a, b, c), v in zip(T, rad)]
            levels.append({(int(a), int(b), int(c)): float(v) for (a, b, c), v in zip(T, rad)})
        else:
            levels.append({})
    for k in range(3, max_dim + 1):
        nxt = {}
        for s in levels[k - 1]:
            common = set(up[s[-1]])
            for v in s[:-1]:
                common &= nbrs[v]
            for w in sorted(int(c) for c in common):
                cand = s + (w,)
                faces = list(combinations(cand, k))
                if all(f in levels[k - 1] for f in faces):
                    rad = min_enclosing_ball(P[list(cand)]).radius
                    if rad <= r:
                        # equal radii from different formulas can differ by rounding
                        nxt[cand] = max(float(rad), max(levels[k - 1][f] for f in faces))
        levels.append(nxt)
    return SimplicialComplex(n, levels, max_dim)


def _ordered(level: dict) -> list:
    return sorted(level, key=lambda s: (level[s], s))


def boundary_rank(C: SimplicialComplex, k: int) -> int:
    """Rank over GF(2) of the boundary map from k-simplices to (k-1)-simplices.

    Standard column reduction; columns are bitsets (Python ints) over the
    (k-1)-simplices, processed in (filtration value, vertex tuple) order.
    """
    if k <= 0 or k >= len(C.simplices) or not C.simplices[k]:
        return 0
    rows = {s: i for i, s in enumerate(_ordered(C.simplices[k - 1]))}
    pivots: dict = {}
    rank = 0
    for s in _ordered(C.simplices[k]):
        col = 0
        for face in combinations(s, k):
            col ^= 1 << rows[face]
        while col:
            low = col.bit_length() - 1
            other = pivots.get(low)
            if other is None:
                pivots[low] = col
                rank += 1
                break
            col ^= other
    return rank


@dataclass(frozen=True)
class BettiVector:
    betti: tuple

    def __getitem__(self, k):
        return self.betti[k]

    def __len__(self):
        return len(self.betti)

    def to_dict(self) -> dict:
        return {"betti": list(self.betti)}


def betti(C: SimplicialComplex, up_to_dim: Optional[int] = None) -> BettiVector:
    """Betti numbers b_0 .. b_up_to_dim over GF(2).

    b_k = dim ker d_k - rank d_{k+1}; dimensions at or above the complex's
    ``max_dim`` are not reported since the truncation makes them meaningless.
    """
    top = C.max_dim - 1 if up_to_dim is None else min(up_to_dim, C.max_dim - 1)
    ranks = [boundary_rank(C, k) for k in range(0, top + 2)]
    return BettiVector(tuple(C.count(k) - ranks[k] - ranks[k + 1] for k in range(top + 1)))
