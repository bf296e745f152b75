"""Independent brute-force oracles; none of these call the code under test."""

from itertools import combinations

import numpy as np


def brute_nearest(x, P):
    best, idx = np.inf, -1
    for i, p in enumerate(np.asarray(P, float)):
        d = float(np.sqrt(np.sum((p - x) ** 2)))
        if d < best:
            best, idx = d, i
    return best, idx


def brute_hausdorff(P, Q):
    P, Q = np.asarray(P, float), np.asarray(Q, float)
    D = np.sqrt(((P[:, None, :] - Q[None, :, :]) ** 2).sum(-1))
    return max(D.min(axis=1).max(), D.min(axis=0).max())


def circumsphere(S):
    """Center/radius of the smallest sphere through all of S inside their affine hull."""
    S = np.asarray(S, float)
    if len(S) == 1:
        return S[0], 0.0
    A = S[1:] - S[0]
    G = A @ A.T
    if abs(np.linalg.det(G)) < 1e-14 * max(1.0, np.abs(G).max()) ** len(G):
        return None
    lam = np.linalg.solve(G, 0.5 * (A * A).sum(1))
    c = S[0] + lam @ A
    return c, float(np.linalg.norm(S[0] - c))


def brute_meb(P, tol=1e-9):
    """Smallest ball over all circumspheres of 1..(d+1)-subsets that contain every point."""
    P = np.asarray(P, float)
    best = None
    for k in range(1, min(len(P), P.shape[1] + 1) + 1):
        for sub in combinations(range(len(P)), k):
            cs = circumsphere(P[list(sub)])
            if cs is None:
                continue
            c, r = cs
            if np.all(np.sqrt(((P - c) ** 2).sum(1)) <= r + tol) and (best is None or r < best[1]):
                best = (c, r)
    return best


def sweep_min_cap_2d(U, n=200000):
    """Best cap over a fine sweep of candidate axes on the circle: (half_angle, axis)."""
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    axes = np.c_[np.cos(t), np.sin(t)]
    worst = np.arccos(np.clip(axes @ np.asarray(U, float).T, -1, 1)).max(axis=1)
    i = int(np.argmin(worst))
    return float(worst[i]), axes[i]


def sweep_min_cap_3d(U, n=40000):
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    phi = np.pi * (3 - np.sqrt(5)) * i
    rho = np.sqrt(1 - z * z)
    axes = np.c_[rho * np.cos(phi), rho * np.sin(phi), z]
    worst = np.arccos(np.clip(axes @ np.asarray(U, float).T, -1, 1)).max(axis=1)
    j = int(np.argmin(worst))
    return float(worst[j]), axes[j], np.sqrt(4 * np.pi / n)


def brute_grad_norm_2d(x, P, eps=1e-9, n=200000):
    """max over unit v of min over nearest points q of <v, (x - q)/|x - q|>, clipped at 0.

    This is the steepest-ascent rate of d_K at x, the quantity the generalized
    gradient norm measures.
    """
    P = np.asarray(P, float)
    d = np.sqrt(((P - x) ** 2).sum(1))
    sup = P[d <= d.min() + eps]
    dirs = (x - sup) / np.linalg.norm(x - sup, axis=1)[:, None]
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    V = np.c_[np.cos(t), np.sin(t)]
    return max(0.0, float((V @ dirs.T).min(axis=1).max()))


def hyperboloid_distance_right_angle(a, b, cos_angle):
    """Hyperbolic distance between points at distances a, b from a vertex with the given angle,
    computed in the hyperboloid model (no law of cosines)."""
    def point(dist, theta):
        return np.array([np.cosh(dist), np.sinh(dist) * np.cos(theta), np.sinh(dist) * np.sin(theta)])
    p = point(a, 0.0)
    q = point(b, np.arccos(cos_angle))
    minkowski = p[0] * q[0] - p[1] * q[1] - p[2] * q[2]
    return float(np.arccosh(minkowski))


def dense_gf2_rank(M):
    M = (np.array(M, dtype=np.uint8) % 2).copy()
    rank = 0
    rows, cols = M.shape
    for c in range(cols):
        piv = None
        for r in range(rank, rows):
            if M[r, c]:
                piv = r
                break
        if piv is None:
            continue
        M[[rank, piv]] = M[[piv, rank]]
        for r in range(rows):
            if r != rank and M[r, c]:
                M[r] ^= M[rank]
        rank += 1
    return rank


def brute_betti(simplices_by_dim, top):
    """Betti numbers 0..top from dense boundary matrices of lists of sorted tuples."""
    ranks = [0]
    for k in range(1, top + 2):
        if k >= len(simplices_by_dim) or not simplices_by_dim[k] or not simplices_by_dim[k - 1]:
            ranks.append(0)
            continue
        rows = {s: i for i, s in enumerate(simplices_by_dim[k - 1])}
        M = np.zeros((len(rows), len(simplices_by_dim[k])), dtype=np.uint8)
        for j, s in enumerate(simplices_by_dim[k]):
            for f in combinations(s, k):
                M[rows[f], j] = 1
        ranks.append(dense_gf2_rank(M))
    return [len(simplices_by_dim[k]) - ranks[k] - ranks[k + 1] for k in range(top + 1)]
