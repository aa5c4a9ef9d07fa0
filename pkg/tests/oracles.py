"""Independent reference implementations used only by the tests.

None of these share code with the package; they are deliberately naive.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def hull_edges_int(points) -> list[tuple[int, int]]:
    """Strict hull of integer points as a CCW vertex list, by brute force.

    A directed pair (a, b) is a hull edge when no point lies to its right and
    every point on its line lies on the closed segment ab.  That is an
    O(n^3) test, vectorised over the third point; integer arithmetic keeps
    it exact (int32 when every cross product fits, else int64).
    """
    P = np.unique(np.asarray(points, dtype=np.int64), axis=0)
    n = len(P)
    span = int(np.abs(P).max()) if n else 0
    dtype = np.int32 if 8 * span * span < 2**31 else np.int64
    P = P.astype(dtype)
    nxt = {}
    for i in range(n):
        d = P - P[i]
        # cross[j, k] = d_j x d_k
        cross = np.outer(d[:, 0], d[:, 1]) - np.outer(d[:, 1], d[:, 0])
        cand = np.flatnonzero((cross >= 0).all(axis=1))
        cand = cand[cand != i]
        if len(cand) == 0:
            continue
        # points on the line through i and j must lie on the closed segment
        c = cross[cand]
        dot = d[cand] @ d.T
        len2 = np.einsum("ij,ij->i", d[cand], d[cand])
        within = (dot >= 0) & (dot <= len2[:, None])
        ok = cand[((c != 0) | within).all(axis=1)]
        for j in ok:
            nxt[i] = int(j)
    if not nxt:
        return []
    start = min(nxt, key=lambda i: (P[i, 1], P[i, 0]))
    out = [start]
    while True:
        j = nxt[out[-1]]
        if j == start:
            break
        out.append(j)
        if len(out) > n:
            raise AssertionError("oracle edges do not form a cycle")
    return [(int(P[i, 0]), int(P[i, 1])) for i in out]


def hull_fraction(points) -> list[tuple[float, float]]:
    """Same brute-force edge test in exact rational arithmetic, for float input."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    F = [(Fraction(x), Fraction(y)) for x, y in pts]
    n = len(F)
    nxt = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            ax, ay = F[i]
            bx, by = F[j]
            good = True
            for k in range(n):
                if k in (i, j):
                    continue
                kx, ky = F[k]
                c = (bx - ax) * (ky - ay) - (by - ay) * (kx - ax)
                if c < 0:
                    good = False
                    break
                if c == 0:
                    t = (kx - ax) * (bx - ax) + (ky - ay) * (by - ay)
                    if t < 0 or t > (bx - ax) ** 2 + (by - ay) ** 2:
                        good = False
                        break
            if good:
                nxt[i] = j
    if not nxt:
        return []
    start = min(nxt, key=lambda i: (pts[i][1], pts[i][0]))
    out = [start]
    while nxt[out[-1]] != start:
        out.append(nxt[out[-1]])
    return [pts[i] for i in out]


def min_edge_distance(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Smallest signed distance from each point to the CCW polygon's edge lines.

    Uses unit inward normals rather than cross products, vectorised over all
    points and edges at once.
    """
    a = vertices
    b = np.roll(vertices, -1, axis=0)
    e = b - a
    e = e / np.linalg.norm(e, axis=1)[:, None]
    inward = np.column_stack([-e[:, 1], e[:, 0]])
    rel = points[:, None, :] - a[None, :, :]
    return np.einsum("pek,ek->pe", rel, inward).min(axis=1)


def polyline_length(pts) -> float:
    total = 0.0
    for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
        total += math.sqrt((x1 - x0) ** 2 + (y1 - y0) ** 2)
    return total


def mean_pointwise_distance(a, b) -> float:
    s = 0.0
    for (x0, y0), (x1, y1) in zip(a, b):
        s += math.sqrt((x0 - x1) ** 2 + (y0 - y1) ** 2)
    return s / len(a)


def interp_truth(truth, t_truth, t_query):
    """Piecewise-linear lookup written out by hand (clamped at the ends)."""
    out = []
    for t in t_query:
        if t <= t_truth[0]:
            out.append(tuple(truth[0]))
            continue
        if t >= t_truth[-1]:
            out.append(tuple(truth[-1]))
            continue
        k = 0
        while t_truth[k + 1] < t:
            k += 1
        w = (t - t_truth[k]) / (t_truth[k + 1] - t_truth[k])
        out.append(tuple((1 - w) * np.asarray(truth[k]) + w * np.asarray(truth[k + 1])))
    return out
