"""Incremental Bowyer-Watson Delaunay triangulation in the plane.

Triangles are kept counterclockwise with explicit adjacency; a new point is
located by a visibility walk and its cavity grown by breadth-first search
over neighbors whose circumcircle strictly contains it.  Orientation and
in-circle tests fall back to exact rational arithmetic when the floating
point determinant is too small to trust.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

_EPS = np.finfo(float).eps


class DelaunayError(ValueError):
    pass


def _orient(ax, ay, bx, by, cx, cy):
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    bound = 8 * _EPS * (abs((bx - ax) * (cy - ay)) + abs((by - ay) * (cx - ax)))
    if abs(det) > bound:
        return det
    ax, ay, bx, by, cx, cy = map(Fraction, (ax, ay, bx, by, cx, cy))
    return float((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))


def _incircle(ax, ay, bx, by, cx, cy, px, py):
    """Positive iff p lies strictly inside the circle through CCW a, b, c."""
    adx, ady = ax - px, ay - py
    bdx, bdy = bx - px, by - py
    cdx, cdy = cx - px, cy - py
    ad = adx * adx + ady * ady
    bd = bdx * bdx + bdy * bdy
    cd = cdx * cdx + cdy * cdy
    t1 = ad * (bdx * cdy - bdy * cdx)
    t2 = bd * (cdx * ady - cdy * adx)
    t3 = cd * (adx * bdy - ady * bdx)
    det = t1 + t2 + t3
    perm = (ad * (abs(bdx * cdy) + abs(bdy * cdx)) + bd * (abs(cdx * ady) + abs(cdy * adx))
            + cd * (abs(adx * bdy) + abs(ady * bdx)))
    if abs(det) > 16 * _EPS * perm:
        return det
    ax, ay, bx, by, cx, cy, px, py = map(Fraction, (ax, ay, bx, by, cx, cy, px, py))
    adx, ady = ax - px, ay - py
    bdx, bdy = bx - px, by - py
    cdx, cdy = cx - px, cy - py
    det = ((adx * adx + ady * ady) * (bdx * cdy - bdy * cdx)
           + (bdx * bdx + bdy * bdy) * (cdx * ady - cdy * adx)
           + (cdx * cdx + cdy * cdy) * (adx * bdy - ady * bdx))
    return float(det)


def bowyer_watson(points) -> np.ndarray:
    """Delaunay triangles (CCW index triples) of ``points`` (n, 2).

    Points are inserted in the given order.  Raises :class:`DelaunayError`
    for fewer than three points, duplicates, or an all-collinear set.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if pts.ndim != 2 or pts.shape[1] != 2 or n < 3:
        raise DelaunayError("need at least three 2D points")
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = float(max(hi - lo))
    if span == 0.0:
        raise DelaunayError("all points coincide")
    cx, cy = (lo + hi) / 2
    big = 1e3 * span
    xs = [float(p) for p in pts[:, 0]] + [cx - big, cx + big, cx]
    ys = [float(p) for p in pts[:, 1]] + [cy - big, cy - big, cy + big]

    verts = [[n, n + 1, n + 2]]
    nbrs = [[-1, -1, -1]]
    alive = [True]
    last = 0

    def locate(px, py, start):
        t = start
        for _ in range(4 * len(verts) + 10):
            v = verts[t]
            moved = False
            for k in range(3):
                a, b = v[(k + 1) % 3], v[(k + 2) % 3]
                if _orient(xs[a], ys[a], xs[b], ys[b], px, py) < 0:
                    nb = nbrs[t][k]
                    if nb < 0:
                        raise DelaunayError("point outside the super-triangle")
                    t = nb
                    moved = True
                    break
            if not moved:
                return t
        raise DelaunayError("point location did not terminate")

    seen = set()
    for i in range(n):
        px, py = xs[i], ys[i]
        if (px, py) in seen:
            raise DelaunayError(f"duplicate point {i}: ({px}, {py})")
        seen.add((px, py))
        start = last if alive[last] else next(t for t in range(len(verts) - 1, -1, -1) if alive[t])
        t0 = locate(px, py, start)

        bad = {t0}
        stack = [t0]
        while stack:
            t = stack.pop()
            for nb in nbrs[t]:
                if nb < 0 or nb in bad:
                    continue
                a, b, c = verts[nb]
                if _incircle(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c], px, py) > 0:
                    bad.add(nb)
                    stack.append(nb)

        boundary = []
        for t in sorted(bad):
            v = verts[t]
            for k in range(3):
                nb = nbrs[t][k]
                if nb < 0 or nb not in bad:
                    boundary.append((v[(k + 1) % 3], v[(k + 2) % 3], nb, t))
        for t in bad:
            alive[t] = False

        starts, ends = {}, {}
        for a, b, outer, old in boundary:
            if _orient(xs[a], ys[a], xs[b], ys[b], px, py) <= 0:
                raise DelaunayError(f"degenerate cavity while inserting point {i}")
            tid = len(verts)
            verts.append([a, b, i])
            nbrs.append([-1, -1, outer])
            alive.append(True)
            if outer >= 0:
                on = nbrs[outer]
                on[on.index(old)] = tid
            starts[a] = tid
            ends[b] = tid
        for a, b, _, _ in boundary:
            tid = starts[a]
            nbrs[tid][0] = starts[b]
            nbrs[tid][1] = ends[a]
        last = len(verts) - 1

    tris = [v for v, ok in zip(verts, alive) if ok and max(v) < n]
    if not tris:
        raise DelaunayError("point set is collinear")
    return np.array(tris, dtype=np.int64)
