"""Triangle geometry, barycentric coordinates, rectangle meshes and mesh I/O.

Mesh text format: line 1 holds ``nv nt``; then ``nv`` lines ``x y`` and
``nt`` lines ``i1 i2 i3`` with 0-based vertex indices.  Coordinates are
written with 17 significant digits so a write/read round trip is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .delaunay import bowyer_watson


class MeshFormatError(ValueError):
    """Malformed or invalid mesh file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class TriangleGeom:
    """A nondegenerate triangle with vertices ``v1, v2, v3``.

    Edge ``j`` (1-based) is the edge opposite ``v_j``, parametrized as
    ``t * v_{j+1} + (1 - t) * v_{j+2}`` with indices taken cyclically.
    """

    def __init__(self, v1, v2, v3):
        self.vertices = np.array([v1, v2, v3], dtype=float)
        if self.vertices.shape != (3, 2):
            raise ValueError("vertices must be three points in the plane")
        self.vertices.setflags(write=False)
        (x1, y1), (x2, y2), (x3, y3) = self.vertices
        signed = 0.5 * ((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1))
        scale = max(np.ptp(self.vertices[:, 0]), np.ptp(self.vertices[:, 1])) ** 2
        if not abs(signed) > 1e-14 * scale:
            raise ValueError("degenerate triangle")
        self.area = abs(signed)
        self.signed_area_sign = 1 if signed > 0 else -1
        # rows map (x, y, 1) to the barycentric coordinates
        A = np.vstack([self.vertices.T, np.ones(3)])
        self._inv = np.linalg.inv(A)

    @property
    def v1(self):
        return self.vertices[0]

    @property
    def v2(self):
        return self.vertices[1]

    @property
    def v3(self):
        return self.vertices[2]

    def __repr__(self):
        return f"TriangleGeom({self.vertices.tolist()})"

    def barycentric(self, x, y=None):
        """Barycentric coordinates of points; returns an array with trailing axis 3.

        Accepts ``barycentric(point)``, ``barycentric(points_array)`` or
        ``barycentric(x, y)`` with broadcastable arrays.
        """
        if y is None:
            p = np.asarray(x, dtype=float)
            x, y = p[..., 0], p[..., 1]
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        lam = np.stack([x, y, np.ones_like(x)], axis=-1) @ self._inv.T
        # x, y are affine in lambda; rescale the sum to remove rounding drift
        return lam / lam.sum(axis=-1, keepdims=True)

    def point(self, lam):
        """Cartesian point(s) for barycentric coordinates ``lam`` (..., 3)."""
        return np.asarray(lam, dtype=float) @ self.vertices

    def edge_point(self, j, t):
        """``t * v_{j+1} + (1 - t) * v_{j+2}`` for edge ``j`` in 1..3."""
        if j not in (1, 2, 3):
            raise ValueError(f"edge index must be 1, 2 or 3, got {j!r}")
        a = self.vertices[j % 3]
        b = self.vertices[(j + 1) % 3]
        t = np.asarray(t, dtype=float)[..., None]
        return t * a + (1.0 - t) * b

    def edge_length(self, j):
        return float(np.linalg.norm(self.vertices[j % 3] - self.vertices[(j + 1) % 3]))


def barycentric(tri: TriangleGeom, x):
    return tri.barycentric(x)


def edge_point(tri: TriangleGeom, j: int, t):
    return tri.edge_point(j, t)


@dataclass(frozen=True)
class Mesh:
    """Vertex coordinates (nv, 2), CCW triangles (nt, 3), and the bounding box."""

    vertices: np.ndarray
    triangles: np.ndarray
    domain_box: tuple

    def __post_init__(self):
        V = np.array(self.vertices, dtype=float)
        T = np.array(self.triangles, dtype=np.int64)
        if V.ndim != 2 or V.shape[1] != 2:
            raise MeshFormatError("vertices must have shape (nv, 2)")
        if T.ndim != 2 or T.shape[1] != 3:
            raise MeshFormatError("triangles must have shape (nt, 3)")
        if T.size and (T.min() < 0 or T.max() >= len(V)):
            bad = int(np.argmax((T < 0).any(axis=1) | (T >= len(V)).any(axis=1)))
            raise MeshFormatError(f"triangle {bad} has a vertex index outside 0..{len(V) - 1}")
        signed = _signed_areas(V, T)
        scale = _edge_lengths(V, T).max(axis=1) ** 2 if len(T) else np.zeros(0)
        degenerate = np.abs(signed) <= 1e-14 * scale
        if degenerate.any():
            raise MeshFormatError(f"triangle {int(np.argmax(degenerate))} is degenerate")
        T = np.where((signed < 0)[:, None], T[:, [0, 2, 1]], T)
        V.setflags(write=False)
        T.setflags(write=False)
        object.__setattr__(self, "vertices", V)
        object.__setattr__(self, "triangles", T)
        if self.domain_box is None:
            box = (*V.min(axis=0), *V.max(axis=0)) if len(V) else (0.0, 0.0, 0.0, 0.0)
        else:
            box = self.domain_box
        object.__setattr__(self, "domain_box", tuple(float(b) for b in box))

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    def corners(self):
        """Triangle vertex coordinates, shape (nt, 3, 2)."""
        return self.vertices[self.triangles]

    def areas(self):
        return _signed_areas(self.vertices, self.triangles)

    def edge_lengths(self):
        return _edge_lengths(self.vertices, self.triangles)

    def h(self):
        """Mesh size: the longest edge."""
        return float(self.edge_lengths().max())

    def min_angles(self):
        """Smallest interior angle of each triangle, in degrees."""
        P = self.corners()
        angles = []
        for k in range(3):
            u = P[:, (k + 1) % 3] - P[:, k]
            w = P[:, (k + 2) % 3] - P[:, k]
            cos = np.einsum("ij,ij->i", u, w) / (np.linalg.norm(u, axis=1) * np.linalg.norm(w, axis=1))
            angles.append(np.degrees(np.arccos(np.clip(cos, -1.0, 1.0))))
        return np.min(angles, axis=0)

    def triangle(self, k) -> TriangleGeom:
        return TriangleGeom(*self.corners()[k])


def _signed_areas(V, T):
    P = V[T]
    return 0.5 * ((P[:, 1, 0] - P[:, 0, 0]) * (P[:, 2, 1] - P[:, 0, 1])
                  - (P[:, 2, 0] - P[:, 0, 0]) * (P[:, 1, 1] - P[:, 0, 1]))


def _edge_lengths(V, T):
    P = V[T]
    return np.stack([np.linalg.norm(P[:, (j + 1) % 3] - P[:, (j + 2) % 3], axis=1) for j in range(3)], axis=1)


def _check_box(box):
    xmin, ymin, xmax, ymax = (float(b) for b in box)
    if not (xmax > xmin and ymax > ymin):
        raise ValueError(f"invalid box {box!r}")
    return xmin, ymin, xmax, ymax


def uniform_mesh(box=(0.0, 0.0, 1.0, 1.0), n: int = 1) -> Mesh:
    """n x n squares, each cut along its lower-left to upper-right diagonal."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    xmin, ymin, xmax, ymax = _check_box(box)
    xs = np.linspace(xmin, xmax, n + 1)
    ys = np.linspace(ymin, ymax, n + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    V = np.column_stack([X.ravel(), Y.ravel()])
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="xy")
    p00 = (j * (n + 1) + i).ravel()
    p10, p01, p11 = p00 + 1, p00 + n + 1, p00 + n + 2
    T = np.empty((2 * n * n, 3), dtype=np.int64)
    T[0::2] = np.column_stack([p00, p10, p11])
    T[1::2] = np.column_stack([p00, p11, p01])
    return Mesh(V, T, (xmin, ymin, xmax, ymax))


def _delaunay_points(box, target_n, rng):
    xmin, ymin, xmax, ymax = box
    W, H = xmax - xmin, ymax - ymin
    d = np.sqrt(2.0 * W * H / target_n)
    kx = max(1, int(round(W / d)))
    ky = max(1, int(round(H / d)))
    dx, dy = W / kx, H / ky
    # boundary: corners plus side points jittered along their side
    bottom = xmin + dx * (np.arange(1, kx) + rng.uniform(-0.2, 0.2, kx - 1))
    top = xmin + dx * (np.arange(1, kx) + rng.uniform(-0.2, 0.2, kx - 1))
    left = ymin + dy * (np.arange(1, ky) + rng.uniform(-0.2, 0.2, ky - 1))
    right = ymin + dy * (np.arange(1, ky) + rng.uniform(-0.2, 0.2, ky - 1))
    boundary = np.concatenate([
        [[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]],
        np.column_stack([bottom, np.full(kx - 1, ymin)]),
        np.column_stack([top, np.full(kx - 1, ymax)]),
        np.column_stack([np.full(ky - 1, xmin), left]),
        np.column_stack([np.full(ky - 1, xmax), right]),
    ])
    # a triangulation of a convex region has 2*I + B - 2 triangles
    n_interior = max(0, int(round((target_n + 2 - len(boundary)) / 2.0)))
    gi, gj = np.meshgrid(np.arange(1, kx), np.arange(1, ky), indexing="xy")
    cells = np.column_stack([gi.ravel(), gj.ravel()]).astype(float)
    if len(cells) > n_interior:
        keep = np.sort(rng.choice(len(cells), n_interior, replace=False))
        cells = cells[keep]
    elif len(cells) < n_interior:
        # pad with cell centres, which sit halfway between grid points
        ci, cj = np.meshgrid(np.arange(kx) + 0.5, np.arange(ky) + 0.5, indexing="xy")
        centres = np.column_stack([ci.ravel(), cj.ravel()])
        extra = n_interior - len(cells)
        if extra > len(centres):
            raise ValueError(f"cannot place {n_interior} interior points for target {target_n}")
        pick = np.sort(rng.choice(len(centres), extra, replace=False))
        cells = np.concatenate([cells, centres[pick]])
    cells = cells + rng.uniform(-0.2, 0.2, cells.shape)
    interior = np.column_stack([xmin + dx * cells[:, 0], ymin + dy * cells[:, 1]])
    # snake order keeps the point location walk short
    row = np.floor((interior[:, 1] - ymin) / dy).astype(int)
    key = np.where(row % 2 == 0, interior[:, 0], -interior[:, 0])
    interior = interior[np.lexsort((key, row))]
    return np.concatenate([boundary, interior])


def jittered_delaunay_mesh(box=(0.0, 0.0, 1.0, 1.0), target_n: int = 33, seed: int = 0) -> Mesh:
    """Delaunay mesh of the box with close to ``target_n`` triangles.

    Boundary points are spread (with jitter along each side) at the spacing
    implied by ``target_n``; interior points are a jittered grid trimmed or
    padded so the Euler count ``2*I + B - 2`` matches the target.
    Deterministic for a given ``seed``.
    """
    if int(target_n) != target_n or target_n < 2:
        raise ValueError(f"target_n must be an integer >= 2, got {target_n!r}")
    box = _check_box(box)
    rng = np.random.default_rng(seed)
    pts = _delaunay_points(box, int(target_n), rng)
    tris = bowyer_watson(pts)
    return Mesh(pts, tris, box)


def write_mesh(path, mesh: Mesh) -> None:
    lines = [f"{mesh.n_vertices} {mesh.n_triangles}"]
    lines += [f"{x:.17g} {y:.17g}" for x, y in mesh.vertices]
    lines += [f"{a} {b} {c}" for a, b, c in mesh.triangles]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_mesh(path, box=None) -> Mesh:
    """Parse the mesh text format; errors name the offending 1-based line."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise MeshFormatError("empty file, expected header 'nv nt'", line=1)
    head = lines[0].split()
    try:
        if len(head) != 2:
            raise ValueError
        nv, nt = int(head[0]), int(head[1])
        if nv < 0 or nt < 0:
            raise ValueError
    except ValueError:
        raise MeshFormatError(f"expected header 'nv nt', got {lines[0]!r}", line=1) from None
    if len(lines) < 1 + nv + nt:
        raise MeshFormatError(f"expected {nv} vertices and {nt} triangles, file ends early",
                              line=len(lines) + 1)
    V = np.empty((nv, 2))
    for k in range(nv):
        fields = lines[1 + k].split()
        try:
            if len(fields) != 2:
                raise ValueError
            V[k] = float(fields[0]), float(fields[1])
        except ValueError:
            raise MeshFormatError(f"expected 'x y', got {lines[1 + k]!r}", line=2 + k) from None
    T = np.empty((nt, 3), dtype=np.int64)
    for k in range(nt):
        ln = 2 + nv + k
        fields = lines[1 + nv + k].split()
        try:
            if len(fields) != 3:
                raise ValueError
            T[k] = [int(f) for f in fields]
        except ValueError:
            raise MeshFormatError(f"expected 'i1 i2 i3', got {lines[ln - 1]!r}", line=ln) from None
        if T[k].min() < 0 or T[k].max() >= nv:
            raise MeshFormatError(f"vertex index out of range 0..{nv - 1}", line=ln)
    for k, extra in enumerate(lines[1 + nv + nt:], start=2 + nv + nt):
        if extra.strip():
            raise MeshFormatError("unexpected trailing content", line=k)
    return Mesh(V, T, box)
