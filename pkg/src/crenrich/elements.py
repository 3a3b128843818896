"""Crouzeix-Raviart element and its quadratic (C2) and cubic (S3) enrichments.

Degrees of freedom are ordered ``[I1, I2, I3, F1, F2, F3, L1, L2, L3, J]``
(truncated to 3 for CR and 6 for C2), and basis function ``i`` is dual to
DOF ``i``.  Polynomials are stored as coefficients over the barycentric
monomials ``l1**a l2**b l3**c`` with ``a + b + c <= 3``.

All evaluation is vectorized over a batch of triangles so that the same
code serves a single element and a whole mesh.
"""

from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass

import numpy as np

from .mesh import TriangleGeom
from .quadrature import (DEFAULT_EDGE_NODES, DEFAULT_TRI_DEGREE, enriched_functional, mean_functional,
                         simplex_moment, triangle_rule)
from .specfun import ElementParams

EXPONENTS = tuple(sorted(((a, b, d - a - b) for d in range(4) for a in range(d + 1) for b in range(d + 1 - a)),
                         key=lambda e: (sum(e), tuple(-x for x in e))))
_INDEX = {e: k for k, e in enumerate(EXPONENTS)}
_EXP = np.array(EXPONENTS)
_MOMENTS = np.array([simplex_moment(*e) for e in EXPONENTS])


class ElementKind(enum.Enum):
    CR = "cr"
    C2 = "c2"
    S3 = "s3"

    @property
    def ndof(self):
        return {"cr": 3, "c2": 6, "s3": 10}[self.value]

    @property
    def degree(self):
        return {"cr": 1, "c2": 2, "s3": 3}[self.value]

    @classmethod
    def parse(cls, tag):
        if isinstance(tag, cls):
            return tag
        try:
            return cls(str(tag).strip().lower())
        except ValueError:
            raise ValueError(f"unknown element kind {tag!r}; expected one of cr, c2, s3") from None


DOF_LABELS = ("I1", "I2", "I3", "F1", "F2", "F3", "L1", "L2", "L3", "J")


def monomial_matrix(lam):
    """Values of every barycentric monomial at ``lam`` (..., 3) -> (..., 20)."""
    lam = np.asarray(lam, dtype=float)
    powers = lam[..., None, :] ** _EXP
    return powers.prod(axis=-1)


class BaryPoly:
    """Polynomial of degree <= 3 in barycentric monomial form, optionally bound to a triangle."""

    __slots__ = ("coeffs", "tri")

    def __init__(self, coeffs=None, tri: TriangleGeom | None = None):
        c = np.zeros(len(EXPONENTS)) if coeffs is None else np.array(coeffs, dtype=float)
        if c.shape != (len(EXPONENTS),):
            raise ValueError(f"expected {len(EXPONENTS)} coefficients, got shape {c.shape}")
        self.coeffs = c
        self.tri = tri

    @classmethod
    def monomial(cls, a, b, c, scale=1.0, tri=None):
        p = cls(tri=tri)
        p.coeffs[_INDEX[(a, b, c)]] = scale
        return p

    @classmethod
    def constant(cls, value=1.0, tri=None):
        return cls.monomial(0, 0, 0, value, tri)

    @classmethod
    def lam(cls, i, power=1, tri=None):
        """``lambda_i ** power`` for 0-based ``i``."""
        e = [0, 0, 0]
        e[i % 3] = power
        return cls.monomial(*e, tri=tri)

    def _wrap(self, coeffs, other=None):
        tri = self.tri if self.tri is not None else getattr(other, "tri", None)
        return BaryPoly(coeffs, tri)

    def __add__(self, other):
        if isinstance(other, BaryPoly):
            return self._wrap(self.coeffs + other.coeffs, other)
        c = self.coeffs.copy()
        c[0] += float(other)
        return self._wrap(c)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, BaryPoly):
            out = np.zeros(len(EXPONENTS))
            for (i, ci), (j, cj) in itertools.product(enumerate(self.coeffs), enumerate(other.coeffs)):
                if ci == 0.0 or cj == 0.0:
                    continue
                e = tuple(x + y for x, y in zip(EXPONENTS[i], EXPONENTS[j]))
                if sum(e) > 3:
                    raise ValueError("product exceeds degree 3")
                out[_INDEX[e]] += ci * cj
            return self._wrap(out, other)
        return self._wrap(self.coeffs * float(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self._wrap(self.coeffs / float(scalar))

    def at_bary(self, lam):
        return monomial_matrix(lam) @ self.coeffs

    def __call__(self, x, y=None):
        if self.tri is None:
            raise ValueError("polynomial is not bound to a triangle; use at_bary")
        return self.at_bary(self.tri.barycentric(x, y))

    def integral(self, area=None):
        """Exact ``int_T p``; uses the bound triangle's area unless given."""
        if area is None:
            area = self.tri.area
        return float(area * np.dot(_MOMENTS, self.coeffs))

    @property
    def degree(self):
        nz = np.nonzero(np.abs(self.coeffs) > 0)[0]
        return max((sum(EXPONENTS[k]) for k in nz), default=0)

    def __repr__(self):
        terms = [f"{c:+.6g}*l^{EXPONENTS[k]}" for k, c in enumerate(self.coeffs) if c != 0.0]
        return "BaryPoly(" + (" ".join(terms) or "0") + ")"


def _reference_basis(kind: ElementKind, params: ElementParams):
    """Closed-form dual basis; the interior function is ``60*l1*l2*l3`` (area factor excluded)."""
    K, G = params.K, params.G
    one = BaryPoly.constant()
    lam = [BaryPoly.lam(i) for i in range(3)]
    sq = [BaryPoly.lam(i, 2) for i in range(3)]
    bubble = BaryPoly.monomial(1, 1, 1)
    varphi = [one - 2 * lam[i] for i in range(3)]
    if kind is ElementKind.CR:
        return varphi
    phi = [-varphi[i] / (3 * K) + (-sq[i] + sq[(i + 1) % 3] + sq[(i + 2) % 3]) / (2 * K) for i in range(3)]
    if kind is ElementKind.C2:
        return varphi + phi
    e = [lam[(i + 1) % 3] * sq[(i + 2) % 3] for i in range(3)]
    mu = [varphi[i] - 20 * bubble for i in range(3)]
    eta = [phi[i] + 5 / (3 * K) * bubble for i in range(3)]
    zeta = [-varphi[i] / (12 * G) + K * phi[i] / (2 * G) + e[i] / G + bubble / (2 * G) for i in range(3)]
    return mu + eta + zeta + [60 * bubble]


@functools.lru_cache(maxsize=128)
def element_family(kind, params: ElementParams, edge_nodes: int = DEFAULT_EDGE_NODES,
                   tri_degree: int = DEFAULT_TRI_DEGREE):
    return ElementFamily(ElementKind.parse(kind), params, edge_nodes, tri_degree)


class ElementFamily:
    """DOF functionals and dual basis of one element kind, shared by all triangles."""

    def __init__(self, kind: ElementKind, params: ElementParams, edge_nodes=DEFAULT_EDGE_NODES,
                 tri_degree=DEFAULT_TRI_DEGREE):
        self.kind = kind
        self.params = params
        self.edge_nodes = edge_nodes
        self.tri_degree = tri_degree
        funcs = [mean_functional(edge_nodes)]
        if kind is not ElementKind.CR:
            funcs.append(enriched_functional(params, "F", edge_nodes))
        if kind is ElementKind.S3:
            funcs.append(enriched_functional(params, "L", edge_nodes))
        self._edge_funcs = funcs
        self._slices = []
        start = 0
        for fn in funcs:
            self._slices.append(slice(start, start + len(fn.points)))
            start += len(fn.points)
        self.edge_t = np.concatenate([fn.points for fn in funcs])
        self.rule = triangle_rule(tri_degree) if kind is ElementKind.S3 else None
        basis = _reference_basis(kind, params)
        self.basis_matrix = np.array([p.coeffs for p in basis])
        self.basis_matrix.setflags(write=False)

    @property
    def ndof(self):
        return self.kind.ndof

    def edge_points(self, corners):
        """Cartesian sample points on each edge: (nt, 3, m, 2)."""
        corners = np.asarray(corners, dtype=float)
        t = self.edge_t[None, None, :, None]
        a = corners[:, [1, 2, 0]][:, :, None, :]
        b = corners[:, [2, 0, 1]][:, :, None, :]
        return t * a + (1.0 - t) * b

    def dofs(self, corners, areas, f):
        """DOF values of a vectorized ``f(x, y)`` on every triangle: (nt, ndof)."""
        corners = np.asarray(corners, dtype=float)
        nt = len(corners)
        pts = self.edge_points(corners)
        vals = np.asarray(f(pts[..., 0], pts[..., 1]), dtype=float)
        vals = np.broadcast_to(vals, pts.shape[:-1])
        out = np.empty((nt, self.ndof))
        for block, (fn, sl) in enumerate(zip(self._edge_funcs, self._slices)):
            out[:, 3 * block:3 * block + 3] = vals[:, :, sl] @ fn.coeffs
        if self.rule is not None:
            qp = np.einsum("qk,tkd->tqd", self.rule.barycentric_nodes, corners)
            fv = np.broadcast_to(np.asarray(f(qp[..., 0], qp[..., 1]), dtype=float), qp.shape[:-1])
            out[:, 9] = np.asarray(areas) * (fv @ self.rule.weights)
        return out

    def poly_dofs(self, coeffs, areas):
        """DOF values of barycentric polynomials ``coeffs`` (nt, 20) or (20,) per triangle."""
        coeffs = np.atleast_2d(coeffs)
        nt = len(coeffs)
        out = np.empty((nt, self.ndof))
        for block, (fn, sl) in enumerate(zip(self._edge_funcs, self._slices)):
            t = fn.points
            for j in range(3):
                lam = np.zeros((len(t), 3))
                lam[:, (j + 1) % 3] = t
                lam[:, (j + 2) % 3] = 1.0 - t
                out[:, 3 * block + j] = (coeffs @ monomial_matrix(lam).T) @ fn.coeffs
        if self.rule is not None:
            M = monomial_matrix(self.rule.barycentric_nodes)
            out[:, 9] = np.asarray(areas) * ((coeffs @ M.T) @ self.rule.weights)
        return out

    def coefficients(self, dofs, areas):
        """Barycentric coefficients (nt, 20) of the interpolant with the given DOFs."""
        dofs = np.array(dofs, dtype=float, copy=True)
        if self.kind is ElementKind.S3:
            dofs[..., 9] /= np.asarray(areas)
        return dofs @ self.basis_matrix

    def basis(self, area):
        scale = np.ones(self.ndof)
        if self.kind is ElementKind.S3:
            scale[9] = 1.0 / area
        return [row * s for row, s in zip(self.basis_matrix, scale)]


@dataclass(frozen=True)
class UnisolvenceReport:
    kind: ElementKind
    matrix: np.ndarray
    expected: np.ndarray
    determinant: float
    expected_determinant: float
    max_deviation: float
    basis_crosscheck: float

    def ok(self, tol=1e-9):
        scale = max(1.0, float(np.abs(self.expected).max()))
        return self.max_deviation <= tol * scale and self.basis_crosscheck <= tol


class EnrichedElement:
    """One triangle equipped with the CR, C2 or S3 element for parameters ``params``."""

    def __init__(self, tri: TriangleGeom, params: ElementParams, kind="s3",
                 edge_nodes=DEFAULT_EDGE_NODES, tri_degree=DEFAULT_TRI_DEGREE):
        self.tri = tri
        self.params = params
        self.kind = ElementKind.parse(kind)
        self.family = element_family(self.kind, params, edge_nodes, tri_degree)
        self._corners = tri.vertices[None]
        self._area = np.array([tri.area])

    @property
    def ndof(self):
        return self.kind.ndof

    def _edge_value(self, fn, j, f):
        if j not in (1, 2, 3):
            raise ValueError(f"edge index must be 1, 2 or 3, got {j!r}")
        p = self.tri.edge_point(j, fn.points)
        return float(np.dot(fn.coeffs, f(p[:, 0], p[:, 1])))

    def dof_I(self, j, f):
        """Mean of ``f`` over edge ``j``."""
        return self._edge_value(mean_functional(self.family.edge_nodes), j, f)

    def dof_F(self, j, f):
        return self._edge_value(enriched_functional(self.params, "F", self.family.edge_nodes), j, f)

    def dof_L(self, j, f):
        return self._edge_value(enriched_functional(self.params, "L", self.family.edge_nodes), j, f)

    def dof_J(self, f):
        """``int_T f`` with the default triangle rule."""
        rule = triangle_rule(self.family.tri_degree)
        pts = rule.barycentric_nodes @ self.tri.vertices
        return float(self.tri.area * np.dot(rule.weights, f(pts[:, 0], pts[:, 1])))

    def dofs(self, f):
        """All DOFs of ``f`` in the fixed order."""
        return self.family.dofs(self._corners, self._area, f)[0]

    def basis(self):
        return [BaryPoly(c, self.tri) for c in self.family.basis(self.tri.area)]

    def basis_eval(self, i, x, y=None):
        """Basis function ``i`` (0-based, DOF order) at Cartesian point(s)."""
        if not 0 <= i < self.ndof:
            raise IndexError(f"basis index {i} out of range for {self.kind.name}")
        return self.basis()[i](x, y)

    def project(self, f) -> BaryPoly:
        """The DOF-weighted sum of basis functions, as a polynomial on this triangle."""
        coeffs = self.family.coefficients(self.dofs(f)[None], self._area)[0]
        return BaryPoly(coeffs, self.tri)

    def poly_dofs(self, poly: BaryPoly):
        return self.family.poly_dofs(poly.coeffs, self._area)[0]

    def duality_matrix(self):
        """``M[i, j] = DOF_i(basis_j)``, evaluated by quadrature."""
        coeffs = np.array(self.family.basis(self.tri.area))
        return self.family.poly_dofs(coeffs, np.full(len(coeffs), self.tri.area)).T

    def unisolvence_report(self) -> UnisolvenceReport:
        """Check the enrichment block of the DOF matrix against its closed form.

        CR: ``I_i(l_j)`` against ``(ones - I)/2``; C2: ``F_i(l_j**2)`` against
        ``K (ones - I)`` with determinant ``2 K**3``; S3: ``L_i(e_j)`` against
        ``G I`` with determinant ``G**3``.  Also rebuilds the dual basis by
        inverting the full DOF matrix on homogeneous monomials and reports its
        largest deviation from the closed forms at sample points.
        """
        K, G = self.params.K, self.params.G
        fam = element_family(self.kind, self.params, self.family.edge_nodes, self.family.tri_degree)
        if self.kind is ElementKind.CR:
            polys = [BaryPoly.lam(j) for j in range(3)]
            rows, expected, det_expected = slice(0, 3), 0.5 * (np.ones((3, 3)) - np.eye(3)), 0.25
        elif self.kind is ElementKind.C2:
            polys = [BaryPoly.lam(j, 2) for j in range(3)]
            rows, expected, det_expected = slice(3, 6), K * (np.ones((3, 3)) - np.eye(3)), 2 * K ** 3
        else:
            polys = [BaryPoly.lam((j + 1) % 3) * BaryPoly.lam((j + 2) % 3, 2) for j in range(3)]
            rows, expected, det_expected = slice(6, 9), G * np.eye(3), G ** 3
        vals = fam.poly_dofs(np.array([p.coeffs for p in polys]), np.full(3, self.tri.area))
        matrix = vals[:, rows].T
        return UnisolvenceReport(
            kind=self.kind,
            matrix=matrix,
            expected=expected,
            determinant=float(np.linalg.det(matrix)),
            expected_determinant=float(det_expected),
            max_deviation=float(np.abs(matrix - expected).max()),
            basis_crosscheck=self._basis_crosscheck(),
        )

    def _basis_crosscheck(self):
        deg = self.kind.degree
        homog = [k for k, e in enumerate(EXPONENTS) if sum(e) == deg]
        C = np.zeros((len(homog), len(EXPONENTS)))
        C[np.arange(len(homog)), homog] = 1.0
        D = self.family.poly_dofs(C, np.full(len(homog), self.tri.area))  # D[k, i] = DOF_i(m_k)
        inv_basis = np.linalg.inv(D) @ C  # row i: dual function i
        closed = np.array(self.family.basis(self.tri.area))
        rng = np.random.default_rng(12345)
        lam = rng.dirichlet(np.ones(3), size=40)
        M = monomial_matrix(lam)
        a, b = inv_basis @ M.T, closed @ M.T
        return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))
