"""Gauss-Jacobi rules on (0, 1), the weighted edge functionals, and triangle rules.

The enriched edge functionals carry the weight
``t**(a-1/2) * (1-t)**(a-1/2) * |2t-1|**(2b)``, which is singular at the
endpoints when ``a < 1/2`` and at the midpoint when ``b < 0``.  After the
substitutions ``u = 2t - 1`` and ``v = u**2`` the even and odd parts of the
integrand become smooth functions of ``v`` against a pure Jacobi weight on
(0, 1), so plain Gauss-Jacobi rules integrate them to machine precision.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .specfun import ElementParams, beta_fn

DEFAULT_EDGE_NODES = 24
DEFAULT_TRI_DEGREE = 8
L1_TRI_DEGREE = 6
L1_REFINE_LEVELS = 1
MAX_TRI_DEGREE = 20


class QuadratureError(RuntimeError):
    """Raised when a rule cannot be built or a doubling check fails."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QuadRule1D:
    """Gauss rule for ``int_0^1 v**exp_left (1-v)**exp_right p(v) dv``."""

    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int
    exp_left: float = 0.0
    exp_right: float = 0.0

    def __len__(self):
        return len(self.nodes)

    def integrate(self, g):
        return float(np.dot(self.weights, g(self.nodes)))


@dataclass(frozen=True)
class QuadRule2D:
    """Triangle rule in barycentric coordinates; weights sum to one."""

    barycentric_nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int

    def __len__(self):
        return len(self.weights)


def _jacobi_recurrence(n, a, b):
    """Monic recurrence coefficients for the weight ``(1-x)**a (1+x)**b`` on [-1, 1]."""
    diag = np.empty(n)
    offsq = np.empty(max(n - 1, 0))
    s = a + b
    diag[0] = (b - a) / (s + 2.0)
    for k in range(1, n):
        diag[k] = (b * b - a * a) / ((2 * k + s) * (2 * k + s + 2.0))
    if n > 1:
        offsq[0] = 4.0 * (1 + a) * (1 + b) / ((2 + s) ** 2 * (3 + s))
    for k in range(2, n):
        t = 2 * k + s
        offsq[k - 1] = 4.0 * k * (k + a) * (k + b) * (k + s) / (t * t * (t + 1) * (t - 1))
    return diag, offsq


@functools.lru_cache(maxsize=256)
def gauss_jacobi_01(n: int, exp_left: float, exp_right: float) -> QuadRule1D:
    """n-point Gauss rule for the weight ``v**exp_left (1-v)**exp_right`` on (0, 1).

    Golub-Welsch: the Jacobi matrix of the recurrence is mapped from [-1, 1]
    to (0, 1) and diagonalized; weights are the squared first eigenvector
    components times the zeroth moment ``B(exp_left+1, exp_right+1)``.
    Exact for polynomials of degree ``2n - 1``.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if not (exp_left > -1 and exp_right > -1):
        raise ValueError(f"exponents must exceed -1, got ({exp_left!r}, {exp_right!r})")
    # v = (1+x)/2 sends v**exp_left to (1+x)**exp_left
    diag, offsq = _jacobi_recurrence(n, exp_right, exp_left)
    d = 0.5 * (1.0 + diag)
    e = 0.5 * np.sqrt(offsq)
    mu0 = beta_fn(exp_left + 1.0, exp_right + 1.0)
    if n == 1:
        return QuadRule1D(_frozen(d), _frozen([mu0]), 1, float(exp_left), float(exp_right))
    try:
        nodes, vecs = eigh_tridiagonal(d, e)
    except LinAlgError as exc:
        raise QuadratureError(f"tridiagonal eigensolve failed for n={n}: {exc}") from exc
    order = np.argsort(nodes)
    nodes = nodes[order]
    weights = mu0 * vecs[0, order] ** 2
    return QuadRule1D(_frozen(nodes), _frozen(weights), 2 * n - 1, float(exp_left), float(exp_right))


@dataclass(frozen=True)
class EdgeFunctional:
    """A linear functional on functions of ``t in [0, 1]`` as ``sum(coeffs * g(points))``."""

    points: np.ndarray
    coeffs: np.ndarray

    def __call__(self, g):
        return float(np.dot(self.coeffs, g(self.points)))

    def apply(self, values):
        """Apply to samples ``values[..., k] = g(points[k])``."""
        return values @ self.coeffs


@functools.lru_cache(maxsize=64)
def mean_functional(n: int = DEFAULT_EDGE_NODES) -> EdgeFunctional:
    """``int_0^1 g(t) dt`` by n-point Gauss-Legendre."""
    rule = gauss_jacobi_01(n, 0.0, 0.0)
    return EdgeFunctional(rule.nodes, rule.weights)


@functools.lru_cache(maxsize=256)
def enriched_functional(params: ElementParams, kernel: str, n: int = DEFAULT_EDGE_NODES) -> EdgeFunctional:
    """Discretize the even (``"F"``) or odd (``"L"``) weighted edge functional.

    With ``u = 2t - 1`` and ``v = u**2`` the even functional becomes
    ``2**(-2a)/2 * int v**(b-1/2) (1-v)**(a-1/2) p2(v) [g+ + g-] dv`` and the
    odd one ``2**(-2a)/2 * int v**(b+1/2) (1-v)**(a-1/2) q2(v) [g+ - g-]/sqrt(v) dv``
    where ``g+-`` is g at ``t = (1 +- sqrt(v))/2``.
    """
    a, b = params.alpha, params.beta
    scale = 0.5 * 2.0 ** (-2.0 * a)
    if kernel == "F":
        rule = gauss_jacobi_01(n, b - 0.5, a - 0.5)
        v = rule.nodes
        s = np.sqrt(v)
        half = scale * rule.weights * (2.0 * (a + b + 1.0) * v - (2.0 * b + 1.0))
        coeffs = np.concatenate([half, half])
    elif kernel == "L":
        rule = gauss_jacobi_01(n, b + 0.5, a - 0.5)
        v = rule.nodes
        s = np.sqrt(v)
        half = scale * rule.weights * (2.0 * (a + b + 2.0) * v - (2.0 * b + 3.0)) / s
        coeffs = np.concatenate([half, -half])
    else:
        raise ValueError(f"kernel must be 'F' or 'L', got {kernel!r}")
    points = np.concatenate([0.5 * (1.0 + s), 0.5 * (1.0 - s)])
    return EdgeFunctional(_frozen(points), _frozen(coeffs))


def weighted_edge_integral(params: ElementParams, kernel: str, g, n: int = DEFAULT_EDGE_NODES,
                           check: bool = False, rtol: float = 1e-10) -> float:
    """Evaluate the enriched edge functional ``kernel`` ("F" or "L") on ``g``.

    ``g`` must accept a numpy array of ``t`` values.  With ``check=True`` the
    result is recomputed with ``2n`` nodes and :class:`QuadratureError` is
    raised if the two disagree beyond ``rtol`` times the integrand scale.
    """
    fun = enriched_functional(params, kernel, n)
    vals = np.asarray(g(fun.points), dtype=float)
    result = float(np.dot(fun.coeffs, vals))
    if check:
        fine = enriched_functional(params, kernel, 2 * n)
        fine_vals = np.asarray(g(fine.points), dtype=float)
        refined = float(np.dot(fine.coeffs, fine_vals))
        scale = max(float(np.dot(np.abs(fine.coeffs), np.abs(fine_vals))), np.finfo(float).tiny)
        if abs(refined - result) > rtol * scale:
            raise QuadratureError(
                f"edge quadrature did not converge with {2 * n} nodes "
                f"(|I_n - I_2n| = {abs(refined - result):.3e})",
                estimate=abs(refined - result),
            )
        result = refined
    return result


def _merge_nodes(nodes, weights, decimals=14):
    merged = {}
    for lam, w in zip(nodes, weights):
        key = tuple(np.round(lam, decimals) + 0.0)
        if key in merged:
            merged[key][1] += w
        else:
            merged[key] = [lam, w]
    keys = sorted(merged)
    return np.array([merged[k][0] for k in keys]), np.array([merged[k][1] for k in keys])


@functools.lru_cache(maxsize=32)
def triangle_rule(degree: int) -> QuadRule2D:
    """Fully symmetric triangle rule exact for total degree ``degree``.

    Built from a collapsed Gauss-Jacobi x Gauss-Legendre product rule that is
    averaged over the six permutations of the barycentric coordinates, so the
    weights stay positive and every node is interior.
    """
    if int(degree) != degree or not 1 <= degree <= MAX_TRI_DEGREE:
        raise ValueError(f"unsupported triangle rule degree {degree!r} (1..{MAX_TRI_DEGREE})")
    degree = int(degree)
    n = degree // 2 + 1
    rs = gauss_jacobi_01(n, 0.0, 1.0)
    rr = gauss_jacobi_01(n, 0.0, 0.0)
    s, r = np.meshgrid(rs.nodes, rr.nodes, indexing="ij")
    w = 2.0 * np.outer(rs.weights, rr.weights)
    base = np.stack([s, (1 - s) * r, (1 - s) * (1 - r)], axis=-1).reshape(-1, 3)
    w = w.reshape(-1)
    perms = list(itertools.permutations(range(3)))
    nodes = np.concatenate([base[:, p] for p in perms])
    weights = np.concatenate([w / len(perms)] * len(perms))
    nodes, weights = _merge_nodes(nodes, weights)
    return QuadRule2D(_frozen(nodes), _frozen(weights), degree)


_SUBTRIANGLES = np.array([
    [[1, 0, 0], [.5, .5, 0], [.5, 0, .5]],
    [[.5, .5, 0], [0, 1, 0], [0, .5, .5]],
    [[.5, 0, .5], [0, .5, .5], [0, 0, 1]],
    [[0, .5, .5], [.5, 0, .5], [.5, .5, 0]],
])


@functools.lru_cache(maxsize=32)
def refined_rule(degree: int = L1_TRI_DEGREE, levels: int = L1_REFINE_LEVELS) -> QuadRule2D:
    """Composite rule: ``triangle_rule(degree)`` on ``4**levels`` congruent sub-triangles."""
    rule = triangle_rule(degree)
    nodes, weights = np.asarray(rule.barycentric_nodes), np.asarray(rule.weights)
    for _ in range(levels):
        nodes = np.concatenate([nodes @ sub for sub in _SUBTRIANGLES])
        weights = np.concatenate([weights / 4.0] * 4)
    return QuadRule2D(_frozen(nodes), _frozen(weights), degree)


def integrate_triangle(rule: QuadRule2D, tri, f) -> float:
    """``int_T f`` for a vectorized ``f(x, y)`` on a triangle with ``vertices`` (3, 2)."""
    pts = rule.barycentric_nodes @ np.asarray(tri.vertices, dtype=float)
    vals = np.asarray(f(pts[:, 0], pts[:, 1]), dtype=float)
    return float(tri.area * np.dot(rule.weights, vals))


def simplex_moment(a: int, b: int, c: int) -> float:
    """Exact area-normalized ``int_T l1**a l2**b l3**c / |T|``."""
    return 2.0 * math.factorial(a) * math.factorial(b) * math.factorial(c) / math.factorial(2 + a + b + c)
