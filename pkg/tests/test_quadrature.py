import math

import numpy as np
import pytest
from scipy import integrate

from conftest import random_triangle
from crenrich.mesh import TriangleGeom
from crenrich.quadrature import (QuadratureError, enriched_functional, gauss_jacobi_01, integrate_triangle,
                                 mean_functional, refined_rule, simplex_moment, triangle_rule,
                                 weighted_edge_integral)
from crenrich.specfun import ElementParams, beta_fn

UNIT = TriangleGeom((0, 0), (1, 0), (0, 1))


def test_gauss_jacobi_one_point_midpoint():
    r = gauss_jacobi_01(1, 0.0, 0.0)
    assert r.nodes == pytest.approx([0.5], abs=1e-15)
    assert r.weights == pytest.approx([1.0], rel=1e-15)


def test_gauss_jacobi_two_point_legendre():
    r = gauss_jacobi_01(2, 0.0, 0.0)
    d = 1 / (2 * math.sqrt(3))
    assert r.nodes == pytest.approx([0.5 - d, 0.5 + d], abs=1e-15)
    assert r.weights == pytest.approx([0.5, 0.5], rel=1e-14)
    assert r.exactness_degree == 3


def test_gauss_jacobi_invariants():
    for el, er in [(-0.49, 2.5), (0.3, -0.7), (3.0, 3.0)]:
        r = gauss_jacobi_01(12, el, er)
        assert np.all(np.diff(r.nodes) > 0)
        assert r.nodes[0] > 0 and r.nodes[-1] < 1
        assert np.all(r.weights > 0)
        assert r.weights.sum() == pytest.approx(beta_fn(el + 1, er + 1), rel=1e-12)


def test_gauss_jacobi_asymmetric_exponents_oriented():
    # v**2 weight concentrates mass near v = 1
    r = gauss_jacobi_01(3, 2.0, 0.0)
    assert np.dot(r.weights, r.nodes) == pytest.approx(beta_fn(4, 1), rel=1e-13)


@pytest.mark.parametrize("n, el, er", [(0, 0, 0), (3, -1, 0), (3, 0, -1.5)])
def test_gauss_jacobi_rejects(n, el, er):
    with pytest.raises(ValueError):
        gauss_jacobi_01(n, el, er)


def test_moment_grid():
    grid = np.linspace(-0.49, 3.0, 8)
    for n in (4, 8, 16):
        k = np.arange(2 * n)
        for el in grid:
            for er in grid:
                r = gauss_jacobi_01(n, float(el), float(er))
                got = (r.weights[:, None] * r.nodes[:, None] ** k).sum(axis=0)
                ref = np.array([beta_fn(kk + el + 1, er + 1) for kk in k])
                assert np.max(np.abs(got / ref - 1)) < 1e-11, (n, el, er)


def test_mean_functional():
    m = mean_functional(8)
    assert m(lambda t: np.ones_like(t)) == pytest.approx(1.0, rel=1e-15)
    assert m(lambda t: t ** 5) == pytest.approx(1 / 6, rel=1e-14)


def test_F_on_constant_is_zero(params):
    assert abs(weighted_edge_integral(params, "F", lambda t: np.ones_like(t))) < 1e-13


def test_F_on_t_squared_examples(params):
    assert weighted_edge_integral(params, "F", lambda t: t * t) == pytest.approx(params.K, rel=1e-12)
    p = ElementParams(0.5, 0.0)
    assert weighted_edge_integral(p, "F", lambda t: t * t) == pytest.approx(1 / 15, rel=1e-13)


def test_L_on_t_squared_is_zero(params):
    assert abs(weighted_edge_integral(params, "L", lambda t: t * t)) < 1e-13


def test_L_on_e_value(params):
    # e_j restricted to edge j is t * (1 - t)**2
    assert weighted_edge_integral(params, "L", lambda t: t * (1 - t) ** 2) == pytest.approx(params.G, rel=1e-12)


def test_unknown_kernel():
    with pytest.raises(ValueError):
        enriched_functional(ElementParams(1, 1), "Q")


def _random_params(rng, count):
    return [ElementParams(*rng.uniform(-0.45, 3.0, size=2)) for _ in range(count)]


def test_annihilation_random(rng):
    """F kills affine functions and L kills quadratics, relative to the coefficient scale."""
    for p in _random_params(rng, 10):
        for _ in range(200):
            c = rng.normal(size=3) * 10 ** rng.uniform(-3, 3)
            scale = np.abs(c).max()
            lin = weighted_edge_integral(p, "F", lambda t: c[0] + c[1] * t)
            quad = weighted_edge_integral(p, "L", lambda t: c[0] + c[1] * t + c[2] * t * t)
            assert abs(lin) < 1e-10 * scale
            assert abs(quad) < 1e-10 * scale


def _direct(params, kernel, g):
    a, b = params.alpha, params.beta

    def integrand(t):
        u = 2 * t - 1
        if kernel == "F":
            k = 2 * (a + b + 1) * u * u - (2 * b + 1)
        else:
            k = (2 * (a + b + 2) * u * u - (2 * b + 3)) * u
        return (t * (1 - t)) ** (a - 0.5) * k * abs(u) ** (2 * b) * g(t)

    val, _ = integrate.quad(integrand, 0, 1, points=[0.5], epsabs=1e-13, epsrel=1e-12, limit=400)
    return val


SMOOTH = [np.exp, lambda t: np.cos(3 * t + 0.2), lambda t: 1 / (1 + t * t), lambda t: t ** 5 - 2 * t ** 4]


@pytest.mark.parametrize("a, b", [(0.5, 0.0), (1.0, 1.0), (2.0, 0.0), (0.5, 0.5), (2.5, 0.5), (0.7, 1.3)])
@pytest.mark.parametrize("kernel", ["F", "L"])
def test_split_matches_direct(a, b, kernel):
    p = ElementParams(a, b)
    for g in SMOOTH:
        assert weighted_edge_integral(p, kernel, g) == pytest.approx(_direct(p, kernel, g), abs=1e-9)


def test_doubling_check_passes_for_smooth():
    p = ElementParams(1.0, 1.0)
    plain = weighted_edge_integral(p, "F", np.exp)
    checked = weighted_edge_integral(p, "F", np.exp, check=True)
    assert checked == pytest.approx(plain, abs=1e-14)


def test_doubling_check_reports_estimate():
    p = ElementParams(1.0, 1.0)
    with pytest.raises(QuadratureError) as exc:
        weighted_edge_integral(p, "F", lambda t: np.cos(40 * t), n=2, check=True)
    assert exc.value.estimate > 0


def test_triangle_rule_invariants():
    for d in range(1, 21):
        r = triangle_rule(d)
        assert r.exactness_degree == d
        assert np.all(r.barycentric_nodes >= 0)
        assert np.allclose(r.barycentric_nodes.sum(axis=1), 1.0, atol=1e-15)
        assert r.weights.sum() == pytest.approx(1.0, rel=1e-14)
        assert np.all(r.weights > 0)


@pytest.mark.parametrize("bad", [0, 21, 2.5, -3])
def test_triangle_rule_unsupported(bad):
    with pytest.raises(ValueError):
        triangle_rule(bad)


def test_triangle_rule_exact_on_monomials():
    for d in (1, 2, 3, 6, 8, 12, 20):
        r = triangle_rule(d)
        lam = r.barycentric_nodes
        for s in range(d + 1):
            for a in range(s + 1):
                for b in range(s + 1 - a):
                    c = s - a - b
                    got = np.dot(r.weights, lam[:, 0] ** a * lam[:, 1] ** b * lam[:, 2] ** c)
                    assert got == pytest.approx(simplex_moment(a, b, c), rel=1e-12)


def test_triangle_rule_symmetric():
    r = triangle_rule(8)
    key = {tuple(np.round(n, 12)): round(w, 14) for n, w in zip(r.barycentric_nodes, r.weights)}
    for n, w in key.items():
        assert key[(n[1], n[2], n[0])] == w
        assert key[(n[1], n[0], n[2])] == w


def test_refined_rule():
    r = refined_rule(6, 1)
    assert len(r) == 4 * len(triangle_rule(6))
    assert r.weights.sum() == pytest.approx(1.0, rel=1e-14)
    assert refined_rule(6, 0).weights.sum() == pytest.approx(1.0)
    # a kink through the triangle is captured better after refinement
    f = lambda lam: np.abs(lam[:, 0] - 0.3)  # noqa: E731
    fine = refined_rule(6, 4)
    ref = np.dot(fine.weights, f(fine.barycentric_nodes))
    e0 = abs(np.dot(triangle_rule(6).weights, f(triangle_rule(6).barycentric_nodes)) - ref)
    e1 = abs(np.dot(r.weights, f(r.barycentric_nodes)) - ref)
    assert e1 < e0


def test_integrate_triangle_examples(rng):
    rule = triangle_rule(8)
    assert integrate_triangle(rule, UNIT, lambda x, y: np.ones_like(x)) == pytest.approx(0.5, rel=1e-14)
    assert integrate_triangle(rule, UNIT, lambda x, y: x + y) == pytest.approx(1 / 3, rel=1e-14)
    for _ in range(20):
        tri = random_triangle(rng)
        l1 = lambda x, y, tri=tri: tri.barycentric(x, y)[..., 0]  # noqa: E731
        assert integrate_triangle(rule, tri, lambda x, y: np.ones_like(x)) == pytest.approx(tri.area, rel=1e-13)
        assert integrate_triangle(rule, tri, lambda x, y: l1(x, y) ** 2) == pytest.approx(tri.area / 6, rel=1e-12)

        def bubble(x, y, tri=tri):
            lam = tri.barycentric(x, y)
            return lam[..., 0] * lam[..., 1] * lam[..., 2]

        assert integrate_triangle(rule, tri, bubble) == pytest.approx(tri.area / 60, rel=1e-12)


def test_simplex_moment_values():
    assert simplex_moment(0, 0, 0) == 1.0
    assert simplex_moment(1, 1, 1) == pytest.approx(1 / 60)
    assert simplex_moment(2, 0, 0) == pytest.approx(1 / 6)
