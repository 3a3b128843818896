import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from crenrich.specfun import REMARK_FAMILIES, ElementParams, beta_fn, constant_G, constant_K, log_gamma


@pytest.mark.parametrize("z, expected", [
    (1.0, 0.0),
    (0.5, math.log(math.sqrt(math.pi))),
    (5.0, math.log(24.0)),
])
def test_log_gamma_examples(z, expected):
    assert log_gamma(z) == pytest.approx(expected, rel=1e-14, abs=1e-15)


def test_log_gamma_against_mpmath():
    # relative accuracy away from the zeros at 1 and 2, absolute near them
    for z in np.concatenate([np.geomspace(1e-3, 50, 400), [0.9999, 1.0001, 1.9999, 2.0001]]):
        ref = float(mpmath.loggamma(mpmath.mpf(float(z))))
        assert abs(log_gamma(z) - ref) <= 1e-13 * max(abs(ref), 1.0)


@pytest.mark.parametrize("bad", [0.0, -1.0, -0.5])
def test_log_gamma_domain(bad):
    with pytest.raises(ValueError):
        log_gamma(bad)


def test_beta_examples():
    assert beta_fn(1, 1) == pytest.approx(1.0, rel=1e-15)
    assert beta_fn(2.5, 2.5) == pytest.approx(3 * math.pi / 128, rel=1e-14)


@pytest.mark.parametrize("args", [(0, 1), (1, -2), (-0.1, 3)])
def test_beta_domain(args):
    with pytest.raises(ValueError):
        beta_fn(*args)


def test_beta_recurrences_random(rng):
    z = rng.uniform(0, 10, size=(1000, 2)) + 1e-9
    for z1, z2 in z:
        b = beta_fn(z1, z2)
        assert beta_fn(z1 + 1, z2) == pytest.approx(z1 / (z1 + z2) * b, rel=1e-12)
        assert beta_fn(z1, z2 + 1) == pytest.approx(z2 / (z1 + z2) * b, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 20), st.floats(0.05, 20))
def test_beta_symmetric_and_matches_mpmath(z1, z2):
    assert beta_fn(z1, z2) == pytest.approx(beta_fn(z2, z1), rel=1e-13)
    assert beta_fn(z1, z2) == pytest.approx(float(mpmath.beta(z1, z2)), rel=1e-12)


def test_constant_K_examples():
    assert constant_K(ElementParams(0.5, 0.0)) == pytest.approx(1 / 15, rel=1e-14)
    assert constant_K(ElementParams(1.0, 1.0)) == pytest.approx(3 * math.pi / 1024, rel=1e-14)


def test_constant_G_examples():
    p = ElementParams(1.0, 1.0)
    assert constant_G(p) == pytest.approx(3 * math.pi / 4096, rel=1e-14)
    # 3 * (1/15) / (4 * 3.5)
    assert constant_G(ElementParams(0.5, 0.0)) == pytest.approx(1 / 70, rel=1e-14)


def test_params_cache_and_relation():
    for a in np.linspace(-0.49, 4, 12):
        for b in np.linspace(-0.49, 4, 12):
            p = ElementParams(a, b)
            assert p.K > 0 and p.G > 0
            assert p.K == constant_K(p)
            assert p.G == p.K * (2 * b + 3) / (4 * (a + b + 3))


@pytest.mark.parametrize("a, b", [(-0.5, 0.0), (0.0, -0.5), (-0.6, 1.0), (1.0, -2.0), (float("nan"), 0.0)])
def test_params_reject_inadmissible(a, b):
    with pytest.raises(ValueError, match="> -1/2"):
        ElementParams(a, b)


def _direct_F_on_t_squared(a, b):
    # nonsingular for a >= 1/2 and b >= 0
    def integrand(t):
        u = 2 * t - 1
        return (t * (1 - t)) ** (a - 0.5) * (2 * (a + b + 1) * u * u - (2 * b + 1)) * abs(u) ** (2 * b) * t * t

    val, _ = integrate.quad(integrand, 0, 1, points=[0.5], epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


@pytest.mark.parametrize("name", sorted(REMARK_FAMILIES))
def test_K_matches_direct_edge_integral(name):
    a, b = REMARK_FAMILIES[name]
    assert _direct_F_on_t_squared(a, b) == pytest.approx(constant_K(ElementParams(a, b)), rel=1e-10, abs=1e-12)


def test_K_matches_direct_edge_integral_grid():
    for a in (0.5, 0.75, 1.0, 1.5, 3.0):
        for b in (0.0, 0.5, 1.0, 2.0):
            assert _direct_F_on_t_squared(a, b) == pytest.approx(ElementParams(a, b).K, rel=1e-10)


def test_orthogonality_beta_identity():
    for a in np.linspace(-0.45, 4, 10):
        for b in np.linspace(-0.45, 4, 10):
            lhs = beta_fn(b + 1.5, a + 0.5)
            rhs = (2 * b + 1) / (2 * (a + b + 1)) * beta_fn(b + 0.5, a + 0.5)
            assert lhs == pytest.approx(rhs, rel=1e-12)
