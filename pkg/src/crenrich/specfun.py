"""Special functions and the normalization constants of the enriched elements."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


def log_gamma(z: float) -> float:
    """Natural log of the gamma function for real ``z > 0``."""
    if not z > 0:
        raise ValueError(f"log_gamma requires z > 0, got {z!r}")
    return math.lgamma(z)


def beta_fn(z1: float, z2: float) -> float:
    """Euler beta function ``B(z1, z2)``, evaluated in log space."""
    if not (z1 > 0 and z2 > 0):
        raise ValueError(f"beta_fn requires positive arguments, got ({z1!r}, {z2!r})")
    return math.exp(log_gamma(z1) + log_gamma(z2) - log_gamma(z1 + z2))


def constant_K(params: "ElementParams") -> float:
    """Value of every off-diagonal entry ``F_i(lambda_j**2)`` of the quadratic element."""
    a, b = params.alpha, params.beta
    return beta_fn(b + 1.5, a + 1.5) / 2.0 ** (2.0 * a + 1.0)


def constant_G(params: "ElementParams") -> float:
    """Diagonal entry ``L_j(e_j)`` of the cubic element."""
    a, b = params.alpha, params.beta
    return (2.0 * b + 3.0) * constant_K(params) / (4.0 * (a + b + 3.0))


@dataclass(frozen=True)
class ElementParams:
    """Weight parameters ``(alpha, beta)`` of the enriched functionals.

    Both must exceed -1/2. ``K`` and ``G`` are computed once at construction.
    """

    alpha: float
    beta: float
    K: float = field(init=False, repr=False, compare=False)
    G: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        alpha = float(self.alpha)
        beta = float(self.beta)
        if not (math.isfinite(alpha) and alpha > -0.5):
            raise ValueError(f"alpha must satisfy alpha > -1/2, got {self.alpha!r}")
        if not (math.isfinite(beta) and beta > -0.5):
            raise ValueError(f"beta must satisfy beta > -1/2, got {self.beta!r}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "K", constant_K(self))
        object.__setattr__(self, "G", constant_G(self))


# Parameter choices for which the even kernel is a classical orthogonal
# polynomial (up to scaling).
REMARK_FAMILIES = {
    "legendre": (0.5, 0.0),
    "gegenbauer": (2.0, 0.0),
    "chebyshev1": (0.5, 0.5),
    "chebyshev2": (2.5, 0.5),
}
