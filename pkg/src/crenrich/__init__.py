"""Crouzeix-Raviart element with quadratic and cubic weighted-edge enrichments."""

from .elements import BaryPoly, ElementKind, EnrichedElement
from .harness import ConvergenceReport, get_function, l1_error, run_convergence
from .mesh import Mesh, TriangleGeom, jittered_delaunay_mesh, read_mesh, uniform_mesh, write_mesh
from .quadrature import gauss_jacobi_01, integrate_triangle, triangle_rule, weighted_edge_integral
from .specfun import ElementParams, beta_fn, constant_G, constant_K, log_gamma

__version__ = "0.1.0"

__all__ = [
    "BaryPoly", "ConvergenceReport", "ElementKind", "ElementParams", "EnrichedElement", "Mesh",
    "TriangleGeom", "beta_fn", "constant_G", "constant_K", "gauss_jacobi_01", "get_function",
    "integrate_triangle", "jittered_delaunay_mesh", "l1_error", "log_gamma", "read_mesh",
    "run_convergence", "triangle_rule", "uniform_mesh", "weighted_edge_integral", "write_mesh",
]
