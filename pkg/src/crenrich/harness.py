"""Convergence studies: L1 interpolation errors of CR, C2 and S3 on mesh sequences."""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .elements import ElementKind, element_family, monomial_matrix
from .mesh import Mesh
from .quadrature import (DEFAULT_EDGE_NODES, DEFAULT_TRI_DEGREE, L1_REFINE_LEVELS, L1_TRI_DEGREE,
                         refined_rule)
from .specfun import ElementParams

CSV_HEADER = ("f_id", "kind", "alpha", "beta", "N", "h", "l1_error")
CHUNK = 4096


def _f1(x, y):
    return 1.0 / (x ** 2 + y ** 2 + 8.0)


def _f2(x, y):
    return np.exp(x + y)


def _f3(x, y):
    return np.cos(2.0 * x + y)


def _f4(x, y):
    return np.sqrt(x ** 2 + y ** 2 + 1.0)


def _f5(x, y):
    return np.sqrt(64.0 - 81.0 * ((x - 0.5) ** 2 + (y - 0.5) ** 2)) / 9.0 - 0.5


def _f6(x, y):
    X = 9.0 * (x + 1.0) / 2.0
    Y = 9.0 * (y + 1.0) / 2.0
    return (0.75 * np.exp(-(X - 2.0) ** 2 / 4.0 - (Y - 2.0) ** 2 / 4.0)
            + 0.75 * np.exp(-(X + 1.0) ** 2 / 49.0 - (Y + 1.0) / 10.0)
            + 0.5 * np.exp(-(X - 7.0) ** 2 / 4.0 - (Y - 3.0) ** 2 / 4.0)
            - 0.2 * np.exp(-(X - 4.0) ** 2 - (Y - 7.0) ** 2))


_FUNCS = {
    1: (_f1, "1/(x^2+y^2+8)", (0.0, 0.0, 1.0, 1.0)),
    2: (_f2, "exp(x+y)", (0.0, 0.0, 1.0, 1.0)),
    3: (_f3, "cos(2x+y)", (0.0, 0.0, 1.0, 1.0)),
    4: (_f4, "sqrt(x^2+y^2+1)", (0.0, 0.0, 1.0, 1.0)),
    5: (_f5, "sqrt(64-81((x-0.5)^2+(y-0.5)^2))/9-0.5", (0.0, 0.0, 1.0, 1.0)),
    6: (_f6, "Franke-type exponential sum", (-1.0, -1.0, 1.0, 1.0)),
}


@dataclass(frozen=True)
class TestFunction:
    """One of the six benchmark functions together with its domain box."""

    __test__ = False  # keep pytest from collecting this class

    id: int
    func: object = field(repr=False)
    expression: str
    domain_box: tuple

    def __post_init__(self):
        if self.id == 5:
            xmin, ymin, xmax, ymax = self.domain_box
            dx = max(abs(xmin - 0.5), abs(xmax - 0.5))
            dy = max(abs(ymin - 0.5), abs(ymax - 0.5))
            if 64.0 - 81.0 * (dx * dx + dy * dy) < 0.0:
                raise ValueError(f"f5 is undefined on part of the box {self.domain_box}")

    def __call__(self, x, y):
        return self.func(x, y)


def get_function(f_id: int, box=None) -> TestFunction:
    if f_id not in _FUNCS:
        raise ValueError(f"unknown test function {f_id!r}; expected 1..6")
    func, expr, default_box = _FUNCS[f_id]
    return TestFunction(f_id, func, expr, tuple(float(b) for b in (box or default_box)))


def default_box(f_id: int):
    return _FUNCS[f_id][2]


def thread_count():
    env = os.environ.get("CRENRICH_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"CRENRICH_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def project_mesh(mesh: Mesh, kind, params: ElementParams, f, edge_nodes=DEFAULT_EDGE_NODES,
                 tri_degree=DEFAULT_TRI_DEGREE):
    """Barycentric coefficients (nt, 20) of the local interpolant on every triangle."""
    fam = element_family(ElementKind.parse(kind), params, edge_nodes, tri_degree)
    corners = mesh.corners()
    areas = mesh.areas()
    return fam.coefficients(fam.dofs(corners, areas, f), areas)


def l1_errors(mesh: Mesh, kind, params: ElementParams, f, *, edge_nodes=DEFAULT_EDGE_NODES,
              tri_degree=DEFAULT_TRI_DEGREE, l1_degree=L1_TRI_DEGREE, l1_levels=L1_REFINE_LEVELS,
              threads=None) -> np.ndarray:
    """Per-triangle ``int_T |f - Pi_T f|``, in triangle order."""
    fam = element_family(ElementKind.parse(kind), params, edge_nodes, tri_degree)
    rule = refined_rule(l1_degree, l1_levels)
    M = monomial_matrix(rule.barycentric_nodes)
    corners = mesh.corners()
    areas = mesh.areas()

    def work(sl):
        c, a = corners[sl], areas[sl]
        coeffs = fam.coefficients(fam.dofs(c, a, f), a)
        pts = np.einsum("qk,tkd->tqd", rule.barycentric_nodes, c)
        diff = np.abs(f(pts[..., 0], pts[..., 1]) - coeffs @ M.T)
        return a * (diff @ rule.weights)

    chunks = [slice(s, s + CHUNK) for s in range(0, len(corners), CHUNK)]
    n = min(threads or thread_count(), len(chunks))
    if n <= 1:
        parts = [work(sl) for sl in chunks]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            parts = list(pool.map(work, chunks))
    return np.concatenate(parts) if parts else np.zeros(0)


def l1_error(mesh: Mesh, kind, params: ElementParams, f, **kwargs) -> float:
    """``sum_T int_T |f - Pi_T f|`` (not normalized by the domain area)."""
    return math.fsum(l1_errors(mesh, kind, params, f, **kwargs))


@dataclass(frozen=True)
class ConvergenceRow:
    f_id: int
    kind: str
    alpha: float
    beta: float
    N: int
    h: float
    l1_error: float


@dataclass
class ConvergenceReport:
    f_id: int
    params: ElementParams
    kinds: list
    rows: list = field(default_factory=list)
    slopes: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def errors(self, kind):
        return np.array([r.l1_error for r in self.rows if r.kind == kind])

    def sizes(self, kind):
        return np.array([r.h for r in self.rows if r.kind == kind])

    def counts(self, kind):
        return [r.N for r in self.rows if r.kind == kind]

    def slope_table(self):
        lines = [f"f{self.f_id}  alpha={self.params.alpha:g} beta={self.params.beta:g}",
                 f"{'kind':<6}{'slope':>10}   errors (coarse -> fine)"]
        for k in self.kinds:
            s = self.slopes.get(k)
            stxt = "undef" if s is None else f"{s:.4f}"
            errs = " ".join(f"{e:.3e}" for e in self.errors(k))
            lines.append(f"{k:<6}{stxt:>10}   {errs}")
        return "\n".join(lines)

    def to_dict(self):
        return {
            "f_id": self.f_id,
            "alpha": self.params.alpha,
            "beta": self.params.beta,
            "kinds": list(self.kinds),
            "slopes": {k: self.slopes.get(k) for k in self.kinds},
            "rows": [r.__dict__ for r in self.rows],
            "metadata": self.metadata,
        }


def fit_slope(h, err):
    """Least-squares slope of ``log err`` against ``log h``; None if undetermined."""
    h = np.asarray(h, dtype=float)
    err = np.asarray(err, dtype=float)
    if len(h) < 2 or np.ptp(np.log(h)) == 0.0 or np.any(err <= 0):
        return None
    return float(np.polyfit(np.log(h), np.log(err), 1)[0])


def run_convergence(f_id, kinds, params: ElementParams, mesh_sequence, **kwargs) -> ConvergenceReport:
    """L1 errors and fitted slopes for every kind on every mesh, in the given order."""
    f = f_id if isinstance(f_id, TestFunction) else get_function(int(f_id))
    kinds = [ElementKind.parse(k).value for k in kinds]
    meshes = list(mesh_sequence)
    if not meshes:
        raise ValueError("mesh sequence is empty")
    report = ConvergenceReport(f.id, params, kinds, metadata={
        "expression": f.expression,
        "domain_box": list(f.domain_box),
        "l1_normalized_by_area": False,
    })
    stats = [(m.n_triangles, m.h()) for m in meshes]
    for k in kinds:
        for m, (N, h) in zip(meshes, stats):
            err = l1_error(m, k, params, f, **kwargs)
            report.rows.append(ConvergenceRow(f.id, k, params.alpha, params.beta, N, h, err))
        report.slopes[k] = fit_slope(report.sizes(k), report.errors(k))
    return report


def _fmt(x):
    return format(x, ".17g") if isinstance(x, float) else str(x)


def emit_csv(report: ConvergenceReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in report.rows:
            w.writerow([_fmt(getattr(r, c)) for c in CSV_HEADER])


def emit_json(report: ConvergenceReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def emit_svg_loglog(report: ConvergenceReport, path) -> None:
    from .plotting import loglog_figure, save_figure

    fig = loglog_figure(report)
    save_figure(fig, path)
