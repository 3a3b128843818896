"""Command-line entry point: ``crenrich {converge,verify,mesh}``.

Exit codes: 0 success, 2 invalid arguments, 3 I/O failure, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import harness
from .elements import EnrichedElement, ElementKind
from .mesh import MeshFormatError, TriangleGeom, jittered_delaunay_mesh, read_mesh, uniform_mesh, write_mesh
from .quadrature import DEFAULT_EDGE_NODES, DEFAULT_TRI_DEGREE, L1_REFINE_LEVELS, L1_TRI_DEGREE, QuadratureError
from .specfun import REMARK_FAMILIES, ElementParams

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4

# unisolvence is affine invariant, so any fixed triangle will do
VERIFY_TRIANGLE = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))


class UsageError(Exception):
    pass


def _int_list(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _box(text):
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        vals = ()
    if len(vals) != 4 or not (vals[2] > vals[0] and vals[3] > vals[1]):
        raise argparse.ArgumentTypeError(f"expected xmin,ymin,xmax,ymax with max > min, got {text!r}")
    return vals


def _kinds(text):
    try:
        return [ElementKind.parse(k).value for k in text.split(",") if k.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _params(args):
    if not args.alpha > -0.5:
        raise UsageError(f"--alpha must satisfy alpha > -1/2 (got {args.alpha})")
    if not args.beta > -0.5:
        raise UsageError(f"--beta must satisfy beta > -1/2 (got {args.beta})")
    return ElementParams(args.alpha, args.beta)


def _add_mesh_source(p, multi):
    g = p.add_mutually_exclusive_group(required=True)
    if multi:
        g.add_argument("--uniform", type=_int_list, metavar="N1,N2,...",
                       help="uniform meshes with n x n squares (2n^2 triangles)")
        g.add_argument("--delaunay", type=_int_list, metavar="N1,N2,...",
                       help="jittered Delaunay meshes with about N triangles")
        g.add_argument("--mesh-file", nargs="+", metavar="PATH", help="mesh files in text format")
    else:
        g.add_argument("--uniform", type=int, metavar="N")
        g.add_argument("--delaunay", type=int, metavar="N")
    p.add_argument("--seed", type=int, default=0, help="seed for --delaunay (default 0)")
    p.add_argument("--box", type=_box, default=None, metavar="XMIN,YMIN,XMAX,YMAX",
                   help="domain box; write as --box=-1,-1,1,1 when it starts with a minus sign")


def build_parser():
    parser = argparse.ArgumentParser(prog="crenrich", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("converge", help="L1 convergence study for one test function")
    c.add_argument("--f", dest="f_id", type=int, required=True, choices=range(1, 7), metavar="{1..6}")
    c.add_argument("--kinds", type=_kinds, default=["cr", "c2", "s3"], help="subset of cr,c2,s3")
    c.add_argument("--alpha", type=float, default=1.0)
    c.add_argument("--beta", type=float, default=1.0)
    _add_mesh_source(c, multi=True)
    c.add_argument("--csv", default=None, help="CSV output (default converge_f<ID>.csv)")
    c.add_argument("--svg", default=None, help="log-log plot; the suffix picks the format")
    c.add_argument("--json", default=None, help="write the slope table as JSON")
    c.add_argument("--edge-nodes", type=int, default=DEFAULT_EDGE_NODES, help="Gauss-Jacobi nodes per edge rule")
    c.add_argument("--tri-degree", type=int, default=DEFAULT_TRI_DEGREE, help="triangle rule degree for J")
    c.add_argument("--l1-degree", type=int, default=L1_TRI_DEGREE, help="triangle rule degree for L1 errors")
    c.add_argument("--l1-levels", type=int, default=L1_REFINE_LEVELS, help="midpoint refinements for L1 errors")
    c.add_argument("--check-quadrature", action="store_true",
                   help="re-evaluate the edge functionals with doubled node counts first")

    v = sub.add_parser("verify", help="check the unisolvence matrices for (alpha, beta)")
    v.add_argument("--alpha", type=float, default=1.0)
    v.add_argument("--beta", type=float, default=1.0)
    v.add_argument("--families", action="store_true",
                   help="check the Legendre, Gegenbauer and Chebyshev parameter choices instead")
    v.add_argument("--tol", type=float, default=1e-9)

    m = sub.add_parser("mesh", help="generate a mesh file")
    _add_mesh_source(m, multi=False)
    m.add_argument("--out", required=True)
    return parser


def _meshes(args, box):
    if args.uniform is not None:
        return [uniform_mesh(box, n) for n in args.uniform]
    if args.delaunay is not None:
        return [jittered_delaunay_mesh(box, n, args.seed) for n in args.delaunay]
    return [read_mesh(p, box) for p in args.mesh_file]


def cmd_converge(args, out=None):
    out = out or sys.stdout
    params = _params(args)
    if args.edge_nodes < 1 or not 1 <= args.tri_degree <= 20 or not 1 <= args.l1_degree <= 20 or args.l1_levels < 0:
        raise UsageError("quadrature overrides out of range")
    if args.uniform is not None and min(args.uniform) < 1:
        raise UsageError("--uniform sizes must be >= 1")
    if args.delaunay is not None and min(args.delaunay) < 2:
        raise UsageError("--delaunay sizes must be >= 2")
    f = harness.get_function(args.f_id, args.box)
    meshes = _meshes(args, f.domain_box)
    if args.check_quadrature:
        _check_edge_quadrature(f, params, meshes, args.kinds, args.edge_nodes)
    report = harness.run_convergence(f, args.kinds, params, meshes, edge_nodes=args.edge_nodes,
                                     tri_degree=args.tri_degree, l1_degree=args.l1_degree,
                                     l1_levels=args.l1_levels)
    csv_path = args.csv or f"converge_f{args.f_id}.csv"
    harness.emit_csv(report, csv_path)
    if args.svg:
        harness.emit_svg_loglog(report, args.svg)
    if args.json:
        harness.emit_json(report, args.json)
    print(report.slope_table(), file=out)
    print(f"wrote {csv_path}", file=out)
    return EXIT_OK


def _check_edge_quadrature(f, params, meshes, kinds, n):
    """Doubling check of every edge functional on the coarsest mesh."""
    from .quadrature import weighted_edge_integral

    kernels = []
    if "c2" in kinds or "s3" in kinds:
        kernels.append("F")
    if "s3" in kinds:
        kernels.append("L")
    mesh = min(meshes, key=lambda m: m.n_triangles)
    for k in range(mesh.n_triangles):
        tri = mesh.triangle(k)
        for j in (1, 2, 3):
            def g(t, tri=tri, j=j):
                p = tri.edge_point(j, t)
                return f(p[..., 0], p[..., 1])
            for kernel in kernels:
                weighted_edge_integral(params, kernel, g, n=n, check=True)


def _print_matrix(m, out):
    for row in m:
        print("    [" + "  ".join(f"{v: .12e}" for v in row) + "]", file=out)


def _verify_one(params, tol, out):
    tri = TriangleGeom(*VERIFY_TRIANGLE)
    ok = True
    print(f"alpha={params.alpha:g} beta={params.beta:g}  K={params.K:.15e}  G={params.G:.15e}", file=out)
    for kind, label in ((ElementKind.C2, "C2: F_i(l_j^2), expected K*(ones-I)"),
                        (ElementKind.S3, "S3: L_i(e_j), expected G*I")):
        rep = EnrichedElement(tri, params, kind).unisolvence_report()
        scale = float(np.abs(rep.expected).max())
        rel_dev = rep.max_deviation / scale
        good = rel_dev < tol and rep.basis_crosscheck < tol
        ok &= good
        print(f"  {label}", file=out)
        _print_matrix(rep.matrix, out)
        print(f"    det={rep.determinant:.12e} expected={rep.expected_determinant:.12e}", file=out)
        print(f"    max relative deviation={rel_dev:.3e}  basis cross-check={rep.basis_crosscheck:.3e}  "
              f"{'PASS' if good else 'FAIL'}", file=out)
    return ok


def cmd_verify(args, out=None):
    out = out or sys.stdout
    if args.families:
        cases = [ElementParams(a, b) for a, b in REMARK_FAMILIES.values()]
    else:
        cases = [_params(args)]
    ok = all([_verify_one(p, args.tol, out) for p in cases])
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_mesh(args, out=None):
    out = out or sys.stdout
    box = args.box or (0.0, 0.0, 1.0, 1.0)
    if args.uniform is not None:
        if args.uniform < 1:
            raise UsageError("--uniform must be >= 1")
        mesh = uniform_mesh(box, args.uniform)
    else:
        if args.delaunay < 2:
            raise UsageError("--delaunay must be >= 2")
        mesh = jittered_delaunay_mesh(box, args.delaunay, args.seed)
    write_mesh(args.out, mesh)
    angles = mesh.min_angles()
    print(f"N={mesh.n_triangles} vertices={mesh.n_vertices} h={mesh.h():.6g}", file=out)
    print(f"min angle: min={angles.min():.3f} mean={angles.mean():.3f} deg", file=out)
    print(f"wrote {args.out}", file=out)
    return EXIT_OK


COMMANDS = {"converge": cmd_converge, "verify": cmd_verify, "mesh": cmd_mesh}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"crenrich: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureError as exc:
        print(f"crenrich: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, MeshFormatError) as exc:
        print(f"crenrich: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"crenrich: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
