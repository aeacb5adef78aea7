"""Command line entry points.

Exit codes: 0 when every validation passes, 1 on a validation failure,
2 on bad input (arguments, mesh documents, missing cycles).
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import numpy as np

from . import geometry as geo
from .circle_oracle import crosscheck
from .complex import Cochain, basis_cochain
from .convergence import COLUMNS, EXPERIMENTS, run_convergence
from .cup import cup_cochains, whitney_cup_cochains
from .exceptions import MeshFormatError, OrientationError, PeriodError
from .hodge import HodgeContext, hodge_decompose, orthogonality_residual
from .io import load_mesh, save_mesh, write_csv, write_json
from .periods import HomologyBasis, period_matrix, validate_riemann_relations

PASS, FAIL, INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _mesh(args):
    if not args.mesh:
        raise InputError("--mesh is required (create one with `cochaincalc generate ...`)")
    try:
        return load_mesh(args.mesh)
    except FileNotFoundError:
        raise InputError(f"mesh file {args.mesh} not found") from None


def _emit(result: dict, args) -> None:
    if getattr(args, "json", None):
        write_json(result, args.json)


def parse_simplex(token: str, complex_):
    """'v3', 'e5', 't2' (ids in the sorted tables) or '4,5' (vertex list, oriented)."""
    token = token.strip()
    if "," in token:
        verts = [int(v) for v in token.split(",")]
        try:
            complex_.index(verts)
        except KeyError as exc:
            raise InputError(str(exc)) from None
        return len(verts) - 1, verts
    kinds = {"v": 0, "e": 1, "t": 2}
    if token[:1] not in kinds or not token[1:].isdigit():
        raise InputError(f"cannot parse simplex {token!r}; use v<i>, e<i>, t<i> or a vertex list")
    j, idx = kinds[token[0]], int(token[1:])
    if j > complex_.dim or idx >= complex_.count(j):
        raise InputError(f"simplex {token} is not in the complex")
    return j, idx


# -- subcommands -----------------------------------------------------------------

def cmd_generate(args) -> int:
    if args.kind == "torus":
        mesh = geo.flat_torus(args.a, args.b, args.res, args.jitter, args.seed)
    elif args.kind == "circle":
        mesh = geo.circle(args.n)
    elif args.kind == "interval":
        mesh = geo.interval(args.segments)
    elif args.kind == "genus2":
        mesh = geo.genus2_surface(args.res)
    else:
        mesh = geo.conformal_torus(args.res, args.amplitude)
    save_mesh(mesh, args.out)
    print(f"wrote {args.out}: dim {mesh.complex.dim}, simplex counts {mesh.complex.shape}")
    return PASS


def cmd_star(args) -> int:
    mesh = _mesh(args)
    ctx = HodgeContext(mesh.complex, mesh.realization)
    if ctx.fclass is None:
        raise InputError("star needs a closed orientable mesh")
    n = ctx.dim
    res = {"chain_map": 0.0, "skew_adjoint": 0.0}
    for j in range(n + 1):
        S = ctx.star(j)
        if j < n:
            lhs = ctx.star(j + 1) @ ctx.d(j).toarray()
            rhs = (-1) ** (j + 1) * (ctx.delta_star(n - j) @ S)
            res["chain_map"] = max(res["chain_map"], _rel(lhs, rhs))
        lhs = S.T @ ctx.mass(n - j).matrix.toarray()  # [s, t] = <star s, t>
        rhs = ctx.mass(j).matrix @ ctx.star(n - j)  # [s, t] = <s, star t>
        res["skew_adjoint"] = max(res["skew_adjoint"], _rel(lhs, (-1) ** (j * (n - j)) * rhs))
    out = {"residuals": res}
    if args.cochain:
        j, s = parse_simplex(args.cochain, mesh.complex)
        c = basis_cochain(mesh.complex, j, s)
        vals = ctx.star(j) @ c.values
        out["star"] = {"degree": n - j, "values": vals}
        print(f"star of {args.cochain} (degree {n - j}):")
        for k in np.argsort(-np.abs(vals))[: args.top]:
            print(f"  {mesh.complex.simplices[n - j][k].tolist()}: {vals[k]:.9g}")
    print(f"chain-map residual {res['chain_map']:.3e}, skew-adjoint residual {res['skew_adjoint']:.3e}")
    if args.csv:
        j = parse_simplex(args.cochain, mesh.complex)[0] if args.cochain else 0
        write_csv(["row"] + [f"c{k}" for k in range(mesh.complex.count(j))],
                  [[r] + list(row) for r, row in enumerate(ctx.star(j))], args.csv)
    _emit(out, args)
    return PASS if max(res.values()) < args.tol else FAIL


def _rel(a, b) -> float:
    scale = max(1.0, float(np.abs(a).max(initial=0)))
    return float(np.abs(np.asarray(a) - np.asarray(b)).max(initial=0) / scale)


def cmd_hodge(args) -> int:
    mesh = _mesh(args)
    ctx = HodgeContext(mesh.complex, mesh.realization)
    j = args.degree
    if not 0 <= j <= ctx.dim:
        raise InputError(f"degree must be in [0, {ctx.dim}]")
    rng = np.random.default_rng(args.seed)
    c = Cochain(j, rng.standard_normal(mesh.complex.count(j)))
    dec = hodge_decompose(c, ctx)
    res = orthogonality_residual(dec, ctx, j, c.values)
    betti = ctx.betti()
    dims = [ctx.harmonic_basis(k).shape[1] for k in range(ctx.dim + 1)]
    ok = res < args.tol and betti == dims
    print(f"degree {j}: orthogonality/reconstruction residual {res:.3e}")
    print(f"betti numbers {betti}, harmonic dimensions {dims}")
    _emit({"residual": res, "betti": betti, "harmonic_dims": dims, "pass": ok}, args)
    return PASS if ok else FAIL


def _fraction_cochain(complex_, token):
    j, s = parse_simplex(token, complex_)
    return basis_cochain(complex_, j, s, dtype=object)


def cmd_cup(args) -> int:
    mesh = _mesh(args)
    cx = mesh.complex
    a = _fraction_cochain(cx, args.a)
    b = _fraction_cochain(cx, args.b)
    out = {}
    ok = True
    if a.degree + b.degree > cx.dim:
        raise InputError("degrees of a and b exceed the dimension")
    ab = cup_cochains(a, b, cx)
    ok &= bool(np.all(ab.values == whitney_cup_cochains(a, b, cx).values))
    out["a_cup_b"] = ab.values
    if args.c:
        c = _fraction_cochain(cx, args.c)
        if ab.degree + c.degree > cx.dim:
            raise InputError("degrees of a, b, c exceed the dimension")
        bc = cup_cochains(b, c, cx)
        right = cup_cochains(a, bc, cx)
        left = cup_cochains(ab, c, cx)
        ok &= bool(np.all(right.values == whitney_cup_cochains(a, bc, cx).values))
        out["a_cup_(b_cup_c)"], out["(a_cup_b)_cup_c"] = right.values, left.values
        _print_cochain("a ∪ (b ∪ c) = ", right, cx)
        _print_cochain("(a ∪ b) ∪ c = ", left, cx)
    else:
        _print_cochain("a ∪ b = ", ab, cx)
    print("agrees with R(Wa ^ Wb):", "yes" if ok else "NO")
    _emit(out, args)
    return PASS if ok else FAIL


def _print_cochain(label, c, cx):
    nz = [k for k, v in enumerate(c.values) if v != 0]
    if not nz:
        print(label + "0")
        return
    terms = [f"{float(c.values[k]):g} ({Fraction(c.values[k])}) * {cx.simplices[c.degree][k].tolist()}"
             for k in nz]
    print(label + " + ".join(terms))


def cmd_periods(args) -> int:
    mesh = _mesh(args)
    if not mesh.cycles:
        raise InputError(f"{args.mesh} has no homology cycles; add a 'cycles' entry with "
                         "a1..ag and b1..bg (see `cochaincalc generate torus`)")
    ctx = HodgeContext(mesh.complex, mesh.realization)
    if ctx.dim != 2:
        raise InputError("periods need a triangulated surface")
    try:
        hb = HomologyBasis.from_cycles(mesh.cycles, mesh.complex)
    except PeriodError as exc:
        raise InputError(str(exc)) from None
    P = period_matrix(ctx, hb)
    rep = validate_riemann_relations(P.splitting.holomorphic, hb, ctx)
    np.set_printoptions(precision=10, suppress=False)
    print("period matrix Pi =")
    print(P.matrix)
    print(f"symmetry residual {P.symmetry_residual:.3e}")
    print(f"min eigenvalue of Im Pi {P.min_imag_eigenvalue:.6g}")
    print(f"lambda {P.splitting.holomorphic.scales}")
    print(f"bilinear residual {rep.bilinear_residual:.3e}, norm formula error {rep.max_norm_error:.3e}")
    ok = (P.is_valid(args.tol) and rep.bilinear_residual < args.tol
          and rep.max_norm_error < 1e-8 and P.splitting.real_part < args.tol)
    _emit({"period_matrix": P.matrix, "symmetry_residual": P.symmetry_residual,
           "min_imag_eigenvalue": P.min_imag_eigenvalue, "lambda": P.splitting.holomorphic.scales,
           "bilinear_residual": rep.bilinear_residual, "norm_error": rep.max_norm_error,
           "pass": ok}, args)
    return PASS if ok else FAIL


def cmd_converge(args) -> int:
    levels = list(range(args.levels[0], args.levels[1] + 1))
    if len(levels) < 2:
        raise InputError("need at least 2 levels")
    rep = run_convergence(args.experiment, levels, args.geometry, a=args.a, b=args.b,
                          jitter=args.jitter, seed=args.seed, order=args.order)
    print(",".join(COLUMNS))
    for row in rep.rows():
        print(",".join(f"{v:.6g}" if isinstance(v, float) else str(v) for v in row))
    print(f"fitted slope {rep.slope:.4f}")
    if args.csv:
        write_csv(COLUMNS, rep.rows(), args.csv)
    _emit(rep.summary(), args)
    if args.experiment == "periods":
        ok = float(rep.errors[-1]) < args.max_error
    else:
        ok = float(rep.errors.max()) < 1e-12 or (len(levels) >= 3 and rep.slope >= args.min_slope)
    return PASS if ok else FAIL


def cmd_circle_check(args) -> int:
    rep = crosscheck(args.n)
    print(f"n = {args.n}: mass residual {rep.mass_residual:.3e} (exact match: {rep.exact_mass_match}), "
          f"vertex star {rep.vertex_star_residual:.3e}, edge star {rep.edge_star_residual:.3e}")
    print(f"max residual {rep.max_residual:.3e}")
    _emit(vars(rep), args)
    return PASS if rep.passed(args.tol) else FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cochaincalc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a built-in mesh as JSON")
    g.add_argument("kind", choices=["torus", "circle", "interval", "conformal", "genus2"])
    g.add_argument("--a", type=float, default=1.0)
    g.add_argument("--b", type=float, default=1.0)
    g.add_argument("--res", type=int, default=8)
    g.add_argument("--jitter", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--amplitude", type=float, default=0.3)
    g.add_argument("--n", type=int, default=10)
    g.add_argument("--segments", type=int, default=1)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    def with_mesh(name, func, help_, tol=1e-10):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--mesh")
        s.add_argument("--json", help="write a JSON summary")
        s.add_argument("--tol", type=float, default=tol)
        s.set_defaults(func=func)
        return s

    s = with_mesh("star", cmd_star, "star matrices and their identities")
    s.add_argument("--cochain", help="basis cochain to apply the star to, e.g. e5 or 5,6")
    s.add_argument("--top", type=int, default=10)
    s.add_argument("--csv", help="write the star matrix of the chosen degree")
    h = with_mesh("hodge", cmd_hodge, "Hodge decomposition of a random cochain")
    h.add_argument("--degree", type=int, default=1)
    h.add_argument("--seed", type=int, default=0)
    c = with_mesh("cup", cmd_cup, "cup products of basis cochains (exact)")
    c.add_argument("--a", required=True)
    c.add_argument("--b", required=True)
    c.add_argument("--c")
    with_mesh("periods", cmd_periods, "period matrix of a surface mesh", tol=1e-9)

    v = sub.add_parser("converge", help="mesh refinement study")
    v.add_argument("--experiment", choices=EXPERIMENTS, required=True)
    v.add_argument("--geometry", choices=["torus", "circle", "conformal"], default="torus")
    v.add_argument("--levels", type=int, nargs=2, default=[2, 5], metavar=("FIRST", "LAST"),
                   help="resolution 2**level for each level in the range")
    v.add_argument("--a", type=float, default=1.0)
    v.add_argument("--b", type=float, default=1.0)
    v.add_argument("--jitter", type=float, default=0.0)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--order", type=int, default=6)
    v.add_argument("--min-slope", type=float, default=0.9)
    v.add_argument("--max-error", type=float, default=0.02)
    v.add_argument("--csv")
    v.add_argument("--json")
    v.set_defaults(func=cmd_converge)

    k = sub.add_parser("circle-check", help="compare the generic pipeline with S^1 closed forms")
    k.add_argument("--n", type=int, default=10)
    k.add_argument("--tol", type=float, default=1e-9)
    k.add_argument("--json")
    k.set_defaults(func=cmd_circle_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT if exc.code else PASS
    try:
        return args.func(args)
    except (InputError, MeshFormatError, OrientationError, PeriodError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT


if __name__ == "__main__":
    sys.exit(main())
