"""``cofactor`` command line.

Exit codes: 0 success, 1 input error, 2 a required condition is not satisfied.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .. import __version__
from .. import linalg3 as la
from ..conditions import cofactor_report
from ..errors import (
    CofactorError, DegenerateAxis, InputError, InvalidInput, NoCrossing, NoHabitPlane,
    NoLambda2Curve, NoSolution, NotCompound, NotSupercompatible,
)
from ..habit import sweep_habit
from ..linearized import CCL_TOL_EXPERIMENTAL, Strain, ccl_residuals, compare_nonlinear_linear
from ..symmetry import (
    cc_equivalence_classes, cubic_point_group, domain_census, enumerate_domains,
    monoclinic_variants, table_rows,
)
from ..twinning import DomainPair, classify_domain, compound_solutions, type1_solution, type2_solution
from .io import load_crystal, parse_axis
from .screening import load_model, screen
from .table2 import table2_report

EXIT_OK, EXIT_INPUT, EXIT_UNSATISFIED = 0, 1, 2


def _floats(text, n, what):
    try:
        vals = [float(s) for s in text.split(",")]
    except ValueError:
        raise InputError(what, f"cannot parse {text!r}") from None
    if len(vals) != n:
        raise InputError(what, f"expected {n} comma-separated numbers")
    return vals


def _axis(args, spec):
    if getattr(args, "ehat", None):
        return parse_axis(args.ehat, "--ehat")[0]
    if spec.ehat is None:
        raise InputError("ehat", "no axis in the file; pass --ehat h,k,l")
    return spec.ehat


def _dump(obj):
    def conv(x):
        if isinstance(x, np.ndarray):
            return x.tolist()
        if isinstance(x, (np.floating, np.integer)):
            return x.item()
        if isinstance(x, (set, tuple)):
            return [conv(y) for y in x]
        raise TypeError(type(x))

    return json.dumps(obj, indent=2, default=conv)


def _fmt(v):
    return "-" if v is None else f"{v: .6g}"


# ----------------------------------------------------------------------------

def cmd_report(args, out):
    spec = load_crystal(args.crystal)
    rep = cofactor_report(spec.U, _axis(args, spec), args.tol)
    if args.json:
        out.write(_dump({"name": spec.name, **rep.as_dict()}) + "\n")
    else:
        out.write(f"{spec.name}  axis {np.round(rep.ehat, 6)}  ({rep.kind.value})  tol {rep.tol:g}\n")
        out.write(f"  lambda2 - 1         {_fmt(rep.cc1)}\n")
        out.write(f"  |U^-1 e| - 1        {_fmt(rep.typeI_residual)}   (squared form {_fmt(rep.typeI_residual_sq)})\n")
        out.write(f"  |U e| - 1           {_fmt(rep.typeII_residual)}   (squared form {_fmt(rep.typeII_residual_sq)})\n")
        out.write(f"  CC2                 {_fmt(rep.cc2[0])} {_fmt(rep.cc2[1])}\n")
        out.write(f"  CC3                 {_fmt(rep.cc3[0])} {_fmt(rep.cc3[1])}\n")
        out.write(f"  verdict             {rep.verdict}\n")
    return EXIT_UNSATISFIED if args.require and not rep.satisfied else EXIT_OK


def _solution(U, e, which):
    if which == "auto":
        which = "C1" if classify_domain(U, e) is DomainPair.COMPOUND else "I"
    if which in ("C1", "C2"):
        _, s1, s2 = compound_solutions(U, e)
        return s1 if which == "C1" else s2
    return type1_solution(U, e) if which == "I" else type2_solution(U, e)


def cmd_sweep(args, out):
    spec = load_crystal(args.crystal)
    e = _axis(args, spec)
    sol = _solution(spec.U, e, args.solution)
    if args.grid < 2:
        raise InputError("--grid", "need at least 2 points")
    grid = np.linspace(0.0, 1.0, args.grid)
    fam = sweep_habit(spec.U, sol.a, sol.n, grid, tol_mid=args.tol_mid)
    out.write("f,kappa,b1,b2,b3,m1,m2,m3,angle_deg,axis1,axis2,axis3\n")
    for kappa in (1, -1):
        for s in fam[kappa]:
            ang, ax = la.angle_axis(s.R)
            vals = [s.f, kappa, *s.b, *s.m, np.degrees(ang), *ax]
            out.write(",".join(f"{v:.9g}" for v in vals) + "\n")
    return EXIT_OK


def cmd_enumerate(args, out):
    a, b, g, d = _floats(args.monoclinic, 4, "--monoclinic")
    vs = monoclinic_variants(a, b, g, d)
    group = cubic_point_group()
    doms = enumerate_domains(vs, group)
    rows = table_rows(doms)
    census = domain_census(doms)
    classes = cc_equivalence_classes(doms, vs, group)
    if args.json:
        out.write(_dump({
            "parameters": vs.params,
            "rows": [{"angle": ang, "axis": list(ax),
                      "type_I_II": sorted(map(list, r["Type I/II"])),
                      "compound": sorted(map(list, r["Compound"]))}
                     for (ang, ax), r in sorted(rows.items())],
            "census": census,
            "classes": [[list(p) for p in c] for c in classes],
        }) + "\n")
        return EXIT_OK
    out.write(f"{'rotation':<14}{'Type I/II pairs':<56}Compound pairs\n")
    for (ang, ax), r in sorted(rows.items()):
        lab = f"{ang}° [{','.join(map(str, ax))}]"
        t12 = " ".join(f"({i},{j})" for i, j in sorted(r["Type I/II"]))
        cp = " ".join(f"({i},{j})" for i, j in sorted(r["Compound"]))
        out.write(f"{lab:<14}{t12:<56}{cp}\n")
    out.write("\n" + ", ".join(f"{k}: {v}" for k, v in census.items()) + "\n")
    out.write(f"{len(classes)} symmetry classes of compatible pairs\n")
    return EXIT_OK


def cmd_scene(args, out):
    from .. import microstructure as ms

    spec = load_crystal(args.crystal)
    e = _axis(args, spec)
    if args.kind == "triple":
        scene = ms.type1_interface(spec.U, e, args.f, args.k, tol=args.tol) if args.f is not None \
            else ms.triple_junction(spec.U, e, tol=args.tol)[0]
    elif args.kind == "parallel":
        scene = ms.parallel_interface(spec.U, e, 0.5 if args.f is None else args.f, args.k, tol=args.tol)
    elif args.kind == "crystallographic":
        scene = ms.crystallographic_scene(spec.U, e, 0.5 if args.f is None else args.f, args.k)
    else:
        scene = ms.nucleation_scene(spec.U, e, args.nucleation, args.opening, tol=args.tol)
    X, Y, labels = ms.render_point_cloud(scene, args.density)
    text = ms.point_cloud_csv(Y, labels)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    if args.scene_json:
        with open(args.scene_json, "w") as fh:
            fh.write(scene.to_json())
    summary = {
        "kind": scene.metadata.get("kind"), "regions": len(scene.regions),
        "interfaces": len(scene.interfaces), "hadamard": scene.max_hadamard_residual(),
        "continuity": scene.max_continuity_residual(), "points": len(Y),
    }
    if "wells" in scene.metadata:
        summary["well_distance"] = scene.zero_energy_residual()
    if args.json:
        out.write(_dump(summary) + "\n")
    else:
        out.write(", ".join(f"{k}: {v if not isinstance(v, float) else f'{v:.3g}'}" for k, v in summary.items()) + "\n")
        if not args.out:
            out.write(text)
    return EXIT_OK


def cmd_screen(args, out):
    model = load_model(args.model)
    e = parse_axis(args.ehat, "--ehat")[0]
    xs = np.linspace(*_floats(args.x_range, 2, "--x-range"), args.n)
    ys = np.linspace(*_floats(args.y_range, 2, "--y-range"), args.n)
    res = screen(model, e, xs, ys, args.target, tol=args.tol if args.tol is not None else 1e-4)
    if args.json:
        out.write(_dump(res.as_dict()) + "\n")
    else:
        out.write(f"x* = {res.x:.10g}, y* = {res.y:.10g}\n")
        out.write(f"lambda2 - 1 = {res.lambda2_residual:.3e}, {args.target} residual = {res.type_residual:.3e}\n")
        out.write(f"CC3 = {res.cc3:.6g}: {res.verdict}\n")
    return EXIT_OK if res.satisfied or not args.require else EXIT_UNSATISFIED


def cmd_linear(args, out):
    spec = load_crystal(args.crystal)
    e = _axis(args, spec)
    S = Strain.from_stretch(spec.U)
    tol = args.tol if args.tol is not None else CCL_TOL_EXPERIMENTAL
    rep = ccl_residuals(S, e, tol)
    es = la.sym_eigen(spec.U)
    try:
        cmp = compare_nonlinear_linear(es.values[2], e, es.v1, es.v3)
    except NoSolution as exc:
        cmp = str(exc)
    data = {
        "eps": rep.eps, "ccl1": rep.ccl1, "rank2": rep.rank2, "ccl2": rep.ccl2, "ccl3": rep.ccl3,
        "ccl2_prime": rep.ccl2_prime, "ccl3_prime": rep.ccl3_prime, "ccl3_branch": rep.ccl3_branch,
        "satisfied": rep.satisfied, "lambda1_typeI_typeII_linear": cmp,
    }
    if args.json:
        out.write(_dump(data) + "\n")
    else:
        for k, v in data.items():
            out.write(f"{k:<28}{v}\n")
    return EXIT_UNSATISFIED if args.require and not rep.satisfied else EXIT_OK


def cmd_table2(args, out):
    rows = table2_report(args.tol)
    if args.json:
        out.write(_dump(rows) + "\n")
    else:
        out.write(f"{'alloy':<16}{'|l2-1|':>10}{'typeI':>10}{'typeII':>10}{'CC3':>10}  verdict\n")
        for r in rows:
            out.write(f"{r['name']:<16}{r['lambda2_dev']:>10.4f}{r['typeI']:>10.4f}{r['typeII']:>10.4f}"
                      f"{r['cc3']:>10.4f}  {r['verdict']}  [{'match' if r['pass'] else 'MISMATCH'}]\n")
    ok = all(r["pass"] for r in rows)
    return EXIT_UNSATISFIED if args.require and not ok else EXIT_OK


# ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cofactor", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, crystal=True):
        if crystal:
            sp.add_argument("crystal", help="crystal JSON file, or bundled:<name>")
            sp.add_argument("--ehat", help="two-fold axis h,k,l (overrides the file)")
        sp.add_argument("--tol", type=float, default=None, help="verdict tolerance (default $COFACTOR_TOL or 1e-4)")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--require", action="store_true", help="exit 2 unless the conditions hold")

    sp = sub.add_parser("report", help="cofactor residuals and verdict")
    common(sp)
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("sweep", help="habit-plane families over f as CSV")
    common(sp)
    sp.add_argument("--grid", type=int, default=11)
    sp.add_argument("--solution", choices=("auto", "I", "II", "C1", "C2"), default="auto")
    sp.add_argument("--tol-mid", type=float, default=1e-6, help="tolerance on lambda2(C_f) - 1")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("enumerate", help="domain listing for monoclinic variants")
    common(sp, crystal=False)
    sp.add_argument("--monoclinic", required=True, help="alpha,beta,gamma,delta")
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("scene", help="build a microstructure and render a point cloud")
    common(sp)
    sp.add_argument("--kind", choices=("triple", "parallel", "crystallographic", "nucleation"), required=True)
    sp.add_argument("--f", type=float, default=None)
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--density", type=int, default=50)
    sp.add_argument("--opening", type=float, default=0.1)
    sp.add_argument("--nucleation", choices=("austenite_in_martensite", "martensite_in_austenite"),
                    default="austenite_in_martensite")
    sp.add_argument("--out", help="CSV file for the point cloud")
    sp.add_argument("--scene-json", help="write the scene description here")
    sp.set_defaults(func=cmd_scene)

    sp = sub.add_parser("screen", help="interpolate a composition model for the conditions")
    common(sp, crystal=False)
    sp.add_argument("model", help="model JSON: {x: [...], y: [...], U: [[3x3 per y] per x]}")
    sp.add_argument("--target", choices=("type1", "type2", "compound"), default="type1")
    sp.add_argument("--ehat", required=True)
    sp.add_argument("--x-range", default="0,1")
    sp.add_argument("--y-range", default="0,1")
    sp.add_argument("--n", type=int, default=21, help="grid points per direction")
    sp.set_defaults(func=cmd_screen)

    sp = sub.add_parser("linear", help="geometrically linear conditions for E = U - I")
    common(sp)
    sp.set_defaults(func=cmd_linear)

    sp = sub.add_parser("table2", help="report on the bundled alloys")
    common(sp, crystal=False)
    sp.set_defaults(func=cmd_table2)
    return p


_INPUT_ERRORS = (InputError, InvalidInput, DegenerateAxis, NotCompound)
_UNSATISFIED = (NotSupercompatible, NoHabitPlane, NoLambda2Curve, NoCrossing, NoSolution)


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except _INPUT_ERRORS as exc:
        print(f"cofactor: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _UNSATISFIED as exc:
        print(f"cofactor: {exc}", file=sys.stderr)
        return EXIT_UNSATISFIED
    except CofactorError as exc:
        print(f"cofactor: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
