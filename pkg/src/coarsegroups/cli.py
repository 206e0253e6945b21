"""Command-line front end.

Every subcommand prints one compact JSON document on stdout.  Exit codes:
0 success, 1 domain error, 2 parse error, 3 a verification found
violations.  Rationals are written as strings ``"p/q"``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import _kernels
from .abelian import parse_matrix_rows, rank_and_torsion, smith_normal_form
from .covers import (
    CoverCertificate,
    ExplicitFamily,
    IntervalFamily,
    PointFamily,
    ProductFamily,
    VerifyReport,
    cyclic_subgroup_cover,
    extend_cover_by_cosets,
    make_interval_cover,
    product_cover,
    trivial_subgroup_cover,
    verify_families,
)
from .groups import PresentedAbelian
from .metric import (
    ExceedsCap,
    check_coarse_sandwich,
    lipschitz_constant,
    r_stabilizer,
    rho_profile,
    to_fraction,
)
from .solvable import (
    asdim_bounds,
    countable_sup,
    hirsch_length,
    series_from_json,
)
from .solver import MetricTable, dump_instance, load_instance, solve_min_diameter
from .workbench import ParseError, parse, parse_element

EXIT_OK, EXIT_DOMAIN, EXIT_PARSE, EXIT_VIOLATION = 0, 1, 2, 3


class UsageError(ValueError):
    """Bad argument values that argparse cannot catch (reported as parse errors)."""


# --- serialization helpers -------------------------------------------------


def q(v) -> str:
    return str(to_fraction(v))


def text(x) -> str:
    """Element or label as a literal string."""
    if isinstance(x, tuple):
        return "(" + ",".join(map(text, x)) + ")"
    return str(x)


def emit(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def _rational(s: str) -> Fraction:
    try:
        v = Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{s!r} is not an exact rational") from None
    if "." in s or "e" in s.lower():
        raise UsageError(f"{s!r}: write rationals as p/q, not decimals")
    return v


def _rational_list(s: str) -> list[Fraction]:
    """Comma list with integer ranges, e.g. ``1..5,15/2``."""
    out = []
    for part in s.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..", 1)
            lo, hi = int(a), int(b)
            out.extend(Fraction(i) for i in range(lo, hi + 1))
        elif part:
            out.append(_rational(part))
    if not out:
        raise UsageError("empty list of values")
    return out


def _load_json(arg: str):
    """Inline JSON or a path to a JSON file."""
    s = arg.strip()
    if s[:1] in "[{":
        source = s
    else:
        try:
            source = Path(arg).read_text(encoding="utf-8")
        except OSError as e:
            raise UsageError(f"cannot read {arg}: {e.strerror}") from None
    try:
        return json.loads(source)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", e.lineno, e.colno) from None


def _workbench(args):
    if not args.file:
        raise UsageError("--file is required")
    try:
        src = Path(args.file).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {args.file}: {e.strerror}") from None
    return parse(src)


def _lookup(wb, kind, name):
    try:
        return wb.lookup(kind, name)
    except KeyError as e:
        raise UsageError(e.args[0]) from None


def _context(wb, name):
    _lookup(wb, "weights", name)
    return wb.context(name)


def family_json(f) -> dict:
    if isinstance(f, IntervalFamily):
        return {"kind": "interval", "length": f.length, "period": f.period, "offset": f.offset}
    if isinstance(f, PointFamily):
        return {"kind": "point"}
    if isinstance(f, ProductFamily):
        return {"kind": "product", "factors": [family_json(g) for g in f.factors]}
    if isinstance(f, ExplicitFamily):
        return {"kind": "explicit", "sets": sorted(sorted(map(text, s)) for s in f.sets)}
    raise TypeError(f"cannot serialize {type(f).__name__}")  # pragma: no cover


def certificate_json(cert: CoverCertificate, group=None) -> dict:
    out = {"d": q(cert.d), "R": q(cert.R), "families": []}
    for f in cert.families:
        if isinstance(f, ExplicitFamily) and group is not None:
            sets = [[group.format(x) for x in sorted(s, key=group.key)] for s in f.sets]
            sets.sort(key=lambda s: s[0])
            out["families"].append({"kind": "explicit", "sets": sets})
        else:
            out["families"].append(family_json(f))
    return out


def verify_json(rep: VerifyReport, group) -> dict:
    fmt = group.format
    return {
        "ok": rep.ok,
        "radius": q(rep.radius),
        "points": rep.points,
        "d": q(rep.d),
        "R": q(rep.R),
        "max_diameter": q(rep.max_diameter),
        "family_diameters": [q(v) for v in rep.family_diameters],
        "min_separation": [None if v is None else q(v) for v in rep.min_separation],
        "disjointness_violations": [
            {"family": f, "x": fmt(x), "y": fmt(y), "distance": q(v)} for f, x, y, v in rep.disjointness_violations
        ],
        "loose_violations": rep.loose_violations,
        "bound_violations": [{"family": f, "set": text(lab), "diameter": q(v)} for f, lab, v in rep.bound_violations],
        "coverage_gaps": [fmt(x) for x in rep.coverage_gaps],
        "symbolic": None
        if rep.symbolic is None
        else [
            {"separation": None if s["separation"] is None else q(s["separation"]), "diameter": q(s["diameter"])}
            for s in rep.symbolic
        ],
        "agree": rep.agree,
    }


# --- subcommands -----------------------------------------------------------


def cmd_norm(args):
    wb = _workbench(args)
    ctx = _context(wb, args.weights)
    x = parse_element(args.element, ctx.group)
    v = ctx.norm(x, _rational(args.cap))
    if isinstance(v, ExceedsCap):
        return {"exceeds_cap": q(v.cap)}
    return {"norm": q(v)}


def cmd_dist(args):
    wb = _workbench(args)
    ctx = _context(wb, args.weights)
    g = ctx.group
    x, y = parse_element(args.x, g), parse_element(args.y, g)
    v = ctx.distance(x, y, _rational(args.cap))
    if isinstance(v, ExceedsCap):
        return {"exceeds_cap": q(v.cap)}
    return {"distance": q(v)}


def cmd_ball(args):
    wb = _workbench(args)
    ctx = _context(wb, args.weights)
    g = ctx.group
    r = _rational(args.radius)
    pts = ctx.ball_with_norms(r)
    return {
        "radius": q(r),
        "count": len(pts),
        "elements": [{"element": g.format(x), "norm": q(n)} for x, n in pts],
    }


def _pair_contexts(args, wb):
    ctx_d = _context(wb, args.weights)
    ctx_dp = _context(wb, args.weights2)
    hom = _lookup(wb, "hom", args.hom) if args.hom else None
    return ctx_d, ctx_dp, hom


def cmd_profile(args):
    wb = _workbench(args)
    ctx_d, ctx_dp, hom = _pair_contexts(args, wb)
    rows = rho_profile(ctx_d, ctx_dp, _rational_list(args.t), _rational(args.search_radius), hom)
    return {
        "lipschitz": q(lipschitz_constant(ctx_d, ctx_dp, hom)),
        "rows": [
            {"t": q(r.t), "rho1": None if r.rho1 is None else q(r.rho1), "rho2": q(r.rho2), "certified": r.certified}
            for r in rows
        ],
    }


def cmd_sandwich(args):
    wb = _workbench(args)
    ctx_d, ctx_dp, hom = _pair_contexts(args, wb)
    rep = check_coarse_sandwich(ctx_d, ctx_dp, _rational(args.radius), hom)
    g = ctx_d.group
    out = {
        "ok": rep.ok,
        "pairs_checked": rep.pairs_checked,
        "rho_certified": rep.rho_certified,
        "violations": [
            {
                "x": g.format(x),
                "y": g.format(y),
                "d": q(dv),
                "d_prime": q(dpv),
                "rho1": None if r1 is None else q(r1),
                "rho2": q(r2),
            }
            for x, y, dv, dpv, r1, r2 in rep.violations
        ],
    }
    return out, (EXIT_OK if rep.ok else EXIT_VIOLATION)


def cmd_stabilizer(args):
    wb = _workbench(args)
    hom = _lookup(wb, "hom", args.hom)
    ctx_G = _context(wb, args.source_weights)
    ctx_H = _context(wb, args.target_weights)
    x0 = parse_element(args.x0, ctx_H.group)
    els = r_stabilizer(hom, ctx_H, x0, _rational(args.R), ctx_G, _rational(args.search_radius))
    return {"R": q(_rational(args.R)), "count": len(els), "elements": [ctx_G.group.format(x) for x in els]}


def cmd_cover_make(args):
    if args.d < 1 or args.dims < 1:
        raise UsageError("--d and --dims must be positive integers")
    base = make_interval_cover(args.d)
    cert = base
    for _ in range(args.dims - 1):
        cert = product_cover(cert, base)
    return {"dims": args.dims, "certificate": certificate_json(cert)}


def cmd_cover_verify(args):
    wb = _workbench(args)
    cert = _lookup(wb, "cover", args.cover)
    rep = verify_families(cert, _rational(args.radius))
    return verify_json(rep, cert.context.group), (EXIT_OK if rep.ok else EXIT_VIOLATION)


def cmd_cover_extend(args):
    wb = _workbench(args)
    ctx = _context(wb, args.weights)
    g = ctx.group
    d = _rational(args.d)
    small = [s for s, w in ctx.weights.entries if w < d]
    if small:
        if not args.generator or not args.base:
            raise UsageError("--generator and --base are required when some generator has weight below d")
        base = _lookup(wb, "cover", args.base)
        fcover = cyclic_subgroup_cover(ctx, parse_element(args.generator, g), base)
    else:
        fcover = trivial_subgroup_cover(ctx)
    cert, rep = extend_cover_by_cosets(ctx, d, fcover, _rational(args.radius))
    out = {
        "ok": rep.ok,
        "d": q(d),
        "R": q(cert.R),
        "small_generators": [g.format(s) for s in rep.small_generators],
        "cosets": rep.cosets,
        "representatives": [g.format(z) for z in rep.representatives],
        "single_coset": rep.single_coset,
        "trivial_subgroup": rep.trivial_subgroup,
        "input": verify_json(rep.input_report, g),
        "output": verify_json(rep.output_report, g),
    }
    if args.certificate:
        out["certificate"] = certificate_json(cert, g)
    return out, (EXIT_OK if rep.ok else EXIT_VIOLATION)


def cmd_solve(args):
    if args.instance:
        data = _load_json(args.instance)
        try:
            table, k, d = load_instance(data)
        except (KeyError, TypeError) as e:
            raise ParseError(f"bad instance: missing or malformed field {e}") from None
    else:
        wb = _workbench(args)
        if args.weights is None or args.radius is None or args.k is None or args.d is None:
            raise UsageError("give --instance, or --file with --weights, --radius, --k and --d")
        ctx = _context(wb, args.weights)
        table = MetricTable.from_ball(ctx, _rational(args.radius))
        table = MetricTable(tuple(ctx.group.format(x) for x in table.ids), table.dist)
        k, d = args.k, _rational(args.d)
    if args.emit_instance:
        return dump_instance(table, k, d)
    res = solve_min_diameter(table, k, d, budget=args.budget, jobs=args.jobs, backend=args.backend)
    out = res.to_json()
    out["points"] = len(table.ids)
    return out


def _matrix(args):
    data = _load_json(args.matrix)
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise ParseError("a matrix is a JSON array of arrays")
    for row in data:
        for v in row:
            ok = isinstance(v, int) and not isinstance(v, bool)
            ok = ok or (isinstance(v, str) and v.strip().lstrip("+-").isdigit())
            if not ok:
                raise ParseError(f"matrix entries are decimal integers, got {json.dumps(v)}")
    try:
        return parse_matrix_rows(data, cols=args.gens)
    except (TypeError, ValueError) as e:
        raise ParseError(f"bad matrix: {e}") from None


def _strings(m) -> list:
    return [[str(v) for v in row] for row in m.entries]


def cmd_snf(args):
    A = _matrix(args)
    res = smith_normal_form(A)
    return {
        "diagonal": list(res.diagonal),
        "rank": res.rank,
        "U": _strings(res.U),
        "D": _strings(res.D),
        "V": _strings(res.V),
    }


def cmd_rank(args):
    if args.matrix:
        if args.gens is None:
            raise UsageError("--gens is required with --matrix")
        A = _matrix(args)
        p = PresentedAbelian(args.gens, tuple(A.entries))
    else:
        wb = _workbench(args)
        g = _lookup(wb, "group", args.group)
        if not g.is_abelian:
            raise ValueError(f"group {args.group!r} is not abelian")
        p = g if isinstance(g, PresentedAbelian) else g.abelian_presentation()
    rt = rank_and_torsion(p)
    return {"rank": rt.rank, "torsion": list(rt.torsion), "asdim": rt.rank}


def _series(args):
    if args.series_file:
        data = _load_json(args.series_file)
        try:
            return [series_from_json(data)]
        except (KeyError, TypeError) as e:
            raise ParseError(f"bad series file: missing or malformed field {e}") from None
    wb = _workbench(args)
    names = args.series.split(",") if args.series else []
    if not names:
        raise UsageError("give --series-file, or --file with --series")
    return [_lookup(wb, "series", n.strip()) for n in names]


def cmd_hirsch(args):
    out = []
    for s in _series(args):
        h = hirsch_length(s)
        out.append({"name": s.name, "hirsch": "inf" if not isinstance(h, int) else h})
    return out[0] if len(out) == 1 else {"series": out}


def cmd_bounds(args):
    bounds = [asdim_bounds(s) for s in _series(args)]
    if args.sup or args.unbounded:
        return countable_sup(bounds, unbounded=args.unbounded, name="sup").to_json()
    if len(bounds) == 1:
        return bounds[0].to_json()
    return {"series": [b.to_json() for b in bounds]}


# --- argument parsing ------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coarsegroups", description="Exact coarse geometry of discrete groups.")
    p.add_argument("--summary", action="store_true", help="print a one-line summary on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def wb(sp):
        sp.add_argument("--file", help="workbench file")

    sp = sub.add_parser("norm", help="weighted word norm of an element")
    wb(sp)
    sp.add_argument("--weights", required=True)
    sp.add_argument("--element", required=True)
    sp.add_argument("--cap", required=True)
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("dist", help="left-invariant distance between two elements")
    wb(sp)
    sp.add_argument("--weights", required=True)
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--cap", required=True)
    sp.set_defaults(func=cmd_dist)

    sp = sub.add_parser("ball", help="closed ball around the identity")
    wb(sp)
    sp.add_argument("--weights", required=True)
    sp.add_argument("--radius", required=True)
    sp.set_defaults(func=cmd_ball)

    for name, func, help_ in (
        ("profile", cmd_profile, "rho1/rho2 distortion table between two metrics"),
        ("sandwich", cmd_sandwich, "check rho1(d) <= d' <= rho2(d) on a ball"),
    ):
        sp = sub.add_parser(name, help=help_)
        wb(sp)
        sp.add_argument("--weights", required=True, help="metric d")
        sp.add_argument("--weights2", required=True, help="metric d'")
        sp.add_argument("--hom", help="homomorphism from the d group to the d' group")
        if name == "profile":
            sp.add_argument("--t", required=True, help="values such as 1..20 or 1,3/2,2")
            sp.add_argument("--search-radius", required=True)
        else:
            sp.add_argument("--radius", required=True)
        sp.set_defaults(func=func)

    sp = sub.add_parser("stabilizer", help="elements moving a base point at most R")
    wb(sp)
    sp.add_argument("--hom", required=True, help="action G -> H by left multiplication")
    sp.add_argument("--source-weights", required=True)
    sp.add_argument("--target-weights", required=True)
    sp.add_argument("--x0", required=True)
    sp.add_argument("--R", required=True)
    sp.add_argument("--search-radius", required=True)
    sp.set_defaults(func=cmd_stabilizer)

    sp = sub.add_parser("cover-make", help="interval cover of Z, or its product cover of Z^n")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--dims", type=int, default=1)
    sp.set_defaults(func=cmd_cover_make)

    sp = sub.add_parser("cover-verify", help="exhaustive check of a cover on a ball")
    wb(sp)
    sp.add_argument("--cover", required=True)
    sp.add_argument("--radius", required=True)
    sp.set_defaults(func=cmd_cover_verify)

    sp = sub.add_parser("cover-extend", help="extend a subgroup cover over its cosets")
    wb(sp)
    sp.add_argument("--weights", required=True)
    sp.add_argument("--d", required=True)
    sp.add_argument("--generator", help="generator of the subgroup spanned by light generators")
    sp.add_argument("--base", help="symbolic cover of Z transported to the subgroup")
    sp.add_argument("--radius", required=True)
    sp.add_argument("--certificate", action="store_true", help="include the explicit families")
    sp.set_defaults(func=cmd_cover_extend)

    sp = sub.add_parser("solve", help="minimal-diameter cover search")
    wb(sp)
    sp.add_argument("--instance", help="instance JSON file or inline JSON")
    sp.add_argument("--weights")
    sp.add_argument("--radius")
    sp.add_argument("--k", type=int)
    sp.add_argument("--d")
    sp.add_argument("--budget", type=int, default=10_000_000)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--backend", choices=sorted(_kernels.BACKENDS))
    sp.add_argument("--emit-instance", action="store_true", help="print the instance instead of solving")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("snf", help="Smith normal form of an integer matrix")
    sp.add_argument("--matrix", required=True, help="JSON array of arrays, inline or a file path")
    sp.add_argument("--gens", type=int, help="number of columns (needed for empty matrices)")
    sp.set_defaults(func=cmd_snf)

    sp = sub.add_parser("rank", help="rank and torsion of an abelian group")
    wb(sp)
    sp.add_argument("--matrix", help="relation matrix, inline JSON or a file path")
    sp.add_argument("--gens", type=int)
    sp.add_argument("--group", help="abelian group section of the workbench")
    sp.set_defaults(func=cmd_rank)

    for name, func in (("hirsch", cmd_hirsch), ("bounds", cmd_bounds)):
        sp = sub.add_parser(name, help="Hirsch length" if name == "hirsch" else "asymptotic dimension interval")
        wb(sp)
        sp.add_argument("--series", help="series section name(s), comma separated")
        sp.add_argument("--series-file", help="series JSON file or inline JSON")
        if name == "bounds":
            sp.add_argument("--sup", action="store_true", help="supremum over the listed series")
            sp.add_argument("--unbounded", action="store_true", help="the family has unbounded dimensions")
        sp.set_defaults(func=func)
    return p


def _summary(ok: bool, message: str) -> None:
    color = sys.stderr.isatty() and "NO_COLOR" not in os.environ
    tag = "ok" if ok else "FAIL"
    if color:
        tag = ("\033[32m" if ok else "\033[31m") + tag + "\033[0m"
    print(f"{tag}: {message}", file=sys.stderr)


def run(argv=None) -> tuple[int, str]:
    """Run one invocation; returns (exit code, JSON text)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
        code = EXIT_OK
        if isinstance(result, tuple):
            result, code = result
        out = emit(result)
    except (ParseError, UsageError) as e:
        code, out = EXIT_PARSE, emit({"error": "parse", "message": str(e)})
    except (ValueError, KeyError, ArithmeticError) as e:
        # MetricError, CoverError, SeriesError, ElementError are ValueErrors
        msg = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
        code, out = EXIT_DOMAIN, emit({"error": "domain", "message": msg})
    if args.summary:
        _summary(code == EXIT_OK, f"{args.command} exited {code}")
    return code, out


def main(argv=None) -> int:
    code, out = run(argv)
    print(out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
