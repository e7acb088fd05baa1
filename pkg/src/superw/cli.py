"""Command line entry point: ad-hoc OPE queries, named verification
suites, decoupling/relation/invariant/commutant queries, and JSON
reports.

Exit codes: 0 all checks pass, 1 any check fails, 2 usage or parse
error.  Suites run their independent sub-computations on a thread pool
bounded by --jobs; report assembly order is fixed regardless of
scheduling.  If SUPERW_CACHE_DIR is set, verify results are cached
there as JSON keyed by suite and context and reused on identical
reruns.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .coeff import K, ScalarSyntaxError, parse_scalar, sc
from .commutant import (
    b_limit_check,
    build_affine,
    build_tensor,
    commutant_basis,
    gl_data,
    gl_super_data,
    identify_W2_B2,
    remark_gl22_check,
)
from .free import build_free, gl11_fields, j_field, n2_fields, verify_gl11, verify_n2
from .invariants import first_relation_weight, invariant_dim, verify_weyl, weyl_span_dim
from .lattice import (
    bosonization_check,
    build_M,
    build_W2_basis,
    build_W_generators,
    verify_kernel_theorem,
    verify_q1,
    verify_q2,
    verify_w2_opes,
    w_limit_check,
)
from .parser import Context, ParseError, parse_field
from .report import Report, poles_str
from .swinf import Realization, build_swinf, decouple, relation_space, singular_check
from .swinf import J as J_gen

CACHE_ENV = "SUPERW_CACHE_DIR"


def make_context(spec, level=None) -> Context:
    """Build an algebra context from a spec string such as `bcbg:2`,
    `bc:1`, `betagamma:1`, `swinf:2`, `M:2`, `affine:2`, `tensor:2`,
    or `gl22`."""
    name, _, arg = spec.partition(":")
    n = int(arg) if arg else 1
    lvl = K if level is None else level
    if name in ("bcbg", "bc", "betagamma"):
        alg = build_free(n, kind=name)

        def res(gname, idx):
            if gname == "J":
                return j_field(alg, str(idx[0]), int(idx[1]))
            return None

        return Context(alg, res, tag=spec, extra_names=("J",))
    if name == "swinf":
        alg = build_swinf(sc(n))

        def res(gname, idx):
            if gname == "J":
                return J_gen(alg, str(idx[0]), int(idx[1]))
            return None

        return Context(alg, res, tag=spec)
    if name == "M":
        return Context(build_M(n, lvl), tag=spec)
    if name == "affine":
        return Context(build_affine(gl_data(n), lvl), tag=spec)
    if name == "tensor":
        alg = build_tensor(n, lvl)

        def res(gname, idx):
            if gname == "J":
                return j_field(alg, str(idx[0]), int(idx[1]))
            return None

        return Context(alg, res, tag=spec, extra_names=("J",))
    if name == "gl22":
        return Context(build_affine(gl_super_data(2), -2), tag=spec)
    raise ParseError(f"unknown algebra context {spec!r}")


def _level_arg(args):
    if getattr(args, "symbolic", False) or getattr(args, "k", None) in (None, "symbolic", "k"):
        return None
    return Fraction(args.k)


# ---------------------------------------------------------------------------
# Suites: each entry is a list of (label, callable(report)) sub-runs; the
# callables append into per-subtask reports that are merged in order.
# ---------------------------------------------------------------------------


def _suite_subtasks(name, args):
    ns = [args.n] if args.n is not None else None
    if name == "gl11":
        out = []
        for n in ns or (1, 2, 3):
            out.append((f"n={n}", lambda r, n=n: verify_gl11(gl11_fields(build_free(n)), n, report=r)))
        return out
    if name == "n2":
        out = []
        for n in ns or (1, 2):
            out.append((f"n={n}", lambda r, n=n: verify_n2(n2_fields(build_free(n)), n, report=r)))
        return out
    if name == "realization":
        return [(f"n={n}", lambda r, n=n: verify_realization_wrap(n, r)) for n in ns or (1, 2)]
    if name == "relations":
        from .swinf import verify_relations

        return [(f"n={n}", lambda r, n=n: verify_relations(n, report=r)) for n in ns or (1, 2)]
    if name == "decouple2":
        from .swinf import verify_decouple2

        return [("n=2", lambda r: verify_decouple2(report=r))]
    if name == "weyl":
        return [("desk", lambda r: verify_weyl(report=r))]
    if name == "w2opes":
        return [("symbolic", lambda r: verify_w2_opes(report=r))]
    if name == "kernels":
        out = [("bosonization", lambda r: bosonization_check(report=r))]
        for n in ns or (1, 2):
            out.append((f"q1 n={n}", lambda r, n=n: verify_q1(n, report=r)))
            out.append((f"q2 n={n}", lambda r, n=n: verify_q2(n, report=r)))
        for n in ns or (1, 2, 3):
            out.append((f"kernel n={n}", lambda r, n=n: verify_kernel_theorem(n, report=r)))
        return out
    if name == "w2b2":
        kv = _level_arg(args)
        return [("symbolic" if kv is None else f"k={kv}", lambda r: identify_W2_B2(kv, report=r))]
    if name == "gl22remark":
        return [("level=-2", lambda r: remark_gl22_check(report=r))]
    if name == "limits":
        out = []
        for n in ns or (1, 2):
            out.append((f"W n={n}", lambda r, n=n: w_limit_check(n, report=r)))
        for n in ns or (1, 2):
            out.append((f"B n={n}", lambda r, n=n: b_limit_check(n, report=r)))
        return out
    raise ParseError(f"unknown suite {name!r}")


def verify_realization_wrap(n, report):
    from .swinf import verify_realization

    return verify_realization(n, kmax=2, report=report)


SUITES = (
    "gl11",
    "n2",
    "realization",
    "relations",
    "decouple2",
    "weyl",
    "w2opes",
    "kernels",
    "w2b2",
    "gl22remark",
    "limits",
)


def run_suite(name, args) -> Report:
    subtasks = _suite_subtasks(name, args)
    context = ", ".join(label for label, _ in subtasks)
    merged = Report(name, context)
    subs = [Report(name, label) for label, _ in subtasks]
    jobs = max(1, args.jobs)

    def run_one(pair):
        (_, fn), rep = pair
        fn(rep)

    if jobs == 1 or len(subtasks) == 1:
        for pair in zip(subtasks, subs):
            run_one(pair)
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(run_one, zip(subtasks, subs)))
    for rep in subs:
        merged.checks.extend(rep.checks)
    return merged


def _cache_path(name, args):
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    key = json.dumps(
        {"suite": name, "n": args.n, "k": getattr(args, "k", None), "symbolic": getattr(args, "symbolic", False)},
        sort_keys=True,
    )
    digest = hashlib.sha256(key.encode()).hexdigest()[:16]
    return os.path.join(root, f"{name}-{digest}.json")


def _emit_report(rep: Report, args) -> int:
    if args.json:
        print(rep.to_json())
    else:
        print(rep)
    return 0 if rep.passed else 1


def cmd_verify(args) -> int:
    path = _cache_path(args.suite, args)
    if path and os.path.exists(path):
        with open(path) as fh:
            data = json.load(fh)
        if args.json:
            print(json.dumps(data, indent=2))
        else:
            print(f"suite {data['suite']} (cached)")
            for c in data["checks"]:
                print(f"  [{c['status']:>4}] {c['id']}")
        return 0 if all(c["status"] != "fail" for c in data["checks"]) else 1
    rep = run_suite(args.suite, args)
    if path:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w") as fh:
            fh.write(rep.to_json())
    return _emit_report(rep, args)


def cmd_ope(args) -> int:
    ctx = make_context(args.algebra, _scalar_level(args))
    a = parse_field(args.lhs, ctx)
    b = parse_field(args.rhs, ctx)
    poles = a.ope(b)
    if args.json:
        print(
            json.dumps(
                {
                    "command": "ope",
                    "context": ctx.tag,
                    "lhs": str(a),
                    "rhs": str(b),
                    "poles": {str(p): str(e) for p, e in sorted(poles.items(), reverse=True)},
                },
                indent=2,
            )
        )
    elif not poles:
        print("regular")
    else:
        for p in sorted(poles, reverse=True):
            print(f"({p}) {poles[p]}")
    return 0


def cmd_nproduct(args) -> int:
    ctx = make_context(args.algebra, _scalar_level(args))
    a = parse_field(args.lhs, ctx)
    b = parse_field(args.rhs, ctx)
    e = ctx.alg.nprod_expr(a, b, args.mode)
    if args.json:
        print(json.dumps({"command": "nproduct", "context": ctx.tag, "mode": args.mode, "result": str(e)}, indent=2))
    else:
        print(e)
    return 0


def _scalar_level(args):
    kv = getattr(args, "k", None)
    if kv is None or getattr(args, "symbolic", False):
        return None
    try:
        return parse_scalar(str(kv))
    except ScalarSyntaxError as ex:
        raise ParseError(f"bad level {kv!r}: {ex}")


def cmd_decouple(args) -> int:
    n = args.n if args.n is not None else 2
    e = decouple(n, args.label, args.m)
    if args.json:
        print(json.dumps({"command": "decouple", "n": n, "label": args.label, "m": args.m, "result": str(e)}, indent=2))
    else:
        print(f"j[{args.label},{args.m}] = {e}")
    return 0


def cmd_relations(args) -> int:
    n = args.n if args.n is not None else 1
    if args.weight is not None:
        w = Fraction(args.weight)
        vs = relation_space(n, w)
        sing = [singular_check(v) for v in vs]
        if args.json:
            print(
                json.dumps(
                    {"command": "relations", "n": n, "weight": str(w), "dim": len(vs), "singular": sing, "vectors": [str(v) for v in vs]},
                    indent=2,
                )
            )
        else:
            print(f"n={n} weight={w}: dim {len(vs)}")
            for v, s in zip(vs, sing):
                print(f"  singular={s}: {v}")
        return 0
    w = first_relation_weight(n)
    if args.json:
        print(json.dumps({"command": "relations", "n": n, "first_relation_weight": str(w)}, indent=2))
    else:
        print(f"n={n}: first relation at weight {w}")
    return 0


def cmd_invariants(args) -> int:
    n = args.n if args.n is not None else 1
    w = Fraction(args.weight if args.weight is not None else 1)
    di = invariant_dim(n, w)
    dw = weyl_span_dim(n, w)
    if args.json:
        print(json.dumps({"command": "invariants", "n": n, "weight": str(w), "invariant_dim": di, "weyl_span_dim": dw}, indent=2))
    else:
        print(f"n={n} weight={w}: invariant_dim {di}, weyl_span_dim {dw}")
    return 0


def cmd_commutant(args) -> int:
    n = args.n if args.n is not None else 2
    w = Fraction(args.weight if args.weight is not None else 1)
    level = _scalar_level(args)
    alg = build_tensor(n, K if level is None else level)
    basis = commutant_basis(alg, w)
    if args.json:
        print(
            json.dumps(
                {
                    "command": "commutant",
                    "n": n,
                    "weight": str(w),
                    "level": "symbolic" if level is None else str(level),
                    "dim": len(basis),
                    "basis": [str(v) for v in basis],
                },
                indent=2,
            )
        )
    else:
        print(f"commutant n={n} weight={w} level={'symbolic' if level is None else level}: dim {len(basis)}")
        for v in basis:
            print(f"  {v}")
    return 0


def cmd_identify(args) -> int:
    if args.check == "w2b2":
        rep = identify_W2_B2(_level_arg(args))
    elif args.check == "gl22remark":
        rep = remark_gl22_check()
    else:
        raise ParseError(f"unknown identification check {args.check!r}")
    return _emit_report(rep, args)


def cmd_walg(args) -> int:
    n = args.n if args.n is not None else 2
    alg = build_M(n)
    fields = build_W_generators(alg)
    if n == 2 and args.weight is not None and Fraction(args.weight) >= 2:
        fields = build_W2_basis(alg)
    if args.json:
        print(json.dumps({"command": "walg", "n": n, "fields": {k: str(v) for k, v in fields.items()}}, indent=2))
    else:
        for name, v in fields.items():
            print(f"{name} (weight {v.weight()}) = {v}")
    return 0


def build_argparser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="superw", description="Exact symbolic vertex-superalgebra computations")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, algebra=False):
        p.add_argument("--n", type=int, default=None, help="rank")
        p.add_argument("--k", default=None, help="level (rational, or 'symbolic')")
        p.add_argument("--symbolic", action="store_true", help="keep the level symbolic")
        p.add_argument("--weight", default=None, help="conformal weight (rational)")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--jobs", type=int, default=1, help="concurrent sub-computations")
        if algebra:
            p.add_argument("--algebra", default="bcbg:1", help="context, e.g. bcbg:2, swinf:2, M:2")

    p = sub.add_parser("ope", help="pole-by-pole OPE of two expressions")
    p.add_argument("lhs")
    p.add_argument("rhs")
    common(p, algebra=True)
    p.set_defaults(fn=cmd_ope)

    p = sub.add_parser("nproduct", help="a single circle or Wick product")
    p.add_argument("lhs")
    p.add_argument("rhs")
    p.add_argument("mode", type=int, help="product index n (negative for Wick)")
    common(p, algebra=True)
    p.set_defaults(fn=cmd_nproduct)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("suite", choices=SUITES)
    common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("decouple", help="solve a decoupling relation")
    p.add_argument("label", choices=["0", "1", "+", "-"])
    p.add_argument("m", type=int)
    common(p)
    p.set_defaults(fn=cmd_decouple)

    p = sub.add_parser("relations", help="kernel of the free-field realization by weight")
    common(p)
    p.set_defaults(fn=cmd_relations)

    p = sub.add_parser("invariants", help="classical invariant dimensions")
    common(p)
    p.set_defaults(fn=cmd_invariants)

    p = sub.add_parser("commutant", help="weight-graded commutant basis in the affine tensor algebra")
    common(p)
    p.set_defaults(fn=cmd_commutant)

    p = sub.add_parser("identify", help="isomorphism checks between realizations")
    p.add_argument("--check", choices=["w2b2", "gl22remark"], required=True)
    common(p)
    p.set_defaults(fn=cmd_identify)

    p = sub.add_parser("walg", help="print the screening-kernel generator fields")
    common(p)
    p.set_defaults(fn=cmd_walg)

    return ap


def main(argv=None) -> int:
    ap = build_argparser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as ex:
        return 2 if ex.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ParseError, ScalarSyntaxError, ValueError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
