"""Command-line front end: ingestion, analysis, verification, generation.

Exit codes: verify returns 0 pass / 1 fail / 2 inapplicable / 3 error;
usage errors exit 64, I/O errors 74.
"""

from __future__ import annotations

import argparse
import json
import sys
from itertools import product

from . import corpus as corpus_mod
from .algebra import FiniteAlgebra, Subpower, subpower_generate, validate_algebra
from .caps import Caps, caps_from_env
from .errors import AlgGraphError
from .kclass import AlgebraClass
from .randgen import Campaign, GeneratorSpec, campaign_json, random_instances, run_campaign
from .report import Report

EX_USAGE = 64
EX_IOERR = 74
EX_ERROR = 3


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def load_algebra_file(path: str) -> FiniteAlgebra:
    return validate_algebra(_load_json(path))


def load_relation_file(path: str) -> Subpower:
    raw = _load_json(path)
    names = corpus_mod.corpus_algebras()
    factors = []
    for f in raw["factors"]:
        if isinstance(f, str):
            if f not in names:
                raise AlgGraphError(f"unknown corpus algebra {f!r}")
            factors.append(names[f])
        else:
            factors.append(validate_algebra(f))
    arity = raw.get("arity", len(factors))
    if arity != len(factors):
        raise AlgGraphError("arity does not match the factor list")
    if "generators" in raw:
        return subpower_generate(factors, [tuple(g) for g in raw["generators"]])
    tuples = [tuple(t) for t in raw["tuples"]]
    seen = set(tuples)
    sig = factors[0].signature()
    for oi, (_, m) in enumerate(sig):
        for args in product(tuples, repeat=m):
            val = tuple(
                f.apply(oi, tuple(a[ci] for a in args))
                for ci, f in enumerate(factors)
            )
            if val not in seen:
                raise AlgGraphError(
                    f"tuple set is not closed: missing {list(val)}"
                )
    return Subpower(tuple(factors), tuples, tuple(tuples))


def _caps(args) -> Caps:
    caps = caps_from_env()
    return caps.override(
        clone_limit=args.cap_clone,
        clone_cost_limit=args.cap_clone_cost,
        tuple_limit=args.cap_tuples,
    )


def _emit(data, path: str | None):
    text = json.dumps(data, sort_keys=True, indent=1) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_analyze(args) -> int:
    from .edges import edge_graph, is_smooth, section_fragment
    from .thin import analyze_graphs

    caps = _caps(args)
    alg = load_algebra_file(args.file)
    frag = section_fragment(alg, caps)
    records = edge_graph(alg, caps, fragment=frag) if alg.size > 1 else []
    smooth = is_smooth(alg, caps, records=records)
    kclass = AlgebraClass.hs(alg, caps)
    ga = analyze_graphs(alg, kclass, mode=args.mode, caps=caps)
    data = {
        "algebra": alg.to_json_dict(),
        "edges": [r.to_json_dict() for r in records],
        "omits_type1": all(r.resolved_type != "unary" for r in records),
        "smooth": smooth.to_json_dict(),
        "class_smooth": kclass.all_smooth(),
        "graph": ga.to_json_dict(),
    }
    _emit(data, args.json)
    return 0


def cmd_edges(args) -> int:
    from .edges import edge_graph

    caps = _caps(args)
    alg = load_algebra_file(args.file)
    records = edge_graph(alg, caps)
    _emit([r.to_json_dict() for r in records], args.json)
    return 0


def cmd_graph(args) -> int:
    from .thin import analyze_graphs, to_dot

    caps = _caps(args)
    alg = load_algebra_file(args.file)
    kclass = AlgebraClass.hs(alg, caps)
    ga = analyze_graphs(alg, kclass, mode=args.mode, caps=caps)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(to_dot(ga, name=alg.name))
    if args.json or not args.dot:
        _emit(ga.to_json_dict(), args.json)
    return 0


def _campaign_exit(report: dict) -> int:
    summary = report["summary"]
    if summary.get("fail"):
        return 1
    if summary.get("pass"):
        return 0
    return 2


def cmd_verify(args) -> int:
    from . import products, thin

    caps = _caps(args)
    what = args.what

    if args.random:
        spec = GeneratorSpec.parse(args.random)
        campaign = Campaign(
            seed=args.seed,
            spec=spec,
            count=args.count,
            verifiers=(what,),
            factor_corpus=tuple(args.factors.split(",")) if args.factors else (),
        )
        report = run_campaign(campaign, caps)
        _emit(report, args.json)
        return _campaign_exit(report)

    if not args.file:
        raise UsageError("verify needs FILE or --random SPEC")

    if what == "connectivity":
        alg = load_algebra_file(args.file)
        rep = thin.verify_connectivity(alg, mode=args.mode, caps=caps)
    elif what == "qmaj":
        alg = load_algebra_file(args.file)
        rep = products.quasi_majority(
            AlgebraClass.hs(alg, caps), mode=args.mode, caps=caps
        ).report
    elif what == "rect":
        rel = load_relation_file(args.file)
        reports = [
            products.rect_check(rel, mode=args.mode, caps=caps),
            products.linkage_rect_check(rel, mode=args.mode, caps=caps),
            products.umax_rect_check(rel, mode=args.mode, caps=caps),
        ]
        data = [r.to_json_dict() for r in reports]
        _emit(data, args.json)
        if any(r.verdict == "fail" for r in reports):
            return 1
        # the linked rectangularity check is the primary verdict; the linkage
        # and umax variants are reported alongside
        return reports[0].exit_code
    elif what == "q2d":
        rel = load_relation_file(args.file)
        pinned = tuple(int(x) for x in args.pin.split(",")) if args.pin else None
        rep = products.q2d_check(rel, pinned, mode=args.mode, caps=caps)
    elif what == "almost-trivial":
        rel = load_relation_file(args.file)
        res = products.almost_trivial_check(rel)
        rep = res.report
        if res.found and not res.reconstruct(rel):
            rep.check("reconstruction", False, {"note": "decomposition mismatch"})
    elif what == "lifting":
        alg = load_algebra_file(args.file)
        from .congruence import all_congruences

        kclass = AlgebraClass.hs(alg, caps)
        rep = Report("lifting:all-congruences")
        for theta in all_congruences(alg, caps):
            for case in ("quotient-edge", "quotient-path"):
                sub = thin.verify_lifting(
                    case, algebra=alg, theta=theta, kclass=kclass,
                    mode=args.mode, caps=caps,
                )
                key = f"{case}@{theta.blocks_str()}"
                rep.check(key, sub.verdict != "fail")
                if sub.verdict == "inapplicable":
                    rep.note(f"{key}: inapplicable")
    else:
        raise UsageError(f"unknown verify target {what!r}")

    _emit(rep.to_json_dict(), args.json)
    return rep.exit_code


def cmd_random(args) -> int:
    caps = _caps(args)
    spec = GeneratorSpec.parse(args.spec)
    factors = None
    if spec.kind == "relation":
        names = corpus_mod.corpus_algebras()
        if not args.factors:
            raise UsageError("relation specs need --factors")
        factors = [names[n] for n in args.factors.split(",")]
    out = []
    for inst in random_instances(spec, args.seed, args.count, caps, factors):
        if isinstance(inst.value, FiniteAlgebra):
            out.append(inst.value.to_json_dict())
        else:
            out.append(corpus_mod.relation_json_dict(inst.value))
    _emit(out, args.json)
    return 0


def cmd_corpus(args) -> int:
    import os

    os.makedirs(args.out, exist_ok=True)
    written = []
    for name, alg in corpus_mod.corpus_algebras().items():
        path = os.path.join(args.out, f"{name}.json")
        _emit(alg.to_json_dict(), path)
        written.append(path)
    for name, rel in corpus_mod.corpus_relations().items():
        path = os.path.join(args.out, f"{name}.json")
        _emit(corpus_mod.relation_json_dict(rel), path)
        written.append(path)
    for p in written:
        print(p)
    return 0


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alggraph",
        description="Edge-colored graph analysis of finite idempotent algebras",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_mode=True):
        p.add_argument("--json", default=None, help="write JSON report here ('-' = stdout)")
        p.add_argument("--cap-clone", type=int, default=None)
        p.add_argument("--cap-clone-cost", type=int, default=None)
        p.add_argument("--cap-tuples", type=int, default=None)
        if with_mode:
            p.add_argument("--mode", choices=("exact", "witness"), default="exact")

    p = sub.add_parser("analyze", help="full JSON report for an algebra file")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("edges", help="edge classification records")
    p.add_argument("file")
    common(p, with_mode=False)
    p.set_defaults(func=cmd_edges)

    p = sub.add_parser("graph", help="thin-edge digraphs, DOT export")
    p.add_argument("file")
    p.add_argument("--dot", default=None, help="write DOT here")
    common(p)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("verify", help="run one verifier; exit 0/1/2/3")
    p.add_argument(
        "what",
        choices=("connectivity", "rect", "q2d", "qmaj", "almost-trivial", "lifting"),
    )
    p.add_argument("file", nargs="?")
    p.add_argument("--pin", default=None, help="comma list of pinned coordinates (q2d)")
    p.add_argument("--random", default=None, help="generator spec for a campaign")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--factors", default=None, help="corpus factor names (relations)")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("random", help="emit seeded random instances")
    p.add_argument("--spec", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--factors", default=None)
    common(p, with_mode=False)
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("corpus", help="write the built-in algebras and relations")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_corpus)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        raise SystemExit(0 if exc.code in (0, None) else EX_USAGE)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EX_USAGE
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EX_IOERR
    except (AlgGraphError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EX_ERROR


if __name__ == "__main__":
    sys.exit(main())
