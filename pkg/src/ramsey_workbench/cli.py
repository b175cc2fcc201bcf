"""Command line front end: ``ramsey-workbench <command> ...``.

Exit codes: 0 success (or HOLDS), 1 FAILS or a failed check, 2 UNKNOWN,
3 bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Any

from ramsey_workbench import ramsey, suite
from ramsey_workbench.algebras import epi_set, free_algebra, hom_set
from ramsey_workbench.catalog import Catalog, CatalogError, load_catalog
from ramsey_workbench.chains import enumerate_rigid_surjections
from ramsey_workbench.ordered import ordered_free, rigid_epi_set
from ramsey_workbench.terms import enumerate_neat, render, term_to_json

EXIT_OK, EXIT_FAILS, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3
VERDICT_EXIT = {ramsey.HOLDS: EXIT_OK, ramsey.FAILS: EXIT_FAILS, ramsey.UNKNOWN: EXIT_UNKNOWN}

DRIVING_RESULT = {
    "chains-rs": "finite dual Ramsey theorem (Graham-Rothschild) for chains with rigid surjections",
    "ordered-algebras-re": "dual Ramsey property of ordered algebras in a variety",
    "algebras-epi": "finite dual small Ramsey degrees of algebras under epimorphisms",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text!r} must be positive")
    return value


def nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"{text!r} must be non-negative")
    return value


# --- reports ------------------------------------------------------------------------


class Report:
    """What a command produced; emitted as a deterministic RunReport with ``--json``."""

    def __init__(self, args, catalog: Catalog | None):
        self.args = args
        self.catalog = catalog
        self.lines: list[str] = []
        self.results: dict[str, Any] = {}
        self.started = time.perf_counter()

    def say(self, line: str = "") -> None:
        self.lines.append(line)

    def digest(self) -> str:
        inputs = {k: v for k, v in sorted(vars(self.args).items()) if k not in ("func", "json", "timings", "out")}
        payload = {"args": inputs, "catalog": self.catalog.to_json() if self.catalog else None}
        for key in ("coloring",):
            if inputs.get(key):
                payload[key] = Path(inputs[key]).read_text()
        return hashlib.sha256(json.dumps(payload, sort_keys=True, default=str).encode()).hexdigest()

    def run_report(self, argv: list[str]) -> dict:
        report = {
            "command": argv,
            "inputs_digest": self.digest(),
            "seed": self.args.seed,
            "results": self.results,
        }
        if self.args.timings:
            report["timings"] = {"total_seconds": round(time.perf_counter() - self.started, 6)}
        return report

    def emit(self, argv: list[str]) -> None:
        if self.args.json:
            print(json.dumps(self.run_report(argv), indent=2, sort_keys=True))
        else:
            for line in self.lines:
                print(line)


def write_out(args, data: dict) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _budget(args, default: int) -> int:
    return args.budget if args.budget is not None else default


# --- object lookup --------------------------------------------------------------------


def parse_object(catalog: Catalog, category: str, text: str):
    if category == "chains-rs":
        try:
            n = int(text)
        except ValueError:
            raise UsageError(f"chain objects are sizes, got {text!r}") from None
        if n < 0:
            raise UsageError("chain sizes must be non-negative")
        return n
    if category == "ordered-algebras-re":
        return catalog.ordered_algebra(text)
    return catalog.algebra(text)


def _label(category: str, text: str) -> str:
    return text if category == "chains-rs" else f"[{text}]"


# --- commands ---------------------------------------------------------------------


def cmd_enumerate(args, catalog: Catalog, rep: Report) -> int:
    kind = args.kind
    items: list = []
    if kind == "rigid-surjections":
        if args.n is None or args.k is None:
            raise UsageError("rigid-surjections needs --n and --k")
        maps = enumerate_rigid_surjections(args.n, args.k)
        items = [m.to_json() for m in maps]
        for m in maps:
            rep.say(" ".join(str(y) for y in m.table))
    elif kind == "terms":
        if args.sig is None or args.vars is None or args.max_shape_len is None:
            raise UsageError("terms needs --sig, --vars and --max-shape-len")
        sig = catalog.signature(args.sig)
        terms = enumerate_neat(sig, args.vars, args.max_shape_len)
        items = [term_to_json(t) for t in terms]
        for t in terms:
            rep.say(render(t))
    elif kind in ("homs", "epis", "rigid-epis"):
        if args.src is None or args.dst is None:
            raise UsageError(f"{kind} needs --src and --dst")
        if kind == "rigid-epis":
            maps = rigid_epi_set(catalog.ordered_algebra(args.src), catalog.ordered_algebra(args.dst))
        else:
            A, B = catalog.algebra(args.src), catalog.algebra(args.dst)
            maps = hom_set(A, B) if kind == "homs" else epi_set(A, B)
        items = [{"table": list(h.table)} for h in maps]
        for h in maps:
            rep.say(" ".join(str(y) for y in h.table))
    rep.say(f"count: {len(items)}")
    rep.results = {"kind": kind, "count": len(items), "items": items}
    write_out(args, rep.results)
    return EXIT_OK


def cmd_free(args, catalog: Catalog, rep: Report) -> int:
    V = catalog.variety(args.variety)
    F = free_algebra(V, args.n)
    data = F.underlying.to_json()
    data["generators"] = list(F.generator_elements)
    rep.say(f"free algebra of {args.variety} on {args.n} generator(s): {F.size} element(s)")
    rep.results = {"variety": args.variety, "n": args.n, "size": F.size}
    if args.ordered:
        if not V.is_nontrivial():
            raise UsageError(f"{args.variety} is trivial; its free algebras cannot be ordered by neat terms")
        OF = ordered_free(V, args.n)
        data["order"] = list(OF.order)
        data["min_terms"] = [term_to_json(t) for t in OF.min_terms]
        rep.say("order by neat-minimal terms (natural epimorphism is a rigid surjection):")
        for i, (x, t) in enumerate(zip(OF.order, OF.min_terms)):
            rep.say(f"  {i}: element {x} = {render(t)}")
        rep.results.update(
            {"order": list(OF.order), "min_terms": [render(t) for t in OF.min_terms], "cover_length": OF.cover_length}
        )
    write_out(args, data)
    return EXIT_OK


def _describe_query(args) -> str:
    arrow = "<-" if args.direction == "dual" else "->"
    return (
        f"{_label(args.category, args.C)} {arrow} ({_label(args.category, args.B)})"
        f"^{_label(args.category, args.A)}_{{{args.k},{args.t}}} in {args.category}"
    )


def cmd_check_arrow(args, catalog: Catalog, rep: Report) -> int:
    cat = args.category
    C, B, A = (parse_object(catalog, cat, x) for x in (args.C, args.B, args.A))
    coloring = None
    if args.coloring:
        coloring = ramsey.Coloring.from_json(json.loads(Path(args.coloring).read_text()))
    # an explicit budget lifts the size limit on the complete search
    limit = None if args.budget is not None else args.exhaustive_limit
    cert = ramsey.check_arrow(
        C, B, A, args.k, args.t, cat, args.direction,
        coloring=coloring, exhaustive_limit=limit, budget=_budget(args, ramsey.DEFAULT_BUDGET), seed=args.seed,
    )
    rep.say(f"{_describe_query(args)}: {cert.verdict} ({cert.mode})")
    rep.say(f"driving result: {DRIVING_RESULT[cat]}")
    rep.say(f"|colored hom-set| = {len(cert.colored)}, candidate witnesses = {cert.stats.get('witnesses')}")
    if cert.witness is not None:
        rep.say(f"witness: {list(cert.witness[2])}" + (f", colors {list(cert.colors)}" if cert.colors else ""))
    if cert.refuting_coloring is not None:
        rep.say(f"refuting coloring: {list(cert.refuting_coloring.colors)}")
    if cert.message:
        rep.say(cert.message)
    rep.results = cert.to_json()
    write_out(args, rep.results)
    return VERDICT_EXIT[cert.verdict]


def cmd_gr_search(args, catalog: Catalog, rep: Report) -> int:
    r = ramsey.gr_witness_search(args.a, args.b, args.k, args.max_n, args.t, budget=_budget(args, ramsey.DEFAULT_BUDGET))
    for step in r.trail:
        rep.say(f"n={step['n']}: {step['verdict']} ({step['mode']}, {step['colored']} colored maps)")
    rep.say(f"driving result: {DRIVING_RESULT['chains-rs']}")
    if r.n is None:
        rep.say(f"no n <= {args.max_n} found")
    else:
        rep.say(f"least n with n <- ({args.b})^{args.a}_{{{args.k},{args.t}}}: {r.n}" + ("" if r.minimal else " (minimality not certified)"))
    rep.results = r.to_json()
    write_out(args, rep.results)
    return EXIT_OK if r.n is not None else EXIT_UNKNOWN


def cmd_degree(args, catalog: Catalog, rep: Report) -> int:
    cat = args.category
    A = parse_object(catalog, cat, args.A)
    objects = [parse_object(catalog, cat, x) for x in args.objects.split(",") if x]
    b = ramsey.small_degree_bounds(
        A, objects, args.k_max, args.t_max, cat, budget=_budget(args, 200_000)
    )
    rep.say(f"dual small degree of {_label(cat, args.A)} in {cat}, relative to {len(objects)} catalog object(s):")
    rep.say(f"  lower bound: {b.lower}")
    rep.say(f"  upper bound: {b.upper if b.upper is not None else 'none certified'}")
    rep.say("  bounds are catalog-relative; they say nothing about objects outside the list")
    rep.results = b.to_json()
    write_out(args, rep.results)
    return EXIT_OK


def cmd_transport(args, catalog: Catalog, rep: Report) -> int:
    V = catalog.variety(args.variety)
    A, B = catalog.ordered_algebra(args.A), catalog.ordered_algebra(args.B)
    rep.say("driving result: pre-adjunctions transport the dual Ramsey property from chains to ordered algebras")
    g = ramsey.gr_witness_search(A.size, B.size, args.k, args.max_n, budget=_budget(args, ramsey.DEFAULT_BUDGET))
    rep.say(f"step 1, chain arrow n <- ({B.size})^{A.size}_{args.k}: " + (f"n = {g.n}" if g.n else "not found"))
    if g.n is None:
        rep.say(f"UNKNOWN: no chain witness size up to {args.max_n} (failing step: chain arrow)")
        rep.results = {"verdict": ramsey.UNKNOWN, "failing_step": "chain arrow", "gr": g.to_json()}
        write_out(args, rep.results)
        return EXIT_UNKNOWN
    coloring = None
    if args.coloring:
        coloring = ramsey.Coloring.from_json(json.loads(Path(args.coloring).read_text()))
    cert = ramsey.transport_arrow(g.certificate, A, B, V, coloring=coloring, seed=args.seed)
    for i, step in enumerate(cert.trace, start=2):
        detail = {k: v for k, v in step.items() if k != "step"}
        rep.say(f"step {i}, {step['step']}: {json.dumps(detail, sort_keys=True)}")
    ok = ramsey.validate_transported(cert, V, A, B)
    rep.say(f"direct validation: {'passed' if ok else 'FAILED'}")
    rep.say(f"verdict: {cert.verdict} at the ordered free algebra on {g.n} generators ({cert.stats['free_size']} elements)")
    rep.results = cert.to_json()
    rep.results["validated"] = ok
    write_out(args, rep.results)
    return VERDICT_EXIT[cert.verdict] if ok else EXIT_FAILS


def cmd_segment_induction(args, catalog: Catalog, rep: Report) -> int:
    V = catalog.variety(args.variety)
    A = catalog.ordered_algebra(args.A)
    coloring = None
    if args.coloring:
        coloring = ramsey.Coloring.from_json(json.loads(Path(args.coloring).read_text()))
    r = ramsey.segment_induction(
        A, V, args.N, coloring, args.k, args.M, budget=_budget(args, 100_000), seed=args.seed
    )
    rep.say("driving result: dual big Ramsey degree bound, replayed one initial segment at a time")
    for st in r.steps:
        status = f"w = {st['w']}" if st["found"] else "no witness"
        rep.say(f"segment {st['step']}: {st['from']} -> {st['to']}: {status}")
    if r.verdict == ramsey.UNKNOWN:
        rep.say(f"UNKNOWN: segment {r.failing_step} exhausted its search (raise --budget or N)")
    else:
        rep.say(f"u = {list(r.u.table)}; colors used {r.colors_used} <= |A| = {r.bound}: {r.verdict}; restriction identity {'holds' if r.claim4 else 'FAILS'}")
    rep.results = r.to_json()
    write_out(args, rep.results)
    return VERDICT_EXIT[r.verdict]


def cmd_verify_suite(args, catalog: Catalog, rep: Report) -> int:
    ctx = suite.Context(
        max_size=args.max_size,
        max_shape_length=args.max_shape_len,
        seed=args.seed,
        impl=suite.mutant_impl() if args.inject_mutant else suite.Impl(),
        catalog=catalog,
    )
    results = suite.run_suite(args.scope, ctx)
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        line = f"{mark} {r.scope}/{r.name}: {r.result} ({r.instances} instances)"
        rep.say(line + (f" -- {r.detail}" if r.detail else ""))
    failed = sum(not r.passed for r in results)
    rep.say(f"{len(results) - failed} passed, {failed} failed" + (" (mutant injected)" if args.inject_mutant else ""))
    rep.results = {"checks": [r.to_json() for r in results], "failed": failed, "mutant": args.inject_mutant}
    write_out(args, rep.results)
    return EXIT_FAILS if failed else EXIT_OK


# --- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--catalog", help="catalog directory (default: $RAMSEY_WORKBENCH_CATALOG or the shipped one)")
    common.add_argument("--seed", type=nonneg_int, default=0, help="seed for randomized search (default 0)")
    common.add_argument("--budget", type=positive_int, default=None, help="search budget (nodes or candidate maps)")
    common.add_argument("--json", action="store_true", help="print a RunReport as JSON")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in the RunReport")
    common.add_argument("--out", help="write the command's JSON artifact to this file")

    p = _Parser(prog="ramsey-workbench", description="Finite dual Ramsey computations for chains and ordered algebras.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("enumerate", parents=[common], help="list rigid surjections, terms or morphisms")
    e.add_argument("kind", choices=["rigid-surjections", "terms", "homs", "epis", "rigid-epis"])
    e.add_argument("--n", type=nonneg_int)
    e.add_argument("--k", type=nonneg_int)
    e.add_argument("--sig", help="catalog signature name or inline 'name:arity,...'")
    e.add_argument("--vars", type=positive_int)
    e.add_argument("--max-shape-len", type=positive_int)
    e.add_argument("--src")
    e.add_argument("--dst")
    e.set_defaults(func=cmd_enumerate)

    f = sub.add_parser("free", parents=[common], help="build a free algebra of a catalog variety")
    f.add_argument("--variety", required=True)
    f.add_argument("--n", type=positive_int, required=True)
    f.add_argument("--ordered", action="store_true")
    f.set_defaults(func=cmd_free)

    c = sub.add_parser("check-arrow", parents=[common], help="decide a partition arrow")
    c.add_argument("--category", choices=sorted(ramsey.CATEGORIES), default="chains-rs")
    c.add_argument("--direction", choices=["dual", "direct"], default="dual")
    c.add_argument("--C", required=True)
    c.add_argument("--B", required=True)
    c.add_argument("--A", required=True)
    c.add_argument("--k", type=positive_int, default=2)
    c.add_argument("--t", type=positive_int, default=1)
    c.add_argument("--exhaustive-limit", type=nonneg_int, default=ramsey.DEFAULT_EXHAUSTIVE_LIMIT)
    c.add_argument("--coloring", help="JSON coloring file; decide the arrow for this coloring only")
    c.set_defaults(func=cmd_check_arrow)

    g = sub.add_parser("gr-search", parents=[common], help="least chain size carrying a dual arrow")
    g.add_argument("--a", type=positive_int, required=True)
    g.add_argument("--b", type=positive_int, required=True)
    g.add_argument("--k", type=positive_int, default=2)
    g.add_argument("--t", type=positive_int, default=1)
    g.add_argument("--max-n", type=positive_int, default=8)
    g.set_defaults(func=cmd_gr_search)

    d = sub.add_parser("degree", parents=[common], help="catalog-relative bounds on a dual small degree")
    d.add_argument("--category", choices=sorted(ramsey.CATEGORIES), default="chains-rs")
    d.add_argument("--A", required=True)
    d.add_argument("--objects", required=True, help="comma-separated catalog objects (sizes for chains)")
    d.add_argument("--k-max", type=positive_int, default=2)
    d.add_argument("--t-max", type=positive_int, default=2)
    d.set_defaults(func=cmd_degree)

    t = sub.add_parser("transport", parents=[common], help="move a chain arrow to an ordered free algebra")
    t.add_argument("--variety", required=True)
    t.add_argument("--A", required=True)
    t.add_argument("--B", required=True)
    t.add_argument("--k", type=positive_int, default=2)
    t.add_argument("--max-n", type=positive_int, default=8)
    t.add_argument("--coloring")
    t.set_defaults(func=cmd_transport)

    s = sub.add_parser("segment-induction", parents=[common], help="bound colors by induction over segments")
    s.add_argument("--variety", required=True)
    s.add_argument("--A", required=True)
    s.add_argument("--N", type=positive_int, required=True)
    s.add_argument("--M", type=positive_int)
    s.add_argument("--k", type=positive_int, default=2)
    s.add_argument("--coloring")
    s.set_defaults(func=cmd_segment_induction)

    v = sub.add_parser("verify-suite", parents=[common], help="replay the property battery")
    v.add_argument("--scope", choices=["all", *suite.SCOPES], default="all")
    v.add_argument("--max-size", type=positive_int, default=6)
    v.add_argument("--max-shape-len", type=positive_int, default=8)
    v.add_argument("--inject-mutant", action="store_true", help="break rigidity on purpose to test the tester")
    v.set_defaults(func=cmd_verify_suite)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # --help exits 0; argument errors exit EXIT_USAGE
        return int(exc.code or 0)
    try:
        catalog = load_catalog(args.catalog)
        rep = Report(args, catalog)
        code = args.func(args, catalog, rep)
    except (UsageError, CatalogError, ValueError, OSError) as exc:
        print(f"ramsey-workbench {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rep.emit(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
