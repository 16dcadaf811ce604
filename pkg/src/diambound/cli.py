"""Command-line front end.

Exit codes: 0 when everything checked holds, 1 for usage or input errors,
2 when a certificate is violated (the failed inequality is printed).

Structured output (``--format structured``) is a JSON object::

    {"command": str, "ok": bool, "violations": [str, ...], "result": {...}}

Non-finite floats are written as the strings ``"inf"``, ``"-inf"`` and
``"nan"``; fractions as ``"p/q"`` strings.
"""

from __future__ import annotations

import argparse
import inspect
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import abelian_bound as ab
from . import flat_torus as ft
from . import handle_complex as hc
from . import metric_graph as mg
from . import presentation as pres
from .hyp3 import MargulisConfig
from .pipeline import NoFiniteRadius, solve_R
from .suites import SUITES


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _sanitize(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _sanitize(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_sanitize(v) for v in x]
    return x


class Outcome:
    def __init__(self, command: str):
        self.command = command
        self.result: dict = {}
        self.lines: list[str] = []
        self.violations: list[str] = []

    def say(self, line: str = "") -> None:
        self.lines.append(line)

    def check(self, ok: bool, message: str) -> None:
        if not ok:
            self.violations.append(message)

    def render(self, fmt: str) -> str:
        if fmt == "structured":
            doc = {
                "command": self.command,
                "ok": not self.violations,
                "violations": self.violations,
                "result": self.result,
            }
            return json.dumps(_sanitize(doc), indent=2, sort_keys=True) + "\n"
        body = list(self.lines)
        body += [f"VIOLATION: {v}" for v in self.violations]
        return "\n".join(body) + "\n"


def _read_source(arg: str) -> tuple[str, str]:
    """``@path`` or ``-`` reads a file or stdin; anything else is literal text."""
    if arg == "-":
        return "<stdin>", sys.stdin.read()
    if arg.startswith("@"):
        p = Path(arg[1:])
        try:
            return str(p), p.read_text()
        except OSError as exc:
            raise UsageError(f"{p}: {exc.strerror}") from None
    return "<argument>", arg


def _read_file(path: str) -> tuple[str, str]:
    return _read_source(path if path == "-" else "@" + path)


def _fraction(tok: str) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {tok!r}") from None


# -- subcommands ---------------------------------------------------------------


def cmd_triangularize(args, out: Outcome) -> None:
    source, text = _read_source(args.presentation)
    try:
        P = pres.parse(text.strip())
    except pres.PresentationSyntaxError as exc:
        raise UsageError(f"{source}: {exc}") from None
    except (pres.UnknownGeneratorError, pres.EmptyRelatorError) as exc:
        raise UsageError(f"{source}: {exc}") from None
    Q = pres.triangularize(P)
    before = ab.presented_group(pres.abelianization_matrix(P), P.generator_count)
    after = ab.presented_group(pres.abelianization_matrix(Q), Q.generator_count)
    out.result = {
        "input": pres.format_presentation(P),
        "output": pres.format_presentation(Q),
        "length_in": P.length,
        "length_out": Q.length,
        "length_bound": 3 * P.length,
        "abelianization_in": str(before),
        "abelianization_out": str(after),
    }
    out.say(pres.format_presentation(Q))
    out.say(f"length {Q.length} (input {P.length}, bound {3 * P.length})")
    out.say(f"abelianization {after}")
    out.check(Q.is_triangular(), "output has a relator whose length is not 3")
    out.check(Q.length <= 3 * P.length, f"length {Q.length} > 3 * {P.length}")
    out.check(before == after, f"abelianization changed from {before} to {after}")


def _torus(args) -> ft.FlatTorus:
    u1, u2, v1, v2 = args.basis
    try:
        return ft.FlatTorus((u1, u2), (v1, v2))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_torus(args, out: Outcome) -> None:
    T = _torus(args)
    B = ft.short_basis(T)
    out.result["short_basis"] = {
        "X": B.X, "Y": B.Y, "systole": B.systole, "y_length": B.y_length,
        "y_bound": B.y_bound, "area": B.area,
    }
    if args.action == "short-basis":
        out.say(f"X = {B.X}  length {B.systole:.12g} (systole)")
        out.say(f"Y = {B.Y}  length {B.y_length:.12g} <= {B.y_bound:.12g}")
        out.check(abs(ft.intersection(B.X, B.Y)) == 1, "|D(X, Y)| != 1")
        out.check(B.y_length <= B.y_bound + 1e-9, f"|Y| = {B.y_length!r} > 2 A / (sqrt 3 sys) = {B.y_bound!r}")
    elif args.action == "coefficients":
        try:
            cert = ft.class_coefficients(T, B, args.cls)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        out.result["coefficients"] = {"a": cert.a, "b": cert.b, "bound": cert.bound, "holds": cert.holds}
        out.say(f"class {tuple(args.cls)} = {cert.a} X + {cert.b} Y")
        out.say(f"max(|a|, |b|) = {max(abs(cert.a), abs(cert.b))} <= {cert.bound:.12g}")
        out.check(cert.holds, f"max(|a|, |b|) = {max(abs(cert.a), abs(cert.b))} > {cert.bound!r}")
    else:
        try:
            cert = ft.intersection_inequality(T, args.A, args.B, args.mu)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        out.result["inequality"] = {"lhs": cert.lhs, "rhs": cert.rhs, "holds": cert.holds}
        out.say(f"|mu| / (2 (|A| + |B|)) = {cert.lhs:.12g} <= {cert.rhs} = max |D|")
        out.check(cert.holds, f"{cert.lhs!r} > {cert.rhs}")


def _load_graph(path: str) -> mg.MetricGraph:
    source, text = _read_file(path)
    try:
        return mg.parse_graph(text)
    except mg.GraphFormatError as exc:
        raise UsageError(f"{source}: {exc}") from None


def cmd_graph(args, out: Outcome) -> None:
    G = _load_graph(args.file)
    rank, g = mg.cycle_rank(G), mg.girth(G)
    out.result = {"vertices": G.vertex_count, "edges": G.edge_count, "rank": rank, "girth": g,
                  "total_length": mg.total_length(G)}
    if args.action == "rank":
        out.say(f"rank {rank}")
    elif args.action == "girth":
        out.say(f"girth {g}")
    elif args.action == "certificate":
        if args.N is None or args.eps is None:
            raise UsageError("certificate needs --N and --eps")
        try:
            cert = mg.rank_bound_certificate(G, args.N, args.eps)
        except (mg.HypothesisViolation, ValueError) as exc:
            raise UsageError(str(exc)) from None
        out.result["bound"] = cert.bound
        out.result["holds"] = cert.holds
        out.say(f"rank {cert.rank} <= 32 N^2 / eps^2 = {cert.bound}")
        out.check(cert.holds, f"rank {cert.rank} > {cert.bound}")
    elif args.action == "coarse":
        try:
            H = mg.coarse_subdivision(G)
        except mg.HypothesisViolation as exc:
            raise UsageError(str(exc)) from None
        out.result["graph"] = mg.format_graph(H)
        out.say(mg.format_graph(H).rstrip("\n"))
        out.check(H.edge_count <= 3 * (rank - 1), f"{H.edge_count} edges > 3 ({rank} - 1)")
    else:
        H = mg.good_subgraph(G)
        out.result["graph"] = mg.format_graph(H)
        out.say(mg.format_graph(H).rstrip("\n"))
        out.check(mg.cycle_rank(H) == rank, "pruning changed the rank")


def _load_complex(path: str) -> hc.HandleComplex:
    source, text = _read_file(path)
    try:
        return hc.parse_complex(text)
    except hc.ComplexFormatError as exc:
        raise UsageError(f"{source}: {exc}") from None
    except hc.MalformedComplex as exc:
        raise UsageError(f"{source}: {exc}") from None


def cmd_complex(args, out: Outcome) -> None:
    C = _load_complex(args.file)
    if args.action == "classify":
        d = hc.classify_handles(C)
        bc = hc.boundary_certificate(C)
        out.result = {
            "h0": d.h0, "h1": d.h1, "monkeys": d.monkeys, "triangles": d.triangle_count,
            "components": [{"handles": c.handles, "closed": c.closed} for c in d.components],
            "base_rank": mg.cycle_rank(d.base_graph),
            "monkey_rank_steps": d.monkey_rank_steps,
            "strips": [{"id": s.id, "kind": s.kind, "handles": s.handles} for s in hc.strips(C)],
            "boundary": {
                "k1_spine_edges": bc.k1_spine_edges, "k1_boundary_edges": bc.k1_boundary_edges,
                "attached_edges": bc.attached_edges, "attached_bound": bc.attached_bound,
                "boundary_rank": bc.boundary_rank, "spine_rank": bc.spine_rank, "ellP": bc.ellP,
            },
        }
        out.say(f"{len(d.h0)} 0-handles, {len(d.h1)} 1-handles, {len(d.monkeys)} monkey handles on {d.triangle_count} triangles")
        for c in d.components:
            out.say(f"  I-bundle component {'closed' if c.closed else 'open'}: {list(c.handles)}")
        for s in hc.strips(C):
            out.say(f"  strip {s.id}: {s.kind} {list(s.handles)} {C.annotations.get(s.id, 'unannotated')}")
        out.say(f"monkey rank steps {list(d.monkey_rank_steps)}")
        out.say(f"boundary rank {bc.boundary_rank} <= {bc.spine_rank} + 6 * {bc.ellP}")
        out.check(d.monkey_bound_holds, f"{len(d.monkeys)} monkeys > {d.triangle_count} triangles")
        out.check(d.monkey_steps_hold, f"a monkey raised the spine rank by more than 3: {d.monkey_rank_steps}")
        out.check(bc.doubling_holds, "the 1-handle boundary does not double the spine")
        out.check(bc.attached_edges <= bc.attached_bound, f"{bc.attached_edges} attached edges > {bc.attached_bound}")
        out.check(bc.rank_holds, f"boundary rank {bc.boundary_rank} > {bc.spine_rank} + 6 * {bc.ellP}")
    else:
        b1 = None if args.epsilon is None else 512 * math.pi**2 / args.epsilon**2 + 3
        try:
            D, cert = hc.make_good(C, b1)
        except (hc.MissingAnnotation, hc.SurgeryError) as exc:
            raise UsageError(str(exc)) from None
        checks = cert.checks()
        out.result = {
            "surgeries": cert.surgeries,
            "length_original": cert.length_original,
            "length_final": cert.length_final,
            "zero_handle_edges": cert.zero_handle_edges,
            "ellP": cert.ellP,
            "spine_rank": cert.spine_rank,
            "rank_bound": cert.rank_bound,
            "checks": checks,
            "complex": hc.format_complex(D),
        }
        for s in cert.surgeries:
            out.say(f"surgery: {s}")
        out.say(f"boundary length {cert.length_original} -> {cert.length_final}")
        for name, ok in checks.items():
            out.say(f"  {name}: {'ok' if ok else 'FAILED'}")
            out.check(ok, name)
        out.say(hc.format_complex(D).rstrip("\n"))


def cmd_znbound(args, out: Outcome) -> None:
    if args.N < 2:
        raise UsageError("N must be at least 2")
    b = ab.zn_length_lower_bound(args.N)
    out.result = {"N": b.N, "bound": b.primary, "minimizer": b.minimizer, "closed_form": b.paper_variant}
    out.say(f"N = {b.N}: length >= {b.primary:.12g} (k = {b.minimizer})")
    out.say(f"closed form N^(1/sqrt ln N) + sqrt ln N - 1 = {b.paper_variant:.12g}")
    if args.oracle:
        try:
            m = ab.brute_force_min_length(args.N, args.max_k, args.max_entry)
        except ab.SearchSpaceTooLarge as exc:
            raise UsageError(str(exc)) from None
        out.result["oracle"] = m
        if m == math.inf:
            out.say(f"oracle: no {args.max_k}x{args.max_k} matrix with entries <= {args.max_entry} presents Z_{args.N}")
        else:
            out.say(f"oracle minimum {m} >= {b.primary:.12g}")
            out.check(ab.length_meets_bound(args.N, m), f"oracle length {m} < {b.primary!r}")
            if m < b.paper_variant:
                out.say(f"closed form exceeds the oracle ({b.paper_variant:.6g} > {m})")


def cmd_constants(args, out: Outcome) -> None:
    try:
        cfg = MargulisConfig(args.epsilon if args.epsilon is not None else MargulisConfig().epsilon_tilde)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        report = solve_R(cfg, ell_min=args.ell_min, bound=args.bound)
    except NoFiniteRadius as exc:
        report = exc.report
        out.violations.append(str(exc))
    out.result = report.to_dict()
    out.lines.append(report.to_text().rstrip("\n"))
    for name, ok in report.chain_identities.items():
        out.check(ok, f"chain identity {name}")
    if report.slack is not None:
        out.check(report.slack.holds, "half-ball slack exceeds the allowance")
    if report.r is not None:
        for row in report.certificate:
            out.check(row.holds, f"l={row.ell}: ln lhs {row.ln_lhs!r} <= ln rhs {row.ln_rhs!r}")
        if report.dominance is not None:
            out.check(report.dominance.holds, "tail dominance fails")


def cmd_oracle(args, out: Outcome) -> None:
    names = args.suite or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite {unknown[0]!r}; choose from {', '.join(SUITES)}")
    for name in names:
        fn = SUITES[name]
        kwargs = {}
        if args.seed is not None and "seed" in inspect.signature(fn).parameters:
            kwargs["seed"] = args.seed
        res = fn(**kwargs)
        out.result[name] = {"cases": res.cases, "passed": res.passed, "failures": res.failures}
        out.say(res.line(timing=args.timings))
        for f in res.failures:
            out.check(False, f"{name}: {f}")


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized suites")
    common.add_argument("--epsilon", type=float, default=None, help="Margulis constant override (default 0.104)")

    p = _Parser(prog="diambound", description="Diameter-bound toolkit for closed hyperbolic 3-manifolds.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("triangularize", parents=[common], help="triangularize a presentation")
    t.add_argument("presentation", help="presentation text, @file, or - for stdin")
    t.set_defaults(func=cmd_triangularize)

    tor = sub.add_parser("torus", help="flat torus lattice tools")
    tsub = tor.add_subparsers(dest="action", required=True, parser_class=_Parser)
    basis = dict(nargs=4, type=float, required=True, metavar=("U1", "U2", "V1", "V2"),
                 help="lattice basis vectors u and v")
    pair = dict(nargs=2, type=int, metavar=("P", "Q"))
    a = tsub.add_parser("short-basis", parents=[common], help="systolic basis X, Y")
    a.add_argument("--basis", **basis)
    a = tsub.add_parser("coefficients", parents=[common], help="class coordinates in the short basis")
    a.add_argument("--basis", **basis)
    a.add_argument("--class", dest="cls", required=True, **pair)
    a = tsub.add_parser("inequality", parents=[common], help="intersection inequality for A, B, mu")
    a.add_argument("--basis", **basis)
    a.add_argument("--A", required=True, **pair)
    a.add_argument("--B", required=True, **pair)
    a.add_argument("--mu", required=True, **pair)
    tor.set_defaults(func=cmd_torus)

    g = sub.add_parser("graph", help="metric graph tools")
    gsub = g.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, help_ in (
        ("rank", "cycle rank"),
        ("girth", "shortest cycle length"),
        ("certificate", "rank <= 32 N^2 / eps^2"),
        ("good-subgraph", "prune to the largest closed subgraph"),
        ("coarse", "amalgamate bivalent vertices"),
    ):
        a = gsub.add_parser(name, parents=[common], help=help_)
        a.add_argument("file", help="graph file, or - for stdin")
        if name == "certificate":
            a.add_argument("--N", type=_fraction, help="strict upper bound on total length")
            a.add_argument("--eps", type=_fraction, help="lower bound on girth")
    g.set_defaults(func=cmd_graph)

    c = sub.add_parser("complex", help="handle complex tools")
    csub = c.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, help_ in (("classify", "handle decomposition and boundary checks"), ("make-good", "run surgeries")):
        a = csub.add_parser(name, parents=[common], help=help_)
        a.add_argument("file", help="complex file, or - for stdin")
    c.set_defaults(func=cmd_complex)

    z = sub.add_parser("znbound", parents=[common], help="length lower bound for presentations of Z_N")
    z.add_argument("N", type=int)
    z.add_argument("--oracle", action="store_true", help="also run the brute-force search")
    z.add_argument("--max-k", type=int, default=2)
    z.add_argument("--max-entry", type=int, default=12)
    z.set_defaults(func=cmd_znbound)

    k = sub.add_parser("constants", parents=[common], help="audited constant chain and R")
    k.add_argument("--bound", choices=("certified", "closed-form"), default="certified",
                   help="Z_N bound used by the solver (default certified)")
    k.add_argument("--ell-min", type=int, default=3)
    k.set_defaults(func=cmd_constants)

    o = sub.add_parser("oracle", parents=[common], help="run brute-force property suites")
    o.add_argument("suite", nargs="*", metavar="SUITE", help=f"any of {', '.join(SUITES)} (default: all)")
    o.add_argument("--timings", action="store_true", help="include wall-clock times (output no longer reproducible)")
    o.set_defaults(func=cmd_oracle)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = Outcome(args.command if not hasattr(args, "action") else f"{args.command} {args.action}")
    try:
        args.func(args, out)
    except UsageError as exc:
        print(f"diambound: error: {exc}", file=sys.stderr)
        return 1
    text = out.render(args.format)
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            print(f"diambound: error: {args.out}: {exc.strerror}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    if out.violations:
        for v in out.violations:
            print(f"certificate violated: {v}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
