"""Command-line entry point.

    glueback validate square.json --mu torus.json
    glueback build --polytope polygon5 --moment-angle
    glueback verify hc --polytope square.json --mu torus.json --enumerate --m 3
    glueback corpus

Exit status: 0 success, 1 invalid input, 2 a check failed, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import traceback
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .coloring import (
    ColoringError,
    GlueSpec,
    SingularAtVertex,
    glue_back_coloring,
    moment_angle_coloring,
    parse_characteristic,
    partial_quotient_coloring,
    rank_info,
    validate_characteristic,
)
from .complex import betti, build_complex, components, write_export
from .corpus import CorpusEntry, builtin_corpus
from .gf2 import BitVector, span
from .polytope import PolytopeError, SchemaError, SimplePolytope, fh_vector, load_polytope
from .verify import CHECKS, SuiteConfig, default_threads, run_suite, suite_document, summarize

EXIT_OK, EXIT_INVALID, EXIT_FAILED, EXIT_INTERNAL = 0, 1, 2, 3


class InputError(Exception):
    """Bad command-line input; reported without a traceback and exit status 1."""


# input helpers


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _builtin_names() -> dict[str, CorpusEntry]:
    return {e.name: e for e in builtin_corpus()}


def resolve_polytope(arg: str, strict: bool = False) -> tuple[SimplePolytope, CorpusEntry | None]:
    """A built-in corpus name or a polytope JSON file."""
    builtins = _builtin_names()
    if arg in builtins and not Path(arg).exists():
        entry = builtins[arg]
        return entry.polytope, entry
    if not Path(arg).exists():
        raise InputError(f"{arg}: neither a file nor a built-in polytope ({', '.join(builtins)})")
    try:
        return load_polytope(arg, strict=strict), None
    except PolytopeError as exc:
        raise type(exc)(f"{arg}: {exc}") from None


def _bit_strings(arg: str) -> Any:
    """JSON file contents, or an inline comma-separated list of bit strings."""
    if Path(arg).exists():
        return _read_json(arg)
    parts = [s.strip() for s in arg.split(",")]
    if all(s and set(s) <= {"0", "1"} for s in parts):
        return parts
    raise InputError(f"{arg}: neither a file nor a comma-separated list of bit strings")


def resolve_mu(p: SimplePolytope, arg: str | None, entry: CorpusEntry | None) -> tuple[str, ...]:
    if arg is None:
        if entry is None:
            raise InputError("--mu is required for a polytope read from a file")
        return entry.mu_labels
    doc = _bit_strings(arg)
    if isinstance(doc, list):
        doc = {"labels": doc}
    return tuple(str(v) for v in parse_characteristic(p, doc).labels)


def parse_v0(arg: str | None) -> tuple[int, ...]:
    if not arg:
        return ()
    try:
        return tuple(sorted(int(x) for x in arg.split(",")))
    except ValueError:
        raise InputError(f"--v0 expects comma-separated facet indices, got {arg!r}") from None


def _lambda_list(doc: Any) -> list[tuple[str, ...]]:
    """One coloring (list of strings), several (list of lists) or {"lambda": ...}."""
    if isinstance(doc, dict):
        if "lambda" not in doc:
            raise ColoringError("coloring document must have a 'lambda' field")
        doc = doc["lambda"]
    if isinstance(doc, list) and all(isinstance(x, str) for x in doc):
        return [tuple(doc)]
    if isinstance(doc, list) and all(isinstance(x, list) and all(isinstance(s, str) for s in x) for x in doc):
        return [tuple(x) for x in doc]
    raise ColoringError("lambda must be a list of bit strings or a list of such lists")


# run configuration


@dataclass
class RunConfig:
    command: str
    polytope: str | None = None
    mu: str | None = None
    v0: tuple[int, ...] = ()
    m: int = 1
    source: str = "enumerate"
    limit: int = 64
    chain_limit: int = 8
    seed: int | None = None
    lambdas: tuple[tuple[str, ...], ...] = ()
    fmt: str = "table"
    threads: int = 1
    strict: bool = False
    checks: tuple[str, ...] = CHECKS
    corpus: str | None = None
    output: str | None = None
    timings: bool = False
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.source not in ("explicit", "enumerate", "sample"):
            raise InputError(f"unknown coloring source {self.source!r}")
        if self.source == "sample" and self.seed is None:
            raise InputError("--sample needs --seed")
        if self.source == "explicit" and not self.lambdas:
            raise InputError("explicit coloring source needs --lambda")
        if self.m < 0:
            raise InputError("--m must be >= 0")
        if self.threads < 1:
            raise InputError("--threads must be >= 1")

    def suite_config(self) -> SuiteConfig:
        return SuiteConfig(
            checks=self.checks,
            m=self.m,
            source=self.source,
            limit=self.limit,
            chain_limit=self.chain_limit,
            seed=self.seed or 0,
            lambdas=self.lambdas,
            threads=self.threads,
        )


def _source_args(args: argparse.Namespace) -> tuple[str, int, tuple[tuple[str, ...], ...]]:
    chosen = [name for name, on in (("enumerate", args.enumerate), ("sample", args.sample is not None), ("explicit", bool(args.lambdas))) if on]
    if len(chosen) > 1:
        raise InputError(f"choose one coloring source, got {' and '.join('--' + c for c in chosen)}")
    if args.sample is not None:
        return "sample", args.sample, ()
    if args.lambdas:
        lams: list[tuple[str, ...]] = []
        for arg in args.lambdas:
            lams.extend(_lambda_list(_bit_strings(arg)))
        return "explicit", args.limit, tuple(lams)
    return "enumerate", args.limit, ()


# output


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _table(rows: Sequence[Sequence[Any]], header: Sequence[str]) -> str:
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _fmt_vec(v: Sequence[int]) -> str:
    return "(" + ",".join(map(str, v)) + ")"


# commands


def cmd_validate(args: argparse.Namespace) -> int:
    status = EXIT_OK
    try:
        p, entry = resolve_polytope(args.polytope, strict=args.strict)
    except (PolytopeError, InputError) as exc:
        print(f"invalid: {exc}")
        return EXIT_INVALID
    print(f"valid, n={p.n} d={p.d} k={p.k}")
    for mu_arg in args.mu or ([None] if entry else []):
        label = mu_arg or f"{p.name} built-in mu"
        try:
            resolve_mu(p, mu_arg, entry)
            print(f"{label}: valid characteristic function")
        except SingularAtVertex as exc:
            print(f"{label}: SingularAtVertex: {exc}")
            status = EXIT_INVALID
        except (ColoringError, PolytopeError, InputError, ValueError) as exc:
            print(f"{label}: invalid: {exc}")
            status = EXIT_INVALID
    return status


def cmd_build(args: argparse.Namespace) -> int:
    p, entry = resolve_polytope(args.polytope, strict=args.strict)
    v0 = parse_v0(args.v0)
    report: dict[str, Any] = {"schema": 1, "polytope": p.name}
    if args.moment_angle:
        coloring = moment_angle_coloring(p)
        report["construction"] = "moment-angle"
    else:
        mu = validate_characteristic(p, resolve_mu(p, args.mu, entry))
        if args.glue_back:
            lams = _lambda_list(_bit_strings(args.glue_back))
            if len(lams) != 1:
                raise InputError("--glue-back takes a single coloring")
            lam = tuple(BitVector.from_string(s) for s in lams[0])
            base = v0 or (entry.base_vertex if entry else ())
            spec = GlueSpec(p, mu, base or p.vertices[-1], lam, args.m if args.m is not None else -1)
            coloring = glue_back_coloring(spec)
            info = rank_info(spec)
            report.update(
                construction="glue-back",
                v0=list(spec.v0),
                m=spec.m,
                rank_lambda=info.rank,
                expected_components=2 ** (spec.m - info.rank),
            )
        elif args.partial_quotient:
            gens = _bit_strings(args.partial_quotient)
            if isinstance(gens, dict):
                gens = gens.get("H", gens.get("generators"))
            if not isinstance(gens, list):
                raise InputError("--partial-quotient expects a list of generators of H")
            H = span([BitVector.from_string(s) for s in gens], p.d)
            coloring = partial_quotient_coloring(moment_angle_coloring(p), H)
            report.update(construction="partial-quotient", H=[str(v) for v in H.basis_vectors()])
        else:
            coloring = mu
            report["construction"] = "small-cover"
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        cx = build_complex(p, coloring)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    b = betti(cx)
    report.update(b.to_json())
    if args.export:
        report["export"] = write_export(cx, args.export, args.export_format)
    if args.format == "json":
        _emit(_dumps(report), args.output)
    else:
        lines = [
            f"{report['construction']} over {p.name}",
            f"cells per dim  {_fmt_vec(b.cells_per_dim)}",
            f"betti          {_fmt_vec(b.betti)}",
            f"hrk            {b.hrk}",
            f"euler          {b.euler}",
            f"components     {components(cx).count}",
        ]
        if "expected_components" in report:
            lines.append(f"2^(m - rank)   {report['expected_components']}")
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _verify_corpus(args: argparse.Namespace) -> list[CorpusEntry]:
    if args.corpus:
        if args.corpus != "builtin":
            raise InputError(f"unknown corpus {args.corpus!r}; only 'builtin' ships with the tool")
        if args.polytope:
            raise InputError("use either --corpus or --polytope")
        return builtin_corpus()
    if not args.polytope:
        raise InputError("verify needs --polytope or --corpus builtin")
    p, entry = resolve_polytope(args.polytope, strict=args.strict)
    labels = resolve_mu(p, args.mu, entry) if args.mu or entry else ()
    name = entry.name if entry and not args.mu else p.name
    return [CorpusEntry(name, p, labels, parse_v0(args.v0) or (entry.v0 if entry else ()))]


def _csv_summary(doc: dict[str, Any]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "entry", "digest", "status", "m", "lambda", "hrk", "message"])
    for r in doc["reports"]:
        inp = r["inputs"]
        lam = inp.get("lambda", inp.get("first", {}).get("lambda", []))
        hrk = r["computed"].get("hrk", "")
        w.writerow([r["check"], inp.get("entry", ""), r["digest"], r["status"], inp.get("m", ""), " ".join(lam), hrk, r["message"]])
    return buf.getvalue()


def _table_summary(doc: dict[str, Any]) -> str:
    per: dict[str, dict[str, int]] = {}
    for r in doc["reports"]:
        c = per.setdefault(r["check"], {"pass": 0, "fail": 0, "n/a": 0, "error": 0})
        c[r["status"]] += 1
    rows = [[name, c["pass"], c["fail"], c["n/a"], c["error"]] for name, c in per.items()]
    out = _table(rows, ["check", "pass", "fail", "n/a", "error"])
    bad = [r for r in doc["reports"] if r["status"] in ("fail", "error")]
    for r in bad:
        out += f"\n{r['status'].upper()} {r['check']} {json.dumps(r['inputs'])}\n  {r['message'] or json.dumps(r['computed'])}\n"
    s = doc["summary"]
    out += f"\n{s['total']} reports: {s['pass']} pass, {s['fail']} fail, {s['n/a']} n/a, {s['error']} error\n"
    return out


def cmd_verify(args: argparse.Namespace) -> int:
    checks = tuple(args.checks)
    if "all" in checks:
        checks = CHECKS
    source, limit, lambdas = _source_args(args)
    cfg = RunConfig(
        command="verify",
        m=args.m if args.m is not None else 1,
        source=source,
        limit=limit,
        chain_limit=args.chain_limit,
        seed=args.seed,
        lambdas=lambdas,
        fmt=args.format,
        threads=args.threads or default_threads(),
        checks=checks,
        output=args.output,
        timings=args.timings,
    )
    if source == "enumerate" and args.enumerate and args.limit_given is None:
        cfg.limit = cfg.chain_limit = 1 << 16  # exhaustive unless a limit was given
    corpus = _verify_corpus(args)
    suite_cfg = cfg.suite_config()
    reports = run_suite(corpus, suite_cfg)
    doc = suite_document(reports, suite_cfg, timings=cfg.timings)
    for r in reports:
        if r.status == "n/a":
            print(f"warning: {r.check} not applicable: {r.message}", file=sys.stderr)
    if cfg.fmt == "json":
        _emit(_dumps(doc), cfg.output)
    elif cfg.fmt == "csv":
        _emit(_csv_summary(doc), cfg.output)
    else:
        _emit(_table_summary(doc), cfg.output)
    return summarize(reports).exit_code


def cmd_corpus(args: argparse.Namespace) -> int:
    rows = []
    docs = []
    for e in builtin_corpus():
        p = e.polytope
        validate_characteristic(p, e.mu_labels)
        h = fh_vector(p).h
        rows.append([e.name, p.n, p.d, p.k, len(p.vertices), " ".join(e.mu_labels), _fmt_vec(h)])
        docs.append({"name": e.name, "polytope": p.to_json(), "mu": list(e.mu_labels), "v0": list(e.base_vertex), "h_vector": list(h)})
    if args.format == "json":
        _emit(_dumps({"schema": 1, "corpus": docs}), args.output)
    else:
        _emit(_table(rows, ["name", "n", "d", "k", "vertices", "mu", "h"]), args.output)
    return EXIT_OK


# parser


class _Parser(argparse.ArgumentParser):
    # usage errors are invalid input (1); argparse would use 2, which means "a check failed" here
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="glueback", description="Glue-back constructions over small covers and checks of their GF(2) homology.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check polytope and characteristic-function files")
    v.add_argument("polytope", help="polytope JSON file or built-in name")
    v.add_argument("--mu", action="append", help="characteristic function file (repeatable)")
    v.add_argument("--strict", action="store_true", help="unknown JSON fields are errors")
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("build", help="build one complex and report its homology")
    b.add_argument("--polytope", required=True, help="polytope JSON file or built-in name")
    b.add_argument("--mu", help="characteristic function file or comma-separated labels")
    mode = b.add_mutually_exclusive_group()
    mode.add_argument("--moment-angle", action="store_true", help="real moment-angle complex Z_P")
    mode.add_argument("--glue-back", metavar="LAMBDA", help="panel coloring file or comma-separated labels")
    mode.add_argument("--partial-quotient", metavar="H", help="generators of H in (Z2)^d, file or comma-separated")
    b.add_argument("--v0", help="base vertex as comma-separated facets, e.g. 3,4")
    b.add_argument("--m", type=int, help="width of the panel colors (default: inferred)")
    b.add_argument("--export", help="write the cell complex to this path")
    b.add_argument("--export-format", choices=("json", "csv"), default="json")
    b.add_argument("--format", choices=("table", "json"), default="table")
    b.add_argument("--output", help="write the report here instead of stdout")
    b.add_argument("--strict", action="store_true", help="unknown JSON fields are errors")
    b.set_defaults(func=cmd_build)

    r = sub.add_parser("verify", help="run checks over colorings")
    r.add_argument("checks", nargs="+", choices=CHECKS + ("all",), metavar="CHECK", help=f"one or more of {', '.join(CHECKS)}, all")
    r.add_argument("--corpus", help="'builtin' for the shipped corpus")
    r.add_argument("--polytope", help="polytope JSON file or built-in name")
    r.add_argument("--mu", help="characteristic function file or comma-separated labels")
    r.add_argument("--v0", help="base vertex as comma-separated facets")
    r.add_argument("--m", type=int, help="width of the panel colors (default 1)")
    r.add_argument("--enumerate", action="store_true", help="all colorings (exhaustive unless --limit is given)")
    r.add_argument("--sample", type=int, metavar="N", help="seeded sample of N colorings; needs --seed")
    r.add_argument("--lambda", dest="lambdas", action="append", metavar="LAMBDA", help="explicit coloring(s), file or comma-separated")
    r.add_argument("--limit", type=int, default=None, help="colorings per entry before sampling kicks in (default 64)")
    r.add_argument("--chain-limit", type=int, default=8, help="colorings per entry for monotone/doublecover (default 8)")
    r.add_argument("--seed", type=int, help="sampling seed")
    r.add_argument("--threads", type=int, help="worker processes (default: GLUEBACK_THREADS or all cores)")
    r.add_argument("--format", choices=("table", "json", "csv"), default="table")
    r.add_argument("--output", help="write the report here instead of stdout")
    r.add_argument("--timings", action="store_true", help="include per-check runtimes (makes output non-reproducible)")
    r.add_argument("--strict", action="store_true", help="unknown JSON fields are errors")
    r.set_defaults(func=cmd_verify)

    c = sub.add_parser("corpus", help="list built-in polytopes and characteristic functions")
    c.add_argument("--format", choices=("table", "json"), default="table")
    c.add_argument("--output")
    c.set_defaults(func=cmd_corpus)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    if args.command == "verify":
        args.limit_given = args.limit
        if args.limit is None:
            args.limit = 64
        if args.limit < 1 or args.chain_limit < 1:
            print("error: --limit and --chain-limit must be positive", file=sys.stderr)
            return EXIT_INVALID
    try:
        return args.func(args)
    except (InputError, PolytopeError, ColoringError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
