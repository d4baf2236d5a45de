"""Command-line front end.

Exit codes: 0 success, 2 malformed input, 3 graph not connected,
4 linear-scale overflow, 5 a universal check was violated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from collections import Counter
from dataclasses import asdict, dataclass

from . import kite_math as km
from . import verify
from .enumeration import NATIVE_MAX, ingest_graph6
from .errors import (Graph6Error, GraphError, KiteRatioError, NotConnectedError,
                     OverflowDomainError)
from .graph_core import KiteParams, build_kite, build_named, decode_graph6
from .spectral import DEFAULT_TOL, perron, principal_ratio

EXIT_MALFORMED = 2
EXIT_NOT_CONNECTED = 3
EXIT_OVERFLOW = 4
EXIT_VIOLATED = 5

LOG_MODE_K = 100


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int | None = None
    k: int | None = None
    input_path: str | None = None
    tol: float = DEFAULT_TOL
    mode: str = "auto"
    chunk: tuple[int, int] | None = None
    output: str = "table"
    strict: bool = True

    def __post_init__(self):
        if not 0 < self.tol <= 1e-3:
            raise ValueError(f"--tol must lie in (0, 1e-3], got {self.tol}")
        if self.chunk is not None:
            i, m = self.chunk
            if not 0 <= i < m:
                raise ValueError(f"--chunk i/m needs 0 <= i < m, got {i}/{m}")


def _parse_chunk(text: str) -> tuple[int, int]:
    try:
        i, m = (int(t) for t in text.split("/"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected i/m, got {text!r}") from None
    return i, m


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _open_input(path: str):
    return sys.stdin if path == "-" else open(path, encoding="ascii")


# -- rendering ---------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    if isinstance(v, (list, tuple)):
        return " ".join(str(t) for t in v)
    return str(v)


def _emit(rows: list[dict], output: str, out) -> None:
    if output == "json":
        for row in rows:
            out.write(json.dumps(row, sort_keys=False) + "\n")
    elif output == "csv":
        if not rows:
            return
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: _fmt(v) for k, v in row.items()})
        out.write(buf.getvalue())
    else:
        for i, row in enumerate(rows):
            if i:
                out.write("\n")
            width = max(len(k) for k in row)
            for key, val in row.items():
                out.write(f"{key:<{width}}  {_fmt(val)}\n")


# -- commands ----------------------------------------------------------------

def _graph_from_args(args):
    if args.graph6 is not None:
        return decode_graph6(args.graph6, long_form=True)
    if args.builtin == "kite":
        if args.k is None:
            raise GraphError("--builtin kite needs --k")
        return build_kite(KiteParams(args.n, args.k))
    return build_named(args.builtin, args.n)


def cmd_ratio(args, out) -> int:
    g = _graph_from_args(args)
    pr = perron(g, args.tol)
    rep = principal_ratio(g, args.tol, pr=pr)
    _emit([{
        "n": g.n,
        "gamma": rep.gamma,
        "q1": pr.q1,
        "vmin": rep.vmin,
        "vmax": rep.vmax,
        "path": list(rep.path),
        "pendant_prefix": rep.pendant_prefix,
        "residual": pr.residual,
        "log_space_recommended": rep.log_space_recommended,
    }], args.output, out)
    return 0


def _mode_for(mode: str, k: int) -> str:
    if mode == "auto":
        return "log" if k > LOG_MODE_K else "linear"
    return mode


def cmd_kite(args, out) -> int:
    mode = _mode_for(args.mode, args.k)
    q = km.kite_q1(args.n, args.k, args.tol)
    val = km.kite_gamma(args.n, args.k, mode, args.tol)
    row = {"n": args.n, "k": args.k, "q1": q}
    row["log_gamma" if mode == "log" else "gamma"] = val
    _emit([row], args.output, out)
    return 0


def cmd_best_kite(args, out) -> int:
    k, lg = km.best_kite_k(args.n, "log", args.tol)
    row = {"n": args.n, "k_star": k, "log_gamma": lg}
    if args.mode != "log" and k <= LOG_MODE_K:
        row["gamma"] = km.kite_gamma(args.n, k, "linear", args.tol)
    _emit([row], args.output, out)
    return 0


def _ingest(path, strict):
    with _open_input(path) as fh:
        for item in ingest_graph6(fh, strict=strict, long_form=True):
            yield item.graph


def cmd_search(args, out) -> int:
    if args.input:
        source = list(_ingest(args.input, args.strict))
        rec = verify.extremal_search(args.n, source, tol=args.tol)
    else:
        if args.n > NATIVE_MAX:
            raise GraphError(f"native search limited to n <= {NATIVE_MAX}; pass --input graph6")
        chunks, only = (args.chunk[1], args.chunk[0]) if args.chunk else (args.chunks, None)
        rec = verify.extremal_search(args.n, chunks=chunks, only_chunk=only,
                                     labeled=args.labeled, jobs=args.jobs, tol=args.tol)
    _emit_record(rec, args, out)
    return 0


def _emit_record(rec, args, out):
    if args.output == "json":
        out.write(json.dumps(rec.to_dict(ranking=not args.no_ranking)) + "\n")
        return
    summary = rec.to_dict(ranking=False)
    if args.output == "csv":
        _emit([summary], "csv", out)
        return
    _emit([summary], "table", out)
    if not args.no_ranking:
        out.write("\nrank  gamma                   q1                      graph6\n")
        for i, e in enumerate(rec.ranking[: args.top], start=1):
            out.write(f"{i:<4}  {e.gamma!r:<22}  {e.q1!r:<22}  {e.graph6}\n")


def cmd_merge(args, out) -> int:
    records = []
    for path in args.records:
        with _open_input(path) as fh:
            for line in fh:
                if line.strip():
                    d = json.loads(line)
                    ranking = tuple(verify.RankEntry(**e) for e in d["ranking"])
                    records.append(verify.ExtremalRecord(
                        d["n"], d["gamma_max"], d["argmax_graph6"], d["is_kite"], d["kite_k"],
                        d["corpus_size"], d["best_kite_k"], d["best_kite_gamma"], ranking))
    _emit_record(verify.merge_records(records, args.tol), args, out)
    return 0


def cmd_check(args, out) -> int:
    if args.input:
        graphs = [g for g in _ingest(args.input, args.strict)]
    else:
        graphs = None
    if args.suite == "universal":
        if graphs is None:
            graphs = verify.universal_corpus(args.n_max)
        findings = verify.run_universal(graphs, args.tol)
    else:
        findings = []
        if graphs is None:
            graphs = []
            for n in range(4, args.n_max + 1):
                rec = verify.extremal_search(n, tol=args.tol)
                graphs.append(decode_graph6(rec.argmax_graph6))
        for g in graphs:
            findings.extend(verify.maximizer_findings(g, args.tol))
        findings = verify.sort_findings(findings)
    _emit_findings(findings, args, out)
    return EXIT_VIOLATED if any(f.status == verify.VIOLATED for f in findings) else 0


def _emit_findings(findings, args, out):
    if args.output in ("json", "csv"):
        _emit([f.to_dict() for f in findings], args.output, out)
        return
    counts = Counter((f.lemma_id, f.status) for f in findings)
    out.write("lemma_id                  status           count\n")
    for (lemma, status), c in sorted(counts.items()):
        out.write(f"{lemma:<24}  {status:<15}  {c}\n")
    shown = [f for f in findings if f.status in (verify.VIOLATED, verify.DIAGNOSTIC)]
    for f in shown:
        out.write(f"\n{f.status}  {f.lemma_id}  {f.graph_id}\n  margin={f.margin!r}  "
                  f"satisfied={f.satisfied}  {f.details}\n")


def cmd_scan(args, out) -> int:
    rows = verify.asymptotic_scan(args.n, args.tol)
    _emit([asdict(r) for r in rows], args.output, out)
    return 0


def cmd_probe(args, out) -> int:
    findings = verify.random_probes(args.count, args.n_max, args.seed, args.tol)
    _emit_findings(findings, args, out)
    return EXIT_VIOLATED if any(f.status == verify.VIOLATED for f in findings) else 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kiteratio", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL,
                        help="Perron residual tolerance, in (0, 1e-3]")
        sp.add_argument("--output", choices=("table", "json", "csv"), default="table")
        return sp

    sp = common(sub.add_parser("ratio", help="principal ratio of one graph"))
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph6")
    src.add_argument("--builtin", choices=("path", "cycle", "complete", "star", "kite"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.set_defaults(func=cmd_ratio)

    sp = common(sub.add_parser("kite", help="gamma of a kite from the closed form"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--mode", choices=("auto", "linear", "log"), default="auto")
    sp.set_defaults(func=cmd_kite)

    sp = common(sub.add_parser("best-kite", help="kite path length maximizing gamma"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--mode", choices=("auto", "linear", "log"), default="auto")
    sp.set_defaults(func=cmd_best_kite)

    def corpus(sp):
        sp.add_argument("--input", metavar="PATH", help="graph6 file, '-' for stdin")
        sp.add_argument("--lenient", dest="strict", action="store_false",
                        help="skip undecodable graph6 lines instead of aborting")

    def record_out(sp):
        sp.add_argument("--no-ranking", action="store_true")
        sp.add_argument("--top", type=int, default=10, help="ranking rows in table output")

    sp = common(sub.add_parser("search", help="exact gamma-maximizer of order n"))
    sp.add_argument("--n", type=int, required=True)
    corpus(sp)
    sp.add_argument("--chunk", type=_parse_chunk, metavar="i/m",
                    help="evaluate only chunk i of m (merge partial JSON with 'merge')")
    sp.add_argument("--chunks", type=int, default=1, help="split the native run into chunks")
    sp.add_argument("--jobs", type=int, default=verify.default_jobs())
    sp.add_argument("--labeled", action="store_true",
                    help="every labelled graph instead of one per isomorphism class")
    record_out(sp)
    sp.set_defaults(func=cmd_search)

    sp = common(sub.add_parser("merge", help="merge partial search records (JSON lines)"))
    sp.add_argument("records", nargs="+", metavar="FILE")
    record_out(sp)
    sp.set_defaults(func=cmd_merge)

    sp = common(sub.add_parser("check", help="run an inequality suite"))
    sp.add_argument("--suite", choices=("universal", "maximizer"), default="universal")
    sp.add_argument("--n-max", type=int, default=6)
    corpus(sp)
    sp.set_defaults(func=cmd_check)

    sp = common(sub.add_parser("scan", help="best-kite asymptotic diagnostics"))
    sp.add_argument("--n", type=_parse_int_list, required=True, help="e.g. 50,100,200")
    sp.set_defaults(func=cmd_scan)

    sp = common(sub.add_parser("probe", help="random Rayleigh perturbation probes"))
    sp.add_argument("--count", type=int, default=500)
    sp.add_argument("--n-max", type=int, default=12)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_probe)
    return p


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        RunConfig(
            command=args.command,
            n=getattr(args, "n", None) if not isinstance(getattr(args, "n", None), list) else None,
            k=getattr(args, "k", None),
            input_path=getattr(args, "input", None),
            tol=args.tol,
            mode=getattr(args, "mode", "auto"),
            chunk=getattr(args, "chunk", None),
            output=args.output,
            strict=getattr(args, "strict", True),
        )
    except ValueError as exc:
        parser.error(str(exc))
    if args.command == "ratio" and args.builtin and args.n is None:
        parser.error("--builtin needs --n")
    try:
        return args.func(args, out)
    except NotConnectedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONNECTED
    except OverflowDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except (Graph6Error, GraphError, KiteRatioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
