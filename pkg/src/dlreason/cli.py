"""Command-line front end.

Exit codes: 0 satisfiable / subsumption holds, 1 unsatisfiable / does not
hold, 2 error (bad input, fragment violation, exhausted budget).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import corpus as corpus_mod
from .domino import DominoSystem, TilingBudgetExceeded, brute_force_tiling, encode_grid
from .optimiser import CACHE_MODES, HEURISTICS, OptimiserConfig, ResourceLimitExceeded, Statistics, flag_matrix
from .reasoner import Reasoner
from .si_engine import STRATEGIES
from .syntax import LOGICS, FragmentError, KnowledgeBase, ParseError, load_kb, parse_kb, read_sexprs
from .syntax.parser import SList, Tok, build_concept

CSV_COLUMNS = ["instance", "flags", "verdict", "branch_points", "backjumps", "bcp_firings", "cache_hits", "max_path", "nodes_created", "millis"]

EXIT_SAT = 0
EXIT_UNSAT = 1
EXIT_ERROR = 2


class CliError(Exception):
    pass


def _config(args) -> OptimiserConfig:
    return OptimiserConfig(
        semantic_branching=args.branching == "semantic",
        bcp=not args.no_bcp,
        backjumping=not args.no_backjump,
        heuristic=args.heuristic,
        caching=args.cache,
        max_nodes=args.budget_nodes,
        max_ms=args.budget_ms,
    )


def _load(path: Optional[str]) -> KnowledgeBase:
    if path is None or path == "-":
        return KnowledgeBase()
    return load_kb(path)


def _concept_text(arg: str) -> str:
    if arg.startswith("@"):
        return Path(arg[1:]).read_text(encoding="utf-8")
    return arg


def _stats_out(stats: Statistics, fmt: Optional[str], instance: str, flags: str, verdict: str, out) -> None:
    if fmt == "text":
        out.write(stats.as_text() + "\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerow(_row(instance, flags, verdict, stats, True))


def _row(instance: str, flags: str, verdict: str, st: Optional[Statistics], timing: bool) -> list:
    if st is None:
        return [instance, flags, verdict, "", "", "", "", "", "", ""]
    millis = f"{st.millis:.3f}" if timing else "0"
    return [instance, flags, verdict, st.branch_points, st.backjumps, st.bcp_firings, st.cache_hits, st.max_path, st.nodes_created, millis]


# -- commands -------------------------------------------------------------------


def cmd_sat(args, out) -> int:
    kb = _load(args.kb)
    r = Reasoner(kb, args.logic, _config(args), args.strategy)
    c = kb.parse(_concept_text(args.concept))
    res = r.satisfiable(c)
    out.write(res.verdict + "\n")
    _stats_out(res.stats, args.stats, args.kb or "-", _config(args).label(), res.verdict, out)
    return EXIT_SAT if res.satisfiable else EXIT_UNSAT


def cmd_subsumes(args, out) -> int:
    kb = _load(args.kb)
    r = Reasoner(kb, args.logic, _config(args), args.strategy)
    ok, res = r.subsumes(kb.parse(_concept_text(args.sub)), kb.parse(_concept_text(args.sup)))
    out.write(("yes" if ok else "no") + "\n")
    _stats_out(res.stats, args.stats, args.kb or "-", _config(args).label(), res.verdict, out)
    return EXIT_SAT if ok else EXIT_UNSAT


def cmd_classify(args, out) -> int:
    kb = _load(args.kb)
    r = Reasoner(kb, args.logic, _config(args), args.strategy)
    try:
        result = r.classify(verify=args.verify)
    except AssertionError as e:
        raise CliError(str(e)) from e
    out.write(result.to_text())
    if args.stats == "text":
        out.write(f"names={len(kb.concept_names)}\naxioms={kb.axiom_count}\ntests={result.tests}\n")
        if result.verified is not None:
            out.write(f"verified={result.verified}\n")
        out.write(f"millis={result.millis:.3f}\n")
    elif args.stats == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for name, st in result.stats:
            w.writerow(_row(name, _config(args).label(), "", st, True))
    elif result.verified is not None:
        out.write(f"; verified {result.verified} edges\n")
    return EXIT_SAT


def read_query(path: Path) -> dict:
    q = {"logic": None, "strategy": None, "kind": None, "args": []}
    for form in read_sexprs(path.read_text(encoding="utf-8")):
        if not isinstance(form, SList) or not form.items or not isinstance(form.items[0], Tok):
            raise ParseError("expected (logic ..), (strategy ..), (sat C) or (subsumes C D)", form.line, form.col)
        head, rest = form.items[0].text, form.items[1:]
        if head in ("logic", "strategy") and len(rest) == 1 and isinstance(rest[0], Tok):
            q[head] = rest[0].text
        elif head == "sat" and len(rest) == 1:
            q["kind"], q["args"] = "sat", [build_concept(rest[0])]
        elif head == "subsumes" and len(rest) == 2:
            q["kind"], q["args"] = "subsumes", [build_concept(rest[0]), build_concept(rest[1])]
        else:
            raise ParseError(f"unknown query form {head!r}", form.line, form.col)
    if q["kind"] is None:
        raise ParseError(f"{path}: no (sat ..) or (subsumes ..) query", 1, 1)
    return q


def run_instance(kb_path: str, q_path: str, config: OptimiserConfig, logic: str, strategy: str) -> tuple[str, Optional[Statistics]]:
    """Verdict ('sat', 'unsat' or 'budget') and statistics for one corpus instance."""
    kb = load_kb(kb_path)
    q = read_query(Path(q_path))
    r = Reasoner(kb, q["logic"] or logic, config, q["strategy"] or strategy)
    try:
        if q["kind"] == "sat":
            res = r.satisfiable(kb.expand(q["args"][0]))
            return res.verdict, res.stats
        ok, res = r.subsumes(*q["args"])
        return ("unsat" if ok else "sat"), res.stats
    except ResourceLimitExceeded:
        return "budget", None


def corpus_instances(directory) -> list[tuple[str, str, str]]:
    d = Path(directory)
    out = []
    for q in sorted(d.glob("*.q")):
        kb = q.with_suffix(".kb")
        if not kb.exists():
            raise CliError(f"{q}: missing {kb.name}")
        out.append((q.stem, str(kb), str(q)))
    return out


def _bench_job(job):
    name, kb, q, config, logic, strategy, timing = job
    verdict, st = run_instance(kb, q, config, logic, strategy)
    return _row(name, config.label(), verdict, st, timing)


def bench_rows(directory, configs: Sequence[OptimiserConfig], logic: str = "shif", strategy: str = "unbounded", timing: bool = True, jobs: int = 1) -> list[list]:
    """One row per (instance, configuration), sorted."""
    work = [(n, kb, q, c, logic, strategy, timing) for n, kb, q in corpus_instances(directory) for c in configs]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_bench_job, work, chunksize=8))
    else:
        rows = [_bench_job(w) for w in work]
    return sorted(rows, key=lambda r: (r[0], r[1]))


def cmd_bench(args, out) -> int:
    base = _config(args)
    if args.matrix == "full":
        configs = [
            OptimiserConfig(c.semantic_branching, c.bcp, c.backjumping, c.heuristic, base.caching, base.max_nodes, base.max_ms)
            for c in flag_matrix()
        ]
    else:
        configs = [base]
    rows = bench_rows(args.corpus, configs, args.logic, args.strategy, timing=not args.no_timing, jobs=args.jobs)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(rows)
    return EXIT_SAT


def cmd_gen_corpus(args, out) -> int:
    insts = corpus_mod.default_corpus(args.seed, args.count)
    n = corpus_mod.write_corpus(args.directory, insts)
    out.write(f"wrote {n} instances to {args.directory}\n")
    return EXIT_SAT


def _pairs(text: str) -> set:
    out = set()
    for item in filter(None, (t.strip() for t in text.split(","))):
        a, sep, b = item.partition(":")
        if not sep:
            raise CliError(f"bad tile pair {item!r}; expected a:b")
        out.add((a, b))
    return out


def cmd_domino(args, out) -> int:
    tiles = [t for t in (x.strip() for x in args.tiles.split(",")) if t]
    sys_ = DominoSystem(tuple(tiles), _pairs(args.horizontal), _pairs(args.vertical))
    if args.tile is None:
        out.write(encode_grid(sys_))
        return EXIT_SAT
    try:
        t = brute_force_tiling(sys_, args.tile)
    except TilingBudgetExceeded as e:
        raise CliError(str(e)) from e
    if t is None:
        out.write(f"no {args.tile}x{args.tile} tiling\n")
        return EXIT_UNSAT
    for n in reversed(range(args.tile)):
        out.write(" ".join(str(t[(m, n)]) for m in range(args.tile)) + "\n")
    return EXIT_SAT


# -- argument parsing -------------------------------------------------------------


def _engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--logic", choices=LOGICS, default="shif")
    p.add_argument("--strategy", choices=STRATEGIES, default="unbounded", help="SI only")
    p.add_argument("--no-bcp", action="store_true")
    p.add_argument("--no-backjump", action="store_true")
    p.add_argument("--branching", choices=("semantic", "syntactic"), default="semantic")
    p.add_argument("--heuristic", choices=HEURISTICS, default="none")
    p.add_argument("--cache", choices=CACHE_MODES, default="off")
    p.add_argument("--budget-nodes", type=int, default=None, metavar="N")
    p.add_argument("--budget-ms", type=float, default=None, metavar="N")
    p.add_argument("--stats", choices=("text", "csv"), default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dlreason", description="SI / SHIF satisfiability, subsumption and classification")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sat", help="is a concept satisfiable w.r.t. a KB")
    p.add_argument("kb", help="KB file, or - for none")
    p.add_argument("concept", help="concept text, or @file")
    _engine_flags(p)
    p.set_defaults(fn=cmd_sat)

    p = sub.add_parser("subsumes", help="is SUB subsumed by SUP w.r.t. a KB")
    p.add_argument("kb")
    p.add_argument("sub")
    p.add_argument("sup")
    _engine_flags(p)
    p.set_defaults(fn=cmd_subsumes)

    p = sub.add_parser("classify", help="compute the subsumption hierarchy of the named concepts")
    p.add_argument("kb")
    p.add_argument("--verify", action="store_true", help="re-check every reported edge")
    _engine_flags(p)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("bench", help="run a corpus directory (.kb + .q per instance)")
    p.add_argument("corpus")
    p.add_argument("--matrix", choices=("full", "single"), default="full", help="all 40 flag combinations, or just the given flags")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-timing", action="store_true", help="print 0 for millis so rows are reproducible")
    _engine_flags(p)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("gen-corpus", help="write the default random corpus")
    p.add_argument("directory")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--count", type=int, default=60, help="random instances per logic")
    p.set_defaults(fn=cmd_gen_corpus)

    p = sub.add_parser("domino", help="emit the grid encoding of a domino system, or tile a k x k grid")
    p.add_argument("--tiles", required=True, help="comma-separated tile names")
    p.add_argument("--horizontal", default="", help="a:b,... pairs")
    p.add_argument("--vertical", default="", help="a:b,... pairs")
    p.add_argument("--tile", type=int, default=None, metavar="K", help="brute-force a K x K tiling instead")
    p.set_defaults(fn=cmd_domino)
    return ap


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_SAT
    try:
        return args.fn(args, out)
    except ParseError as e:
        err.write(f"error: parse error at {e}\n")
    except FragmentError as e:
        err.write(f"error: {e}\n")
    except ResourceLimitExceeded as e:
        err.write(f"error: resource limit exceeded: {e}\n")
    except (CliError, ValueError, OSError) as e:
        err.write(f"error: {e}\n")
    return EXIT_ERROR


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, str, str]:
    """main() with captured output, for tests and scripting."""
    o, e = io.StringIO(), io.StringIO()
    code = main(argv, o, e)
    return code, o.getvalue(), e.getvalue()


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
