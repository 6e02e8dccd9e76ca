"""Command-line entry point: ddr <command> [options].

Commands:
    index build     Build and save an index over a library dump.
    verify          Verify candidate names (one per line) against a saved index.
    extract         Extract candidate dependencies from formal code, and resolve them if an index is given.
    dataset build   Label a corpus with verified dependencies.
    dataset stats   Per-difficulty dependency statistics of a labeled dataset.
    dataset split   Difficulty-based train/test splits of a labeled dataset.
    eval            Score predictions against one or more labeled test sets.
    baseline        Lexical select-based baseline predictions for a labeled test set.
    bench           Time index construction and verification against the linear scan.
    serve           Run the HTTP verification service.

Structured output is JSON on stdout; --pretty prints tables where there is one. Logs go to stderr.
Exit status: 0 on success, 1 on data errors, 2 on usage errors.
"""
import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Iterable, List, Optional, TextIO

import structlog

from ddr.bench import BRUTE_FORCE_SAMPLE, bench
from ddr.calc.dependency_index import build_index
from ddr.calc.extraction import extract_candidates, load_keywords, resolve_dependencies
from ddr.calc.lexical import lexical_predictions
from ddr.calc.metrics import EvaluationReport, evaluate_sets, format_table, write_csv
from ddr.calc.suffix_array import BUILDERS, DEFAULT_BUILDER
from ddr.dataset.corpus import build_dataset, read_labeled
from ddr.dataset.splits import SAMPLES_PER_LEVEL, split_corpus, write_splits
from ddr.dataset.stats import compute_stats, format_stats
from ddr.dataset.synthetic import synthetic_library
from ddr.errors import BindError, IndexLoadError
from ddr.knowledge.codecs import CODECS, read_jsonl, write_jsonl
from ddr.knowledge.index_file import load_index, save_index
from ddr.knowledge.library import JSONL, TEXT, read_library
from ddr.model import AggregateScore, DependencyList, IndexInfo, LevelStats, MatchResult, Prediction, RetrievalScore

logger = structlog.get_logger(__name__)


def configure_logging(verbose: bool = False):
    """Key/value logs to stderr, so stdout carries only command output."""
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(logging.DEBUG if verbose else logging.INFO),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
    )


def _emit(doc, out: TextIO):
    out.write(json.dumps(doc, ensure_ascii=False, indent=2))
    out.write("\n")


def _open_input(path: str):
    return sys.stdin if path == "-" else open(path, encoding="utf-8")


def _read_lines(path: str) -> List[str]:
    f = _open_input(path)
    try:
        return [line.strip() for line in f if line.strip()]
    finally:
        if f is not sys.stdin:
            f.close()


def _index_build(args, out: TextIO) -> int:
    index = build_index(read_library(args.library, args.format), builder=args.builder)
    save_index(index, args.out)
    _emit(CODECS[IndexInfo].encode(index.info()), out)
    return 0


def _verify(args, out: TextIO) -> int:
    index = load_index(args.index)
    results = index.verify_batch(_read_lines(args.candidates))
    if args.pretty:
        for r in results:
            out.write(f"{r.query}\t{r.status.value}\t{' '.join(r.resolved)}"
                      + (f"\t({r.error})" if r.error else "") + "\n")
    else:
        _emit([CODECS[MatchResult].encode(r) for r in results], out)
    return 0


def _extract(args, out: TextIO) -> int:
    f = _open_input(args.code)
    try:
        code = f.read()
    finally:
        if f is not sys.stdin:
            f.close()
    cs = extract_candidates(code, load_keywords(args.keywords))
    doc = {"candidates": list(cs.candidates)}
    if args.index:
        doc.update(CODECS[DependencyList].encode(resolve_dependencies(load_index(args.index), cs)))
    _emit(doc, out)
    return 0


def _dataset_build(args, out: TextIO) -> int:
    index = load_index(args.index)
    errors = []
    with open(args.corpus, encoding="utf-8") as corpus, open(args.out, "w", encoding="utf-8", newline="\n") as sink:
        report = build_dataset(index, corpus, sink, jobs=args.jobs, keep_formal=args.keep_formal, strict=args.strict,
                               keywords=load_keywords(args.keywords), errors=errors, progress=args.progress)
    doc = CODECS[type(report)].encode(report)
    doc["errors"] = [{"line": e.line_no, "reason": e.reason} for e in errors]
    _emit(doc, out)
    return 0


def _load_labeled(path: str):
    with open(path, encoding="utf-8") as f:
        return list(read_labeled(f))


def _dataset_stats(args, out: TextIO) -> int:
    stats = compute_stats(_load_labeled(args.labeled))
    if args.pretty:
        out.write(format_stats(stats) + "\n")
    else:
        _emit([CODECS[LevelStats].encode(level) for level in stats], out)
    return 0


def _dataset_split(args, out: TextIO) -> int:
    splits = split_corpus(_load_labeled(args.labeled), seed=args.seed, per_level=args.per_level)
    paths = write_splits(splits, args.out_dir)
    sizes = {"train": len(splits.train), **{name: len(rows) for name, rows in splits.tests.items()}}
    _emit({name: {"path": str(path), "count": sizes[name]} for name, path in paths.items()}, out)
    return 0


def encode_report(report: EvaluationReport) -> dict:
    """The evaluation report document: {per_sample: [...], mean: {...}, std: {...}, n}."""
    score_codec = CODECS[RetrievalScore]
    doc = {"per_sample": [{"id": sample_id, **score_codec.encode(score)} for sample_id, score in report.per_sample]}
    doc.update(CODECS[AggregateScore].encode(report.aggregate))
    if report.missing_predictions:
        doc["missing_predictions"] = report.missing_predictions
    return doc


def _eval(args, out: TextIO) -> int:
    with open(args.pred, encoding="utf-8") as f:
        predictions = list(read_jsonl(f, CODECS[Prediction]))
    gold_sets = {Path(path).stem: _load_labeled(path) for path in args.gold}
    reports = evaluate_sets(predictions, gold_sets)
    if args.csv:
        if len(reports) != 1:
            raise ValueError("--csv takes a single --gold file")
        with open(args.csv, "w", encoding="utf-8", newline="") as f:
            write_csv(next(iter(reports.values())), f)
    if args.pretty:
        out.write(format_table(reports) + "\n")
    elif len(reports) == 1:
        _emit(encode_report(next(iter(reports.values()))), out)
    else:
        _emit({name: encode_report(report) for name, report in reports.items()}, out)
    return 0


def _baseline(args, out: TextIO) -> int:
    predictions = lexical_predictions(read_library(args.library), _load_labeled(args.gold), args.k,
                                      progress=args.progress)
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        write_jsonl((CODECS[Prediction].encode(p) for p in predictions), f)
    _emit({"retriever": "lexical", "k": args.k, "predictions": len(predictions), "path": args.out}, out)
    return 0


def _bench(args, out: TextIO) -> int:
    library = synthetic_library(args.synthetic, seed=args.seed) if args.synthetic else read_library(args.library)
    report = bench(library, args.queries, seed=args.seed, builder=args.builder, compare=not args.no_compare,
                   brute_force_sample=args.brute_force_sample)
    doc = CODECS[type(report)].encode(report)
    if args.pretty:
        out.write("\n".join(f"{k:>32}  {v}" for k, v in doc.items()) + "\n")
    else:
        _emit(doc, out)
    return 0


def _serve(args, out: TextIO) -> int:
    from ddr.service.app import serve
    from ddr.service.settings import ServiceSettings

    env = dict(os.environ)
    flags = {
        "DDR_GENERATOR_URL": args.generator_url,
        "DDR_GENERATOR_STUB": args.generator_stub,
        "DDR_TIMEOUT_MS": None if args.timeout_ms is None else str(args.timeout_ms),
    }
    if args.generator_url or args.generator_stub:
        env.pop("DDR_GENERATOR_URL", None)
        env.pop("DDR_GENERATOR_STUB", None)
    env.update({k: v for k, v in flags.items() if v is not None})
    settings = ServiceSettings.from_env(
        env,
        index_path=args.index,
        bind_addr=args.bind,
        max_concurrency=args.max_concurrency,
        bearer_token=args.bearer_token,
    )
    serve(settings)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="debug logging")
    common.add_argument("--pretty", action="store_true", help="human-readable output instead of JSON")
    common.add_argument("--progress", action="store_true", help="show a progress counter on stderr")

    parser = argparse.ArgumentParser(prog="ddr", description="Dependency verification for formal math libraries.")
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    index = commands.add_parser("index", help="index operations").add_subparsers(dest="action", required=True)
    p = index.add_parser("build", parents=[common], help="build and save an index")
    p.add_argument("--library", required=True, help="library dump, JSON Lines or one identifier per line")
    p.add_argument("--format", choices=[JSONL, TEXT], help="library format (detected if omitted)")
    p.add_argument("--out", required=True, help="index file to write")
    p.add_argument("--builder", choices=BUILDERS.names(), default=DEFAULT_BUILDER)
    p.set_defaults(handler=_index_build)

    p = commands.add_parser("verify", parents=[common], help="verify candidate names")
    p.add_argument("--index", required=True)
    p.add_argument("--candidates", required=True, help="file with one candidate per line, or - for stdin")
    p.set_defaults(handler=_verify)

    p = commands.add_parser("extract", parents=[common], help="extract candidate dependencies from formal code")
    p.add_argument("--code", default="-", help="file with formal code, or - for stdin")
    p.add_argument("--index", help="resolve candidates against this index")
    p.add_argument("--keywords", help="keyword blacklist file (default: Lean 4 keywords)")
    p.set_defaults(handler=_extract)

    dataset = commands.add_parser("dataset", help="dataset operations").add_subparsers(dest="action", required=True)
    p = dataset.add_parser("build", parents=[common], help="label a corpus with verified dependencies")
    p.add_argument("--index", required=True)
    p.add_argument("--corpus", required=True, help="corpus JSON Lines")
    p.add_argument("--out", required=True, help="labeled JSON Lines to write")
    p.add_argument("--jobs", type=int, default=1, help="labeling worker processes")
    p.add_argument("--keep-formal", action="store_true", help="retain formal_statement in the output")
    p.add_argument("--strict", action="store_true", help="fail on the first malformed line")
    p.add_argument("--keywords", help="keyword blacklist file (default: Lean 4 keywords)")
    p.set_defaults(handler=_dataset_build)

    p = dataset.add_parser("stats", parents=[common], help="per-difficulty dependency statistics")
    p.add_argument("--labeled", required=True)
    p.set_defaults(handler=_dataset_stats)

    p = dataset.add_parser("split", parents=[common], help="difficulty-based train/test splits")
    p.add_argument("--labeled", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--per-level", type=int, default=SAMPLES_PER_LEVEL)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(handler=_dataset_split)

    p = commands.add_parser("eval", parents=[common], help="score predictions against labeled test sets")
    p.add_argument("--pred", required=True, help="predictions JSON Lines: {id, dependencies}")
    p.add_argument("--gold", required=True, nargs="+", help="labeled test set(s)")
    p.add_argument("--csv", help="also write per-sample scores as CSV (single test set)")
    p.set_defaults(handler=_eval)

    p = commands.add_parser("baseline", parents=[common], help="lexical select-based baseline predictions")
    p.add_argument("--library", required=True)
    p.add_argument("--gold", required=True, help="labeled test set to predict for")
    p.add_argument("--k", type=int, default=5, help="items retrieved per sample")
    p.add_argument("--out", required=True, help="predictions JSON Lines to write")
    p.set_defaults(handler=_baseline)

    p = commands.add_parser("bench", parents=[common], help="benchmark construction and verification")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--library", help="library dump")
    source.add_argument("--synthetic", type=int, help="generate a synthetic library of this many items")
    p.add_argument("--queries", type=int, default=10_000, help="M, number of queries")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--builder", choices=BUILDERS.names(), default=DEFAULT_BUILDER)
    p.add_argument("--no-compare", action="store_true", help="skip the linear-scan comparison")
    p.add_argument("--brute-force-sample", type=int, default=BRUTE_FORCE_SAMPLE)
    p.set_defaults(handler=_bench)

    p = commands.add_parser("serve", parents=[common], help="run the HTTP service")
    p.add_argument("--index", help="index file (env DDR_INDEX_PATH)")
    p.add_argument("--bind", help="host:port (env DDR_BIND_ADDR)")
    generator = p.add_mutually_exclusive_group()
    generator.add_argument("--generator-url", help="HTTP candidate generator endpoint (env DDR_GENERATOR_URL)")
    generator.add_argument("--generator-stub", help="JSON stub mapping for candidates (env DDR_GENERATOR_STUB)")
    p.add_argument("--timeout-ms", type=int, help="generator timeout in milliseconds (env DDR_TIMEOUT_MS)")
    p.add_argument("--max-concurrency", type=int, help="cap on concurrent generator calls (env DDR_MAX_CONCURRENCY)")
    p.add_argument("--bearer-token", help="required bearer token (env DDR_BEARER_TOKEN)")
    p.set_defaults(handler=_serve)

    return parser


def run(argv: Optional[Iterable[str]] = None, out: TextIO = None) -> int:
    """Runs one command. Returns the process exit status."""
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(None if argv is None else list(argv))
    except SystemExit as e:
        return 2 if e.code else 0
    configure_logging(args.verbose)
    try:
        return args.handler(args, out)
    except (ValueError, OSError, IndexLoadError, BindError) as e:
        logger.error("command failed", command=args.command, error=str(e))
        print(f"ddr: error: {e}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
