"""Command line front end: ``botlint check|corpus|metrics|compare``."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from pathlib import Path

from botlint.analysis import analyze_path
from botlint.corpus import aggregate, analyze_corpus, compare, discover
from botlint.errors import BotlintError, EmptyCorpus, LoadError
from botlint.metrics import METRIC_NAMES
from botlint.patterns import CATEGORY_GROUPS, category_of, ids_for
from botlint.registry import Registry, default_registry
from botlint.reporting import HintCatalog, default_catalog, dumps_json, serialize_report

log = logging.getLogger("botlint")

EXIT_OK, EXIT_BUGS, EXIT_ERROR = 0, 1, 2


def _categories(text: str) -> tuple:
    names = [t.strip().lower() for t in text.split(",") if t.strip()]
    unknown = [n for n in names if n not in CATEGORY_GROUPS]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown group(s): {', '.join(unknown)}")
    return tuple(CATEGORY_GROUPS[n] for n in names)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--include", type=_categories, default=_categories("bugs,smells,perfumes"),
                        help="comma separated: bugs,smells,perfumes")
    common.add_argument("--lang", default=os.environ.get("BOTLINT_LANG", "en"), help="hint language (en, de)")
    common.add_argument("--registry", help="opcode registry JSON overriding the built-in table")
    common.add_argument("--hints", help="hint catalog JSON overriding the built-in one")
    common.add_argument("--output", help="write the report to this file instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for directory runs")
    common.add_argument("--filter-robot-code", action="store_true",
                        help="skip projects whose robot actors contain no scripts")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="botlint", description="Find bug patterns, code smells and code perfumes "
                                     "in mBlock robot programs (Codey Rocky, mBot).")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("check", parents=[common], help="analyze one project")
    p.add_argument("path")
    p = sub.add_parser("corpus", parents=[common], help="aggregate pattern counts over a directory")
    p.add_argument("dir")
    p = sub.add_parser("metrics", parents=[common], help="code metrics per project")
    p.add_argument("path")
    p = sub.add_parser("compare", parents=[common], help="compare metrics of two corpora")
    p.add_argument("dir_a")
    p.add_argument("dir_b")
    p.add_argument("--metrics", default=",".join(METRIC_NAMES),
                   help="comma separated metric names (also bugs, smells, perfumes)")
    p.add_argument("--per-block", action="store_true", help="divide pattern counts by block count")
    return parser


def _emit(args, data: bytes) -> None:
    if args.output:
        Path(args.output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _registry(args) -> Registry:
    return Registry.load(args.registry) if args.registry else default_registry()


def cmd_check(args) -> int:
    catalog = HintCatalog.load(args.hints) if args.hints else default_catalog()
    try:
        result = analyze_path(args.path, _registry(args), args.include)
    except LoadError as exc:
        log.error("%s", exc)
        return EXIT_ERROR
    for w in result.warnings:
        log.warning("%s [%s] %s", w.target, w.block_id, w.message)
    data = serialize_report(result.issues, result.metrics, args.format, project=args.path, lang=args.lang,
                            catalog=catalog, warnings=result.warnings)
    _emit(args, data)
    return EXIT_BUGS if result.has_bugs else EXIT_OK


def _table(rows, header, fmt: str, meta: dict) -> bytes:
    if fmt == "json":
        return dumps_json({**meta, "rows": rows}).encode("utf-8")
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if row.get(h) is None else row.get(h) for h in header])
        return buf.getvalue().encode("utf-8")
    widths = [max(len(h), *(len(_cell(r.get(h))) for r in rows)) for h in header] if rows else [len(h) for h in header]
    buf.write("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip() + "\n")
    for row in rows:
        buf.write("  ".join(_cell(row.get(h)).rjust(w) if i else _cell(row.get(h)).ljust(w)
                            for i, (h, w) in enumerate(zip(header, widths))).rstrip() + "\n")
    for key, value in meta.items():
        if key != "schema":
            buf.write(f"{key}: {value if not isinstance(value, list) else len(value)}\n")
    return buf.getvalue().encode("utf-8")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.2f}" if abs(value) >= 0.001 or value == 0 else f"{value:.2e}"
    return str(value)


def cmd_corpus(args) -> int:
    try:
        paths = discover(args.dir)
    except BotlintError as exc:
        log.error("%s", exc)
        return EXIT_ERROR
    result = analyze_corpus(paths, args.registry, args.jobs, args.filter_robot_code)
    rows = []
    for agg in aggregate(result.records, ids_for(args.include)):
        row = agg.to_json()
        row["category"] = "" if agg.pattern_id == "Total" else category_of(agg.pattern_id).value
        rows.append(row)
    meta = {
        "schema": "botlint-corpus-1",
        "projects": len(result.records),
        "skipped": [{"path": p, "reason": r} for p, r in result.skipped],
        "filtered": result.filtered,
    }
    header = ("pattern_id", "category", "instance_count", "project_count", "mean_wmc_of_affected")
    _emit(args, _table(rows, header, args.format, meta))
    return EXIT_OK


def cmd_metrics(args) -> int:
    target = Path(args.path)
    try:
        paths = discover(target) if target.is_dir() else [str(target)]
    except BotlintError as exc:
        log.error("%s", exc)
        return EXIT_ERROR
    result = analyze_corpus(paths, args.registry, args.jobs, args.filter_robot_code)
    rows = [{"project": r.path, **r.metrics} for r in result.records]
    meta = {"schema": "botlint-metrics-1", "skipped": [{"path": p, "reason": r} for p, r in result.skipped]}
    _emit(args, _table(rows, ("project", *METRIC_NAMES), args.format, meta))
    if not target.is_dir() and result.skipped:
        return EXIT_ERROR
    return EXIT_OK


def cmd_compare(args) -> int:
    names = [m.strip() for m in args.metrics.split(",") if m.strip()]
    try:
        runs = [analyze_corpus(discover(d), args.registry, args.jobs, args.filter_robot_code)
                for d in (args.dir_a, args.dir_b)]
        rows = compare(runs[0].records, runs[1].records, names, args.per_block)
    except (BotlintError, EmptyCorpus, KeyError) as exc:
        log.error("%s", exc)
        return EXIT_ERROR
    meta = {"schema": "botlint-compare-1", "corpus_a": args.dir_a, "corpus_b": args.dir_b,
            "per_block": args.per_block}
    header = ("metric", "mean_a", "mean_b", "p_value", "a12", "u_statistic", "n1", "n2")
    _emit(args, _table([r.to_json() for r in rows], header, args.format, meta))
    return EXIT_OK


COMMANDS = {"check": cmd_check, "corpus": cmd_corpus, "metrics": cmd_metrics, "compare": cmd_compare}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="botlint: %(levelname)s: %(message)s")
    if args.jobs < 1:
        log.error("--jobs must be at least 1")
        return EXIT_ERROR
    try:
        return COMMANDS[args.command](args)
    except BotlintError as exc:
        log.error("%s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
