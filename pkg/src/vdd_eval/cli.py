"""Command-line entry point: validate / score / pyramid / hist / prompts.

Config precedence: built-in defaults, then the JSON file named by
VDD_CONFIG, then flags. Exit codes: 0 ok, 1 validation error, 2 I/O
error, 3 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import distributions, ingest, metrics, prompts, report
from .model import (
    COMPONENT_NAMES,
    SchemaViolation,
    ScoringConfig,
    StdEstimator,
    StdMode,
    VddEvalError,
)

log = logging.getLogger(__name__)

CONFIG_ENV_VAR = "VDD_CONFIG"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 3, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_config_file() -> dict:
    path = os.environ.get(CONFIG_ENV_VAR)
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise SchemaViolation("config", "config file must hold a JSON object")
    return obj


def _build_config(file_cfg: dict, args: argparse.Namespace) -> ScoringConfig:
    """defaults < config file < flags."""
    values: dict = {}
    if "tau" in file_cfg or "confidence_threshold" in file_cfg:
        values["confidence_threshold"] = float(
            file_cfg.get("tau", file_cfg.get("confidence_threshold"))
        )
    if "age_bin_edges" in file_cfg:
        values["age_bin_edges"] = tuple(file_cfg["age_bin_edges"])
    if "std_mode" in file_cfg:
        values["std_mode"] = StdMode(file_cfg["std_mode"])
    if "std_estimator" in file_cfg:
        values["std_estimator"] = StdEstimator(file_cfg["std_estimator"])
    if "overall_components" in file_cfg:
        values["overall_components"] = frozenset(file_cfg["overall_components"])
    if "rounding" in file_cfg:
        values["rounding"] = int(file_cfg["rounding"])

    if getattr(args, "tau", None) is not None:
        values["confidence_threshold"] = args.tau
    if getattr(args, "std_mode", None) is not None:
        values["std_mode"] = StdMode(args.std_mode)
    if getattr(args, "std_estimator", None) is not None:
        values["std_estimator"] = StdEstimator(args.std_estimator)
    if getattr(args, "components", None):
        values["overall_components"] = frozenset(args.components)
    if getattr(args, "rounding", None) is not None:
        values["rounding"] = args.rounding
    return ScoringConfig(**values)


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _parse_generated(paths: Sequence[str]) -> list:
    records = []
    for path in paths:
        records.extend(ingest.parse_annotations(_read_text(path)))
    return records


def cmd_validate(args: argparse.Namespace) -> int:
    issues_found = False
    for path in args.paths:
        records, issues = ingest.scan_annotations(_read_text(path))
        for line_no, message in issues:
            issues_found = True
            print(f"{path}:{line_no}: {message}", file=sys.stderr)
        print(f"{path}: {len(records)} valid record(s), {len(issues)} issue(s)")
    if args.base:
        try:
            bases = ingest.load_base(_read_text(args.base))
            print(f"{args.base}: base for prompt(s) {', '.join(sorted(bases))}")
        except VddEvalError as e:
            issues_found = True
            print(f"{args.base}: {e}", file=sys.stderr)
    return EXIT_VALIDATION if issues_found else EXIT_OK


def cmd_score(args: argparse.Namespace) -> int:
    cfg = _build_config(_load_config_file(), args)
    records = _parse_generated(args.generated)
    if not records:
        print("error: no annotation records in input", file=sys.stderr)
        return EXIT_VALIDATION
    slices = ingest.group_slices(records)
    bases = ingest.load_base(_read_text(args.base))
    table = metrics.score_corpus(slices, bases, cfg)

    if args.format == "csv":
        text = report.emit_overall_csv(table)
    elif args.format == "md":
        text = report.emit_score_table_md(table)
    else:
        hists = [distributions.count_histogram(s, cfg) for _, s in sorted(slices.items())]
        pyramids = [
            distributions.population_pyramid(s, cfg) for _, s in sorted(slices.items())
        ]
        for prompt_id in sorted({p for _, p in slices}):
            hists.append(distributions.count_histogram(bases[prompt_id], cfg))
            pyramids.append(distributions.population_pyramid(bases[prompt_id], cfg))
        text = report.emit_results_doc(table, hists, pyramids)
    Path(args.out).write_text(text, encoding="utf-8")

    for row in table.overall_rows:
        print(f"{row.generator_id}\t{report.format_number(row.overall, cfg.rounding)}")
    return EXIT_OK


def _distribution_sources(args: argparse.Namespace):
    records = _parse_generated(args.generated)
    if not records:
        print("error: no annotation records in input", file=sys.stderr)
        return None
    sources = [s for _, s in sorted(ingest.group_slices(records).items())]
    if args.base:
        bases = ingest.load_base(_read_text(args.base))
        for prompt_id in sorted(bases):
            sources.append(bases[prompt_id])
    return sources


def cmd_pyramid(args: argparse.Namespace) -> int:
    cfg = _build_config(_load_config_file(), args)
    sources = _distribution_sources(args)
    if sources is None:
        return EXIT_VALIDATION
    pyramids = [distributions.population_pyramid(s, cfg) for s in sources]
    Path(args.out).write_text(report.emit_pyramid_csv(pyramids, cfg), encoding="utf-8")
    print(f"wrote {len(pyramids)} pyramid(s) to {args.out}")
    return EXIT_OK


def cmd_hist(args: argparse.Namespace) -> int:
    cfg = _build_config(_load_config_file(), args)
    sources = _distribution_sources(args)
    if sources is None:
        return EXIT_VALIDATION
    hists = [distributions.count_histogram(s, cfg) for s in sources]
    Path(args.out).write_text(report.emit_hist_csv(hists), encoding="utf-8")
    print(f"wrote {len(hists)} histogram(s) to {args.out}")
    return EXIT_OK


def cmd_prompts(args: argparse.Namespace) -> int:
    if args.action == "list":
        for p in prompts.list_prompts():
            print(f"{p.id}\t{p.title}")
        return EXIT_OK
    spec = prompts.get_prompt(args.id)
    if args.action == "show":
        print(spec.full_text)
        return EXIT_OK
    # truncate
    limit = args.limit
    if limit is None:
        limit = _load_config_file().get("prompt_char_limit")
    if limit is None:
        print(
            "error: --limit is required (or set prompt_char_limit in the config file)",
            file=sys.stderr,
        )
        return EXIT_USAGE
    print(prompts.truncate_prompt(spec.full_text, int(limit), prompts.shipped_stopwords()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vdd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="parse and validate annotation/base files")
    p_val.add_argument("paths", nargs="+", help="annotation files (JSON Lines)")
    p_val.add_argument("--base", help="base paintings file (JSON)")
    p_val.set_defaults(func=cmd_validate)

    def add_scoring_flags(p, with_table_flags: bool):
        p.add_argument("--generated", nargs="+", required=True, metavar="FILE",
                       help="annotation files of generated images")
        p.add_argument("--tau", type=float, default=None,
                       help="confidence threshold (default 0.8)")
        if with_table_flags:
            p.add_argument("--std-mode", choices=[m.value for m in StdMode],
                           default=None, help="std over pairwise distances or raw counts")
            p.add_argument("--std-estimator", choices=[e.value for e in StdEstimator],
                           default=None, help="sample (n-1) or population std")
            p.add_argument("--components", nargs="+", choices=sorted(COMPONENT_NAMES),
                           default=None, help="components of the overall score")
            p.add_argument("--rounding", type=int, default=None,
                           help="decimal places in reports (default 4)")

    p_score = sub.add_parser("score", help="score slices against the base paintings")
    add_scoring_flags(p_score, with_table_flags=True)
    p_score.add_argument("--base", required=True, help="base paintings file (JSON)")
    p_score.add_argument("--out", required=True, help="output report path")
    p_score.add_argument("--format", choices=["csv", "md", "doc"], default="csv",
                         help="overall CSV, Markdown table, or full results document")
    p_score.set_defaults(func=cmd_score)

    p_pyr = sub.add_parser("pyramid", help="emit gender-by-age pyramids as CSV")
    add_scoring_flags(p_pyr, with_table_flags=False)
    p_pyr.add_argument("--base", help="also emit the base paintings' pyramids")
    p_pyr.add_argument("--out", required=True, help="output CSV path")
    p_pyr.set_defaults(func=cmd_pyramid)

    p_hist = sub.add_parser("hist", help="emit count-proportion histograms as CSV")
    add_scoring_flags(p_hist, with_table_flags=False)
    p_hist.add_argument("--base", help="also emit the base paintings' histograms")
    p_hist.add_argument("--out", required=True, help="output CSV path")
    p_hist.set_defaults(func=cmd_hist)

    p_pr = sub.add_parser("prompts", help="list, show, or truncate the built-in prompts")
    pr_sub = p_pr.add_subparsers(dest="action", required=True)
    pr_list = pr_sub.add_parser("list", help="list prompt ids and titles")
    pr_list.set_defaults(func=cmd_prompts, action="list")
    pr_show = pr_sub.add_parser("show", help="print a prompt's full text")
    pr_show.add_argument("id")
    pr_show.set_defaults(func=cmd_prompts, action="show")
    pr_trunc = pr_sub.add_parser("truncate", help="print the reduced prompt text")
    pr_trunc.add_argument("id")
    pr_trunc.add_argument("--limit", type=int, default=None,
                          help="character limit (or prompt_char_limit in config)")
    pr_trunc.set_defaults(func=cmd_prompts, action="truncate")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except OSError as e:
        filename = getattr(e, "filename", None)
        print(f"error: {e.strerror or e}{f': {filename}' if filename else ''}",
              file=sys.stderr)
        return EXIT_IO
    except VddEvalError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
