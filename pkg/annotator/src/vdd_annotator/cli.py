"""Command line: annotate an image folder, extract a grid, or draw plots.

Exit codes: 0 ok, 1 error, 3 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .annotate import AnnotateError, annotate, extract_grid_csv
from .backends import make_backend
from .plotting import PLOT_KINDS, PlotError, plot

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def cmd_annotate(args: argparse.Namespace) -> int:
    backend = make_backend(
        args.backend,
        seed=args.seed,
        detector=args.detector,
        age_gender=args.age_gender,
        sentiment=args.sentiment,
        person_label=args.person_label,
        device=args.device,
    )
    n = annotate(Path(args.images), backend, Path(args.out), tau_report=args.tau_report)
    print(f"wrote {n} record(s) to {args.out}")
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    out = plot(Path(args.csv), args.kind, Path(args.out))
    print(f"wrote {out}")
    return EXIT_OK


def cmd_grid(args: argparse.Namespace) -> int:
    extract_grid_csv(Path(args.annotations), args.image_id, Path(args.out))
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vdd-annotator", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_ann = sub.add_parser("annotate", help="annotate an image folder")
    p_ann.add_argument("--images", required=True, help="folder of <GEN>-<PROMPT>-<seq> images")
    p_ann.add_argument("--backend", choices=["mock", "real"], required=True)
    p_ann.add_argument("--out", required=True, help="output annotation file (JSON Lines)")
    p_ann.add_argument("--seed", type=int, default=0, help="mock backend seed")
    p_ann.add_argument("--tau-report", type=float, default=0.8,
                       help="threshold used only in the summary log line")
    p_ann.add_argument("--detector", help="TorchScript detector checkpoint (real)")
    p_ann.add_argument("--age-gender", help="TorchScript age/gender checkpoint (real)")
    p_ann.add_argument("--sentiment", help="TorchScript sentiment checkpoint (real)")
    p_ann.add_argument("--person-label", type=int, default=1,
                       help="detector label id for persons (real)")
    p_ann.add_argument("--device", default="cpu")
    p_ann.set_defaults(func=cmd_annotate)

    p_plot = sub.add_parser("plot", help="draw a figure from an engine CSV")
    p_plot.add_argument("--csv", required=True)
    p_plot.add_argument("--kind", choices=PLOT_KINDS, required=True)
    p_plot.add_argument("--out", required=True, help="output image path")
    p_plot.set_defaults(func=cmd_plot)

    p_grid = sub.add_parser("grid", help="extract one record's 8x8 grid as CSV")
    p_grid.add_argument("--annotations", required=True, help="annotation file (JSON Lines)")
    p_grid.add_argument("--image-id", required=True)
    p_grid.add_argument("--out", required=True, help="output CSV path")
    p_grid.set_defaults(func=cmd_grid)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (AnnotateError, PlotError, ValueError, FileNotFoundError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
