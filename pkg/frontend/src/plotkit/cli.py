"""plotkit command line: render figures from run directories.

Exit codes: 0 success, 2 schema/usage error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .render import FIGURES, FigureSpec, SchemaError, render

EXIT_OK = 0
EXIT_SCHEMA = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit", description="render herdnoise benchmark figures")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p_plot = sub.add_parser("plot", help="render one figure")
    p_plot.add_argument("--figure", required=True, choices=FIGURES)
    p_plot.add_argument("--runs", required=True, nargs="+",
                        help="run directories, one per alpha")
    p_plot.add_argument("--out", required=True,
                        help="output image (.png or .svg)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        out = render(FigureSpec(figure=args.figure, run_dirs=args.runs,
                                out_path=args.out))
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    print(f"wrote {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
