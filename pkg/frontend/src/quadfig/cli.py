"""Command line: render a sweep CSV to a figure.

Exit status 0 on success, 2 on missing or malformed input.
"""

from __future__ import annotations

import argparse
import re
import sys

from .figure import PlotSpec, render
from .records import SchemaError

_GUIDE_RE = re.compile(r"^N\^(?P<exp>-?\d+(\.\d+)?)$")


def parse_guide(text: str) -> tuple[str, float]:
    m = _GUIDE_RE.match(text.strip())
    if not m:
        raise SchemaError(f"guide must look like 'N^-2', got {text!r}")
    return text.strip(), float(m.group("exp"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadfig", description="render convergence figures from sweep CSVs"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one CSV to PNG and SVG")
    p.add_argument("--input", required=True, help="sweep CSV path")
    p.add_argument("--output", required=True, help="output image path (.png or .svg)")
    p.add_argument(
        "--guide",
        action="append",
        default=[],
        help="rate guide like 'N^-2'; repeatable",
    )
    p.add_argument(
        "--semilogy",
        action="store_true",
        help="log scale on the y axis only (default is log-log)",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        guides = tuple(parse_guide(g) for g in args.guide)
        result = render(
            PlotSpec(
                input_csv=args.input,
                output_image=args.output,
                guide_rates=guides,
                log_y_only=args.semilogy,
            )
        )
    except (SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(" ".join(result.paths), file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
