"""Command-line entry point.

``tomofig render --spec <file>`` renders one figure per spec file
(``--spec`` is repeatable); written image paths go to stdout. Exit code 0
on success, 2 on any renderer error (bad spec, schema violation),
1 on unexpected I/O failures.
"""
from __future__ import annotations

import argparse
import sys

from .errors import TomofigError
from .render import render
from .spec import parse_spec_file


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tomofig",
        description="Batch figure renderer for entanglement-tomography result files.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render figures from spec files")
    p.add_argument("--spec", action="append", required=True,
                   help="figure spec file (flat key = value); repeatable")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        for spec_path in args.spec:
            print(render(parse_spec_file(spec_path)))
        return 0
    except TomofigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
