"""Command-line figure rendering:

    plotkit plot <bundle-dir> --kind KIND --out FILE [--run NAME]

Exit codes: 0 success, 2 usage/data error.
"""

from __future__ import annotations

import argparse
import sys

from .bundle import BundleError
from .render import KINDS, PlotSpec, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plotkit", description="Render bundle figures")
    sub = parser.add_subparsers(dest="command", required=True)
    plot = sub.add_parser("plot", help="render one figure from a bundle")
    plot.add_argument("bundle_dir", help="simulation output bundle directory")
    plot.add_argument("--kind", required=True, choices=KINDS)
    plot.add_argument("--out", required=True, help="output image (.svg or .png)")
    plot.add_argument("--run", default=None, help="run name inside the bundle")
    plot.add_argument("--max-traces", type=int, default=50)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        out = render(
            PlotSpec(
                bundle_dir=args.bundle_dir,
                kind=args.kind,
                out_path=args.out,
                run=args.run,
                max_traces=args.max_traces,
            )
        )
    except BundleError as exc:
        print(f"plotkit: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
