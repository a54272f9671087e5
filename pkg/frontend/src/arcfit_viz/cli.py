"""Command-line renderer: plot-v1 bundle in, PNG/SVG out."""

from __future__ import annotations

import argparse
import sys

from .render import BundleError, render_file


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="arcfit-viz",
        description="Render an arcfit plot-data bundle to an image",
    )
    parser.add_argument("bundle", help="plot-data JSON (schema arcfit/plot-v1)")
    parser.add_argument("out", help="output image path; .png or .svg")
    args = parser.parse_args(argv)
    try:
        render_file(args.bundle, args.out)
    except BundleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"rendered {args.bundle} -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
