"""Command-line front end: plotkit CSV [CSV ...] --kind KIND --out PATH."""

import argparse
import sys

from . import KINDS, FigureSpec, PlotkitError, __version__, render

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render benchmark results CSVs into figures (PNG + SVG).")
    parser.add_argument("--version", action="version",
                        version=f"plotkit {__version__}")
    parser.add_argument("csv", nargs="+", help="input CSV path(s)")
    parser.add_argument("--kind", required=True, choices=KINDS,
                        help="figure kind")
    parser.add_argument("--out", required=True,
                        help="output path (extension ignored; .png and .svg "
                             "are written)")
    parser.add_argument("--title", default=None, help="optional figure title")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        spec = FigureSpec(inputs=args.csv, kind=args.kind, out=args.out,
                          title=args.title)
        png, svg = render(spec)
    except PlotkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    print(f"wrote {png} and {svg}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
