"""Regenerate every figure table as CSV and SVG into one directory."""

import argparse
import sys
from pathlib import Path

from roughprob import cli

FIGURES = ("fig2-left", "fig2-right", "fig3", "fig4", "fig5", "fig6")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="figures")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--reps", type=int, default=10**5, help="replications for fig5 and fig6")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--no-svg", action="store_true")
    args = ap.parse_args(argv)

    out = Path(args.outdir)
    formats = ("csv",) if args.no_svg else ("csv", "svg")
    for fig in FIGURES:
        for fmt in formats:
            path = out / f"{fig}.{fmt}"
            code = cli.run([fig, "--seed", str(args.seed), "--reps", str(args.reps),
                            "--workers", str(args.workers), "--format", fmt, "--out", str(path)])
            if code:
                print(f"{fig}: exit status {code}", file=sys.stderr)
                return code
            print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
