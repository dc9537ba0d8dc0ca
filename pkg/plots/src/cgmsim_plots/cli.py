"""Figure rendering entry point.

    cgmsim-plots --in <csv-dir> --fig <kind> --out <image> [--scheme S] [--group G]

Exit codes: 0 success, 2 usage error, 3 missing/corrupt/empty input,
4 unexpected failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FIGURE_KINDS, EmptySelectionError, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cgmsim-plots",
        description="Render figures from simulator CSV outputs.",
    )
    parser.add_argument("--in", dest="indir", required=True,
                        help="directory holding the CSV outputs")
    parser.add_argument("--fig", required=True, choices=list(FIGURE_KINDS),
                        help="figure kind")
    parser.add_argument("--out", required=True, help="output image path (.png/.svg)")
    parser.add_argument("--scheme", help="scheme filter (scatter3, sweep-lines, activity)")
    parser.add_argument("--group", choices=["alpha", "beta"],
                        help="preference-group filter (scatter3)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec_kwargs = dict(
        kind=args.fig,
        input_dir=Path(args.indir),
        output=Path(args.out),
        scheme=args.scheme,
        group=args.group,
    )
    try:
        spec = FigureSpec(**spec_kwargs)
        out = render(spec)
    except (FileNotFoundError, SchemaError, EmptySelectionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return 4
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
