"""``zurn-plot``: render zurn CSV outputs as histograms with fitted overlays."""

from __future__ import annotations

import argparse
import sys

from .render import PlotSpec, SchemaError, format_report, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="zurn-plot",
        description="Histograms of zurn CSV outputs with moment-fitted overlays.",
    )
    parser.add_argument("--kind", required=True, choices=["label_hist", "a_hist"])
    parser.add_argument("--in", dest="input_csv", required=True, metavar="CSV")
    parser.add_argument("--out", dest="output_image", required=True, metavar="IMG")
    parser.add_argument("--bins", type=int, default=30)
    parser.add_argument("--overlay", choices=["none", "normal", "gamma"], default="none")
    parser.add_argument("--coord", type=int, default=0)
    args = parser.parse_args(argv)
    try:
        spec = PlotSpec(
            input_csv=args.input_csv,
            kind=args.kind,
            output_image=args.output_image,
            bins=args.bins,
            overlay=args.overlay,
            coord=args.coord,
        )
        print(format_report(render(spec)))
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
