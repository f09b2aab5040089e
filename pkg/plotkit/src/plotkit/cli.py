"""plotkit command: one figure per invocation, flags mirroring PlotSpec."""

from __future__ import annotations

import argparse
import sys

from .render import PLOT_KINDS, PlotSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="plotkit",
        description="Render figures from rootpacket harness CSV outputs.",
    )
    ap.add_argument("--input", required=True, help="harness CSV file")
    ap.add_argument("--kind", required=True, choices=PLOT_KINDS)
    ap.add_argument("--out", required=True, help="output image (.png or .svg)")
    ap.add_argument("--eta", type=float, default=0.05,
                    help="guide-line exponent offset on scaling plots")
    ap.add_argument("--no-guides", action="store_true", help="suppress reference slopes")
    ap.add_argument("--check", default=None,
                    help="density_overlay: which check label to draw")
    ap.add_argument("--bins", type=int, default=60)
    ap.add_argument("--dpi", type=int, default=150)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        input_csv=args.input,
        plot_kind=args.kind,
        output_image=args.out,
        eta=args.eta,
        guide_lines=not args.no_guides,
        check=args.check,
        bins=args.bins,
        dpi=args.dpi,
    )
    try:
        render(spec)
    except (SchemaError, ValueError) as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
