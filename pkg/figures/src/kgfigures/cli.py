"""Command-line renderer: one subcommand per figure kind.

    kgfigures norms-grid     --input diagnostics.csv --output norms.png
    kgfigures loglog-fit     --input diagnostics.csv --output growth.png
    kgfigures snapshot-strip --input snap1.csv snap2.csv ... --output strip.png
                             --meta diagnostics.csv.meta.json [--times "0,1,2"]

Exit codes: 0 success, 64 usage error, 65 malformed input, 66 missing file.
"""

from __future__ import annotations

import argparse
import sys

from .render import FigureSpec, render
from .schema import SchemaMismatch

EXIT_OK = 0
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_NOINPUT = 66


def _parse_times(spec: str | None) -> tuple[float, ...]:
    if not spec:
        return ()
    return tuple(float(part) for part in spec.replace(",", " ").split())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgfigures",
        description="Render figures from simulation diagnostics and snapshots",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norms-grid", help="2x2 polar-norm panels vs time")
    p.add_argument("--input", required=True, help="diagnostics CSV")
    p.add_argument("--output", required=True, help="image path")
    p.set_defaults(kind="norms_grid", multi=False)

    p = sub.add_parser("loglog-fit", help="log-log phase growth with fitted slope")
    p.add_argument("--input", required=True, help="diagnostics CSV")
    p.add_argument("--output", required=True, help="image path")
    p.set_defaults(kind="loglog_fit", multi=False)

    p = sub.add_parser("snapshot-strip", help="per-time field/phase panels")
    p.add_argument("--input", required=True, nargs="+", help="snapshot CSVs")
    p.add_argument("--output", required=True, help="image path")
    p.add_argument("--meta", required=True,
                   help="metadata sidecar with the wave parameters")
    p.add_argument("--times", default=None,
                   help="comma-separated panel times (default: from filenames)")
    p.set_defaults(kind="snapshot_strip", multi=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    inputs = tuple(args.input) if args.multi else (args.input,)
    try:
        spec = FigureSpec(
            kind=args.kind,
            inputs=inputs,
            output=args.output,
            times=_parse_times(getattr(args, "times", None)),
            meta=getattr(args, "meta", None),
        )
        info = render(spec)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return EXIT_NOINPUT
    except SchemaMismatch as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(f"wrote {info['output']}")
    if "slope" in info:
        print(f"slope = {info['slope']!r}")
    if "phase_support_widths" in info:
        widths = ", ".join(f"{t:g}: {w:.3f}"
                           for t, w in zip(info["times"],
                                           info["phase_support_widths"]))
        print(f"phase support widths: {widths}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
