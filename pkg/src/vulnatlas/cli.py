"""Command-line interface.

Subcommands cover the batch pipeline (ingest, compute, export), the
fire-risk overlay, the HTTP server, and a synthetic demo region generator.
All engine errors exit with status 2 and a one-line message on stderr.
"""

from __future__ import annotations

import argparse
import sys

from . import fixture, workspace
from .admin import Level


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vulnatlas",
        description="Climate vulnerability assessment: surveys + rasters -> indices, "
        "fire risk, and an HTTP API.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a workspace from survey, admin, and raster inputs")
    p.add_argument("--survey", required=True, help="household survey CSV")
    p.add_argument("--admin", required=True, help="admin units GeoJSON")
    p.add_argument("--rasters", required=True, help="directory of .asc grids")
    p.add_argument("--catalog", required=True, help="indicator catalog JSON")
    p.add_argument("--out", required=True, help="workspace directory to create")

    p = sub.add_parser("compute", help="compute vulnerability indices at all levels")
    p.add_argument("--workspace", required=True)
    p.add_argument("--weights", help="weight config JSON (default: equal weights)")

    p = sub.add_parser("fire-risk", help="fire risk index, classes, and class areas")
    p.add_argument("--landcover", required=True)
    p.add_argument("--dem", required=True)
    p.add_argument("--roads", required=True)
    p.add_argument("--settlements", required=True)
    p.add_argument("--tables", help="score tables JSON (default: built-in tables)")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("export", help="export computed results for one level")
    p.add_argument("--workspace", required=True)
    p.add_argument("--format", required=True, choices=["geojson", "csv"])
    p.add_argument("--level", required=True, help="department, municipality, or village")
    p.add_argument("--out", required=True, help="output file")

    p = sub.add_parser("serve", help="serve the HTTP API over a computed workspace")
    p.add_argument("--workspace", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")

    p = sub.add_parser("fixture", help="write the synthetic demo region")
    p.add_argument("--out", required=True, help="directory for the demo inputs")

    return parser


def _run(args: argparse.Namespace) -> int:
    if args.command == "ingest":
        out = workspace.ingest(args.survey, args.admin, args.rasters, args.catalog, args.out)
        ws = workspace.load_workspace(out)
        for message in ws.hierarchy.household_count_mismatches():
            print(f"warning: {message}", file=sys.stderr)
        print(f"workspace ready: {out} ({len(ws.rows)} units)")
        return 0

    if args.command == "compute":
        config_id = workspace.compute(args.workspace, args.weights)
        print(f"results written: {args.workspace}/results/{config_id}/")
        return 0

    if args.command == "fire-risk":
        out = workspace.run_fire_risk(
            args.landcover,
            args.dem,
            args.roads,
            args.settlements,
            args.out,
            tables_path=args.tables,
        )
        print(f"fire-risk outputs written: {out}")
        return 0

    if args.command == "export":
        out = workspace.export(args.workspace, args.format, args.level, args.out)
        print(f"exported: {out}")
        return 0

    if args.command == "serve":
        import uvicorn

        from .server import create_app

        app = create_app(args.workspace)
        uvicorn.run(app, host=args.host, port=args.port, log_level="info")
        return 0

    if args.command == "fixture":
        out = fixture.write_fixture(args.out)
        print(f"demo region written: {out}")
        return 0

    raise AssertionError(f"unhandled command {args.command}")


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _run(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
