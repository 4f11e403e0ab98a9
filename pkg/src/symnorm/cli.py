import argparse
import json
import logging
import sys
from typing import Any

from .codec import FORMATS, render, run, run_batch
from .exceptions import BaseError


def _json_or_text(value: str) -> Any:
    """Inline JSON is decoded; anything else (a label or a path) is passed through."""
    if value.lstrip().startswith(("{", "[")):
        try:
            return json.loads(value)
        except json.JSONDecodeError as e:
            raise argparse.ArgumentTypeError(f"Invalid JSON: {e}") from e
    return value


def _bundle(value: str) -> Any:
    decoded = _json_or_text(value)
    if isinstance(decoded, str):
        try:
            with open(decoded) as f:
                return json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise argparse.ArgumentTypeError(f"Cannot read bundle '{value}': {e}") from e
    return decoded


def _point(value: str) -> list[str]:
    decoded = _json_or_text(value)
    if isinstance(decoded, list):
        return [str(x) for x in decoded]
    return [x.strip() for x in value.split(",")]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--root", type=_json_or_text, help="Root system label (e.g. A1xA1) or JSON"
    )
    common.add_argument(
        "--fan",
        help="Fan as catalog:<name>[:<param>...], inline JSON or a path to JSON",
    )
    common.add_argument(
        "--bundle",
        type=_bundle,
        action="append",
        default=[],
        help="Bundle as inline JSON or a path to JSON (repeat for two bundles)",
    )
    common.add_argument("--format", choices=FORMATS, default="json")
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v info, -vv debug"
    )

    parser = argparse.ArgumentParser(
        prog="symnorm",
        description="Exact checks of section multiplication on toric and spherical "
        "varieties, as lattice-point decomposition of polyhedra.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("validate-fan", parents=[common], help="Validate a fan")
    commands.add_parser("symmetrize", parents=[common], help="Symmetrize a fan")
    commands.add_parser("ample", parents=[common], help="Generation and ampleness")
    commands.add_parser("polytope", parents=[common], help="Vertices of Q_h and P_h")
    commands.add_parser("pi-sets", parents=[common], help="Weight sets of a bundle")
    check = commands.add_parser("check", parents=[common], help="Surjectivity check")
    check.add_argument(
        "--mode",
        choices=("open", "complete", "equivalence", "tilted"),
        default="open",
    )
    check.add_argument("--witnesses", action="store_true")
    split = commands.add_parser("split", parents=[common], help="Run a splitter")
    split.add_argument(
        "--algorithm",
        choices=("blowup", "chain", "dim2", "simplex3", "zn", "auto"),
        default="auto",
    )
    split.add_argument(
        "--point",
        type=_point,
        help="Point to split, e.g. 1,1 or [\"1/2\",0]; all minimal points if absent",
    )
    commands.add_parser("saturation", parents=[common], help="Dominant saturation")
    rj = commands.add_parser("rj-check", parents=[common], help="Wall strip check")
    rj.add_argument("--index", type=int, help="Wall index, 1-based; all if absent")
    l1 = commands.add_parser("l1-check", parents=[common], help="Orthant generation")
    l1.add_argument("--deep-samples", type=int, default=100)
    l1.add_argument("--seed", type=int, default=0)
    batch = commands.add_parser("batch", help="Run a manifest of jobs")
    batch.add_argument("manifest", help="Path to the JSON manifest")
    batch.add_argument("--jobs", type=int, default=None, help="Worker processes")
    batch.add_argument("--format", choices=FORMATS, default="json")
    batch.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def _options(args: argparse.Namespace) -> dict[str, Any]:
    names = ("mode", "witnesses", "algorithm", "point", "index", "deep_samples", "seed")
    return {n: getattr(args, n) for n in names if getattr(args, n, None) is not None}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(
            level=logging.DEBUG if args.verbose > 1 else logging.INFO,
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )
    try:
        if args.command == "batch":
            collector, ok = run_batch(args.manifest, args.jobs)
            print(render(dict(collector), args.format))
            return 0 if ok else 1
        job = {
            "command": args.command,
            "root": args.root,
            "fan": args.fan,
            "bundles": args.bundle,
            "options": _options(args),
        }
        print(render(run(job), args.format))
    except BaseError as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}, indent=2))
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
