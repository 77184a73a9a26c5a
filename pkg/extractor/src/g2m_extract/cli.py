"""g2m-extract command line."""

from __future__ import annotations

import argparse
import sys

from .encoders import TOY_SPECS, ExtractionSpec
from .extract import extract, validate


def _spec_from_args(args) -> ExtractionSpec:
    if args.model in TOY_SPECS:
        return TOY_SPECS[args.model]
    if not (args.tokens and args.dim):
        raise SystemExit("custom models need --tokens and --dim")
    return ExtractionSpec(model_id=args.model, hook_point=args.hook,
                          resize=args.resize, drop_leading=args.drop_leading,
                          expected_tokens=args.tokens, expected_dim=args.dim)


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    # `g2m-extract --model ...` is shorthand for the run subcommand
    if argv and argv[0] not in ("run", "validate", "-h", "--help"):
        argv = ["run", *argv]
    parser = argparse.ArgumentParser(prog="g2m-extract", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="extract features for a manifest")
    p.add_argument("--model", required=True,
                   help="toy-merger | toy-pixelshuffle | hf:<model id>")
    p.add_argument("--hook", default="final-hidden",
                   choices=("pre-merger", "pre-pixel-shuffle", "final-hidden"))
    p.add_argument("--images", required=True, help="dataset manifest (JSON-lines)")
    p.add_argument("--out", required=True)
    p.add_argument("--resize", type=int, default=None)
    p.add_argument("--drop-leading", type=int, default=0)
    p.add_argument("--tokens", type=int, default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--limit", type=int, default=None)

    v = sub.add_parser("validate", help="validate an extraction directory")
    v.add_argument("--dir", required=True)

    args = parser.parse_args(argv)
    if args.command == "run":
        index = extract(_spec_from_args(args), args.images, args.out, limit=args.limit)
        print(f"extracted {len(index)} samples to {args.out}")
        return 0
    report = validate(args.dir)
    if report.ok:
        print(f"{report.checked} files OK")
        return 0
    for problem in report.problems:
        print(problem, file=sys.stderr)
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
