"""g2m command line: gen, prompt, parse, geometry, probe, eval, report."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import g2mf, harness, parsing, patch_geometry, probe, prompts, report
from .grid_gen import (CANONICAL_PALETTE, GridSpec, build_split, load_manifest)


def _cmd_gen(args) -> int:
    spec = GridSpec(n=args.n, c=args.colors, image_size=args.image_size)
    manifest = build_split(spec, args.split, args.count, args.seed, args.out,
                           force=args.force)
    print(f"wrote {len(manifest.records)} samples to {args.out}/{args.split}.jsonl")
    return 0


def _cmd_prompt(args) -> int:
    mapping = prompts.ColorMapping.from_palette(args.colors)
    print(prompts.build_prompt(args.n, args.n, mapping))
    print(f"\n[max_tokens = {prompts.max_tokens(args.n, args.n)}]", file=sys.stderr)
    return 0


def _cmd_parse(args) -> int:
    text = Path(args.file).read_text() if args.file else sys.stdin.read()
    outcome = parsing.parse_cascade(text, args.height, args.width)
    if args.colors:
        outcome = parsing.check_tokens(outcome, args.colors)
    print(json.dumps(outcome.to_json()))
    return 0 if outcome.ok else 1


def _cmd_geometry(args) -> int:
    config = patch_geometry.PatchConfig(image_size=args.image_size, patch_len=args.patch)
    dist = patch_geometry.type_distribution(args.n, config)
    cells = patch_geometry.classification_grid(args.n, config)
    if args.csv:
        print("interaction_type,cells")
        for t in patch_geometry.InteractionType:
            print(f"{t.label},{dist[t]}")
        print()
        print("row,col,type")
        for r in range(args.n):
            for c in range(args.n):
                print(f"{r},{c},{cells[r, c].label}")
    else:
        print(json.dumps({
            "histogram": {t.label: dist[t] for t in patch_geometry.InteractionType},
            "cells": [[cells[r, c].label for c in range(args.n)]
                      for r in range(args.n)],
        }, indent=1))
    return 0


def _load_probe_data(args):
    manifest = load_manifest(args.manifest)
    records = manifest.records[:args.limit] if args.limit else manifest.records
    labels = np.array([r.matrix for r in records], dtype=np.int64)
    if args.n is not None and labels.shape[-1] != args.n:
        raise SystemExit(f"manifest grids are {labels.shape[-1]}x{labels.shape[-1]}, "
                         f"not {args.n}x{args.n}")
    feats = []
    for rec in records:
        if args.synthetic_sigma is not None:
            feats.append(probe.synthetic_features(
                np.asarray(rec.matrix), args.synthetic_sigma,
                d=args.synthetic_d, seed=rec.seed & 0xFFFFFFFF))
        else:
            seq = g2mf.load(Path(args.features) / f"{rec.id}.g2mf")
            fm = probe.reshape_grid(seq, args.drop_leading) if seq.ndim == 2 else seq
            feats.append(fm)
    return feats, labels


def _cmd_probe_train(args) -> int:
    feats, labels = _load_probe_data(args)
    count = len(feats)
    val_count = max(1, int(count * args.val_frac))
    config = probe.TrainConfig(max_iters=args.iters, seed=args.seed,
                               eval_every=args.eval_every,
                               stop_at_val_acc=args.stop_at)
    params, log = probe.train(config, feats[val_count:], labels[val_count:],
                              feats[:val_count], labels[:val_count], c=args.colors)
    probe.save_checkpoint(args.out, params, extra={
        "n": int(labels.shape[-1]), "colors": args.colors, "seed": args.seed,
        "best_iter": log.best_iter, "best_val_acc": log.best_val_acc,
        "iterations_run": log.stopped_at})
    print(f"best val cell accuracy {log.best_val_acc:.4f} at iter {log.best_iter}; "
          f"checkpoint in {args.out}")
    return 0


def _cmd_probe_eval(args) -> int:
    feats, labels = _load_probe_data(args)
    params, extra = probe.load_checkpoint(args.checkpoint)
    rep = probe.evaluate(params, feats, labels)
    payload = {"exact_match": rep.exact_match, "cell_accuracy": rep.cell_accuracy,
               "heatmap": rep.acc_grid.to_json()}
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=1, sort_keys=True))
    print(f"exact {rep.exact_match:.4f}  cell {rep.cell_accuracy:.4f}")
    return 0


def _cmd_eval(args) -> int:
    if args.adapter == "http":
        endpoint = args.endpoint or os.environ.get(harness.API_BASE_ENV)
        if not endpoint:
            print("http adapter needs --endpoint or G2M_API_BASE", file=sys.stderr)
            return 2
        adapter = harness.HttpAdapter(
            endpoint=endpoint, api_key=os.environ.get(harness.API_KEY_ENV, ""),
            model=args.model)
    else:
        if not args.replay:
            print("replay adapter needs --replay <path>", file=sys.stderr)
            return 2
        adapter = harness.ReplayAdapter.from_file(args.replay)
    aggregate = harness.run_eval(args.manifest, adapter, args.out,
                                 concurrency=args.concurrency, limit=args.limit)
    print(f"exact {aggregate['exact_match']:.4f}  cell {aggregate['cell_accuracy']:.4f}  "
          f"({aggregate['count']} samples, "
          f"{aggregate['transport_failures']} transport failures)")
    return 0


def _cmd_report(args) -> int:
    paths = report.report_run(args.run, args.out, patch_len=args.patch)
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="g2m", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a dataset split")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--colors", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--split", default="test")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--image-size", type=int, default=512)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("prompt", help="print the evaluation prompt and budget")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--colors", type=int, required=True)
    p.set_defaults(func=_cmd_prompt)

    p = sub.add_parser("parse", help="run the cascading parser on text")
    p.add_argument("--h", dest="height", type=int, required=True)
    p.add_argument("--w", dest="width", type=int, required=True)
    p.add_argument("--colors", type=int, default=None)
    p.add_argument("--file", default=None)
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("geometry", help="interaction-type histogram for a grid size")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--image-size", type=int, default=512)
    p.add_argument("--patch", type=int, default=16)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=_cmd_geometry)

    p = sub.add_parser("probe", help="train or evaluate a spatial probe")
    psub = p.add_subparsers(dest="probe_command", required=True)
    for name in ("train", "eval"):
        q = psub.add_parser(name)
        q.add_argument("--manifest", required=True)
        q.add_argument("--features", default=None,
                       help="directory of <id>.g2mf files")
        q.add_argument("--n", type=int, default=None,
                       help="expected grid side (validated against the manifest)")
        q.add_argument("--colors", type=int, required=True)
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--limit", type=int, default=None)
        q.add_argument("--drop-leading", type=int, default=0)
        q.add_argument("--synthetic-sigma", type=float, default=None,
                       help="use the synthetic encoder instead of feature files")
        q.add_argument("--synthetic-d", type=int, default=16)
        if name == "train":
            q.add_argument("--out", required=True)
            q.add_argument("--iters", type=int, default=5000)
            q.add_argument("--eval-every", type=int, default=100)
            q.add_argument("--val-frac", type=float, default=0.2)
            q.add_argument("--stop-at", type=float, default=None)
            q.set_defaults(func=_cmd_probe_train)
        else:
            q.add_argument("--checkpoint", required=True)
            q.add_argument("--out", default=None)
            q.set_defaults(func=_cmd_probe_eval)

    p = sub.add_parser("eval", help="run an adapter over a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--adapter", choices=("http", "replay"), required=True)
    p.add_argument("--endpoint", default=None)
    p.add_argument("--model", default="default")
    p.add_argument("--replay", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--concurrency", type=int, default=harness.DEFAULT_CONCURRENCY)
    p.add_argument("--limit", type=int, default=None,
                   help=f"evaluate only the first N samples (proprietary-model "
                        f"runs conventionally use {harness.PROPRIETARY_EVAL_COUNT})")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("report", help="render reports for a run directory")
    p.add_argument("--run", required=True)
    p.add_argument("--patch", type=int, default=16)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
