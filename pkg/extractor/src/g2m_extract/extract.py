"""Run an encoder over a dataset manifest and write per-sample G2MF files."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .encoders import ExtractionSpec, build_encoder
from .g2mf_io import read_tensor, write_tensor


class ExtractionError(RuntimeError):
    pass


def _load_image(path: Path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"))


def _read_manifest(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text().splitlines() if line.strip()]


def extract(spec: ExtractionSpec, manifest_path: str | Path, out_dir: str | Path,
            limit: int | None = None, encoder=None) -> list[dict]:
    """Extract hook features for every sample in the manifest.

    Writes <id>.g2mf per sample plus index.jsonl mapping id -> file with the
    recorded dims; dimensions are validated against the spec before any file
    is written, so a mis-hooked model fails loudly instead of producing a
    directory of wrong tensors.
    """
    manifest_path = Path(manifest_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = _read_manifest(manifest_path)
    if limit:
        records = records[:limit]
    if encoder is None:
        encoder = build_encoder(spec)

    index = []
    for rec in records:
        image = _load_image(manifest_path.parent / rec["image"])
        hidden = encoder.encode(image)
        if hidden.shape != (spec.expected_tokens, spec.expected_dim):
            raise ExtractionError(
                f"{rec['id']}: hook produced {hidden.shape}, expected "
                f"({spec.expected_tokens}, {spec.expected_dim})")
        fname = f"{rec['id']}.g2mf"
        write_tensor(out_dir / fname, hidden)
        index.append({"id": rec["id"], "file": fname,
                      "tokens": int(hidden.shape[0]), "dim": int(hidden.shape[1]),
                      "drop_leading": spec.drop_leading})
    with (out_dir / "index.jsonl").open("w") as fh:
        for row in index:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    (out_dir / "extraction.json").write_text(json.dumps({
        "model_id": spec.model_id, "hook_point": spec.hook_point,
        "resize": spec.resize, "drop_leading": spec.drop_leading,
        "expected_tokens": spec.expected_tokens, "expected_dim": spec.expected_dim,
        "count": len(index)}, indent=1, sort_keys=True))
    return index


@dataclass
class ValidationReport:
    checked: int
    problems: list[str]

    @property
    def ok(self) -> bool:
        return not self.problems


def validate(out_dir: str | Path) -> ValidationReport:
    """Re-read every indexed file: parseable, dims as recorded, values finite,
    and token count square after dropping leading tokens."""
    out_dir = Path(out_dir)
    if not (out_dir / "index.jsonl").exists():
        return ValidationReport(checked=0, problems=[f"{out_dir}: no index.jsonl"])
    problems = []
    index = _read_manifest(out_dir / "index.jsonl")
    for row in index:
        path = out_dir / row["file"]
        try:
            tensor = read_tensor(path)
        except (ValueError, OSError) as exc:
            problems.append(f"{row['id']}: {exc}")
            continue
        if tensor.shape != (row["tokens"], row["dim"]):
            problems.append(f"{row['id']}: dims {tensor.shape} != recorded "
                            f"({row['tokens']}, {row['dim']})")
        if not np.all(np.isfinite(tensor)):
            problems.append(f"{row['id']}: non-finite values")
        grid_tokens = row["tokens"] - row["drop_leading"]
        side = int(np.sqrt(grid_tokens))
        if side * side != grid_tokens:
            problems.append(f"{row['id']}: {grid_tokens} grid tokens are not square")
    return ValidationReport(checked=len(index), problems=problems)
