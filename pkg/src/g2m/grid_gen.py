"""Grid sampling, rendering, decoding, and dataset manifests.

Cells are tiled with floor arithmetic (cell i spans
[floor(i*S/n), floor((i+1)*S/n)) pixels), so any n <= image_size tiles the
image exactly even when n does not divide it. Cells are solid color with no
gridlines or anti-aliasing, which keeps center-pixel decoding exact.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from . import rng

GENERATOR_VERSION = "g2m-gen/1"
DEFAULT_IMAGE_SIZE = 512
DEFAULT_SPLIT_SIZES = {"train": 8000, "val": 2000, "test": 10000}
MAX_COLORS = 10


class DecodeError(ValueError):
    """A rendered image failed center-pixel decoding."""

    def __init__(self, message: str, cell: tuple[int, int]):
        super().__init__(message)
        self.cell = cell


@dataclass(frozen=True)
class Palette:
    """Ordered color table; list position defines the integer code.

    Invariants: unique names, pairwise channel-wise L-inf distance >= 64
    (so one pixel read identifies the color unambiguously).
    """

    entries: tuple[tuple[str, tuple[int, int, int]], ...]

    def __post_init__(self):
        names = [name for name, _ in self.entries]
        if len(set(names)) != len(names):
            raise ValueError("palette names must be unique")
        for name, rgb in self.entries:
            if len(rgb) != 3 or any(not 0 <= v <= 255 for v in rgb):
                raise ValueError(f"bad RGB triple for {name}: {rgb}")
        for i, (ni, ci) in enumerate(self.entries):
            for nj, cj in self.entries[i + 1:]:
                dist = max(abs(a - b) for a, b in zip(ci, cj))
                if dist < 64:
                    raise ValueError(
                        f"palette colors {ni} and {nj} too close (L-inf {dist} < 64)")

    def __len__(self) -> int:
        return len(self.entries)

    def name(self, index: int) -> str:
        return self.entries[index][0]

    def rgb(self, index: int) -> tuple[int, int, int]:
        return self.entries[index][1]

    def rgb_array(self) -> np.ndarray:
        return np.array([rgb for _, rgb in self.entries], dtype=np.uint8)

    def index_of_rgb(self) -> dict[tuple[int, int, int], int]:
        return {tuple(rgb): i for i, (_, rgb) in enumerate(self.entries)}


CANONICAL_PALETTE = Palette((
    ("White", (255, 255, 255)),
    ("Red", (255, 0, 0)),
    ("Blue", (0, 0, 255)),
    ("Green", (0, 128, 0)),
    ("Yellow", (255, 255, 0)),
    ("Orange", (255, 165, 0)),
    ("Purple", (128, 0, 128)),
    ("Cyan", (0, 255, 255)),
    ("Magenta", (255, 0, 255)),
    ("Black", (0, 0, 0)),
))


@dataclass(frozen=True)
class GridSpec:
    """Parameters of one benchmark configuration."""

    n: int
    c: int
    image_size: int = DEFAULT_IMAGE_SIZE
    palette: Palette = CANONICAL_PALETTE

    def __post_init__(self):
        if not 2 <= self.n <= 64:
            raise ValueError(f"grid side {self.n} outside 2..64")
        if not 1 <= self.c <= MAX_COLORS:
            raise ValueError(f"color count {self.c} outside 1..{MAX_COLORS}")
        if self.c > len(self.palette):
            raise ValueError(f"color count {self.c} exceeds palette size {len(self.palette)}")
        if self.image_size <= 0 or self.n > self.image_size:
            raise ValueError(f"image size {self.image_size} incompatible with n={self.n}")


def sample_matrix(seed: int, n: int, c: int) -> np.ndarray:
    """Sample an n x n matrix of uniform color indices in [0, c).

    Draws come from the SplitMix64 stream seeded by `seed`, consumed in
    row-major cell order, so results are identical on every platform.
    """
    if n < 1:
        raise ValueError(f"grid side must be >= 1, got {n}")
    if not 1 <= c <= MAX_COLORS:
        raise ValueError(f"color count {c} outside 1..{MAX_COLORS}")
    words = rng.splitmix64_words(seed, n * n)
    return rng.uniform_indices(words, c).reshape(n, n)


def cell_bounds(index: int, n: int, image_size: int) -> tuple[int, int]:
    """Half-open pixel interval of cell `index` along one axis."""
    if not 0 <= index < n:
        raise ValueError(f"cell index {index} out of range for n={n}")
    return (index * image_size) // n, ((index + 1) * image_size) // n


def cell_edges(n: int, image_size: int) -> np.ndarray:
    """All n+1 cell edge positions along one axis."""
    return (np.arange(n + 1, dtype=np.int64) * image_size) // n


def _expand_cells_to_pixels(cells: np.ndarray, image_size: int) -> np.ndarray:
    """Repeat an n x n (or n x n x k) cell array out to pixel resolution."""
    n = cells.shape[0]
    counts = np.diff(cell_edges(n, image_size))
    return np.repeat(np.repeat(cells, counts, axis=0), counts, axis=1)


def render(matrix: np.ndarray, palette: Palette = CANONICAL_PALETTE,
           image_size: int = DEFAULT_IMAGE_SIZE) -> np.ndarray:
    """Render a matrix to an RGB raster (image_size, image_size, 3) uint8."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"matrix must be square, got shape {matrix.shape}")
    if matrix.size and (matrix.min() < 0 or matrix.max() >= len(palette)):
        raise ValueError("matrix entry outside palette index range")
    pixels = _expand_cells_to_pixels(matrix, image_size)
    return palette.rgb_array()[pixels]


def decode_image(image: np.ndarray, palette: Palette, n: int) -> np.ndarray:
    """Recover the matrix by reading each cell's midpoint pixel.

    Raises DecodeError naming the first cell whose midpoint matches no
    palette color exactly.
    """
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[0] != image.shape[1] or image.shape[2] != 3:
        raise ValueError(f"expected square RGB image, got shape {image.shape}")
    if n < 1:
        raise ValueError("n must be >= 1")
    size = image.shape[0]
    mids = [(lo + hi) // 2 for lo, hi in (cell_bounds(i, n, size) for i in range(n))]
    lookup = palette.index_of_rgb()
    out = np.empty((n, n), dtype=np.int64)
    for r, my in enumerate(mids):
        for c, mx in enumerate(mids):
            key = tuple(int(v) for v in image[my, mx])
            idx = lookup.get(key)
            if idx is None:
                raise DecodeError(
                    f"cell ({r}, {c}) midpoint pixel {key} matches no palette color",
                    cell=(r, c))
            out[r, c] = idx
    return out


def png_bytes(image: np.ndarray) -> bytes:
    """Encode an RGB array as non-interlaced 8-bit PNG bytes."""
    buf = io.BytesIO()
    Image.fromarray(np.asarray(image, dtype=np.uint8), mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def load_png(path: str | Path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"))


@dataclass(frozen=True)
class GridInstance:
    """One sampled grid together with its rendered image."""

    spec: GridSpec
    seed: int
    matrix: np.ndarray
    image: np.ndarray

    @classmethod
    def sample(cls, spec: GridSpec, seed: int) -> "GridInstance":
        matrix = sample_matrix(seed, spec.n, spec.c)
        image = render(matrix, spec.palette, spec.image_size)
        return cls(spec=spec, seed=seed, matrix=matrix, image=image)


@dataclass(frozen=True)
class ManifestRecord:
    id: str
    seed: int
    n: int
    c: int
    matrix: list
    image: str

    def to_json(self) -> dict:
        return {"id": self.id, "seed": self.seed, "n": self.n, "c": self.c,
                "matrix": self.matrix, "image": self.image}

    @classmethod
    def from_json(cls, obj: dict) -> "ManifestRecord":
        return cls(id=obj["id"], seed=obj["seed"], n=obj["n"], c=obj["c"],
                   matrix=obj["matrix"], image=obj["image"])


@dataclass
class DatasetManifest:
    split: str
    records: list[ManifestRecord]
    generator_version: str = GENERATOR_VERSION
    root: Path | None = None

    def image_path(self, record: ManifestRecord) -> Path:
        if self.root is None:
            raise ValueError("manifest has no root directory")
        return self.root / record.image


def sample_seed(base_seed: int, split: str, ordinal: int) -> int:
    """Per-sample seed: ordinal-th output of a split-specific stream.

    Splits get disjoint streams by xoring the FNV-1a hash of the split name
    into the base seed, so train/val/test never share sample seeds.
    """
    return rng.splitmix64_at(base_seed ^ rng.fnv1a64(split), ordinal)


def build_split(spec: GridSpec, split: str, count: int, base_seed: int,
                out_dir: str | Path, force: bool = False) -> DatasetManifest:
    """Generate `count` samples for one split under out_dir.

    Writes images/<id>.png plus <split>.jsonl and <split>.meta.json; sample
    ids and seeds are a pure function of (base_seed, split, ordinal).
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    out_dir = Path(out_dir)
    manifest_path = out_dir / f"{split}.jsonl"
    if manifest_path.exists() and not force:
        raise FileExistsError(f"{manifest_path} exists; pass force=True to overwrite")
    (out_dir / "images").mkdir(parents=True, exist_ok=True)

    records = []
    lines = []
    for ordinal in range(count):
        seed = sample_seed(base_seed, split, ordinal)
        sample_id = f"{split}-{ordinal:05d}"
        inst = GridInstance.sample(spec, seed)
        rel = f"images/{sample_id}.png"
        (out_dir / rel).write_bytes(png_bytes(inst.image))
        rec = ManifestRecord(id=sample_id, seed=seed, n=spec.n, c=spec.c,
                             matrix=inst.matrix.tolist(), image=rel)
        records.append(rec)
        lines.append(json.dumps(rec.to_json(), separators=(",", ":")))
    manifest_path.write_text("\n".join(lines) + ("\n" if lines else ""))
    meta = {"split": split, "generator_version": GENERATOR_VERSION,
            "base_seed": base_seed, "count": count,
            "n": spec.n, "c": spec.c, "image_size": spec.image_size}
    (out_dir / f"{split}.meta.json").write_text(json.dumps(meta, indent=1, sort_keys=True))
    return DatasetManifest(split=split, records=records, root=out_dir)


def build_dataset(spec: GridSpec, counts: dict[str, int], base_seed: int,
                  out_dir: str | Path, force: bool = False) -> dict[str, DatasetManifest]:
    """Build every split in `counts` (defaults: train 8000 / val 2000 / test 10000)."""
    return {split: build_split(spec, split, count, base_seed, out_dir, force=force)
            for split, count in counts.items()}


def load_manifest(path: str | Path) -> DatasetManifest:
    path = Path(path)
    records = [ManifestRecord.from_json(json.loads(line))
               for line in path.read_text().splitlines() if line.strip()]
    split = path.stem
    version = GENERATOR_VERSION
    meta_path = path.with_suffix(".meta.json")
    if meta_path.exists():
        meta = json.loads(meta_path.read_text())
        split = meta.get("split", split)
        version = meta.get("generator_version", version)
    return DatasetManifest(split=split, records=records,
                           generator_version=version, root=path.parent)


def verify_manifest(manifest: DatasetManifest,
                    palette: Palette = CANONICAL_PALETTE) -> list[str]:
    """Check that every image decodes back to its stored matrix; returns problems."""
    problems = []
    seen = set()
    for rec in manifest.records:
        if rec.id in seen:
            problems.append(f"{rec.id}: duplicate id")
        seen.add(rec.id)
        img_path = manifest.image_path(rec)
        if not img_path.exists():
            problems.append(f"{rec.id}: missing image {rec.image}")
            continue
        decoded = decode_image(load_png(img_path), palette, rec.n)
        if not np.array_equal(decoded, np.asarray(rec.matrix)):
            problems.append(f"{rec.id}: decoded matrix differs from manifest")
    return problems
