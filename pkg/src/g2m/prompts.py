"""Evaluation prompt construction and generation budgets.

The instruction text is shipped as a versioned asset so every adapter (and
any other implementation reading the same asset) sends byte-identical
prompts. Grid dimensions are rendered in plain ASCII ("12 x 12").
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from string import Template

from .grid_gen import Palette, CANONICAL_PALETTE

TEMPLATE_VERSION = "v1"
MAX_TOKEN_CAP = 2048


def _load_template() -> Template:
    text = resources.files("g2m.assets").joinpath(
        f"prompt_template_{TEMPLATE_VERSION}.txt").read_text()
    return Template(text.rstrip("\n"))


_TEMPLATE = _load_template()


@dataclass(frozen=True)
class ColorMapping:
    """Color-name to integer pairs, held sorted ascending by integer."""

    pairs: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("invalid mapping: empty")
        ordered = tuple(sorted(self.pairs, key=lambda p: p[1]))
        values = [v for _, v in ordered]
        if values != list(range(len(values))):
            raise ValueError(f"invalid mapping: integers must be exactly 0..{len(values) - 1}")
        names = [n for n, _ in ordered]
        if len(set(names)) != len(names):
            raise ValueError("invalid mapping: duplicate color name")
        object.__setattr__(self, "pairs", ordered)

    @classmethod
    def from_palette(cls, c: int, palette: Palette = CANONICAL_PALETTE) -> "ColorMapping":
        return cls(tuple((palette.name(i), i) for i in range(c)))

    def render(self) -> str:
        return "{" + ", ".join(f"{name}: {value}" for name, value in self.pairs) + "}"


def _coerce_mapping(mapping) -> ColorMapping:
    if isinstance(mapping, ColorMapping):
        return mapping
    if isinstance(mapping, dict):
        return ColorMapping(tuple(mapping.items()))
    return ColorMapping(tuple(mapping))


def build_prompt(h: int, w: int, mapping) -> str:
    """Render the canonical instruction text for an h x w grid."""
    if h < 1 or w < 1:
        raise ValueError(f"grid dimensions must be >= 1, got {h} x {w}")
    cm = _coerce_mapping(mapping)
    return _TEMPLATE.substitute(H=h, W=w, MAPPING=cm.render())


def max_tokens(h: int, w: int) -> int:
    """Generation budget: min(h*w*4 + h*20 + 50, 2048).

    Sized so a full matrix with separators always fits while runaway
    generations stay bounded.
    """
    if h < 1 or w < 1:
        raise ValueError(f"grid dimensions must be >= 1, got {h} x {w}")
    return min(h * w * 4 + h * 20 + 50, MAX_TOKEN_CAP)


_MAPPING_LINE_RE = re.compile(r"^Color Mapping: \{(.*)\}$", re.MULTILINE)


def extract_mapping(prompt: str) -> ColorMapping:
    """Recover the color mapping from a rendered prompt (round-trip check)."""
    m = _MAPPING_LINE_RE.search(prompt)
    if m is None:
        raise ValueError("prompt has no color-mapping line")
    pairs = []
    for item in m.group(1).split(", "):
        name, _, value = item.partition(": ")
        pairs.append((name, int(value)))
    return ColorMapping(tuple(pairs))
