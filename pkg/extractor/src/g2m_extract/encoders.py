"""Encoders the shim can hook: deterministic toy towers for offline work and
a transformers-backed path for real open-weight checkpoints.

The toy encoders reproduce the two token geometries of interest (a merger
style tower: 512 px, 16 px patches, 1024 tokens at width 1152; and a
pixel-shuffle style tower: 448 px resize, 14 px patches, 1024 tokens plus a
class token at width 1024) while being pure seeded linear maps, so extraction
runs anywhere and stays byte-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HOOK_POINTS = ("pre-merger", "pre-pixel-shuffle", "final-hidden")


@dataclass(frozen=True)
class ExtractionSpec:
    """What to run and what the hook must produce."""

    model_id: str
    hook_point: str
    resize: int | None          # pre-resize edge in pixels, None = native
    drop_leading: int           # leading tokens (class token) before the grid
    expected_tokens: int        # L including any leading tokens
    expected_dim: int           # D

    def __post_init__(self):
        if self.hook_point not in HOOK_POINTS:
            raise ValueError(f"unknown hook point {self.hook_point!r}")


def _fnv1a64(text: str) -> int:
    h = 0xCBF29CE484222325
    for b in text.encode("utf-8"):
        h ^= b
        h = (h * 0x100000001B3) & ((1 << 64) - 1)
    return h


def _resize_bilinear(image: np.ndarray, size: int) -> np.ndarray:
    """Half-pixel bilinear resize of an (H, W, 3) float image."""
    src = image.shape[0]
    s = (np.arange(size, dtype=np.float64) + 0.5) * (src / size) - 0.5
    i0 = np.floor(s).astype(np.int64)
    f = s - i0
    lo = np.clip(i0, 0, src - 1)
    hi = np.clip(i0 + 1, 0, src - 1)
    rows = image[lo][:, :, :] * (1 - f)[:, None, None] + image[hi][:, :, :] * f[:, None, None]
    cols = rows[:, lo, :] * (1 - f)[None, :, None] + rows[:, hi, :] * f[None, :, None]
    return cols


def _patch_tokens(image: np.ndarray, patch_len: int) -> np.ndarray:
    """(H, W, 3) float image -> (tokens, patch_len*patch_len*3), row-major."""
    side = image.shape[0] // patch_len
    blocks = image.reshape(side, patch_len, side, patch_len, 3)
    return blocks.transpose(0, 2, 1, 3, 4).reshape(side * side, -1)


class PatchProjectionEncoder:
    """Merger-style toy tower: fixed random projection of raw 16 px patches.

    The projection matrix is seeded from the model id, so two runs (or two
    machines) produce identical features for identical pixels.
    """

    def __init__(self, model_id: str = "toy-merger", image_size: int = 512,
                 patch_len: int = 16, dim: int = 1152):
        self.model_id = model_id
        self.image_size = image_size
        self.patch_len = patch_len
        self.dim = dim
        in_dim = patch_len * patch_len * 3
        rng = np.random.default_rng(_fnv1a64(model_id))
        self.projection = rng.normal(0.0, 1.0 / np.sqrt(in_dim),
                                     size=(in_dim, dim)).astype(np.float32)

    @property
    def tokens(self) -> int:
        return (self.image_size // self.patch_len) ** 2

    def encode(self, image: np.ndarray) -> np.ndarray:
        """uint8 (H, W, 3) -> (tokens, dim) float32 hidden states."""
        if image.shape[:2] != (self.image_size, self.image_size):
            raise ValueError(f"expected {self.image_size} px input, got {image.shape}")
        pixels = image.astype(np.float32) / 255.0
        return _patch_tokens(pixels, self.patch_len) @ self.projection


class ShuffleStyleEncoder:
    """Pixel-shuffle-style toy tower: 448 px resize, 14 px patches, plus a
    deterministic class token at position zero."""

    def __init__(self, model_id: str = "toy-pixelshuffle", resize: int = 448,
                 patch_len: int = 14, dim: int = 1024):
        self.model_id = model_id
        self.resize = resize
        self.patch_len = patch_len
        self.dim = dim
        in_dim = patch_len * patch_len * 3
        rng = np.random.default_rng(_fnv1a64(model_id))
        self.projection = rng.normal(0.0, 1.0 / np.sqrt(in_dim),
                                     size=(in_dim, dim)).astype(np.float32)
        self.cls_token = rng.normal(0.0, 1.0, size=(1, dim)).astype(np.float32)

    @property
    def tokens(self) -> int:
        return (self.resize // self.patch_len) ** 2 + 1

    def encode(self, image: np.ndarray) -> np.ndarray:
        pixels = image.astype(np.float32) / 255.0
        resized = _resize_bilinear(pixels, self.resize)
        grid = _patch_tokens(resized, self.patch_len) @ self.projection
        return np.concatenate([self.cls_token, grid], axis=0)


class HFEncoder:
    """transformers-backed tower: run the vision model and capture the input
    of a named module (the merger / pixel-shuffle boundary) or the final
    hidden state."""

    def __init__(self, model_id: str, hook_module: str | None = None,
                 resize: int | None = None, device: str = "cpu"):
        import torch
        from transformers import AutoModel

        self.torch = torch
        self.model_id = model_id
        self.hook_module = hook_module
        self.resize = resize
        self.model = AutoModel.from_pretrained(model_id).to(device).eval()
        self.device = device

    @classmethod
    def from_model(cls, model, hook_module: str | None = None,
                   resize: int | None = None):
        """Wrap an already-constructed torch model (tests, local checkpoints)."""
        import torch

        self = cls.__new__(cls)
        self.torch = torch
        self.model_id = model.__class__.__name__
        self.hook_module = hook_module
        self.resize = resize
        self.model = model.eval()
        self.device = "cpu"
        return self

    def encode(self, image: np.ndarray) -> np.ndarray:
        torch = self.torch
        pixels = image.astype(np.float32) / 255.0
        if self.resize and image.shape[0] != self.resize:
            pixels = _resize_bilinear(pixels, self.resize).astype(np.float32)
        batch = torch.from_numpy(pixels.transpose(2, 0, 1)[None]).to(self.device)

        captured = {}
        handle = None
        if self.hook_module:
            module = dict(self.model.named_modules()).get(self.hook_module)
            if module is None:
                raise ValueError(f"hook module {self.hook_module!r} not found in "
                                 f"{self.model_id}")

            def grab(_mod, inputs, _output):
                captured["hidden"] = inputs[0].detach()

            handle = module.register_forward_hook(grab)
        try:
            with torch.no_grad():
                output = self.model(pixel_values=batch)
        finally:
            if handle is not None:
                handle.remove()
        hidden = captured.get("hidden")
        if hidden is None:
            hidden = output.last_hidden_state.detach()
        return hidden[0].cpu().numpy().astype(np.float32)


TOY_SPECS = {
    "toy-merger": ExtractionSpec(
        model_id="toy-merger", hook_point="pre-merger", resize=None,
        drop_leading=0, expected_tokens=1024, expected_dim=1152),
    "toy-pixelshuffle": ExtractionSpec(
        model_id="toy-pixelshuffle", hook_point="pre-pixel-shuffle", resize=448,
        drop_leading=1, expected_tokens=1025, expected_dim=1024),
}


def build_encoder(spec: ExtractionSpec):
    if spec.model_id == "toy-merger":
        return PatchProjectionEncoder()
    if spec.model_id == "toy-pixelshuffle":
        return ShuffleStyleEncoder()
    if spec.model_id.startswith("hf:"):
        return HFEncoder(spec.model_id[3:], resize=spec.resize)
    raise ValueError(f"unknown model id {spec.model_id!r}")
