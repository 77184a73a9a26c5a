"""Spatial probe over frozen-encoder feature maps, implemented from scratch.

Architecture: 1x1 conv (d -> hidden 512) -> batch norm -> exact GELU ->
1x1 conv (hidden -> classes), trained with cross-entropy and AdamW under a
cosine schedule with linear warmup. Because every layer acts per spatial
position, the probe is one shared linear readout swept across the grid.

All math lives in a dtype-generic numpy reference path (float64 capable,
used for gradient checks); float32 training transparently switches to fused
numba kernels that compute the identical formulas. Reductions accumulate in
float64 regardless of path.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import erf

from . import g2mf
from .grid_gen import cell_edges
from .metrics import AccuracyGrid, accumulate_heatmap, exact_match

try:
    from . import _kernels
    _HAVE_KERNELS = True
except ImportError:  # numba unavailable; reference path handles everything
    _HAVE_KERNELS = False

DEFAULT_HIDDEN = 512
BN_EPS = 1e-5
BN_MOMENTUM = 0.1
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
_SQRT1_2 = 0.7071067811865476
_INV_SQRT_2PI = 0.3989422804014327

TRAINABLE_FIELDS = ("conv1_w", "conv1_b", "bn_gamma", "bn_beta", "conv2_w", "conv2_b")


# ---------------------------------------------------------------------------
# parameters


@dataclass
class ProbeParams:
    conv1_w: np.ndarray  # (hidden, d)
    conv1_b: np.ndarray  # (hidden,)
    bn_gamma: np.ndarray
    bn_beta: np.ndarray
    bn_mean: np.ndarray  # running statistics, eval-mode normalization
    bn_var: np.ndarray
    conv2_w: np.ndarray  # (classes, hidden)
    conv2_b: np.ndarray  # (classes,)
    bn_eps: float = BN_EPS
    bn_momentum: float = BN_MOMENTUM

    @property
    def in_dim(self) -> int:
        return self.conv1_w.shape[1]

    @property
    def hidden(self) -> int:
        return self.conv1_w.shape[0]

    @property
    def classes(self) -> int:
        return self.conv2_w.shape[0]

    @property
    def dtype(self):
        return self.conv1_w.dtype

    @classmethod
    def init(cls, d: int, classes: int, hidden: int = DEFAULT_HIDDEN,
             seed: int = 0, dtype=np.float32) -> "ProbeParams":
        rng = np.random.default_rng(seed)
        w1 = rng.normal(0.0, math.sqrt(2.0 / d), size=(hidden, d))
        w2 = rng.normal(0.0, math.sqrt(1.0 / hidden), size=(classes, hidden))
        z = lambda *s: np.zeros(s, dtype=dtype)
        return cls(conv1_w=w1.astype(dtype), conv1_b=z(hidden),
                   bn_gamma=np.ones(hidden, dtype=dtype), bn_beta=z(hidden),
                   bn_mean=z(hidden), bn_var=np.ones(hidden, dtype=dtype),
                   conv2_w=w2.astype(dtype), conv2_b=z(classes))

    def copy(self) -> "ProbeParams":
        return ProbeParams(**{f: getattr(self, f).copy() for f in _ALL_TENSORS},
                           bn_eps=self.bn_eps, bn_momentum=self.bn_momentum)

    def astype(self, dtype) -> "ProbeParams":
        return ProbeParams(**{f: getattr(self, f).astype(dtype) for f in _ALL_TENSORS},
                           bn_eps=self.bn_eps, bn_momentum=self.bn_momentum)


_ALL_TENSORS = ("conv1_w", "conv1_b", "bn_gamma", "bn_beta",
                "bn_mean", "bn_var", "conv2_w", "conv2_b")


@dataclass
class ProbeGrads:
    conv1_w: np.ndarray
    conv1_b: np.ndarray
    bn_gamma: np.ndarray
    bn_beta: np.ndarray
    conv2_w: np.ndarray
    conv2_b: np.ndarray


def trainable_vector(params: ProbeParams) -> np.ndarray:
    """Flatten the trainable tensors into one float64 vector (grad checks)."""
    return np.concatenate([np.asarray(getattr(params, f), dtype=np.float64).ravel()
                           for f in TRAINABLE_FIELDS])


def with_trainable(params: ProbeParams, vec: np.ndarray) -> ProbeParams:
    """Rebuild params with trainable tensors taken from a flat vector."""
    out = params.copy()
    pos = 0
    for f in TRAINABLE_FIELDS:
        ref = getattr(params, f)
        chunk = vec[pos:pos + ref.size].reshape(ref.shape).astype(ref.dtype)
        setattr(out, f, chunk)
        pos += ref.size
    return out


def grads_vector(grads: ProbeGrads) -> np.ndarray:
    return np.concatenate([np.asarray(getattr(grads, f), dtype=np.float64).ravel()
                           for f in TRAINABLE_FIELDS])


# ---------------------------------------------------------------------------
# feature handling


def reshape_grid(sequence: np.ndarray, drop_leading: int = 0) -> np.ndarray:
    """Turn an (L, D) token sequence into a channels-first (D, s, s) map.

    drop_leading removes that many leading tokens first (1 for encoders that
    prepend a class token, 0 for merger-style encoders); the remainder must
    be a perfect square laid out row-major.
    """
    seq = np.asarray(sequence)
    if seq.ndim != 2:
        raise ValueError(f"expected (L, D) sequence, got shape {seq.shape}")
    if drop_leading < 0 or drop_leading >= seq.shape[0]:
        raise ValueError(f"drop_leading {drop_leading} invalid for L={seq.shape[0]}")
    body = seq[drop_leading:]
    side = math.isqrt(body.shape[0])
    if side * side != body.shape[0]:
        raise ValueError(f"{body.shape[0]} tokens after dropping {drop_leading} "
                         "do not form a square grid")
    return np.ascontiguousarray(body.reshape(side, side, -1).transpose(2, 0, 1))


def interpolate(fm: np.ndarray, n: int) -> np.ndarray:
    """Bilinear resize of a (d, h, w) map to (d, n, n).

    Sampling uses half-pixel centers (output i reads source (i+0.5)*h/n - 0.5)
    with edge clamping; resampling at the native size reproduces the input.
    """
    fm = np.asarray(fm)
    if fm.ndim != 3:
        raise ValueError(f"expected (d, h, w) map, got shape {fm.shape}")
    if n < 1:
        raise ValueError("target size must be >= 1")
    d, h, w = fm.shape

    def taps(src: int):
        s = (np.arange(n, dtype=np.float64) + 0.5) * (src / n) - 0.5
        i0 = np.floor(s).astype(np.int64)
        f = (s - i0).astype(fm.dtype)
        lo = np.clip(i0, 0, src - 1)
        hi = np.clip(i0 + 1, 0, src - 1)
        return lo, hi, f

    y0, y1, fy = taps(h)
    x0, x1, fx = taps(w)
    wy = fy[:, None]
    wx = fx[None, :]
    v00 = fm[:, y0[:, None], x0[None, :]]
    v01 = fm[:, y0[:, None], x1[None, :]]
    v10 = fm[:, y1[:, None], x0[None, :]]
    v11 = fm[:, y1[:, None], x1[None, :]]
    return (v00 * (1 - wy) * (1 - wx) + v01 * (1 - wy) * wx
            + v10 * wy * (1 - wx) + v11 * wy * wx)


def load_features(path) -> np.ndarray:
    """Read a G2MF tensor (either an (L, D) sequence or a (d, h, w) map)."""
    return g2mf.load(path)


def save_features(path, array: np.ndarray) -> None:
    g2mf.save(path, array)


def synthetic_features(matrix: np.ndarray, noise_sigma: float, d: int,
                       seed: int = 0) -> np.ndarray:
    """Desk-scale stand-in for a frozen encoder.

    Renders the matrix onto a virtual 512 px image and gives each 16 px patch
    the mean one-hot color embedding (first 10 channels) of the pixels it
    covers, plus seeded Gaussian noise in all d channels. Perfectly aligned
    grids (n = 32) therefore produce clean one-hot patches, while misaligned
    grids produce the same cell mixtures a real patch embedding would see.
    """
    matrix = np.asarray(matrix)
    n = matrix.shape[0]
    if matrix.shape != (n, n) or n > 64:
        raise ValueError(f"matrix must be square with side <= 64, got {matrix.shape}")
    if d < 10:
        raise ValueError("d must be >= 10 to hold the color channels")
    edges = cell_edges(n, 512)
    counts = np.diff(edges)
    owner = np.repeat(np.arange(n), counts)
    pix = matrix[owner[:, None], owner[None, :]]
    blocks = pix.reshape(32, 16, 32, 16)
    feats = np.zeros((d, 32, 32), dtype=np.float32)
    for color in range(10):
        feats[color] = (blocks == color).mean(axis=(1, 3), dtype=np.float64)
    rng = np.random.default_rng(seed)
    if noise_sigma:
        feats += rng.normal(0.0, noise_sigma, size=feats.shape).astype(np.float32)
    return feats


# ---------------------------------------------------------------------------
# forward / backward


KERNELS_ENABLED = True  # escape hatch; the reference path computes the same math


def _use_kernels(arr: np.ndarray) -> bool:
    return _HAVE_KERNELS and KERNELS_ENABLED and arr.dtype == np.float32


def _forward_flat(params: ProbeParams, x: np.ndarray, train: bool):
    """Forward over flattened positions x (N, d).

    Returns (logits, cache, batch_stats); cache is None in eval mode and
    batch_stats is None unless train. Never mutates params.
    """
    dt = x.dtype
    y1 = x @ params.conv1_w.T + params.conv1_b
    if train:
        mu64 = y1.mean(axis=0, dtype=np.float64)
        var64 = y1.var(axis=0, dtype=np.float64)
    else:
        mu64 = params.bn_mean.astype(np.float64)
        var64 = params.bn_var.astype(np.float64)
    istd = (1.0 / np.sqrt(var64 + params.bn_eps)).astype(dt)
    mu = mu64.astype(dt)

    if not train and _use_kernels(y1):
        act = np.empty_like(y1)
        _kernels.norm_gelu_eval(y1, mu, istd, params.bn_gamma, params.bn_beta, act)
        xhat = phi = None
    elif train and _use_kernels(y1):
        xhat = np.empty_like(y1)
        phi = np.empty_like(y1)
        act = np.empty_like(y1)
        _kernels.norm_gelu_forward(y1, mu, istd, params.bn_gamma, params.bn_beta,
                                   xhat, phi, act)
    else:
        xhat = (y1 - mu) * istd
        z = params.bn_gamma * xhat + params.bn_beta
        phi = 0.5 * (1.0 + erf(z * dt.type(_SQRT1_2)))
        act = z * phi
        if not train:
            xhat = phi = None

    logits = act @ params.conv2_w.T + params.conv2_b
    cache = None
    if train:
        cache = {"x": x, "xhat": xhat, "phi": phi, "act": act, "istd": istd}
    stats = (mu64, var64) if train else None
    return logits, cache, stats


def _update_running_stats(params: ProbeParams, stats) -> None:
    mu64, var64 = stats
    m = params.bn_momentum
    dt = params.bn_mean.dtype
    params.bn_mean = ((1 - m) * params.bn_mean + m * mu64.astype(dt)).astype(dt)
    params.bn_var = ((1 - m) * params.bn_var + m * var64.astype(dt)).astype(dt)


def _ce_flat(logits: np.ndarray, labels: np.ndarray):
    """Mean cross-entropy over positions plus its logit gradient."""
    classes = logits.shape[1]
    if labels.min() < 0 or labels.max() >= classes:
        raise ValueError(f"label outside [0, {classes})")
    mx = logits.max(axis=1, keepdims=True)
    ez = np.exp(logits - mx)
    se = ez.sum(axis=1, keepdims=True)
    picked = logits[np.arange(logits.shape[0]), labels]
    loss = float(np.mean((np.log(se[:, 0]) + mx[:, 0]) - picked, dtype=np.float64))
    dlogits = ez / se
    dlogits[np.arange(logits.shape[0]), labels] -= 1.0
    dlogits /= logits.shape[0]
    return loss, dlogits.astype(logits.dtype)


def _backward_flat(params: ProbeParams, cache: dict, dlogits: np.ndarray) -> ProbeGrads:
    x, xhat, phi, act, istd = (cache["x"], cache["xhat"], cache["phi"],
                               cache["act"], cache["istd"])
    dt = x.dtype
    n = x.shape[0]

    d_conv2_w = dlogits.T @ act
    d_conv2_b = dlogits.sum(axis=0, dtype=np.float64).astype(dt)
    dact = dlogits @ params.conv2_w

    if _use_kernels(dact):
        dz = np.empty_like(dact)
        _kernels.gelu_backward(dact, xhat, phi, params.bn_gamma, params.bn_beta, dz)
    else:
        z = params.bn_gamma * xhat + params.bn_beta
        pdf = np.exp(-0.5 * z * z) * dt.type(_INV_SQRT_2PI)
        dz = dact * (phi + z * pdf)

    d_beta64 = dz.sum(axis=0, dtype=np.float64)
    d_gamma64 = np.einsum("nc,nc->c", dz, xhat, dtype=np.float64)
    # dxhat = dz * gamma, so its per-channel means come from the sums above
    gamma64 = params.bn_gamma.astype(np.float64)
    mean_dxhat = (gamma64 * d_beta64 / n).astype(dt)
    mean_dxhat_xhat = (gamma64 * d_gamma64 / n).astype(dt)

    if _use_kernels(dz):
        dy1 = np.empty_like(dz)
        _kernels.bn_input_backward(dz, xhat, params.bn_gamma, istd,
                                   mean_dxhat, mean_dxhat_xhat, dy1)
    else:
        dy1 = istd * (dz * params.bn_gamma - mean_dxhat - xhat * mean_dxhat_xhat)

    d_conv1_w = dy1.T @ x
    d_conv1_b = dy1.sum(axis=0, dtype=np.float64).astype(dt)
    return ProbeGrads(conv1_w=d_conv1_w, conv1_b=d_conv1_b,
                      bn_gamma=d_gamma64.astype(dt), bn_beta=d_beta64.astype(dt),
                      conv2_w=d_conv2_w, conv2_b=d_conv2_b)


def _flatten_positions(features: np.ndarray):
    """(d, n, n) or (B, d, n, n) -> ((B*n*n, d), batch flag, B, n)."""
    arr = np.asarray(features)
    single = arr.ndim == 3
    if single:
        arr = arr[None]
    if arr.ndim != 4 or arr.shape[2] != arr.shape[3]:
        raise ValueError(f"expected (B, d, n, n) features, got shape {arr.shape}")
    b, d, n, _ = arr.shape
    flat = np.ascontiguousarray(arr.transpose(0, 2, 3, 1).reshape(b * n * n, d))
    return flat, single, b, n


def probe_forward(features: np.ndarray, params: ProbeParams,
                  mode: str = "eval") -> np.ndarray:
    """Per-position class logits for (d, n, n) or (B, d, n, n) features.

    Train mode normalizes with batch statistics and updates the running
    estimates; eval mode uses the stored running statistics. Softmax is left
    to the loss.
    """
    if mode not in ("train", "eval"):
        raise ValueError(f"unknown mode {mode!r}")
    flat, single, b, n = _flatten_positions(features)
    if flat.shape[1] != params.in_dim:
        raise ValueError(f"feature channels {flat.shape[1]} != probe input {params.in_dim}")
    logits_flat, _, stats = _forward_flat(params, flat, train=(mode == "train"))
    if stats is not None:
        _update_running_stats(params, stats)
    logits = logits_flat.reshape(b, n, n, params.classes).transpose(0, 3, 1, 2)
    return logits[0] if single else logits


def cross_entropy(logits: np.ndarray, labels: np.ndarray):
    """Mean per-cell cross-entropy; accepts (C, n, n) or (B, C, n, n) logits.

    Returns (loss, dlogits) with dlogits in the input layout.
    """
    arr = np.asarray(logits)
    single = arr.ndim == 3
    if single:
        arr = arr[None]
    labs = np.asarray(labels)
    if single:
        labs = labs[None]
    b, classes, n, _ = arr.shape
    flat = np.ascontiguousarray(arr.transpose(0, 2, 3, 1).reshape(-1, classes))
    loss, dflat = _ce_flat(flat, labs.reshape(-1))
    dlogits = dflat.reshape(b, n, n, classes).transpose(0, 3, 1, 2)
    return loss, (dlogits[0] if single else dlogits)


def loss_and_grads(params: ProbeParams, features: np.ndarray, labels: np.ndarray,
                   update_stats: bool = False):
    """Train-mode forward + cross-entropy + full manual backward.

    Gradients cover conv2, GELU, batch norm (through the batch statistics),
    and conv1. Running statistics move only when update_stats is set.
    """
    flat, single, b, n = _flatten_positions(features)
    if flat.shape[1] != params.in_dim:
        raise ValueError(f"feature channels {flat.shape[1]} != probe input {params.in_dim}")
    labs = np.asarray(labels).reshape(-1)
    logits, cache, stats = _forward_flat(params, flat, train=True)
    loss, dlogits = _ce_flat(logits, labs)
    grads = _backward_flat(params, cache, dlogits)
    if update_stats:
        _update_running_stats(params, stats)
    return loss, grads


# ---------------------------------------------------------------------------
# training


@dataclass
class TrainConfig:
    lr: float = 1e-2
    weight_decay: float = 1e-4
    batch_size: int = 32
    max_iters: int = 5000
    warmup_frac: float = 0.05
    seed: int = 0
    hidden: int = DEFAULT_HIDDEN
    eval_every: int = 100
    stop_at_val_acc: float | None = None
    patience: int | None = None  # evals without improvement before stopping

    def __post_init__(self):
        if min(self.lr, self.weight_decay, self.batch_size, self.max_iters) <= 0:
            raise ValueError("lr, weight_decay, batch_size, max_iters must be positive")
        if not 0 <= self.warmup_frac < 1:
            raise ValueError("warmup_frac must lie in [0, 1)")


def lr_at(iteration: int, config: TrainConfig) -> float:
    """Linear warmup to lr over the first warmup_frac of max_iters, then
    cosine decay to zero at max_iters."""
    warmup = int(round(config.max_iters * config.warmup_frac))
    if iteration < warmup:
        return config.lr * iteration / warmup
    progress = (iteration - warmup) / max(config.max_iters - warmup, 1)
    return config.lr * 0.5 * (1.0 + math.cos(math.pi * min(progress, 1.0)))


@dataclass
class TrainLog:
    losses: list = field(default_factory=list)   # (iteration, lr, loss)
    evals: list = field(default_factory=list)    # (iteration, val cell accuracy)
    best_iter: int = -1
    best_val_acc: float = -1.0
    stopped_at: int = 0


@dataclass
class EvalReport:
    exact_match: float
    cell_accuracy: float
    acc_grid: AccuracyGrid


def _prepare_features(features, n: int) -> np.ndarray:
    """Resize once and lay out as (N, n*n, d) float32 for batch gathers."""
    out = []
    for fm in features:
        fm = np.asarray(fm, dtype=np.float32)
        if fm.shape[1:] != (n, n):
            fm = interpolate(fm, n)
        out.append(fm.transpose(1, 2, 0).reshape(n * n, fm.shape[0]))
    return np.ascontiguousarray(np.stack(out))


def _adamw_step(params: ProbeParams, grads: ProbeGrads, state: dict,
                lr: float, weight_decay: float, t: int) -> None:
    bc1 = 1.0 - ADAM_BETA1 ** t
    bc2 = 1.0 - ADAM_BETA2 ** t
    for name in TRAINABLE_FIELDS:
        g = getattr(grads, name)
        m, v = state[name]
        m *= ADAM_BETA1
        m += (1 - ADAM_BETA1) * g
        v *= ADAM_BETA2
        v += (1 - ADAM_BETA2) * np.square(g)
        p = getattr(params, name)
        p *= 1.0 - lr * weight_decay
        p -= (lr / bc1) * m / (np.sqrt(v / bc2) + ADAM_EPS)


def _evaluate_flat(params: ProbeParams, flat: np.ndarray,
                   labels: np.ndarray) -> EvalReport:
    count, positions, d = flat.shape
    n = labels.shape[-1]
    results = []
    chunk = max(1, 131072 // positions)
    for start in range(0, count, chunk):
        stop = min(start + chunk, count)
        x = flat[start:stop].reshape(-1, d)
        logits, _, _ = _forward_flat(params, x, train=False)
        preds = logits.argmax(axis=1).reshape(stop - start, n, n)
        results.extend((preds[i], labels[start + i]) for i in range(stop - start))
    grid = accumulate_heatmap(results)
    em = float(np.mean([exact_match(p, t) for p, t in results]))
    cell = float(grid.hits.sum() / grid.totals.sum())
    return EvalReport(exact_match=em, cell_accuracy=cell, acc_grid=grid)


def evaluate(params: ProbeParams, features, labels) -> EvalReport:
    """Eval-mode metrics for a feature/label set (resizing as needed)."""
    labels = np.asarray(labels)
    if labels.ndim != 3 or labels.shape[1] != labels.shape[2]:
        raise ValueError(f"labels must be (N, n, n), got shape {labels.shape}")
    flat = _prepare_features(features, labels.shape[-1])
    return _evaluate_flat(params, flat, labels)


def train(config: TrainConfig, train_features, train_labels,
          val_features, val_labels, c: int):
    """Train a probe, checkpointing the best validation cell accuracy.

    Shuffling, init, and therefore the final parameters are pure functions
    of the config seed. Aborts on a non-finite loss.
    """
    train_labels = np.asarray(train_labels, dtype=np.int64)
    val_labels = np.asarray(val_labels, dtype=np.int64)
    if len(train_labels) == 0:
        raise ValueError("empty training set")
    n = train_labels.shape[-1]
    flat = _prepare_features(train_features, n)
    val_flat = _prepare_features(val_features, n)
    d = flat.shape[-1]

    params = ProbeParams.init(d, c, hidden=config.hidden, seed=config.seed)
    state = {name: (np.zeros_like(getattr(params, name)),
                    np.zeros_like(getattr(params, name)))
             for name in TRAINABLE_FIELDS}
    rng = np.random.default_rng(config.seed)
    log = TrainLog()
    best = params.copy()
    stale = 0

    count = flat.shape[0]
    order = rng.permutation(count)
    ptr = 0
    for it in range(config.max_iters):
        if ptr + config.batch_size > count:
            order = rng.permutation(count)
            ptr = 0
        idx = order[ptr:ptr + config.batch_size]
        ptr += config.batch_size

        x = flat[idx].reshape(-1, d)
        y = train_labels[idx].reshape(-1)
        with np.errstate(over="ignore", invalid="ignore"):  # divergence aborts below
            logits, cache, stats = _forward_flat(params, x, train=True)
            loss, dlogits = _ce_flat(logits, y)
        if not math.isfinite(loss):
            raise RuntimeError(f"training diverged: loss={loss} at iteration {it} "
                               f"(lr={lr_at(it, config):.3g})")
        grads = _backward_flat(params, cache, dlogits)
        _update_running_stats(params, stats)
        lr = lr_at(it, config)
        _adamw_step(params, grads, state, lr, config.weight_decay, it + 1)
        log.losses.append((it, lr, loss))
        log.stopped_at = it + 1

        if (it + 1) % config.eval_every == 0 or it + 1 == config.max_iters:
            report = _evaluate_flat(params, val_flat, val_labels)
            log.evals.append((it + 1, report.cell_accuracy))
            if report.cell_accuracy > log.best_val_acc:
                log.best_val_acc = report.cell_accuracy
                log.best_iter = it + 1
                best = params.copy()
                stale = 0
            else:
                stale += 1
            if (config.stop_at_val_acc is not None
                    and report.cell_accuracy >= config.stop_at_val_acc):
                break
            if config.patience is not None and stale >= config.patience:
                break
    return best, log


# ---------------------------------------------------------------------------
# checkpoints


def save_checkpoint(directory, params: ProbeParams, extra: dict | None = None) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    tensors = {}
    for name in _ALL_TENSORS:
        fname = f"{name}.g2mf"
        g2mf.save(directory / fname, getattr(params, name))
        tensors[name] = fname
    meta = {"in_dim": params.in_dim, "hidden": params.hidden,
            "classes": params.classes, "bn_eps": params.bn_eps,
            "bn_momentum": params.bn_momentum, "tensors": tensors,
            "extra": extra or {}}
    (directory / "probe.json").write_text(json.dumps(meta, indent=1, sort_keys=True))


def load_checkpoint(directory):
    directory = Path(directory)
    meta = json.loads((directory / "probe.json").read_text())
    arrays = {name: g2mf.load(directory / fname)
              for name, fname in meta["tensors"].items()}
    params = ProbeParams(bn_eps=meta["bn_eps"], bn_momentum=meta["bn_momentum"],
                         **arrays)
    return params, meta.get("extra", {})
