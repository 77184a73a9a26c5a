"""Independent reference implementations used to derive golden values.

Everything here is deliberately written in the dumbest possible style
(scalar loops, pure-Python integers, no shared code with src/) so that
the package under test and its oracle cannot fail the same way.
"""

import math

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64_sequence(seed, count):
    """Reference SplitMix64 stream: the canonical scalar algorithm."""
    out = []
    state = seed & MASK64
    for _ in range(count):
        state = (state + GOLDEN) & MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        z = z ^ (z >> 31)
        out.append(z)
    return out


def uniform_draw(u, c):
    """Map a 64-bit word to [0, c) via the top-53-bit rule."""
    return ((u >> 11) * c) >> 53


def sample_matrix_reference(seed, n, c):
    words = splitmix64_sequence(seed, n * n)
    vals = [uniform_draw(u, c) for u in words]
    return [vals[r * n:(r + 1) * n] for r in range(n)]


def pixel_tiling_reference(n, image_size):
    """Assign every pixel to a cell by scanning candidate intervals.

    Returns per-cell [start, stop) pairs recovered from the pixel map,
    not from the floor formula.
    """
    owner = []
    for p in range(image_size):
        # pixel p belongs to cell i iff floor(i*S/n) <= p < floor((i+1)*S/n);
        # recover i by linear scan so no arithmetic is shared with cell_bounds
        for i in range(n):
            lo = (i * image_size) // n
            hi = ((i + 1) * image_size) // n
            if lo <= p < hi:
                owner.append(i)
                break
    bounds = []
    for i in range(n):
        pix = [p for p, o in enumerate(owner) if o == i]
        bounds.append((min(pix), max(pix) + 1))
    return owner, bounds


def axis_class_pixelscan(a, b, patch_len):
    """Classify [a, b) against the patch lattice by per-pixel patch ids."""
    patches = {p // patch_len for p in range(a, b)}
    if len(patches) > 1:
        return "Cross"
    touches = (a % patch_len == 0) or (b % patch_len == 0)
    return "Edge" if touches else "Interior"


def interaction_pixelscan(r, c, n, image_size, patch_len):
    ys = ((r * image_size) // n, ((r + 1) * image_size) // n)
    xs = ((c * image_size) // n, ((c + 1) * image_size) // n)
    ay = axis_class_pixelscan(ys[0], ys[1], patch_len)
    ax = axis_class_pixelscan(xs[0], xs[1], patch_len)
    order = {"Interior": 0, "Edge": 1, "Cross": 2}
    pair = sorted([ay, ax], key=order.get)
    return "-".join(s[:3] for s in pair)


def area_dominance_pixelcount(r, c, n, image_size, patch_len):
    """Max patch overlap / cell area, counted pixel by pixel."""
    y0, y1 = (r * image_size) // n, ((r + 1) * image_size) // n
    x0, x1 = (c * image_size) // n, ((c + 1) * image_size) // n
    counts = {}
    for y in range(y0, y1):
        for x in range(x0, x1):
            key = (y // patch_len, x // patch_len)
            counts[key] = counts.get(key, 0) + 1
    area = (y1 - y0) * (x1 - x0)
    return max(counts.values()) / area


def bilinear_reference(src, n_out):
    """Scalar bilinear resize, half-pixel centers, edge clamp.

    src is a list-of-lists (h x w); returns n_out x n_out floats.
    """
    h = len(src)
    w = len(src[0])
    out = [[0.0] * n_out for _ in range(n_out)]
    for i in range(n_out):
        sy = (i + 0.5) * h / n_out - 0.5
        y0 = math.floor(sy)
        fy = sy - y0
        y0c = min(max(y0, 0), h - 1)
        y1c = min(max(y0 + 1, 0), h - 1)
        for j in range(n_out):
            sx = (j + 0.5) * w / n_out - 0.5
            x0 = math.floor(sx)
            fx = sx - x0
            x0c = min(max(x0, 0), w - 1)
            x1c = min(max(x0 + 1, 0), w - 1)
            v00 = src[y0c][x0c]
            v01 = src[y0c][x1c]
            v10 = src[y1c][x0c]
            v11 = src[y1c][x1c]
            out[i][j] = (v00 * (1 - fy) * (1 - fx) + v01 * (1 - fy) * fx
                         + v10 * fy * (1 - fx) + v11 * fy * fx)
    return out


def probe_forward_reference(x, params):
    """Eval-mode probe forward in scalar float arithmetic.

    x: list of D-lists, one per spatial position.
    params: dict with w1 (hidden x d), b1, gamma, beta, running_mean,
    running_var, eps, w2 (classes x hidden), b2, all plain lists.
    Returns per-position class logits.
    """
    w1, b1 = params["w1"], params["b1"]
    w2, b2 = params["w2"], params["b2"]
    gamma, beta = params["gamma"], params["beta"]
    rm, rv, eps = params["running_mean"], params["running_var"], params["eps"]
    hidden = len(w1)
    classes = len(w2)
    logits = []
    for pos in x:
        h = []
        for j in range(hidden):
            acc = b1[j]
            for k, v in enumerate(pos):
                acc += w1[j][k] * v
            z = gamma[j] * (acc - rm[j]) / math.sqrt(rv[j] + eps) + beta[j]
            h.append(z * 0.5 * (1.0 + math.erf(z / math.sqrt(2.0))))
        row = []
        for m in range(classes):
            acc = b2[m]
            for j in range(hidden):
                acc += w2[m][j] * h[j]
            row.append(acc)
        logits.append(row)
    return logits


def cross_entropy_reference(logits, labels):
    """Mean negative log softmax probability of the true class."""
    total = 0.0
    for row, lab in zip(logits, labels):
        mx = max(row)
        lse = mx + math.log(sum(math.exp(v - mx) for v in row))
        total += lse - row[lab]
    return total / len(logits)


def exact_match_reference(pred, truth):
    if pred is None:
        return False
    if len(pred) != len(truth):
        return False
    for pr, tr in zip(pred, truth):
        if len(pr) != len(tr):
            return False
        for a, b in zip(pr, tr):
            if a != b:
                return False
    return True


def cell_accuracy_reference(pred, truth):
    n = len(truth)
    if pred is None or len(pred) != n or any(len(r) != n for r in pred):
        return 0.0
    good = 0
    for r in range(n):
        for c in range(n):
            if pred[r][c] == truth[r][c]:
                good += 1
    return good / (n * n)


def confusion_reference(results, num_colors):
    """Pooled per-color TP/FP/FN over shape-matching predictions."""
    tp = [0] * num_colors
    fp = [0] * num_colors
    fn = [0] * num_colors
    for pred, truth in results:
        n = len(truth)
        if pred is None or len(pred) != n or any(len(r) != n for r in pred):
            continue
        for r in range(n):
            for c in range(n):
                p, t = pred[r][c], truth[r][c]
                if p == t:
                    tp[t] += 1
                else:
                    if 0 <= p < num_colors:
                        fp[p] += 1
                    fn[t] += 1
    return tp, fp, fn


def heatmap_reference(results):
    n = len(results[0][1])
    hits = [[0] * n for _ in range(n)]
    totals = [[0] * n for _ in range(n)]
    for pred, truth in results:
        ok_shape = (pred is not None and len(pred) == n
                    and all(len(r) == n for r in pred))
        for r in range(n):
            for c in range(n):
                totals[r][c] += 1
                if ok_shape and pred[r][c] == truth[r][c]:
                    hits[r][c] += 1
    return hits, totals


def central_difference(f, x, eps=1e-3):
    """Central finite-difference gradient of scalar f at flat array x."""
    import numpy as np
    x = np.asarray(x, dtype=np.float64)
    g = np.zeros_like(x)
    flat = x.ravel()
    gf = g.ravel()
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        fp = f(x)
        flat[i] = orig - eps
        fm = f(x)
        flat[i] = orig
        gf[i] = (fp - fm) / (2 * eps)
    return g
