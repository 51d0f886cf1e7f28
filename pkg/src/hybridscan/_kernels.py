"""Per-sample inner loops, compiled with numba when available.

Every kernel has a pure-numpy twin. Set ``HYBRIDSCAN_NO_JIT=1`` to force the
numpy path (or when numba is not installed). Both paths must agree to
floating-point round-off; ``tests/test_kernels.py`` checks this and
``benchmarks/bench_kernels.py`` times them.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba
except ImportError:  # pragma: no cover
    numba = None

JIT_AVAILABLE = numba is not None
JIT_ENABLED = JIT_AVAILABLE and os.environ.get("HYBRIDSCAN_NO_JIT", "0") not in ("1", "true", "yes")


def _njit(fn):
    if not JIT_AVAILABLE:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# -- block phasor mean -----------------------------------------------------


def block_phase_mean_numpy(phase, block):
    """Circular mean of ``phase`` over non-overlapping ``block x block`` tiles."""
    rows, cols = phase.shape
    ph = np.exp(1j * phase).reshape(rows // block, block, cols // block, block).sum(axis=(1, 3))
    out = np.angle(ph)
    out[np.abs(ph) < 1e-12 * block * block] = 0.0
    return np.mod(out, 2 * np.pi)


@_njit
def block_phase_mean_jit(phase, block):
    rows, cols = phase.shape
    nr = rows // block
    nc = cols // block
    out = np.empty((nr, nc))
    twopi = 2.0 * np.pi
    floor = 1e-12 * block * block
    for i in range(nr):
        for j in range(nc):
            re = 0.0
            im = 0.0
            for a in range(i * block, (i + 1) * block):
                for b in range(j * block, (j + 1) * block):
                    re += np.cos(phase[a, b])
                    im += np.sin(phase[a, b])
            if np.hypot(re, im) < floor:
                out[i, j] = 0.0
            else:
                v = np.arctan2(im, re)
                if v < 0.0:
                    v += twopi
                if v >= twopi:
                    v -= twopi
                out[i, j] = v
    return out


# -- disk integration ------------------------------------------------------


def disk_sums_numpy(values, rows, cols, radius):
    """Sum of ``values`` inside disks of ``radius`` samples centred at (rows, cols)."""
    nr, nc = values.shape
    out = np.zeros(len(rows))
    for k in range(len(rows)):
        r0 = max(int(np.floor(rows[k] - radius)), 0)
        r1 = min(int(np.ceil(rows[k] + radius)) + 1, nr)
        c0 = max(int(np.floor(cols[k] - radius)), 0)
        c1 = min(int(np.ceil(cols[k] + radius)) + 1, nc)
        if r0 >= r1 or c0 >= c1:
            continue
        rr = np.arange(r0, r1)[:, None] - rows[k]
        cc = np.arange(c0, c1)[None, :] - cols[k]
        inside = rr * rr + cc * cc <= radius * radius
        out[k] = values[r0:r1, c0:c1][inside].sum()
    return out


@_njit
def disk_sums_jit(values, rows, cols, radius):
    nr, nc = values.shape
    out = np.zeros(len(rows))
    r2 = radius * radius
    for k in range(len(rows)):
        r0 = max(int(np.floor(rows[k] - radius)), 0)
        r1 = min(int(np.ceil(rows[k] + radius)) + 1, nr)
        c0 = max(int(np.floor(cols[k] - radius)), 0)
        c1 = min(int(np.ceil(cols[k] + radius)) + 1, nc)
        s = 0.0
        for a in range(r0, r1):
            da = a - rows[k]
            for b in range(c0, c1):
                db = b - cols[k]
                if da * da + db * db <= r2:
                    s += values[a, b]
        out[k] = s
    return out


# -- per-site normalised relative RMS --------------------------------------


def relative_rms_numpy(i_out, i_t, owner, n_groups):
    """RMS of ``(s_g * i_out - i_t) / i_t`` over samples with ``owner >= 0``.

    ``s_g`` rescales each owner group so its output power equals its target
    power. Returns ``(rms, n_samples)``.
    """
    sel = owner >= 0
    g = owner[sel]
    o = i_out[sel]
    t = i_t[sel]
    if g.size == 0:
        return 0.0, 0
    p_out = np.bincount(g, weights=o, minlength=n_groups)
    p_t = np.bincount(g, weights=t, minlength=n_groups)
    scale = np.where(p_out > 0, p_t / np.where(p_out > 0, p_out, 1.0), 0.0)
    rel = (scale[g] * o - t) / t
    return float(np.sqrt(np.mean(rel * rel))), int(g.size)


@_njit
def relative_rms_jit(i_out, i_t, owner, n_groups):
    nr, nc = owner.shape
    p_out = np.zeros(n_groups)
    p_t = np.zeros(n_groups)
    count = 0
    for a in range(nr):
        for b in range(nc):
            g = owner[a, b]
            if g >= 0:
                p_out[g] += i_out[a, b]
                p_t[g] += i_t[a, b]
                count += 1
    if count == 0:
        return 0.0, 0
    scale = np.zeros(n_groups)
    for g in range(n_groups):
        if p_out[g] > 0:
            scale[g] = p_t[g] / p_out[g]
    acc = 0.0
    for a in range(nr):
        for b in range(nc):
            g = owner[a, b]
            if g >= 0:
                rel = (scale[g] * i_out[a, b] - i_t[a, b]) / i_t[a, b]
                acc += rel * rel
    return np.sqrt(acc / count), count


# -- anchored subset count (brute force) -----------------------------------


def _anchor_masks(m, n):
    row0 = sum(1 << c for c in range(n))
    col0 = sum(1 << (r * n) for r in range(m))
    return row0, col0


def count_anchored_numpy(m, n, k):
    """Count k-subsets of an m x n grid touching row 0 and column 0, by exhaustion."""
    cells = m * n
    if cells > 26:
        raise ValueError("numpy brute force limited to 26 cells")
    row0, col0 = _anchor_masks(m, n)
    masks = np.arange(1 << cells, dtype=np.uint64)
    ok = (np.bitwise_count(masks) == k) & ((masks & row0) != 0) & ((masks & col0) != 0)
    return int(np.count_nonzero(ok))


@_njit
def _count_anchored_jit(cells, k, row0, col0):
    if k == 0 or k > cells:
        return 0
    total = 0
    # Gosper's hack: walk k-bit masks in increasing order
    x = (1 << k) - 1
    limit = 1 << cells
    while x < limit:
        if (x & row0) != 0 and (x & col0) != 0:
            total += 1
        c = x & -x
        r = x + c
        x = (((r ^ x) >> 2) // c) | r
    return total


def count_anchored_jit(m, n, k):
    row0, col0 = _anchor_masks(m, n)
    return int(_count_anchored_jit(m * n, k, row0, col0))


# -- dispatch --------------------------------------------------------------

if JIT_ENABLED:
    block_phase_mean = block_phase_mean_jit
    disk_sums = disk_sums_jit
    relative_rms = relative_rms_jit
    count_anchored = count_anchored_jit
else:
    block_phase_mean = block_phase_mean_numpy
    disk_sums = disk_sums_numpy
    relative_rms = relative_rms_numpy
    count_anchored = count_anchored_numpy


def backend() -> str:
    return "numba" if JIT_ENABLED else "numpy"
