"""numpy fallback for the compiled kernels in ``_ckernels.pyx``.

Same signatures and results; used when the extension is not built or when
``BOXTOP_PURE_PYTHON`` is set.
"""
import numpy as np


def _cube_points(mask, bit, full):
    free = int(full & ~mask)
    positions = [1 << k for k in range(free.bit_length()) if free >> k & 1]
    idx = np.zeros(1 << len(positions), dtype=np.uint64)
    counter = np.arange(1 << len(positions), dtype=np.uint64)
    for j, b in enumerate(positions):
        idx |= ((counter >> np.uint64(j)) & np.uint64(1)) * np.uint64(b)
    return idx | np.uint64(bit)


def covered_bitmap(masks, bits, dim):
    full = (1 << dim) - 1
    cov = np.zeros(1 << dim, dtype=np.uint8)
    for m, b in zip(masks.tolist(), bits.tolist()):
        cov[_cube_points(m, b, full)] = 1
    return cov


def first_uncovered(masks, bits, dim):
    cov = covered_bitmap(masks, bits, dim)
    zeros = np.flatnonzero(cov == 0)
    return int(zeros[0]) if zeros.size else -1


def first_double_cover(masks, bits, dim):
    full = (1 << dim) - 1
    cov = np.zeros(1 << dim, dtype=np.uint8)
    for m, b in zip(masks.tolist(), bits.tolist()):
        pts = _cube_points(m, b, full)
        hit = np.flatnonzero(cov[pts])
        if hit.size:
            return int(pts[hit[0]])
        cov[pts] = 1
    return -1


def first_compatible_pair(masks, bits):
    n = masks.shape[0]
    for i in range(n - 1):
        clash = (bits[i] ^ bits[i + 1:]) & masks[i] & masks[i + 1:]
        hit = np.flatnonzero(clash == 0)
        if hit.size:
            return i, i + 1 + int(hit[0])
    return -1, -1


def first_unrefined(s_masks, s_bits, r_masks, r_bits):
    if s_masks.shape[0] == 0:
        return 0 if r_masks.shape[0] else -1
    for i in range(r_masks.shape[0]):
        ok = ((s_masks & ~r_masks[i]) == 0) & ((r_bits[i] & s_masks) == s_bits)
        if not ok.any():
            return i
    return -1
