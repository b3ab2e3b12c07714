"""Kernel dispatch: the compiled extension when importable, numpy otherwise.

``BACKEND`` names the active implementation.  Setting ``BOXTOP_PURE_PYTHON=1``
before import forces the fallback.  The array helpers here accept cube
sequences and handle dimensions the uint64 kernels cannot.
"""
from __future__ import annotations

import os

import numpy as np

from . import _pykernels

MAX_KERNEL_DIM = 63

if os.environ.get("BOXTOP_PURE_PYTHON"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"

BACKENDS = {"python": _pykernels}
if BACKEND == "compiled":
    BACKENDS["compiled"] = _impl


def arrays(cubes) -> tuple[np.ndarray, np.ndarray]:
    masks = np.fromiter((c.mask for c in cubes), dtype=np.uint64)
    bits = np.fromiter((c.bits for c in cubes), dtype=np.uint64)
    return masks, bits


def covered_bitmap(cubes, dim, impl=None):
    return (impl or _impl).covered_bitmap(*arrays(cubes), dim)


def first_uncovered(cubes, dim, impl=None) -> int:
    return int((impl or _impl).first_uncovered(*arrays(cubes), dim))


def first_double_cover(cubes, dim, impl=None) -> int:
    return int((impl or _impl).first_double_cover(*arrays(cubes), dim))


def first_compatible_pair(cubes, dim, impl=None) -> tuple[int, int]:
    if dim > MAX_KERNEL_DIM:
        for i, s in enumerate(cubes):
            for j in range(i + 1, len(cubes)):
                t = cubes[j]
                if not (s.bits ^ t.bits) & s.mask & t.mask:
                    return i, j
        return -1, -1
    i, j = (impl or _impl).first_compatible_pair(*arrays(cubes))
    return int(i), int(j)


def first_unrefined(s_cubes, r_cubes, dim, impl=None) -> int:
    if dim > MAX_KERNEL_DIM:
        for i, r in enumerate(r_cubes):
            if not any(r.extends(s) for s in s_cubes):
                return i
        return -1
    return int((impl or _impl).first_unrefined(*arrays(s_cubes), *arrays(r_cubes)))
