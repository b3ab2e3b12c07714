# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled point-enumeration kernels.

Cubes arrive as parallel ``uint64`` arrays ``masks``/``bits``; a point ``p``
(an integer below ``2**dim``) lies in cube ``j`` iff ``p & masks[j] == bits[j]``.
"""
import numpy as np

from libc.stdint cimport uint8_t, uint64_t, int64_t


cdef inline uint64_t _full(int dim):
    return ((<uint64_t>1) << dim) - 1


def covered_bitmap(const uint64_t[::1] masks, const uint64_t[::1] bits, int dim):
    """uint8 array of length ``2**dim``: 1 where some cube contains the point."""
    cdef Py_ssize_t n = masks.shape[0], j
    cdef uint64_t full = _full(dim), free, sub, b
    out = np.zeros(<Py_ssize_t>1 << dim, dtype=np.uint8)
    cdef uint8_t[::1] cov = out
    with nogil:
        for j in range(n):
            free = full & ~masks[j]
            b = bits[j]
            sub = 0
            while True:
                cov[b | sub] = 1
                if sub == free:
                    break
                sub = (sub - free) & free
    return out


def first_uncovered(const uint64_t[::1] masks, const uint64_t[::1] bits, int dim):
    """Least point contained in no cube, or -1."""
    cdef Py_ssize_t n = masks.shape[0], j
    cdef uint64_t full = _full(dim), free, sub, b, p, total = (<uint64_t>1) << dim
    cdef uint64_t marked = 0
    cov_arr = np.zeros(<Py_ssize_t>total, dtype=np.uint8)
    cdef uint8_t[::1] cov = cov_arr
    cdef int64_t result = -1
    with nogil:
        for j in range(n):
            free = full & ~masks[j]
            b = bits[j]
            sub = 0
            while True:
                if not cov[b | sub]:
                    cov[b | sub] = 1
                    marked += 1
                if sub == free:
                    break
                sub = (sub - free) & free
            if marked == total:
                break
        if marked != total:
            for p in range(total):
                if not cov[p]:
                    result = <int64_t>p
                    break
    return result


def first_double_cover(const uint64_t[::1] masks, const uint64_t[::1] bits, int dim):
    """Some point contained in two cubes, or -1 (the family is an antichain)."""
    cdef Py_ssize_t n = masks.shape[0], j
    cdef uint64_t full = _full(dim), free, sub, b
    cov_arr = np.zeros(<Py_ssize_t>1 << dim, dtype=np.uint8)
    cdef uint8_t[::1] cov = cov_arr
    cdef int64_t result = -1
    with nogil:
        for j in range(n):
            free = full & ~masks[j]
            b = bits[j]
            sub = 0
            while True:
                if cov[b | sub]:
                    result = <int64_t>(b | sub)
                    break
                cov[b | sub] = 1
                if sub == free:
                    break
                sub = (sub - free) & free
            if result >= 0:
                break
    return result


def first_compatible_pair(const uint64_t[::1] masks, const uint64_t[::1] bits):
    """First index pair ``(i, j)``, ``i < j``, of compatible cubes, or ``(-1, -1)``."""
    cdef Py_ssize_t n = masks.shape[0], i, j
    cdef Py_ssize_t ri = -1, rj = -1
    cdef uint64_t mi, bi
    with nogil:
        for i in range(n):
            mi = masks[i]
            bi = bits[i]
            for j in range(i + 1, n):
                if ((bi ^ bits[j]) & mi & masks[j]) == 0:
                    ri = i
                    rj = j
                    break
            if ri >= 0:
                break
    return ri, rj


def first_unrefined(const uint64_t[::1] s_masks, const uint64_t[::1] s_bits,
                    const uint64_t[::1] r_masks, const uint64_t[::1] r_bits):
    """Index of the first ``r`` extending no ``s``, or -1."""
    cdef Py_ssize_t ns = s_masks.shape[0], nr = r_masks.shape[0], i, j
    cdef Py_ssize_t last = 0
    cdef bint found
    cdef Py_ssize_t result = -1
    with nogil:
        for i in range(nr):
            found = False
            # retry the last hit first; refinements tend to come in runs
            if ns and (s_masks[last] & ~r_masks[i]) == 0 and (r_bits[i] & s_masks[last]) == s_bits[last]:
                continue
            for j in range(ns):
                if (s_masks[j] & ~r_masks[i]) == 0 and (r_bits[i] & s_masks[j]) == s_bits[j]:
                    found = True
                    last = j
                    break
            if not found:
                result = i
                break
    return result
