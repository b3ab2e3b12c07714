"""Disjoint refinements of cube covers, and the diagonal escape construction.

Two refinement strategies produce pairwise incompatible families refining
the input:

* :func:`prefix_ladder_refine` fixes a coordinate order and keeps the
  shortest prefix cylinders that fit inside some member.  Needs a dense input.
* :func:`disjointify` walks the input in list order and keeps, for each
  member, the part not covered by earlier members, split into cubes.  Works
  on any input and preserves the union.
"""
from __future__ import annotations

from typing import Sequence

from .config import HARD_CUBE_CAP
from .cube import Cube, CubeFamily, Point, bit_of, coords_of, submasks
from .errors import DimensionTooSmallError, InputError, NotDenseError, ResourceError

NAIVE_EXPANSION_LIMIT = 20


def _check_order(order: Sequence[int] | None, dim: int) -> list[int]:
    if order is None:
        return list(range(dim))
    order = list(order)
    if sorted(order) != list(range(dim)):
        raise InputError(f"coordinate order {order} is not a permutation of 0..{dim - 1}")
    return order


def prefix_ladder_refine(S: CubeFamily, order: Sequence[int] | None = None) -> CubeFamily:
    """Minimal prefix cylinders (w.r.t. ``order``) that sit inside a member of ``S``.

    Explores the binary trie of prefixes breadth first.  A node ``p`` of depth
    ``a`` is emitted when some ``s`` in ``S`` has its support among the first
    ``a`` ordered coordinates and agrees with ``p``; emitted nodes are not
    expanded.  Output is in breadth-first order.

    Raises :class:`NotDenseError` when ``S`` misses a point; the witness is
    the least uncovered point when coordinates are read in ``order``.
    """
    order = _check_order(order, S.dim)
    dim = S.dim
    cubes = [(c.mask, c.bits) for c in S.cubes]
    out: list[Cube] = []
    dead: list[tuple[int, int]] = []
    level = [(0, 0, cubes)]
    prefix = 0
    for depth in range(dim + 1):
        nxt = []
        for mask, bits, alive in level:
            if not alive:
                dead.append((mask, bits))
                continue
            if any(not m & ~prefix for m, _ in alive):
                out.append(Cube._raw(dim, mask, bits))
                continue
            b = bit_of(dim, order[depth])
            zero = [(m, v) for m, v in alive if not m & b or not v & b]
            one = [(m, v) for m, v in alive if not m & b or v & b]
            nxt.append((mask | b, bits, zero))
            nxt.append((mask | b, bits | b, one))
        if not nxt:
            break
        prefix |= bit_of(dim, order[depth])
        level = nxt
    if dead:
        def order_key(bits: int) -> tuple[int, ...]:
            return tuple((bits >> (dim - 1 - c)) & 1 for c in order)

        witness = min((bits for _, bits in dead), key=order_key)
        raise NotDenseError(
            f"family is not dense: point {Point(dim, witness)} is covered by no member",
            witness=Point(dim, witness),
        )
    return CubeFamily(dim, tuple(out))


def _subtract(pieces: list[tuple[int, int]], m: int, v: int, dim: int) -> list[tuple[int, int]]:
    """Remove cube ``(m, v)`` from a list of disjoint cubes, keeping them disjoint."""
    out = []
    for pm, pb in pieces:
        if (pb ^ v) & pm & m:
            out.append((pm, pb))
            continue
        extra = m & ~pm
        if not extra:
            # the piece lies inside (m, v)
            continue
        kept_m, kept_b = pm, pb
        for c in coords_of(dim, extra):
            cb = bit_of(dim, c)
            out.append((kept_m | cb, kept_b | (~v & cb)))
            kept_m |= cb
            kept_b |= v & cb
    return out


def disjointify(S: CubeFamily, coalesce: bool = False,
                naive_limit: int = NAIVE_EXPANSION_LIMIT) -> CubeFamily:
    """Split each member's new part ``[s_a] minus the earlier members`` into cubes.

    For member ``a`` let ``D`` be the union of the supports of members
    ``0..a``.  The new part is emitted as every total assignment ``f`` on
    ``D`` that extends ``s_a`` and disagrees with each earlier ``s_b``
    somewhere on ``support(s_b)``, one cube per ``f``, sorted by pattern.
    When ``D`` has more than ``naive_limit`` coordinates outside
    ``support(s_a)`` the new part is left as the coarser disjoint cubes from
    successive complement splitting instead.

    The output is an antichain refining ``S`` with the same union.  With
    ``coalesce``, sibling cubes (same support, one differing bit) are merged
    while the merged cube still refines ``S``.
    """
    dim = S.dim
    raw = [(c.mask, c.bits) for c in S.cubes]
    out: list[tuple[int, int]] = []
    domain = 0
    for a, (ma, va) in enumerate(raw):
        domain |= ma
        pieces = [(ma, va)]
        for mb, vb in raw[:a]:
            if (va ^ vb) & ma & mb:
                continue
            pieces = _subtract(pieces, mb, vb, dim)
            if not pieces:
                break
            if len(pieces) > HARD_CUBE_CAP:
                raise ResourceError(f"disjointify: member {a} splits into more than {HARD_CUBE_CAP} cubes")
        if not pieces:
            continue
        if (domain & ~ma).bit_count() <= naive_limit:
            expanded = []
            for pm, pb in pieces:
                free = domain & ~pm
                if len(expanded) + (1 << free.bit_count()) > HARD_CUBE_CAP:
                    raise ResourceError(f"disjointify: member {a} expands to more than {HARD_CUBE_CAP} cubes")
                expanded.extend(pb | sub for sub in submasks(free))
            expanded.sort()
            out.extend((domain, b) for b in expanded)
        else:
            pieces.sort(key=lambda p: Cube._raw(dim, *p).pattern)
            out.extend(pieces)
    if coalesce:
        out = _coalesce(out, raw, dim)
    return CubeFamily(dim, tuple(Cube._raw(dim, m, b) for m, b in out))


def _coalesce(cubes: list[tuple[int, int]], refs: list[tuple[int, int]], dim: int) -> list[tuple[int, int]]:
    def refines_some(m: int, b: int) -> bool:
        return any(not rm & ~m and b & rm == rb for rm, rb in refs)

    cubes = list(cubes)
    changed = True
    while changed:
        changed = False
        index = {c: i for i, c in enumerate(cubes)}
        gone: set[int] = set()
        merged: dict[int, tuple[int, int]] = {}
        for i, (m, b) in enumerate(cubes):
            if i in gone or i in merged:
                continue
            for c in coords_of(dim, m):
                cb = bit_of(dim, c)
                j = index.get((m, b ^ cb))
                if j is None or j in gone or j in merged or j == i:
                    continue
                nm, nb = m & ~cb, b & ~cb
                if refines_some(nm, nb):
                    merged[min(i, j)] = (nm, nb)
                    gone.add(max(i, j))
                    changed = True
                    break
        cubes = [merged.get(i, c) for i, c in enumerate(cubes) if i not in gone]
    return cubes


def escape_point(U: Cube, O: Cube) -> Point | None:
    """A point of ``[U]`` outside ``[O]``, or ``None`` when ``[U] ⊆ [O]``."""
    if (U.bits ^ O.bits) & U.mask & O.mask:
        return Point(U.dim, U.bits)
    extra = O.mask & ~U.mask
    if not extra:
        return None
    low = extra & -extra
    return Point(U.dim, U.bits | (~O.bits & low))


def diagonal_witness(x: Point, U_list: Sequence[Cube]) -> Cube:
    """A basic neighbourhood of ``x`` containing none of the given ones.

    Scans ``U_list`` in order and, for each ``U_i``, picks the lowest
    coordinate outside ``support(U_i)`` not picked before.  The result is
    ``x`` restricted to the picked coordinates: it contains ``x`` and omits a
    point of every ``U_i`` (``x`` with the ``i``-th picked coordinate flipped).
    """
    dim = x.dim
    picked_mask = 0
    picks = []
    for i, U in enumerate(U_list):
        if U.dim != dim:
            raise InputError(f"U[{i}] has dimension {U.dim}, point has {dim}")
        if x.value & U.mask != U.bits:
            raise InputError(f"U[{i}] = {U} does not contain {x}")
        pool = ~(U.mask | picked_mask) & ((1 << dim) - 1)
        if not pool:
            raise DimensionTooSmallError(
                f"dimension too small: no fresh coordinate outside the support of U[{i}] = {U}", i
            )
        b = 1 << (pool.bit_length() - 1)  # lowest coordinate index
        picks.append(dim - b.bit_length())
        picked_mask |= b
    O = Cube._raw(dim, picked_mask, x.value & picked_mask)
    for i, U in enumerate(U_list):
        e = escape_point(U, O)
        assert e is not None and e.value & U.mask == U.bits and e.value & O.mask != O.bits, (
            f"diagonal witness failed to escape U[{i}]"
        )
    return O
