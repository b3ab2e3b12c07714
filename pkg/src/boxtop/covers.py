"""Density, antichain and refinement checks for cube families, with witnesses.

Every check returns ``(ok, witness)`` where ``witness`` is ``None`` on
success.  Density has two independent routes: ``"exhaustive"`` walks all
``2**dim`` points through the compiled kernels, ``"symbolic"`` runs a
Shannon-expansion tautology check that never enumerates points.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import kernels
from .config import enum_limit, require_enumerable
from .cube import Cube, CubeFamily, Point, dumps, is_compatible, parse_cube
from .errors import InputError

MODES = ("exhaustive", "symbolic", "auto")


def _resolve_mode(mode: str, dim: int) -> str:
    if mode not in MODES:
        raise InputError(f"unknown density mode {mode!r}; expected one of {MODES}")
    if mode == "auto":
        return "exhaustive" if dim <= min(enum_limit(), kernels.MAX_KERNEL_DIM) else "symbolic"
    return mode


def _check_dims(*families: CubeFamily) -> None:
    dims = {f.dim for f in families}
    if len(dims) > 1:
        raise InputError(f"dimension mismatch between families: {sorted(dims)}")


# -- symbolic tautology --------------------------------------------------------

def _split_bit(cubes: Sequence[tuple[int, int]], free: int) -> int:
    """Bit of the coordinate assigned in the most cubes; ties go to the lowest coordinate."""
    best_bit = 0
    best_count = -1
    b = 1 << (free.bit_length() - 1) if free else 0
    # highest bit first == lowest coordinate index first
    while b:
        if free & b:
            count = 0
            for m, _ in cubes:
                if m & b:
                    count += 1
            if count > best_count:
                best_bit, best_count = b, count
        b >>= 1
    return best_bit


def uncovered_symbolic(cubes: Iterable[tuple[int, int]], free: int, base_bits: int = 0) -> int | None:
    """Shannon-expansion tautology check over the coordinates in ``free``.

    ``cubes`` are ``(mask, bits)`` pairs already restricted to ``free``.
    Returns ``None`` when their union is everything, otherwise a point (as an
    integer, ``base_bits`` plus the failing branch, zeros elsewhere) lying in
    no cube: the first failing leaf with the 0-branch explored first.
    """
    stack = [(list(cubes), free, base_bits)]
    while stack:
        cubes, free, path = stack.pop()
        if not cubes:
            return path
        if any(m == 0 for m, _ in cubes):
            continue
        b = _split_bit(cubes, free)
        if not b:
            # every cube still assigns something but no coordinate is free: impossible
            raise AssertionError("cube mask outside the free coordinates")
        zero, one = [], []
        for m, v in cubes:
            if not m & b:
                zero.append((m, v))
                one.append((m, v))
            elif v & b:
                one.append((m & ~b, v & ~b))
            else:
                zero.append((m & ~b, v))
        rest = free & ~b
        # push the 1-branch first so the 0-branch is explored first
        stack.append((one, rest, path | b))
        stack.append((zero, rest, path))
    return None


def _cofactor(cubes: Iterable[Cube], s: Cube) -> list[tuple[int, int]]:
    """``cubes`` restricted to ``[s]``: compatible members with ``s``'s coordinates dropped."""
    out = []
    for c in cubes:
        if not (c.bits ^ s.bits) & c.mask & s.mask:
            out.append((c.mask & ~s.mask, c.bits & ~s.mask))
    return out


# -- the three properties ------------------------------------------------------

def is_dense(S: CubeFamily, mode: str = "exhaustive") -> tuple[bool, Point | None]:
    """Does every point of ``2^dim`` extend some member of ``S``?

    The exhaustive witness is the lexicographically least uncovered point;
    the symbolic witness is the first failing leaf of the expansion.
    """
    mode = _resolve_mode(mode, S.dim)
    if mode == "exhaustive":
        require_enumerable(S.dim)
        p = kernels.first_uncovered(S.cubes, S.dim)
        return (True, None) if p < 0 else (False, Point(S.dim, p))
    full = (1 << S.dim) - 1
    p = uncovered_symbolic([(c.mask, c.bits) for c in S.cubes], full)
    return (True, None) if p is None else (False, Point(S.dim, p))


def is_antichain(S: CubeFamily) -> tuple[bool, tuple[Cube, Cube] | None]:
    """Are the members pairwise incompatible?  The witness is the first
    offending pair ``(S[i], S[j])`` with ``i < j`` in list order."""
    n = len(S)
    if n < 2:
        return True, None
    pairs = n * (n - 1) // 2
    if S.dim <= min(enum_limit(), kernels.MAX_KERNEL_DIM) and pairs > (1 << S.dim):
        # point counting is linear in the output; only fall back to the
        # quadratic scan when an overlap exists and the pair must be named
        if kernels.first_double_cover(S.cubes, S.dim) < 0:
            return True, None
    i, j = kernels.first_compatible_pair(S.cubes, S.dim)
    if i < 0:
        return True, None
    return False, (S.cubes[i], S.cubes[j])


def refines(S: CubeFamily, R: CubeFamily) -> tuple[bool, Cube | None]:
    """``S ≤ R``: every ``r`` in ``R`` extends some ``s`` in ``S``.  The
    witness is the first ``r`` that extends nothing."""
    _check_dims(S, R)
    i = kernels.first_unrefined(S.cubes, R.cubes, S.dim)
    return (True, None) if i < 0 else (False, R.cubes[i])


def same_union(S: CubeFamily, R: CubeFamily, mode: str = "exhaustive") -> tuple[bool, Point | None]:
    """Do ``S`` and ``R`` cover the same points?  The witness lies in exactly one union."""
    _check_dims(S, R)
    mode = _resolve_mode(mode, S.dim)
    if mode == "exhaustive":
        require_enumerable(S.dim)
        a = kernels.covered_bitmap(S.cubes, S.dim)
        b = kernels.covered_bitmap(R.cubes, R.dim)
        diff = (a != b).nonzero()[0]
        return (True, None) if diff.size == 0 else (False, Point(S.dim, int(diff[0])))
    for src, dst in ((S, R), (R, S)):
        for s in src.cubes:
            p = uncovered_symbolic(_cofactor(dst.cubes, s), ((1 << S.dim) - 1) & ~s.mask, s.bits)
            if p is not None:
                return False, Point(S.dim, p)
    return True, None


# -- certificates --------------------------------------------------------------

@dataclass
class RefinementCertificate:
    """Evidence that ``R`` is a dense antichain refining ``S`` (or why not)."""

    dense_ok: bool
    antichain_ok: bool
    refines_ok: bool
    union_preserved_ok: bool | None = None
    witnesses: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        flags = [self.dense_ok, self.antichain_ok, self.refines_ok]
        if self.union_preserved_ok is not None:
            flags.append(self.union_preserved_ok)
        return all(flags)

    def to_json_obj(self) -> dict:
        return {
            "dense_ok": self.dense_ok,
            "antichain_ok": self.antichain_ok,
            "refines_ok": self.refines_ok,
            "union_preserved_ok": self.union_preserved_ok,
            "witnesses": self.witnesses,
            "stats": self.stats,
        }

    def to_json(self) -> str:
        return dumps(self.to_json_obj())


def certify_b_refinement(S: CubeFamily, R: CubeFamily, mode: str = "auto",
                         check_union: bool = True) -> RefinementCertificate:
    """Check that ``R`` is dense, an antichain, and refines ``S``.

    All three together say ``R`` is a disjoint basic-clopen refinement of the
    cover ``S``.  With ``check_union`` the certificate also records whether
    ``R`` covers exactly the points ``S`` covers.
    """
    _check_dims(S, R)
    mode = _resolve_mode(mode, R.dim)
    witnesses: dict = {}
    dense_ok, p = is_dense(R, mode)
    if not dense_ok:
        witnesses["dense"] = str(p)
    antichain_ok, pair = is_antichain(R)
    if not antichain_ok:
        witnesses["antichain"] = [pair[0].pattern, pair[1].pattern]
    refines_ok, r = refines(S, R)
    if not refines_ok:
        witnesses["refines"] = r.pattern
    union_ok = None
    if check_union:
        union_ok, q = same_union(S, R, mode)
        if not union_ok:
            witnesses["union"] = str(q)
    stats = {
        "dim": R.dim,
        "input_size": len(S),
        "output_size": len(R),
        "max_input_support": S.max_support,
        "max_output_support": R.max_support,
        "density_mode": mode,
    }
    if S.support_budget is not None:
        stats["support_budget"] = S.support_budget
        stats["support_budget_exceeded"] = R.max_support > S.support_budget
    return RefinementCertificate(dense_ok, antichain_ok, refines_ok, union_ok, witnesses, stats)


def _covered_by(cubes: Iterable[Cube], p: Point) -> list[Cube]:
    return [c for c in cubes if p.value & c.mask == c.bits]


def validate_certificate(cert: RefinementCertificate, S: CubeFamily, R: CubeFamily) -> bool:
    """Re-run the base checks and re-verify every witness against ``S`` and ``R``."""
    mode = cert.stats.get("density_mode", "auto")
    again = certify_b_refinement(S, R, mode, check_union=cert.union_preserved_ok is not None)
    if again.to_json_obj() != cert.to_json_obj():
        return False
    w = cert.witnesses
    if set(w) != {k for k, ok in (("dense", cert.dense_ok), ("antichain", cert.antichain_ok),
                                  ("refines", cert.refines_ok), ("union", cert.union_preserved_ok))
                  if ok is False}:
        return False
    dim = R.dim
    if "dense" in w and _covered_by(R.cubes, Point(dim, int(w["dense"], 2))):
        return False
    if "antichain" in w:
        a, b = (parse_cube(x) for x in w["antichain"])
        if not is_compatible(a, b):
            return False
    if "refines" in w:
        r = parse_cube(w["refines"])
        if any(r.extends(s) for s in S.cubes):
            return False
    if "union" in w:
        q = Point(dim, int(w["union"], 2))
        if bool(_covered_by(S.cubes, q)) == bool(_covered_by(R.cubes, q)):
            return False
    return True

