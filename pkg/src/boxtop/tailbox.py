"""Boxes in finite products of tail spaces, and iterative disjoint refinement.

A tail coordinate of size ``m`` has points ``0..m-1`` plus a top ``TOP``.
Its basic sets are singletons ``{v}`` (``v < m``) and tails ``[a, TOP]``
(``a < m``); ``Tail(0)`` is the whole coordinate.  A box picks one basic
set per coordinate.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .cube import dumps
from .errors import CoverError, InputError

TOP = float("inf")


def _fmt_point(p) -> str:
    return "(" + ",".join("T" if v == TOP else str(v) for v in p) + ")"


@dataclass(frozen=True, order=True)
class Singleton:
    v: int

    def __str__(self) -> str:
        return f"S({self.v})"


@dataclass(frozen=True, order=True)
class Tail:
    a: int

    def __str__(self) -> str:
        return f"T({self.a})"


Factor = Union[Singleton, Tail]


def _factor_key(f: Factor) -> tuple[int, int]:
    return (0, f.v) if isinstance(f, Singleton) else (1, f.a)


def _factor_contains(f: Factor, value) -> bool:
    if isinstance(f, Singleton):
        return value == f.v
    return value == TOP or value >= f.a


def _factor_subset(f: Factor, g: Factor) -> bool:
    if isinstance(f, Singleton):
        return _factor_contains(g, f.v)
    return isinstance(g, Tail) and f.a >= g.a


def _factor_disjoint(f: Factor, g: Factor) -> bool:
    if isinstance(f, Singleton) and isinstance(g, Singleton):
        return f.v != g.v
    if isinstance(f, Singleton):
        return f.v < g.a
    if isinstance(g, Singleton):
        return g.v < f.a
    return False


@dataclass(frozen=True)
class IntervalBox:
    factors: tuple

    def __post_init__(self):
        factors = tuple(self.factors)
        for f in factors:
            if not isinstance(f, (Singleton, Tail)):
                raise InputError(f"box factor {f!r} is neither Singleton nor Tail")
        object.__setattr__(self, "factors", factors)

    def __len__(self) -> int:
        return len(self.factors)

    def __str__(self) -> str:
        return "(" + ",".join(str(f) for f in self.factors) + ")"

    def sort_key(self) -> tuple:
        return tuple(_factor_key(f) for f in self.factors)

    def check_profile(self, coords: Sequence[int]) -> None:
        if len(self.factors) != len(coords):
            raise InputError(f"box {self} has {len(self.factors)} factors, profile has {len(coords)}")
        for n, (f, m) in enumerate(zip(self.factors, coords)):
            v = f.v if isinstance(f, Singleton) else f.a
            if not 0 <= v < m:
                raise InputError(f"box {self}: factor {n} ({f}) out of range for size {m}")

    def contains(self, p: Sequence) -> bool:
        if len(p) != len(self.factors):
            raise InputError(f"point {_fmt_point(p)} does not match box {self}")
        return all(_factor_contains(f, v) for f, v in zip(self.factors, p))

    def subset_of(self, other: IntervalBox) -> bool:
        return all(_factor_subset(f, g) for f, g in zip(self.factors, other.factors))

    def disjoint_from(self, other: IntervalBox) -> bool:
        return any(_factor_disjoint(f, g) for f, g in zip(self.factors, other.factors))

    def top_corner(self) -> tuple:
        return tuple(f.v if isinstance(f, Singleton) else TOP for f in self.factors)

    def cardinality(self, coords: Sequence[int]) -> int:
        out = 1
        for f, m in zip(self.factors, coords):
            out *= 1 if isinstance(f, Singleton) else m - f.a + 1
        return out

    def tail_width(self, coords: Sequence[int]) -> int:
        return sum(m - f.a for f, m in zip(self.factors, coords) if isinstance(f, Tail))

    def to_json_obj(self) -> list:
        return [{"t": "S", "v": f.v} if isinstance(f, Singleton) else {"t": "T", "a": f.a}
                for f in self.factors]

    @classmethod
    def from_json_obj(cls, obj) -> IntervalBox:
        factors = []
        if not isinstance(obj, list):
            raise InputError(f"box must be a list of factors, got {obj!r}")
        for f in obj:
            try:
                if f["t"] == "S":
                    factors.append(Singleton(int(f["v"])))
                elif f["t"] == "T":
                    factors.append(Tail(int(f["a"])))
                else:
                    raise InputError(f"unknown factor type {f['t']!r}")
            except (KeyError, TypeError, ValueError):
                raise InputError(f"malformed box factor {f!r}") from None
        return cls(tuple(factors))


def full_box(coords: Sequence[int]) -> IntervalBox:
    return IntervalBox(tuple(Tail(0) for _ in coords))


def box_contains(U: IntervalBox, p: Sequence) -> bool:
    return U.contains(p)


@dataclass(frozen=True)
class TailBoxCover:
    coords: tuple
    boxes: tuple

    def __post_init__(self):
        coords = tuple(int(m) for m in self.coords)
        if not coords:
            raise InputError("need at least one coordinate")
        if any(m < 1 for m in coords):
            raise InputError(f"coordinate sizes must be positive, got {list(coords)}")
        boxes = tuple(self.boxes)
        for b in boxes:
            b.check_profile(coords)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "boxes", boxes)

    def points(self) -> Iterable[tuple]:
        return itertools.product(*(list(range(m)) + [TOP] for m in self.coords))

    def first_uncovered(self):
        for p in self.points():
            if not any(b.contains(p) for b in self.boxes):
                return p
        return None

    def to_json_obj(self) -> dict:
        return {"coords": list(self.coords), "boxes": [b.to_json_obj() for b in self.boxes]}

    def to_json(self) -> str:
        return dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj) -> TailBoxCover:
        if not isinstance(obj, dict) or "coords" not in obj or "boxes" not in obj:
            raise InputError('tail-box JSON needs "coords" and "boxes"')
        return cls(tuple(obj["coords"]), tuple(IntervalBox.from_json_obj(b) for b in obj["boxes"]))

    @classmethod
    def from_json(cls, text: str) -> TailBoxCover:
        try:
            return cls.from_json_obj(json.loads(text))
        except json.JSONDecodeError as e:
            raise InputError(f"invalid JSON: {e}") from None


def split_box(U: IntervalBox, O: TailBoxCover) -> list[IntervalBox]:
    """``[U]`` if ``U`` fits inside a member of ``O``; otherwise a partition of ``U``.

    With ``y`` the top corner of ``U`` and ``G`` the first member containing
    ``y``, set ``z_n = max(x_n, base of G_n)`` on the tail coordinates.  The
    pieces are, for each set ``A`` of tail coordinates, ``{w_n}`` with
    ``x_n <= w_n < z_n`` on ``A`` and ``[z_n, TOP]`` off ``A``.  The piece for
    ``A = ∅`` lies inside ``G``.
    """
    U.check_profile(O.coords)
    if any(U.subset_of(G) for G in O.boxes):
        return [U]
    y = U.top_corner()
    G = next((G for G in O.boxes if G.contains(y)), None)
    if G is None:
        raise CoverError(f"not a cover at {_fmt_point(y)}", witness=y)
    tails = [n for n, f in enumerate(U.factors) if isinstance(f, Tail)]
    z = {n: max(U.factors[n].a, G.factors[n].a) for n in tails}
    assert any(z[n] > U.factors[n].a for n in tails), "no strict progress"
    out = []
    for A in range(1 << len(tails)):
        options = []
        for k, n in enumerate(tails):
            if A >> k & 1:
                options.append([Singleton(w) for w in range(U.factors[n].a, z[n])])
            else:
                options.append([Tail(z[n])])
        for choice in itertools.product(*options):
            factors = list(U.factors)
            for n, f in zip(tails, choice):
                factors[n] = f
            out.append(IntervalBox(tuple(factors)))
    return out


def family_rank(family: Sequence[IntervalBox], coords: Sequence[int]) -> int:
    """Sum of cardinality times tail width; drops with every proper split."""
    return sum(U.cardinality(coords) * U.tail_width(coords) for U in family)


@dataclass
class RudinTrace:
    iterations: int
    ranks: list


def rudin_refine(O: TailBoxCover, trace: RudinTrace | None = None,
                 check_stages: bool = False) -> list[IntervalBox]:
    """Split from the full box until every piece fits inside a member of ``O``.

    Each stage is sorted canonically; iteration stops at the first stage
    equal to its predecessor.  ``trace`` receives the iteration count and the
    rank of every stage.  ``check_stages`` re-verifies that each stage is a
    disjoint cover refining the previous one.
    """
    family = [full_box(O.coords)]
    ranks = [family_rank(family, O.coords)]
    iterations = 0
    while True:
        nxt = sorted((V for U in family for V in split_box(U, O)), key=IntervalBox.sort_key)
        if nxt == family:
            break
        iterations += 1
        r = family_rank(nxt, O.coords)
        assert r < ranks[-1], f"rank did not drop: {ranks[-1]} -> {r}"
        ranks.append(r)
        if check_stages:
            cert = verify_box_refinement(TailBoxCover(O.coords, tuple(family)), nxt)
            assert cert.ok, f"stage {iterations} is not a disjoint refining cover: {cert.witnesses}"
        family = nxt
    if trace is not None:
        trace.iterations = iterations
        trace.ranks = ranks
    return family


@dataclass
class BoxCertificate:
    disjoint_ok: bool
    covers_ok: bool
    refines_ok: bool
    witnesses: dict

    @property
    def ok(self) -> bool:
        return self.disjoint_ok and self.covers_ok and self.refines_ok

    def to_json_obj(self) -> dict:
        return {"disjoint_ok": self.disjoint_ok, "covers_ok": self.covers_ok,
                "refines_ok": self.refines_ok, "witnesses": self.witnesses}


def _box_grid(U: IntervalBox, coords: Sequence[int]) -> np.ndarray:
    # index m stands for TOP on a coordinate of size m
    masks = []
    for f, m in zip(U.factors, coords):
        row = np.zeros(m + 1, dtype=bool)
        if isinstance(f, Singleton):
            row[f.v] = True
        else:
            row[f.a:] = True
        masks.append(row)
    grid = masks[0]
    for row in masks[1:]:
        grid = np.logical_and.outer(grid, row)
    return grid


def verify_box_refinement(O: TailBoxCover, R: Sequence[IntervalBox]) -> BoxCertificate:
    """Disjointness and coverage by point enumeration, refinement by box inclusion."""
    coords = O.coords
    for U in R:
        U.check_profile(coords)
    shape = tuple(m + 1 for m in coords)
    count = np.zeros(shape, dtype=np.int64)
    grids = [_box_grid(U, coords) for U in R]
    for g in grids:
        count += g
    witnesses: dict = {}

    def point(idx):
        return tuple(TOP if i == m else int(i) for i, m in zip(idx, coords))

    disjoint_ok = not (count > 1).any()
    if not disjoint_ok:
        idx = tuple(np.argwhere(count > 1)[0])
        i, j = [k for k, g in enumerate(grids) if g[idx]][:2]
        witnesses["disjoint"] = [R[i].to_json_obj(), R[j].to_json_obj()]
    covers_ok = not (count == 0).any()
    if not covers_ok:
        witnesses["covers"] = _point_json(point(tuple(np.argwhere(count == 0)[0])))
    bad = next((U for U in R if not any(U.subset_of(G) for G in O.boxes)), None)
    refines_ok = bad is None
    if not refines_ok:
        witnesses["refines"] = bad.to_json_obj()
    return BoxCertificate(bool(disjoint_ok), bool(covers_ok), refines_ok, witnesses)


def _point_json(p) -> list:
    return ["T" if v == TOP else v for v in p]
