"""Level-indexed neighbourhood tables (metrisability witnesses) on finite sets.

A witness assigns to every point ``x`` and level ``a < L`` a set ``U(x, a)``
containing ``x``.  It is valid against a reference base when

(1)  every base set ``O`` containing ``x`` contains some ``U(x, a)``;
(2a) ``y in U(x, a)`` and ``a <= b`` imply ``U(y, b) ⊆ U(x, a)``;
(2b) ``y not in U(x, a)`` and ``a <= b`` imply ``U(y, b) ∩ U(x, a) = ∅``.

Tables are stored as a boolean array ``member[x, a, p]`` (point indices in
the order of ``points``).
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .cube import dumps
from .errors import CoverError, InputError

TOP_LABEL = "top"


def _label_key(label) -> str:
    return label if isinstance(label, str) else json.dumps(label)


def _from_json_label(value):
    if isinstance(value, list):
        return tuple(_from_json_label(v) for v in value)
    return value


def _to_json_label(label):
    if isinstance(label, tuple):
        return [_to_json_label(v) for v in label]
    return label


class _Indexed:
    """Mixin: a tuple of distinct point labels plus a label -> index map."""

    points: tuple

    def _init_index(self):
        index = {}
        for i, p in enumerate(self.points):
            if p in index:
                raise InputError(f"duplicate point label {p!r}")
            index[p] = i
        object.__setattr__(self, "index", index)

    def mask_of(self, subset: Iterable[Hashable]) -> np.ndarray:
        row = np.zeros(len(self.points), dtype=bool)
        for p in subset:
            try:
                row[self.index[p]] = True
            except KeyError:
                raise InputError(f"{p!r} is not a point of this space") from None
        return row

    def set_of(self, row: np.ndarray) -> frozenset:
        return frozenset(self.points[i] for i in np.flatnonzero(row))


@dataclass(frozen=True, eq=False)
class MetrisabilityWitness(_Indexed):
    points: tuple
    levels: int
    member: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        self._init_index()
        n = len(self.points)
        if n < 1:
            raise InputError("a witness needs at least one point")
        if self.levels < 1:
            raise InputError(f"need at least one level, got {self.levels}")
        member = np.asarray(self.member, dtype=bool)
        if member.shape != (n, self.levels, n):
            raise InputError(f"table shape {member.shape} != {(n, self.levels, n)}")
        own = member[np.arange(n), :, np.arange(n)]
        if not own.all():
            x, a = np.argwhere(~own)[0]
            raise InputError(f"U({self.points[x]!r}, {a}) does not contain its own point")
        member.flags.writeable = False
        object.__setattr__(self, "member", member)

    @classmethod
    def from_function(cls, points: Sequence, levels: int,
                      U: Callable[[Hashable, int], Iterable]) -> MetrisabilityWitness:
        points = tuple(points)
        index = {p: i for i, p in enumerate(points)}
        member = np.zeros((len(points), levels, len(points)), dtype=bool)
        for i, x in enumerate(points):
            for a in range(levels):
                for y in U(x, a):
                    if y not in index:
                        raise InputError(f"U({x!r}, {a}) contains {y!r}, which is not a point")
                    member[i, a, index[y]] = True
        return cls(points, levels, member)

    def U(self, x, a: int) -> frozenset:
        return self.set_of(self.member[self.index[x], a])

    def replace(self, x, a: int, subset: Iterable) -> MetrisabilityWitness:
        """Copy of the table with ``U(x, a)`` replaced."""
        member = self.member.copy()
        member[self.index[x], a] = self.mask_of(subset)
        return MetrisabilityWitness(self.points, self.levels, member)

    @property
    def monotone(self) -> bool:
        m = self.member
        return bool((~m[:, 1:, :] | m[:, :-1, :]).all())

    def cells(self, a: int) -> list[frozenset]:
        """Distinct sets at level ``a``, in order of first occurrence."""
        first, _ = _row_classes(self.member[:, a, :])
        return [self.set_of(self.member[i, a]) for i in first]

    def to_json_obj(self) -> dict:
        return {
            "points": [_to_json_label(p) for p in self.points],
            "levels": self.levels,
            "U": {
                _label_key(x): {
                    str(a): [_to_json_label(self.points[j]) for j in np.flatnonzero(self.member[i, a])]
                    for a in range(self.levels)
                }
                for i, x in enumerate(self.points)
            },
        }

    def to_json(self) -> str:
        return dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj) -> MetrisabilityWitness:
        try:
            points = tuple(_from_json_label(p) for p in obj["points"])
            levels = obj["levels"]
            table = obj["U"]
        except (KeyError, TypeError):
            raise InputError('witness JSON needs "points", "levels" and "U"') from None
        by_key = {_label_key(p): p for p in points}
        index = {p: i for i, p in enumerate(points)}
        if not isinstance(levels, int) or levels < 1:
            raise InputError('"levels" must be a positive integer')
        member = np.zeros((len(points), levels, len(points)), dtype=bool)
        for key, row in table.items():
            if key not in by_key:
                raise InputError(f"U has an entry for unknown point {key!r}")
            for a_key, subset in row.items():
                a = int(a_key)
                if not 0 <= a < levels:
                    raise InputError(f"level {a} out of range for point {key!r}")
                for y in subset:
                    y = _from_json_label(y)
                    if y not in index:
                        raise InputError(f"U({key}, {a}) contains unknown point {y!r}")
                    member[index[by_key[key]], a, index[y]] = True
        if len(table) != len(points) or any(len(r) != levels for r in table.values()):
            raise InputError("U must be total: one entry per point and level")
        return cls(points, levels, member)


@dataclass(frozen=True, eq=False)
class BaseFamily(_Indexed):
    """Reference sets for condition (1), or an open cover to refine."""

    points: tuple
    sets: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        self._init_index()
        sets = tuple(frozenset(s) for s in self.sets)
        for s in sets:
            self.mask_of(s)
        object.__setattr__(self, "sets", sets)

    def matrix(self) -> np.ndarray:
        if not self.sets:
            return np.zeros((0, len(self.points)), dtype=bool)
        return np.stack([self.mask_of(s) for s in self.sets])

    def to_json_obj(self) -> dict:
        order = self.index
        return {
            "points": [_to_json_label(p) for p in self.points],
            "sets": [[_to_json_label(p) for p in sorted(s, key=order.__getitem__)] for s in self.sets],
        }

    @classmethod
    def from_json_obj(cls, obj) -> BaseFamily:
        try:
            points = [_from_json_label(p) for p in obj["points"]]
            sets = [[_from_json_label(p) for p in s] for s in obj["sets"]]
        except (KeyError, TypeError):
            raise InputError('base JSON needs "points" and "sets"') from None
        return cls(points, sets)


@dataclass(frozen=True, eq=False)
class ProductBase:
    """Boxes ``∏ O_i`` with each ``O_i`` a set of factor base ``i`` or the whole factor."""

    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def points(self) -> tuple:
        return tuple(itertools.product(*(f.points for f in self.factors)))


@dataclass(frozen=True)
class Violation:
    condition: str  # "1", "2a" or "2b"
    x: Hashable
    y: Hashable = None
    alpha: int | None = None
    beta: int | None = None
    detail: str = ""

    def to_json_obj(self) -> dict:
        return {"condition": self.condition, "x": _to_json_label(self.x), "y": _to_json_label(self.y),
                "levels": [self.alpha, self.beta], "detail": self.detail}


# -- checking ------------------------------------------------------------------

def _row_classes(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Group equal rows: (index of each class's first row, class id per row)."""
    ids: dict[bytes, int] = {}
    first = []
    labels = np.empty(rows.shape[0], dtype=np.int64)
    for i, key in enumerate(np.packbits(rows, axis=1)):
        k = ids.setdefault(key.tobytes(), len(ids))
        if k == len(first):
            first.append(i)
        labels[i] = k
    return np.array(first, dtype=np.int64), labels


def _nesting_violations(W: MetrisabilityWitness) -> list[Violation]:
    """Conditions (2a)/(2b), one violation per offending pair of sets.

    For levels ``a <= b``, a level-``b`` set ``T`` and a level-``a`` set
    ``S``: some ``y`` with ``U(y, b) = T`` lying in ``S`` while ``T`` leaves
    ``S`` breaks (2a); some such ``y`` outside ``S`` while ``T`` meets ``S``
    breaks (2b).  Each distinct set is handled once, with the first point
    owning it named in the report.
    """
    m = W.member
    L = W.levels
    out = []
    distinct, owner, owns = [], [], []
    for a in range(L):
        first, labels = _row_classes(m[:, a, :])
        distinct.append(m[first, a, :].astype(np.float32))
        owner.append(first)
        # owns[t, y]: U(y, a) is the t-th distinct set
        owns.append((labels[None, :] == np.arange(len(first))[:, None]).astype(np.float32))
    for b in range(L):
        T = distinct[b]
        for a in range(b + 1):
            S = distinct[a]
            meets = (T @ S.T) > 0  # [t, s]
            leaves = (T @ (1 - S).T) > 0
            owner_in = (owns[b] @ S.T) > 0
            owner_out = (owns[b] @ (1 - S).T) > 0
            for cond, hit, inside in (("2a", owner_in & leaves, True), ("2b", owner_out & meets, False)):
                for t, k in np.argwhere(hit):
                    x = int(owner[a][k])
                    cands = np.flatnonzero(owns[b][t] * (S[k] if inside else 1 - S[k]))
                    y = int(cands[0])
                    if cond == "2a":
                        p = np.flatnonzero(T[t] * (1 - S[k]))[0]
                        detail = f"{W.points[p]!r} in U(y,{b}) but not in U(x,{a})"
                    else:
                        p = np.flatnonzero(T[t] * S[k])[0]
                        detail = f"{W.points[p]!r} in both U(y,{b}) and U(x,{a})"
                        if a == b and y < x:
                            x, y = y, x  # symmetric case: name the earlier point first
                    out.append(Violation(cond, W.points[x], W.points[y], a, b, detail))
    return out


def _base_violations(W: MetrisabilityWitness, B: BaseFamily) -> list[Violation]:
    n, L = len(W.points), W.levels
    Bm = B.matrix()
    if Bm.shape[0] == 0:
        return []
    # outside[x*L + a, o] = |U(x, a) minus O_o|
    outside = W.member.reshape(n * L, n).astype(np.float32) @ (~Bm).T.astype(np.float32)
    fits = (outside == 0).reshape(n, L, -1).any(axis=1)  # [x, o]
    bad = Bm.T & ~fits
    out = []
    for x, o in np.argwhere(bad):
        out.append(Violation("1", W.points[x], detail=f"no U({W.points[x]!r}, a) inside base set #{o}"))
    return out


def _product_base_violations(W: MetrisabilityWitness, B: ProductBase) -> list[Violation]:
    """Condition (1) against all boxes, without listing the boxes.

    A set lies in a box iff each of its projections lies in the matching
    factor set.  For each point ``x`` and factor ``i`` collect the level sets
    ``{a : proj_i U(x, a) ⊆ O_i}`` over the factor sets ``O_i`` around
    ``x_i``; a bad box exists iff some choice of one set per factor has an
    empty intersection.
    """
    n, L = len(W.points), W.levels
    k = len(B.factors)
    for p in W.points:
        if not isinstance(p, tuple) or len(p) != k:
            raise InputError(f"point {p!r} is not a {k}-tuple; cannot check against a product base")
    flat = W.member.reshape(n * L, n).astype(np.float32)
    per_factor = []
    for i, fb in enumerate(B.factors):
        coord = np.array([fb.index[p[i]] for p in W.points])
        onehot = np.zeros((n, len(fb.points)), dtype=np.float32)
        onehot[np.arange(n), coord] = 1
        proj = (flat @ onehot > 0).reshape(n, L, -1)  # proj[x, a, v]
        sets = [np.ones(len(fb.points), dtype=bool)] + [fb.mask_of(s) for s in fb.sets]
        fits = np.stack([~(proj & ~O[None, None, :]).any(axis=2) for O in sets], axis=2)  # [x, a, o]
        contains = np.stack([O[coord] for O in sets], axis=1)  # [x, o]
        per_factor.append((fits, contains, sets))
    out = []
    full = (1 << L) - 1
    weights = 1 << np.arange(L)
    for x in range(n):
        reach = {full: ()}
        for fits, contains, sets in per_factor:
            level_masks = (fits[x].T.astype(np.int64) @ weights)  # per factor set
            options = {}
            for o in np.flatnonzero(contains[x]):
                options.setdefault(int(level_masks[o]), o)
            reach = {r & lm: path + (o,) for r, path in reach.items() for lm, o in options.items()}
        if 0 in reach:
            path = reach[0]
            box = tuple(sorted(B.factors[i].set_of(per_factor[i][2][o]), key=str) for i, o in enumerate(path))
            out.append(Violation("1", W.points[x], detail=f"no U(x, a) inside the box {box}"))
    return out


def check_witness(W: MetrisabilityWitness, B: BaseFamily | ProductBase) -> list[Violation]:
    """All violations of conditions (1), (2a), (2b); an empty list means valid."""
    if isinstance(B, ProductBase):
        if set(B.points) != set(W.points) or len(B.points) != len(W.points):
            raise InputError("base and witness have different point sets")
        return _product_base_violations(W, B) + _nesting_violations(W)
    if tuple(B.points) != tuple(W.points):
        if set(B.points) != set(W.points) or len(B.points) != len(W.points):
            raise InputError("base and witness have different point sets")
        B = BaseFamily(W.points, B.sets)
    return _base_violations(W, B) + _nesting_violations(W)


def witness_base(W: MetrisabilityWitness) -> BaseFamily:
    """The witness's own sets plus the whole space, as a reference base."""
    sets = [frozenset(W.points)]
    for a in range(W.levels):
        sets.extend(W.cells(a))
    return BaseFamily(W.points, list(dict.fromkeys(sets)))


# -- refinement ----------------------------------------------------------------

def sikorski_refine(W: MetrisabilityWitness, O: BaseFamily) -> list[frozenset]:
    """Disjoint refinement ``{U(x, rho(x))}`` of the cover ``O``.

    ``rho(x)`` is the least level whose set around ``x`` fits inside some
    member of ``O``.  Output is deduplicated in order of first occurrence.
    """
    if tuple(O.points) != tuple(W.points):
        if set(O.points) != set(W.points):
            raise InputError("cover and witness have different point sets")
        O = BaseFamily(W.points, O.sets)
    nested = _nesting_violations(W)
    if nested:
        raise InputError(f"witness fails condition {nested[0].condition}: {nested[0]}")
    n, L = len(W.points), W.levels
    Om = O.matrix()
    covered = Om.any(axis=0) if Om.size else np.zeros(n, dtype=bool)
    if not covered.all():
        x = W.points[np.flatnonzero(~covered)[0]]
        raise CoverError(f"not a cover: {x!r} lies in no member", witness=x)
    out, seen = [], set()
    for i, x in enumerate(W.points):
        for a in range(L):
            row = W.member[i, a]
            if (~(row[None, :] & ~Om).any(axis=1)).any():
                cell = W.set_of(row)
                if cell not in seen:
                    seen.add(cell)
                    out.append(cell)
                break
        else:
            raise CoverError(f"cover not refinable at {x!r}: no level fits inside a cover member",
                             witness=x)
    return out


def rho(W: MetrisabilityWitness, O: BaseFamily) -> dict:
    """Least fitting level per point (``None`` if none fits)."""
    Om = BaseFamily(W.points, O.sets).matrix()
    out = {}
    for i, x in enumerate(W.points):
        out[x] = next((a for a in range(W.levels)
                       if (~(W.member[i, a][None, :] & ~Om).any(axis=1)).any()), None)
    return out


# -- ultrametrics --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Ultrametric(_Indexed):
    points: tuple
    d: tuple  # rows of Fractions

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        self._init_index()
        n = len(self.points)
        try:
            d = tuple(tuple(v if type(v) is Fraction else Fraction(v) for v in row) for row in self.d)
        except (TypeError, ValueError, ZeroDivisionError) as e:
            raise InputError(f"distances must be rationals: {e}") from None
        if len(d) != n or any(len(r) != n for r in d):
            raise InputError(f"distance matrix must be {n}x{n}")
        for i in range(n):
            if d[i][i] != 0:
                raise InputError(f"d({self.points[i]!r}, itself) = {d[i][i]} != 0")
        object.__setattr__(self, "d", d)
        # the strong triangle inequality only sees the order of the values
        values = sorted({v for row in d for v in row})
        rank = {v: k for k, v in enumerate(values)}
        R = np.array([[rank[v] for v in row] for row in d], dtype=np.int64).reshape(n, n)
        asym = np.argwhere(R != R.T)
        if asym.size:
            i, j = asym[0]
            raise InputError(f"d is not symmetric at {self.points[i]!r}, {self.points[j]!r}")
        nonpositive = np.argwhere((R <= rank[Fraction(0)]) & ~np.eye(n, dtype=bool))
        if nonpositive.size:
            i, j = nonpositive[0]
            raise InputError(f"d({self.points[i]!r}, {self.points[j]!r}) must be positive")
        R.flags.writeable = False
        object.__setattr__(self, "values", tuple(values))
        object.__setattr__(self, "rank", R)
        worse = R[:, :, None] > np.maximum(R[:, None, :], R.T[None, :, :])
        # worse[x, y, z]: d(x,y) > max(d(x,z), d(z,y))
        if worse.any():
            x, y, z = np.argwhere(worse)[0]
            p = self.points
            raise InputError(
                f"strong triangle inequality fails for ({p[x]!r}, {p[y]!r}, {p[z]!r}): "
                f"d({p[x]!r},{p[y]!r}) = {d[x][y]} > max({d[x][z]}, {d[z][y]})"
            )

    def distance(self, x, y) -> Fraction:
        return self.d[self.index[x]][self.index[y]]

    def thresholds(self) -> list[Fraction]:
        """Distinct distance values including 0, decreasing."""
        return list(reversed(self.values))

    def to_json_obj(self) -> dict:
        return {"points": [_to_json_label(p) for p in self.points],
                "d": [[str(v) for v in row] for row in self.d]}

    def to_json(self) -> str:
        return dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj) -> Ultrametric:
        try:
            points = [_from_json_label(p) for p in obj["points"]]
            d = [[Fraction(str(v)) for v in row] for row in obj["d"]]
        except (KeyError, TypeError, ValueError, ZeroDivisionError):
            raise InputError('ultrametric JSON needs "points" and a rational matrix "d"') from None
        return cls(points, d)


def ultrametric_to_witness(D: Ultrametric) -> MetrisabilityWitness:
    """Closed balls at every distance value, largest radius first.

    Level 0 uses the largest distance, so its balls are the whole space;
    the last level uses radius 0, so its balls are singletons.
    """
    top = len(D.values) - 1
    member = np.stack([D.rank <= top - a for a in range(top + 1)], axis=1)
    return MetrisabilityWitness(D.points, top + 1, member)


def ball_base(D: Ultrametric) -> BaseFamily:
    sets = []
    for k in reversed(range(len(D.values))):
        for row in D.rank <= k:
            sets.append(frozenset(D.points[j] for j in np.flatnonzero(row)))
    return BaseFamily(D.points, list(dict.fromkeys(sets)))


def witness_to_ultrametric(W: MetrisabilityWitness) -> Ultrametric:
    """``d(x, y) = 1/n`` for the least level ``n >= 1`` separating ``x`` and ``y``."""
    n = len(W.points)
    sep = np.zeros((n, n), dtype=np.int64)  # first separating level, 0 = none yet
    for a in range(1, W.levels):
        rows = W.member[:, a, :].astype(np.float32)
        sep[(sep == 0) & ~((rows @ rows.T) > 0)] = a
    np.fill_diagonal(sep, -1)
    if (sep == 0).any():
        i, j = np.argwhere(sep == 0)[0]
        raise InputError(f"points {W.points[i]!r} and {W.points[j]!r} are never separated")
    inv = [Fraction(0)] + [Fraction(1, a) for a in range(1, W.levels)]
    d = [[inv[max(v, 0)] for v in row] for row in sep.tolist()]
    return Ultrametric(W.points, d)


def level_partitions(W: MetrisabilityWitness) -> list[frozenset]:
    return [frozenset(W.cells(a)) for a in range(W.levels)]


# -- constructions -------------------------------------------------------------

def product_witness(factors: Sequence[MetrisabilityWitness]) -> MetrisabilityWitness:
    """Witness on the product of ``n`` factors sharing ``L = n`` levels.

    At level ``i`` the box is ``U_k(x_k, i)`` on factors ``k <= i`` and the
    whole factor on factors ``k > i``.
    """
    factors = list(factors)
    if not factors:
        raise InputError("need at least one factor")
    L = factors[0].levels
    if any(f.levels != L for f in factors):
        raise InputError(f"factors disagree on the number of levels: {[f.levels for f in factors]}")
    if len(factors) != L:
        raise InputError(f"need as many factors as levels: {len(factors)} factors, {L} levels")
    points = list(itertools.product(*(f.points for f in factors)))
    idx = np.array(list(itertools.product(*(range(len(f.points)) for f in factors))), dtype=np.int64)
    N = len(points)
    member = np.ones((N, L, N), dtype=bool)
    for k, f in enumerate(factors):
        xk = idx[:, k]
        for i in range(k, L):
            member[:, i, :] &= f.member[xk[:, None], i, xk[None, :]]
    return MetrisabilityWitness(points, L, member)


def product_base(factors: Sequence[MetrisabilityWitness]) -> ProductBase:
    return ProductBase(tuple(witness_base(f) for f in factors))


def ordinal_witness(m: int) -> MetrisabilityWitness:
    """Witness on ``{0, ..., m-1, top}``: ``U(z, a) = {z}`` if ``z < a``, else the tail ``[a, top]``."""
    if m < 1:
        raise InputError(f"m must be positive, got {m}")
    points = list(range(m)) + [TOP_LABEL]

    def U(z, a):
        if z != TOP_LABEL and z < a:
            return {z}
        return set(range(a, m)) | {TOP_LABEL}

    return MetrisabilityWitness.from_function(points, m + 1, U)


def ordinal_base(m: int) -> BaseFamily:
    """Singletons below the top and tails ``[a, top]`` for ``a < m``."""
    points = list(range(m)) + [TOP_LABEL]
    sets = [{v} for v in range(m)] + [set(range(a, m)) | {TOP_LABEL} for a in range(m)]
    return BaseFamily(points, sets)


def bounded_box_witness(n: int, ladder: Sequence[int]) -> MetrisabilityWitness:
    """Witness on ``2^n``: level 0 is everything, level ``i+1`` the cylinder of ``f`` on ``[0, ladder[i])``."""
    ladder = list(ladder)
    if not ladder or any(b <= a for a, b in zip(ladder, ladder[1:])) or ladder[0] < 1 or ladder[-1] >= n:
        raise InputError(f"ladder {ladder} must be nonempty, strictly increasing, within [1, {n - 1}]")
    points = [format(v, f"0{n}b") for v in range(1 << n)]
    vals = np.arange(1 << n)
    member = np.ones((len(points), len(ladder) + 1, len(points)), dtype=bool)
    for i, k in enumerate(ladder):
        shift = n - k
        member[:, i + 1, :] = (vals[:, None] >> shift) == (vals[None, :] >> shift)
    return MetrisabilityWitness(points, len(ladder) + 1, member)


def bounded_cylinder_base(n: int, ladder: Sequence[int]) -> BaseFamily:
    """Every cylinder whose support lies in ``[0, ladder[-1])``."""
    K = ladder[-1]
    points = [format(v, f"0{n}b") for v in range(1 << n)]
    sets = []
    for pattern in itertools.product("01-", repeat=K):
        sets.append({p for p in points if all(c == "-" or c == p[j] for j, c in enumerate(pattern))})
    return BaseFamily(points, sets)
