"""Explicit disjoint cube covers built from a prefix partition and a ladder.

Fix a prefix length ``theta``, a strictly increasing ladder
``k_0 < ... < k_{t-1}`` and a map from ``theta``-bit prefixes to ladder
indices.  For a point ``f`` with prefix class ``i*``, the cube ``U_f``
fixes ``f`` on the prefix and on each segment ``[k_i, k_i + k_{i*})`` with
``i >= i*`` (clipped to the dimension).  Two such cubes are equal or
disjoint, so the distinct ones partition ``2^N``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .config import HARD_CUBE_CAP, require_enumerable
from .cube import Cube, CubeFamily, Point, bit_of, submasks
from .errors import InputError, ResourceError


@dataclass(frozen=True)
class SingularParams:
    theta: int
    ladder: tuple
    total_dim: int
    partition: tuple  # partition[prefix value] = ladder index

    def __post_init__(self):
        ladder = tuple(int(k) for k in self.ladder)
        object.__setattr__(self, "ladder", ladder)
        object.__setattr__(self, "partition", tuple(int(i) for i in self.partition))
        if self.theta < 1:
            raise InputError(f"theta must be positive, got {self.theta}")
        if not ladder or any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise InputError(f"ladder {list(ladder)} must be nonempty and strictly increasing")
        if self.theta > ladder[0]:
            raise InputError(f"theta = {self.theta} exceeds the first ladder step {ladder[0]}")
        if ladder[-1] > self.total_dim:
            raise InputError(f"last ladder step {ladder[-1]} exceeds the dimension {self.total_dim}")
        if len(self.partition) != 1 << self.theta:
            raise InputError(f"partition must assign all {1 << self.theta} prefixes, got {len(self.partition)}")
        for v, i in enumerate(self.partition):
            if not 0 <= i < len(ladder):
                raise InputError(
                    f"prefix {v:0{self.theta}b} mapped to {i}, outside ladder indices 0..{len(ladder) - 1}"
                )

    @classmethod
    def auto(cls, theta: int, ladder: Sequence[int], total_dim: int) -> SingularParams:
        """Prefixes split into consecutive equal blocks, one per ladder step."""
        t = len(ladder)
        return cls(theta, tuple(ladder), total_dim, tuple(v * t >> theta for v in range(1 << theta)))

    @classmethod
    def from_mapping(cls, theta: int, ladder: Sequence[int], total_dim: int,
                     mapping: Mapping[str, int]) -> SingularParams:
        part = []
        for v in range(1 << theta):
            key = format(v, f"0{theta}b")
            if key not in mapping:
                raise InputError(f"partition has no entry for prefix {key}")
            part.append(mapping[key])
        extra = set(mapping) - {format(v, f"0{theta}b") for v in range(1 << theta)}
        if extra:
            raise InputError(f"partition has entries that are not {theta}-bit prefixes: {sorted(extra)}")
        return cls(theta, tuple(ladder), total_dim, tuple(part))

    def fixed_mask(self, cls_index: int) -> int:
        """Coordinates fixed by ``U_f`` when ``f``'s prefix lies in class ``cls_index``."""
        N = self.total_dim
        mask = 0
        for c in range(self.theta):
            mask |= bit_of(N, c)
        width = self.ladder[cls_index]
        for k in self.ladder[cls_index:]:
            for c in range(k, min(k + width, N)):
                mask |= bit_of(N, c)
        return mask

    def to_json_obj(self) -> dict:
        return {"theta": self.theta, "ladder": list(self.ladder), "dim": self.total_dim,
                "partition": {format(v, f"0{self.theta}b"): i for v, i in enumerate(self.partition)}}


def singular_cover_cube(P: SingularParams, f: Point) -> Cube:
    if f.dim != P.total_dim:
        raise InputError(f"point has dimension {f.dim}, parameters need {P.total_dim}")
    i_star = P.partition[f.value >> (P.total_dim - P.theta)]
    mask = P.fixed_mask(i_star)
    return Cube._raw(P.total_dim, mask, f.value & mask)


def singular_disjoint_cover(P: SingularParams) -> CubeFamily:
    """The distinct cubes ``U_f``, grouped by prefix, each group in increasing order."""
    N = P.total_dim
    total = sum(1 << (P.fixed_mask(i).bit_count() - P.theta) for i in P.partition)
    if total > HARD_CUBE_CAP:
        raise ResourceError(f"cover would have {total} cubes, over the cap {HARD_CUBE_CAP}")
    shift = N - P.theta
    cubes = []
    for prefix, i_star in enumerate(P.partition):
        mask = P.fixed_mask(i_star)
        base = prefix << shift
        for sub in submasks(mask & ((1 << shift) - 1)):
            cubes.append(Cube._raw(N, mask, base | sub))
    return CubeFamily(N, tuple(cubes))


def size_lower_bound(P: SingularParams) -> int:
    """A bound the cover size always meets.

    Every prefix contributes a cube, giving ``2^theta``.  When no segment is
    clipped (``N >= 2 k_{t-1}``) each class fixes at least ``k_0`` further
    coordinates, giving ``2^(k_0)``.
    """
    if P.total_dim >= 2 * P.ladder[-1]:
        return 1 << max(P.ladder[0], P.theta)
    return 1 << P.theta


@dataclass
class SingularReport:
    disjoint_ok: bool
    covers_ok: bool
    self_membership_ok: bool
    size: int
    size_lower_bound: int
    witnesses: dict

    @property
    def ok(self) -> bool:
        return (self.disjoint_ok and self.covers_ok and self.self_membership_ok
                and self.size >= self.size_lower_bound)

    def to_json_obj(self) -> dict:
        return {"disjoint_ok": self.disjoint_ok, "covers_ok": self.covers_ok,
                "self_membership_ok": self.self_membership_ok, "size": self.size,
                "size_lower_bound": self.size_lower_bound, "witnesses": self.witnesses}


def verify_singular_cover(P: SingularParams, family: CubeFamily | None = None) -> SingularReport:
    """Exhaustive check over ``2^N``.

    Disjointness and coverage come from point counting.  For self-membership
    the case table is re-derived coordinatewise with numpy for every ``f``
    and the resulting cube must be a member of the family.
    """
    N = P.total_dim
    require_enumerable(N)
    if family is None:
        family = singular_disjoint_cover(P)
    witnesses: dict = {}
    double = kernels.first_double_cover(family.cubes, N)
    if double >= 0:
        hits = [c.pattern for c in family.cubes if double & c.mask == c.bits][:2]
        witnesses["disjoint"] = hits
    missing = kernels.first_uncovered(family.cubes, N)
    if missing >= 0:
        witnesses["covers"] = str(Point(N, missing))

    f = np.arange(1 << N, dtype=np.int64)
    coords = np.arange(N)
    fbits = (f[:, None] >> (N - 1 - coords)[None, :]) & 1  # fbits[f, c]
    i_star = np.asarray(P.partition)[f >> (N - P.theta)]
    ladder = np.asarray(P.ladder)
    width = ladder[i_star]  # k_{i*} per point
    fixed = np.broadcast_to(coords[None, :] < P.theta, fbits.shape).copy()
    for i, k in enumerate(P.ladder):
        in_seg = (coords[None, :] >= k) & (coords[None, :] < k + width[:, None])
        fixed |= in_seg & (i >= i_star)[:, None]
    weights = 1 << (N - 1 - coords)
    masks = fixed.astype(np.int64) @ weights
    bits = (fixed & (fbits == 1)).astype(np.int64) @ weights
    keys = (masks << N) | bits
    members = np.array([(c.mask << N) | c.bits for c in family.cubes], dtype=np.int64)
    present = np.isin(keys, members)
    contains = (f & masks) == bits
    ok = present & contains
    if not ok.all():
        bad = int(np.flatnonzero(~ok)[0])
        witnesses["self_membership"] = str(Point(N, bad))
    return SingularReport("disjoint" not in witnesses, "covers" not in witnesses,
                          "self_membership" not in witnesses, len(family), size_lower_bound(P), witnesses)


def regular_prefix_cover(theta: int, N: int) -> CubeFamily:
    """The ``2^theta`` cubes fixing each ``theta``-bit prefix."""
    if not 1 <= theta <= N:
        raise InputError(f"need 1 <= theta <= N, got theta={theta}, N={N}")
    if theta > 22:
        raise ResourceError(f"2^{theta} prefix cubes is over the cap {HARD_CUBE_CAP}")
    mask = ((1 << theta) - 1) << (N - theta)
    return CubeFamily(N, tuple(Cube._raw(N, mask, v << (N - theta)) for v in range(1 << theta)))


def random_singular_params(rng: random.Random, max_dim: int = 16) -> SingularParams:
    N = rng.randint(1, max_dim)
    t = rng.randint(1, min(3, N))
    ladder = sorted(rng.sample(range(1, N + 1), t))
    theta = rng.randint(1, ladder[0])
    part = tuple(rng.randrange(t) for _ in range(1 << theta))
    return SingularParams(theta, tuple(ladder), N, part)
