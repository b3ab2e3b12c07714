"""Cubes (basic clopen sets ``[s]``) and points of the Boolean cube ``{0,1}^dim``.

A cube is a partial assignment ``s`` of bits to coordinates ``0..dim-1``;
its point set is every total assignment extending ``s``.  Internally a cube
is a pair of integers ``(mask, bits)``: coordinate ``i`` lives at bit
position ``dim - 1 - i``, so the integer value of a point is its rank in
lexicographic order of the pattern strings.  A point ``p`` lies in the cube
iff ``p & mask == bits``.

The textual form is a pattern over ``{0, 1, -}`` with ``-`` marking free
coordinates, e.g. ``"0-1"``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .config import require_enumerable
from .errors import InputError

_PATTERN = re.compile(r"[01-]+\Z")
_POINT = re.compile(r"[01]+\Z")


def bit_of(dim: int, coord: int) -> int:
    """Integer bit for coordinate ``coord`` in a ``dim``-dimensional cube."""
    return 1 << (dim - 1 - coord)


def coords_of(dim: int, mask: int) -> list[int]:
    """Coordinates whose bits are set in ``mask``, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(dim - low.bit_length())
        mask ^= low
    out.reverse()
    return out


def submasks(free: int) -> Iterator[int]:
    """All submasks of ``free`` in increasing integer order."""
    sub = 0
    while True:
        yield sub
        if sub == free:
            return
        sub = (sub - free) & free


@dataclass(frozen=True, slots=True)
class Point:
    """A total assignment ``f: dim -> 2``; ``value`` is its lexicographic rank."""

    dim: int
    value: int

    def __post_init__(self):
        if self.dim < 1:
            raise InputError(f"dimension must be positive, got {self.dim}")
        if not 0 <= self.value < (1 << self.dim):
            raise InputError(f"point value {self.value} out of range for dimension {self.dim}")

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.dim - 1 - i)) & 1 for i in range(self.dim))

    def __getitem__(self, coord: int) -> int:
        return (self.value >> (self.dim - 1 - coord)) & 1

    def __str__(self) -> str:
        return format(self.value, f"0{self.dim}b")

    def __lt__(self, other: Point) -> bool:
        return (self.dim, self.value) < (other.dim, other.value)


@dataclass(frozen=True, slots=True)
class Cube:
    """Partial assignment over ``dim`` coordinates, stored as ``(mask, bits)``."""

    dim: int
    mask: int
    bits: int

    def __post_init__(self):
        if self.dim < 1:
            raise InputError(f"dimension must be positive, got {self.dim}")
        if self.mask >> self.dim or self.mask < 0:
            raise InputError(f"mask {self.mask:#x} has coordinates outside dimension {self.dim}")
        if self.bits & ~self.mask:
            raise InputError("value bits set outside the assigned coordinates")

    @classmethod
    def _raw(cls, dim: int, mask: int, bits: int) -> Cube:
        # skips validation; internal callers guarantee the invariants
        c = object.__new__(cls)
        object.__setattr__(c, "dim", dim)
        object.__setattr__(c, "mask", mask)
        object.__setattr__(c, "bits", bits)
        return c

    @classmethod
    def free(cls, dim: int) -> Cube:
        return cls._raw(dim, 0, 0)

    @classmethod
    def from_assignment(cls, dim: int, assignment: dict[int, int]) -> Cube:
        mask = bits = 0
        for coord, value in assignment.items():
            if not 0 <= coord < dim:
                raise InputError(f"coordinate {coord} outside dimension {dim}")
            if value not in (0, 1):
                raise InputError(f"coordinate {coord} assigned non-bit {value!r}")
            b = bit_of(dim, coord)
            mask |= b
            if value:
                bits |= b
        return cls._raw(dim, mask, bits)

    @classmethod
    def from_point(cls, point: Point) -> Cube:
        full = (1 << point.dim) - 1
        return cls._raw(point.dim, full, point.value)

    @property
    def assignment(self) -> dict[int, int]:
        return {i: (self.bits >> (self.dim - 1 - i)) & 1 for i in coords_of(self.dim, self.mask)}

    @property
    def support(self) -> frozenset[int]:
        return frozenset(coords_of(self.dim, self.mask))

    @property
    def size(self) -> int:
        """Number of assigned coordinates."""
        return self.mask.bit_count()

    @property
    def pattern(self) -> str:
        chars = []
        for i in range(self.dim):
            b = 1 << (self.dim - 1 - i)
            if not self.mask & b:
                chars.append("-")
            else:
                chars.append("1" if self.bits & b else "0")
        return "".join(chars)

    def __str__(self) -> str:
        return self.pattern

    def __lt__(self, other: Cube) -> bool:
        return self.pattern < other.pattern

    def extends(self, other: Cube) -> bool:
        """True iff ``other ⊆ self`` as partial functions, i.e. ``[self] ⊆ [other]``."""
        return not other.mask & ~self.mask and self.bits & other.mask == other.bits


def parse_cube(text: str) -> Cube:
    if not isinstance(text, str) or not _PATTERN.match(text):
        raise InputError(f"malformed cube pattern {text!r}: expected a nonempty string over 0, 1, -")
    dim = len(text)
    mask = bits = 0
    for i, ch in enumerate(text):
        if ch != "-":
            b = 1 << (dim - 1 - i)
            mask |= b
            if ch == "1":
                bits |= b
    return Cube._raw(dim, mask, bits)


def format_cube(s: Cube) -> str:
    return s.pattern


def parse_point(text: str) -> Point:
    if not isinstance(text, str) or not _POINT.match(text):
        raise InputError(f"malformed point {text!r}: expected a nonempty bit string")
    return Point(len(text), int(text, 2))


def _same_dim(a, b) -> None:
    if a.dim != b.dim:
        raise InputError(f"dimension mismatch: {a.dim} vs {b.dim}")


def support(s: Cube) -> frozenset[int]:
    return s.support


def is_compatible(s: Cube, t: Cube) -> bool:
    _same_dim(s, t)
    return not (s.bits ^ t.bits) & s.mask & t.mask


def meet(s: Cube, t: Cube) -> Cube | None:
    """The cube ``s ∪ t`` (point set ``[s] ∩ [t]``), or ``None`` if incompatible."""
    if not is_compatible(s, t):
        return None
    return Cube._raw(s.dim, s.mask | t.mask, s.bits | t.bits)


def contains_point(s: Cube, f: Point) -> bool:
    _same_dim(s, f)
    return f.value & s.mask == s.bits


def cube_cardinality(s: Cube) -> int:
    return 1 << (s.dim - s.size)


def cube_point_values(s: Cube) -> Iterator[int]:
    free = ((1 << s.dim) - 1) & ~s.mask
    for sub in submasks(free):
        yield s.bits | sub


def cube_points(s: Cube, limit: int | None = None) -> list[Point]:
    require_enumerable(s.dim, limit)
    return [Point(s.dim, v) for v in cube_point_values(s)]


def complement_cubes(s: Cube) -> CubeFamily:
    """Disjoint cubes covering ``2^dim \\ [s]``.

    For the k-th assigned coordinate (ascending) the k-th member keeps the
    earlier assigned coordinates, flips the k-th and frees the rest.
    """
    out = []
    kept_mask = kept_bits = 0
    for coord in coords_of(s.dim, s.mask):
        b = bit_of(s.dim, coord)
        out.append(Cube._raw(s.dim, kept_mask | b, kept_bits | (~s.bits & b)))
        kept_mask |= b
        kept_bits |= s.bits & b
    return CubeFamily(s.dim, tuple(out))


@dataclass(frozen=True)
class CubeFamily:
    """Ordered list of cubes sharing a dimension, with an optional support budget."""

    dim: int
    cubes: tuple[Cube, ...] = ()
    support_budget: int | None = None

    def __post_init__(self):
        if not isinstance(self.cubes, tuple):
            object.__setattr__(self, "cubes", tuple(self.cubes))
        if self.dim < 1:
            raise InputError(f"dimension must be positive, got {self.dim}")
        if self.support_budget is not None and self.support_budget < 1:
            raise InputError(f"support budget must be positive, got {self.support_budget}")
        for c in self.cubes:
            if c.dim != self.dim:
                raise InputError(f"cube {c} has dimension {c.dim}, family has {self.dim}")
            if self.support_budget is not None and c.size > self.support_budget:
                raise InputError(
                    f"cube {c} assigns {c.size} coordinates, over the support budget {self.support_budget}"
                )

    @classmethod
    def of(cls, patterns: Iterable[str], dim: int | None = None,
           support_budget: int | None = None) -> CubeFamily:
        cubes = tuple(parse_cube(p) for p in patterns)
        if dim is None:
            if not cubes:
                raise InputError("cannot infer the dimension of an empty family")
            dim = cubes[0].dim
        return cls(dim, cubes, support_budget)

    def __iter__(self) -> Iterator[Cube]:
        return iter(self.cubes)

    def __len__(self) -> int:
        return len(self.cubes)

    def __getitem__(self, i):
        return self.cubes[i]

    @property
    def patterns(self) -> list[str]:
        return [c.pattern for c in self.cubes]

    @property
    def max_support(self) -> int:
        return max((c.size for c in self.cubes), default=0)

    def canonical(self) -> CubeFamily:
        """Same family sorted lexicographically by pattern, duplicates kept."""
        return CubeFamily(self.dim, tuple(sorted(self.cubes, key=lambda c: c.pattern)),
                          self.support_budget)

    def with_cubes(self, cubes: Sequence[Cube], keep_budget: bool = False) -> CubeFamily:
        return CubeFamily(self.dim, tuple(cubes), self.support_budget if keep_budget else None)

    # -- interchange formats -------------------------------------------------

    def to_text(self) -> str:
        return "".join(c.pattern + "\n" for c in self.cubes)

    @classmethod
    def from_text(cls, text: str, dim: int | None = None,
                  support_budget: int | None = None) -> CubeFamily:
        patterns = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if not _PATTERN.match(line):
                raise InputError(f"line {lineno}: malformed cube pattern {line!r}")
            patterns.append(line)
        fam = cls.of(patterns, dim=dim, support_budget=support_budget)
        return fam

    def to_json_obj(self) -> dict:
        return {"lambda": self.dim, "cubes": self.patterns, "support_budget": self.support_budget}

    @classmethod
    def from_json_obj(cls, obj) -> CubeFamily:
        if not isinstance(obj, dict) or "lambda" not in obj or "cubes" not in obj:
            raise InputError('family JSON needs "lambda" and "cubes"')
        dim = obj["lambda"]
        budget = obj.get("support_budget")
        if not isinstance(dim, int) or isinstance(dim, bool):
            raise InputError('"lambda" must be an integer')
        if budget is not None and (not isinstance(budget, int) or isinstance(budget, bool)):
            raise InputError('"support_budget" must be an integer or null')
        if not isinstance(obj["cubes"], list):
            raise InputError('"cubes" must be a list of patterns')
        return cls.of(obj["cubes"], dim=dim, support_budget=budget)

    def to_json(self) -> str:
        return dumps(self.to_json_obj())

    @classmethod
    def from_json(cls, text: str) -> CubeFamily:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputError(f"invalid JSON: {e}") from None
        return cls.from_json_obj(obj)


def dumps(obj) -> str:
    """Canonical JSON text used by every emitter (stable bytes for round trips)."""
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"
