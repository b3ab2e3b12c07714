"""Run-wide configuration: the enumeration limit and seeded RNG helpers."""
from __future__ import annotations

import os
import random
from dataclasses import dataclass, field

from .errors import InputError, ResourceError

DEFAULT_ENUM_LIMIT = 24
ENUM_LIMIT_ENV = "BOXTOP_ENUM_LIMIT"
# expansion of a single disjointify step never produces more cubes than this
HARD_CUBE_CAP = 1 << 22


def enum_limit() -> int:
    raw = os.environ.get(ENUM_LIMIT_ENV)
    if raw is None or raw == "":
        return DEFAULT_ENUM_LIMIT
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"{ENUM_LIMIT_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise InputError(f"{ENUM_LIMIT_ENV} must be positive, got {value}")
    return value


def require_enumerable(dim: int, limit: int | None = None) -> None:
    """Raise :class:`ResourceError` if ``2**dim`` points may not be enumerated."""
    limit = enum_limit() if limit is None else limit
    if dim > limit:
        raise ResourceError(
            f"dimension {dim} exceeds the enumeration limit {limit} "
            f"(set {ENUM_LIMIT_ENV} to raise it)"
        )


@dataclass
class RunConfig:
    seed: int = 0
    enumeration_limit: int = field(default_factory=enum_limit)
    format: str = "text"

    def rng(self, *salt) -> random.Random:
        # string seeds hash deterministically (sha512), unlike tuples
        return random.Random(":".join(str(p) for p in (self.seed, *salt)))
