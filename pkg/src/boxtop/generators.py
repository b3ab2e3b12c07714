"""Seeded random instance generators.

Every generator takes a :class:`random.Random` so that a seed fixes the
output exactly.
"""
from __future__ import annotations

import random
from fractions import Fraction

from . import kernels
from .cube import Cube, CubeFamily, bit_of
from .errors import InputError


def random_cube(rng: random.Random, dim: int, budget: int | None = None,
                min_support: int = 0) -> Cube:
    """Support size uniform in ``[min_support, budget]``, coordinates without
    replacement, bits uniform."""
    top = dim if budget is None else min(budget, dim)
    k = rng.randint(min(min_support, top), top)
    mask = bits = 0
    for c in rng.sample(range(dim), k):
        b = bit_of(dim, c)
        mask |= b
        if rng.getrandbits(1):
            bits |= b
    return Cube._raw(dim, mask, bits)


def random_family(rng: random.Random, dim: int, n: int, budget: int | None = None,
                  min_support: int = 0) -> CubeFamily:
    if dim < 1 or n < 0:
        raise InputError(f"need dim >= 1 and n >= 0, got dim={dim}, n={n}")
    if budget is not None and budget < 1:
        raise InputError(f"support budget must be positive, got {budget}")
    cubes = tuple(random_cube(rng, dim, budget, min_support) for _ in range(n))
    return CubeFamily(dim, cubes, budget)


def repair_density(rng: random.Random, family: CubeFamily) -> CubeFamily:
    """Append cubes until dense: each new cube is anchored at the least uncovered
    point, keeping a random subset of its coordinates (size within the budget)."""
    dim, budget = family.dim, family.support_budget
    cubes = list(family.cubes)
    while True:
        p = kernels.first_uncovered(cubes, dim)
        if p < 0:
            return CubeFamily(dim, tuple(cubes), budget)
        anchor = random_cube(rng, dim, budget)
        cubes.append(Cube._raw(dim, anchor.mask, p & anchor.mask))


def random_dense_family(rng: random.Random, dim: int, n: int, budget: int | None = None,
                        min_support: int = 0) -> CubeFamily:
    return repair_density(rng, random_family(rng, dim, n, budget, min_support))


def random_ultrametric(rng: random.Random, n: int) -> tuple[list[str], list[list[Fraction]]]:
    """Points ``p0..p{n-1}`` with distances from a random dendrogram.

    Clusters are merged pairwise at strictly increasing heights drawn from a
    small set of rationals, so ties between levels are common.
    """
    if n < 1:
        raise InputError("an ultrametric needs at least one point")
    points = [f"p{i}" for i in range(n)]
    d = [[Fraction(0)] * n for _ in range(n)]
    clusters = [[i] for i in range(n)]
    height = Fraction(0)
    while len(clusters) > 1:
        height += Fraction(rng.randint(1, 4), rng.randint(1, 4))
        # merge a random group of two or more clusters at this height
        k = rng.randint(2, min(len(clusters), 3))
        rng.shuffle(clusters)
        group, clusters = clusters[:k], clusters[k:]
        merged = []
        for g in group:
            for i in g:
                for h in merged:
                    d[i][h] = d[h][i] = height
            merged.extend(g)
        clusters.append(merged)
    return points, d


def random_nested_partitions(rng: random.Random, points: list, levels: int,
                             finest_singletons: bool = True) -> list[list[list]]:
    """``levels`` partitions of ``points``, each refining the previous one."""
    if levels < 1:
        raise InputError(f"need at least one level, got {levels}")
    out = []
    cells = [list(points)]
    for a in range(levels):
        if a == levels - 1 and finest_singletons:
            cells = [[p] for c in cells for p in c]
        elif a > 0 or rng.random() < 0.3:
            nxt = []
            for c in cells:
                k = rng.randint(1, min(3, len(c)))
                parts = [[] for _ in range(k)]
                for i, p in enumerate(rng.sample(c, len(c))):
                    parts[i if i < k else rng.randrange(k)].append(p)
                nxt.extend(parts)
            cells = nxt
        out.append([list(c) for c in cells])
    return out


def random_nested_witness(rng: random.Random, points: list, levels: int,
                          finest_singletons: bool = True):
    """Witness whose ``U(x, a)`` is the cell of ``x`` in a random nested partition."""
    from .metrisable import MetrisabilityWitness

    parts = random_nested_partitions(rng, points, levels, finest_singletons)
    cell = [{p: c for c in level for p in c} for level in parts]
    return MetrisabilityWitness.from_function(points, levels, lambda x, a: cell[a][x])


def random_cover(rng: random.Random, points: list, n_sets: int, density: float = 0.3) -> list[set]:
    """Random subsets, then one extra set per uncovered point so the union is everything."""
    sets = [{p for p in points if rng.random() < density} for _ in range(n_sets)]
    sets = [s for s in sets if s]
    covered = set().union(*sets)
    for p in points:
        if p not in covered:
            s = {p} | {q for q in points if rng.random() < density / 2}
            sets.append(s)
            covered |= s
    return sets


def _random_box_around(rng: random.Random, coords, p):
    from .tailbox import TOP, IntervalBox, Singleton, Tail

    factors = []
    for m, v in zip(coords, p):
        if v != TOP and rng.random() < 0.5:
            factors.append(Singleton(v))
        else:
            factors.append(Tail(rng.randint(0, m - 1 if v == TOP else v)))
    return IntervalBox(tuple(factors))


def random_tail_cover(rng: random.Random, coords, n_boxes: int):
    """Random boxes, then boxes around uncovered points until the product is covered."""
    from .tailbox import TOP, TailBoxCover

    coords = tuple(coords)
    boxes = []
    for _ in range(n_boxes):
        p = tuple(rng.choice(list(range(m)) + [TOP]) for m in coords)
        boxes.append(_random_box_around(rng, coords, p))
    while True:
        p = TailBoxCover(coords, tuple(boxes)).first_uncovered()
        if p is None:
            break
        boxes.insert(rng.randint(0, len(boxes)), _random_box_around(rng, coords, p))
    return TailBoxCover(coords, tuple(boxes))
