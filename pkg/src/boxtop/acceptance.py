"""Randomised property suites, shared by the test suite and ``boxtop selftest``.

Each ``criterion_*`` function takes an instance count and a seed and
returns a :class:`CriterionResult`.  Failures record the first few
offending instances so a red run is reproducible.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import generators as gen
from .covers import certify_b_refinement, is_antichain, is_dense, same_union
from .cube import Cube, CubeFamily, Point, bit_of
from .errors import DimensionTooSmallError
from .metrisable import (
    BaseFamily,
    Ultrametric,
    ball_base,
    check_witness,
    level_partitions,
    product_base,
    product_witness,
    sikorski_refine,
    ultrametric_to_witness,
    witness_base,
    witness_to_ultrametric,
)
from .refine import diagonal_witness, disjointify, prefix_ladder_refine
from .singular import SingularParams, random_singular_params, singular_disjoint_cover, verify_singular_cover
from .tailbox import RudinTrace, rudin_refine, verify_box_refinement

MAX_RECORDED = 5


@dataclass
class CriterionResult:
    number: int
    name: str
    count: int
    time_limit: float
    failures: int = 0
    elapsed: float = 0.0
    examples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.elapsed < self.time_limit

    def fail(self, info) -> None:
        self.failures += 1
        if len(self.examples) < MAX_RECORDED:
            self.examples.append(info)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = (f"[{status}] criterion {self.number}: {self.name}: {self.count} instances, "
                f"{self.failures} failures, {self.elapsed:.2f}s (limit {self.time_limit:.0f}s)")
        if self.examples:
            text += f"; first failures: {self.examples}"
        return text


def _timed(number: int, name: str, count: int, limit: float):
    def wrap(body: Callable[[CriterionResult], None]) -> CriterionResult:
        res = CriterionResult(number, name, count, limit)
        t0 = time.perf_counter()
        body(res)
        res.elapsed = time.perf_counter() - t0
        return res
    return wrap


def _bounded_dense_family(rng: random.Random, max_cubes: int = 64) -> CubeFamily:
    while True:
        dim = rng.randint(4, 16)
        fam = gen.random_dense_family(rng, dim, rng.randint(1, 40), min_support=1)
        if len(fam) <= max_cubes:
            return fam


def criterion_1(count: int = 1000, seed: int = 1) -> CriterionResult:
    rng = random.Random(seed)

    @_timed(1, "dense families: disjointify and prefix ladder certify", count, 60)
    def res(r):
        for k in range(count):
            S = _bounded_dense_family(rng)
            for algo, R in (("disjointify", disjointify(S)), ("ladder", prefix_ladder_refine(S))):
                cert = certify_b_refinement(S, R, mode="exhaustive", check_union=False)
                if not (cert.dense_ok and cert.antichain_ok and cert.refines_ok):
                    r.fail({"instance": k, "algo": algo, "input": S.patterns, "witnesses": cert.witnesses})
    return res


def criterion_2(count: int = 1000, seed: int = 2) -> CriterionResult:
    rng = random.Random(seed)

    @_timed(2, "disjointify preserves the union of arbitrary families", count, 60)
    def res(r):
        for k in range(count):
            dim = rng.randint(1, 16)
            S = gen.random_family(rng, dim, rng.randint(0, 40), min_support=rng.randint(0, 2))
            R = disjointify(S)
            union_ok, p = same_union(S, R, "exhaustive")
            anti_ok, pair = is_antichain(R)
            if not (union_ok and anti_ok):
                r.fail({"instance": k, "input": S.patterns, "union": str(p) if p else None,
                        "pair": [str(c) for c in pair] if pair else None})
    return res


def criterion_3(count: int = 10000, seed: int = 3) -> CriterionResult:
    rng = random.Random(seed)

    @_timed(3, "symbolic density agrees with exhaustive density", count, 120)
    def res(r):
        for k in range(count):
            dim = rng.randint(1, 16)
            n = rng.randint(0, 30)
            S = gen.random_family(rng, dim, n, min_support=rng.randint(0, 2))
            if rng.random() < 0.5:
                S = gen.repair_density(rng, S)
            ex, _ = is_dense(S, "exhaustive")
            sy, w = is_dense(S, "symbolic")
            if ex != sy or (w is not None and any(w.value & c.mask == c.bits for c in S.cubes)):
                r.fail({"instance": k, "input": S.patterns, "exhaustive": ex, "symbolic": sy})
    return res


def _strong_triangle_ok(D: Ultrametric) -> bool:
    d = np.array([[float(v) for v in row] for row in D.d])
    return bool((d[:, :, None] <= np.maximum(d[:, None, :], d.T[None, :, :]) + 0.0).all())


def criterion_4(count: int = 500, seed: int = 4) -> CriterionResult:
    rng = random.Random(seed)

    @_timed(4, "ultrametric witnesses validate and round-trip", count, 60)
    def res(r):
        for k in range(count):
            pts, d = gen.random_ultrametric(rng, rng.randint(1, 32))
            D = Ultrametric(pts, d)
            W = ultrametric_to_witness(D)
            problems = [v.condition for v in check_witness(W, ball_base(D))]
            D2 = witness_to_ultrametric(W)
            if not _strong_triangle_ok(D2):
                problems.append("strong triangle")
            n = len(pts)
            if any((D2.d[i][j] == 0) != (i == j) for i in range(n) for j in range(n)):
                problems.append("zero distance")
            balls = [frozenset(frozenset(pts[j] for j in range(n) if D.d[i][j] <= t) for i in range(n))
                     for t in D.thresholds()]
            if level_partitions(ultrametric_to_witness(D2)) != balls:
                problems.append("partitions")
            if problems:
                r.fail({"instance": k, "problems": problems})
    return res


def criterion_5(count: int = 500, seed: int = 5) -> CriterionResult:
    rng = random.Random(seed)

    @_timed(5, "Sikorski refinement is a disjoint refining cover", count, 30)
    def res(r):
        for k in range(count):
            n = rng.randint(1, 64)
            pts = list(range(n))
            W = gen.random_nested_witness(rng, pts, rng.randint(1, 6))
            O = BaseFamily(pts, gen.random_cover(rng, pts, rng.randint(1, 8)))
            cells = sikorski_refine(W, O)
            seen: set = set()
            ok = True
            for c in cells:
                ok &= not (c & seen) and any(c <= o for o in O.sets)
                seen |= c
            if not ok or seen != set(pts):
                r.fail({"instance": k, "points": n})
    return res


def _factor_tuple(rng: random.Random):
    L = rng.randint(1, 4)
    sizes = [rng.randint(1, 6) for _ in range(L)]
    if max(sizes) == 1:
        sizes[rng.randrange(L)] = rng.randint(2, 6)
    return [gen.random_nested_witness(rng, [f"{i}.{j}" for j in range(s)], L)
            for i, s in enumerate(sizes)]


def criterion_6(count: int = 200, seed: int = 6) -> CriterionResult:
    rng = random.Random(seed)

    @_timed(6, "product witness valid, and broken by a corrupted factor", count, 60)
    def res(r):
        for k in range(count):
            factors = _factor_tuple(rng)
            L = factors[0].levels
            base = product_base(factors)
            if check_witness(product_witness(factors), base):
                r.fail({"instance": k, "problem": "valid factors, invalid product"})
                continue
            i = rng.choice([i for i, f in enumerate(factors) if len(f.points) >= 2])
            f = factors[i]
            x, y = rng.sample(f.points, 2)
            bad = f.replace(y, L - 1, f.U(y, L - 1) | {x})
            if not any(v.condition == "2b" for v in check_witness(bad, witness_base(f))):
                r.fail({"instance": k, "problem": "corruption did not break the factor"})
                continue
            broken = list(factors)
            broken[i] = bad
            if not check_witness(product_witness(broken), base):
                r.fail({"instance": k, "problem": "corrupted factor, product still valid"})
    return res


def criterion_7(count: int = 1000, seed: int = 7) -> CriterionResult:
    rng = random.Random(seed)

    @_timed(7, "Rudin refinement terminates with a disjoint refining cover", count, 120)
    def res(r):
        for k in range(count):
            coords = [rng.randint(1, 5) for _ in range(rng.randint(1, 4))]
            O = gen.random_tail_cover(rng, coords, rng.randint(0, 6))
            trace = RudinTrace(0, [])
            R = rudin_refine(O, trace)
            ranks = trace.ranks
            decreasing = all(b < a for a, b in zip(ranks, ranks[1:]))
            cert = verify_box_refinement(O, R)
            if not (decreasing and cert.ok):
                r.fail({"instance": k, "cover": O.to_json_obj(), "ranks": ranks, "cert": cert.to_json_obj()})
    return res


def criterion_8(count: int = 200, seed: int = 8) -> CriterionResult:
    rng = random.Random(seed)

    @_timed(8, "singular covers are disjoint covers containing each point's cube", count, 60)
    def res(r):
        worked = SingularParams.auto(2, (2, 4), 6)
        if len(singular_disjoint_cover(worked)) != 40 or not verify_singular_cover(worked).ok:
            r.fail({"instance": "worked", "size": len(singular_disjoint_cover(worked))})
        for k in range(count):
            P = random_singular_params(rng, 16)
            rep = verify_singular_cover(P)
            if not rep.ok:
                r.fail({"instance": k, "params": P.to_json_obj(), "report": rep.to_json_obj()})
    return res


def _random_diagonal_instance(rng: random.Random):
    while True:
        dim = rng.randint(1, 24)
        x = Point(dim, rng.getrandbits(dim))
        k = rng.randint(0, dim)
        U_list = []
        for _ in range(k):
            c = gen.random_cube(rng, dim, budget=rng.randint(1, dim))
            U_list.append(Cube._raw(dim, c.mask, x.value & c.mask))
        try:
            return x, U_list, diagonal_witness(x, U_list)
        except DimensionTooSmallError:
            continue


def criterion_9(count: int = 500, seed: int = 9) -> CriterionResult:
    rng = random.Random(seed)

    @_timed(9, "diagonal witness contains x and escapes every given cube", count, 10)
    def res(r):
        for k in range(count):
            x, U_list, O = _random_diagonal_instance(rng)
            ok = x.value & O.mask == O.bits
            for U in U_list:
                # flip x at a coordinate O fixes and U leaves free
                free = O.mask & ~U.mask
                if not free:
                    ok = False
                    break
                e = x.value ^ (free & -free)
                ok &= e & U.mask == U.bits and e & O.mask != O.bits
            if not ok:
                r.fail({"instance": k, "x": str(x), "U": [str(u) for u in U_list], "O": str(O)})
    return res


CRITERIA = {
    1: (criterion_1, 1000),
    2: (criterion_2, 1000),
    3: (criterion_3, 10000),
    4: (criterion_4, 500),
    5: (criterion_5, 500),
    6: (criterion_6, 200),
    7: (criterion_7, 1000),
    8: (criterion_8, 200),
    9: (criterion_9, 500),
}


def run_all(scale: float = 1.0, seed: int = 0) -> list[CriterionResult]:
    out = []
    for number, (fn, full) in CRITERIA.items():
        out.append(fn(max(1, int(full * scale)), seed + number))
    return out
