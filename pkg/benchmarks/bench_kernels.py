"""Time the compiled kernels against the numpy fallback on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

Both backends must agree on every result; a disagreement aborts the run.
"""
from __future__ import annotations

import argparse
import random
import timeit

from boxtop import kernels
from boxtop.generators import random_dense_family, random_family


def cases(seed: int):
    rng = random.Random(seed)
    for dim in (12, 16, 20):
        dense = random_dense_family(rng, dim, 64, budget=6)
        sparse = random_family(rng, dim, 64, budget=dim // 2, min_support=dim // 3)
        yield f"first_uncovered dense  dim={dim} n={len(dense)}", kernels.first_uncovered, (dense.cubes, dim)
        yield f"first_uncovered sparse dim={dim} n={len(sparse)}", kernels.first_uncovered, (sparse.cubes, dim)
        yield f"first_double_cover     dim={dim} n={len(dense)}", kernels.first_double_cover, (dense.cubes, dim)
    big = random_family(rng, 40, 2000, min_support=30)
    yield f"first_compatible_pair  dim=40 n={len(big)}", kernels.first_compatible_pair, (big.cubes, 40)
    S = random_family(rng, 40, 1000, budget=4)
    R = random_family(rng, 40, 1000, min_support=35)
    yield f"first_unrefined        dim=40 n={len(S)}x{len(R)}", kernels.first_unrefined, (S.cubes, R.cubes, 40)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if "compiled" not in kernels.BACKENDS:
        print("compiled extension not available; only the fallback can be timed")
    names = list(kernels.BACKENDS)
    print(f"{'kernel':<44}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, fn, fargs in cases(args.seed):
        results, times = {}, {}
        for name in names:
            impl = kernels.BACKENDS[name]
            results[name] = fn(*fargs, impl=impl)
            times[name] = min(timeit.repeat(lambda: fn(*fargs, impl=impl), number=1, repeat=args.repeat))
        if len(set(map(str, results.values()))) != 1:
            raise SystemExit(f"backends disagree on {label}: {results}")
        row = f"{label:<44}" + "".join(f"{times[n] * 1e3:>10.2f}ms" for n in names)
        if len(names) == 2:
            row += f"{times['python'] / times['compiled']:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
