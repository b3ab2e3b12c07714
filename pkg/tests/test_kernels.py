import os
import random
import subprocess
import sys

import numpy as np
import pytest

from boxtop import kernels
from boxtop.generators import random_family

BACKENDS = list(kernels.BACKENDS.values())


def test_compiled_backend_is_built():
    # the extension is optional, but this checkout is expected to have it
    assert kernels.BACKEND in ("compiled", "python")
    if kernels.BACKEND == "python":
        pytest.skip("compiled extension not built")
    assert "compiled" in kernels.BACKENDS


def test_env_forces_fallback():
    env = dict(os.environ, BOXTOP_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import boxtop; print(boxtop.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def brute(cubes, dim):
    cover = np.zeros(1 << dim, dtype=np.int64)
    for v in range(1 << dim):
        cover[v] = sum(1 for c in cubes if v & c.mask == c.bits)
    return cover


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_kernels_match_brute_force(impl):
    rng = random.Random(11)
    for _ in range(150):
        dim = rng.randint(1, 9)
        S = random_family(rng, dim, rng.randint(0, 12))
        R = random_family(rng, dim, rng.randint(0, 6))
        count = brute(S.cubes, dim)
        assert (kernels.covered_bitmap(S.cubes, dim, impl).astype(bool) == (count > 0)).all()
        zero = np.flatnonzero(count == 0)
        assert kernels.first_uncovered(S.cubes, dim, impl) == (zero[0] if zero.size else -1)
        # any doubly covered point will do; -1 exactly when none exists
        d = kernels.first_double_cover(S.cubes, dim, impl)
        assert (d >= 0 and count[d] > 1) or (d == -1 and (count <= 1).all())
        pair = next(((i, j) for i in range(len(S)) for j in range(i + 1, len(S))
                     if not (S[i].bits ^ S[j].bits) & S[i].mask & S[j].mask), (-1, -1))
        assert kernels.first_compatible_pair(S.cubes, dim, impl) == pair
        unref = next((i for i, r in enumerate(R) if not any(r.extends(s) for s in S)), -1)
        assert kernels.first_unrefined(S.cubes, R.cubes, dim, impl) == unref


def test_backends_agree_on_larger_inputs():
    if len(BACKENDS) < 2:
        pytest.skip("only one backend available")
    rng = random.Random(12)
    a, b = BACKENDS
    for _ in range(30):
        dim = rng.randint(10, 18)
        S = random_family(rng, dim, rng.randint(1, 60))
        for name in ("first_uncovered", "first_double_cover"):
            fn = getattr(kernels, name)
            assert fn(S.cubes, dim, a) == fn(S.cubes, dim, b)
        assert kernels.first_compatible_pair(S.cubes, dim, a) == kernels.first_compatible_pair(S.cubes, dim, b)


def test_wide_dimensions_use_python_paths():
    from boxtop import CubeFamily
    S = CubeFamily.of(["0" + "-" * 69, "-" * 69 + "1"])
    assert kernels.first_compatible_pair(S.cubes, 70) == (0, 1)
    R = CubeFamily.of(["0" + "-" * 68 + "1", "1" + "-" * 69])
    assert kernels.first_unrefined(S.cubes, R.cubes, 70) == 1
