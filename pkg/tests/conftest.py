import pytest

from boxtop.cube import CubeFamily, parse_cube


@pytest.fixture
def fam():
    def make(*patterns, dim=None, budget=None):
        return CubeFamily.of(patterns, dim=dim, support_budget=budget)
    return make


def points_of(cube):
    """Brute-force point set of a cube as bit strings."""
    n = cube.dim
    out = set()
    for v in range(1 << n):
        p = format(v, f"0{n}b")
        if all(c == "-" or c == b for c, b in zip(cube.pattern, p)):
            out.add(p)
    return out


def union_of(patterns):
    out = set()
    for p in patterns:
        out |= points_of(parse_cube(p))
    return out
