import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boxtop import CubeFamily, InputError, ResourceError, parse_point
from boxtop.covers import is_antichain, is_dense
from boxtop.refine import prefix_ladder_refine
from boxtop.singular import (
    SingularParams,
    random_singular_params,
    regular_prefix_cover,
    singular_cover_cube,
    singular_disjoint_cover,
    size_lower_bound,
    verify_singular_cover,
)
from conftest import points_of

WORKED = SingularParams.from_mapping(2, (2, 4), 6, {"00": 0, "01": 0, "10": 1, "11": 1})


def test_auto_partition_matches_worked_mapping():
    assert SingularParams.auto(2, (2, 4), 6) == WORKED


def test_cover_cube_case_table():
    assert singular_cover_cube(WORKED, parse_point("000000")).pattern == "000000"
    assert singular_cover_cube(WORKED, parse_point("100000")).pattern == "10--00"
    with pytest.raises(InputError):
        singular_cover_cube(WORKED, parse_point("00000"))


def test_worked_instance_has_forty_cubes():
    F = singular_disjoint_cover(WORKED)
    assert len(F) == 40
    sizes = sorted(len(points_of(c)) for c in F)
    assert sizes == [1] * 32 + [4] * 8
    assert is_dense(F)[0] and is_antichain(F)[0]
    rep = verify_singular_cover(WORKED)
    assert rep.ok and rep.size == 40 and rep.size_lower_bound == 4


def test_single_step_gives_singletons():
    P = SingularParams.auto(2, (2,), 4)
    F = singular_disjoint_cover(P)
    assert len(F) == 16 and all(c.size == 4 for c in F)


def test_small_instance_certifies():
    P = SingularParams.from_mapping(1, (1, 2), 4, {"0": 0, "1": 1})
    assert verify_singular_cover(P).ok


def brute_cover(P):
    N = P.total_dim
    return {singular_cover_cube(P, parse_point(format(v, f"0{N}b"))) for v in range(1 << N)}


@given(st.integers(0, 10_000))
@settings(max_examples=80, deadline=None)
def test_generated_family_equals_per_point_cubes(seed):
    P = random_singular_params(random.Random(seed), 8)
    F = singular_disjoint_cover(P)
    assert len(set(F.cubes)) == len(F)
    assert set(F.cubes) == brute_cover(P)
    hits = [sum(v & c.mask == c.bits for c in F) for v in range(1 << P.total_dim)]
    assert set(hits) == {1}
    assert len(F) >= size_lower_bound(P)


def test_same_class_same_segments_same_cube():
    P = WORKED
    f = parse_point("101100")
    g = parse_point("100100")  # differs only on the free segment [2, 4)
    assert singular_cover_cube(P, f) == singular_cover_cube(P, g)


def test_verify_detects_broken_family():
    F = singular_disjoint_cover(WORKED)
    broken = CubeFamily(6, F.cubes[1:])
    rep = verify_singular_cover(WORKED, broken)
    assert not rep.covers_ok and not rep.self_membership_ok
    dup = CubeFamily(6, F.cubes + F.cubes[:1])
    assert not verify_singular_cover(WORKED, dup).disjoint_ok


@pytest.mark.parametrize("kwargs", [
    dict(theta=0, ladder=(1,), total_dim=2, partition=(0,)),
    dict(theta=2, ladder=(1, 2), total_dim=4, partition=(0, 0, 0, 0)),
    dict(theta=1, ladder=(2, 2), total_dim=4, partition=(0, 0)),
    dict(theta=1, ladder=(), total_dim=4, partition=(0, 0)),
    dict(theta=1, ladder=(2, 5), total_dim=4, partition=(0, 1)),
    dict(theta=1, ladder=(2,), total_dim=4, partition=(0,)),
    dict(theta=1, ladder=(2,), total_dim=4, partition=(0, 1)),
])
def test_params_validation(kwargs):
    with pytest.raises(InputError):
        SingularParams(**kwargs)


def test_mapping_validation():
    with pytest.raises(InputError, match="no entry"):
        SingularParams.from_mapping(1, (1,), 2, {"0": 0})
    with pytest.raises(InputError, match="not 1-bit"):
        SingularParams.from_mapping(1, (1,), 2, {"0": 0, "1": 0, "11": 0})


def test_enumeration_limit(monkeypatch):
    monkeypatch.setenv("BOXTOP_ENUM_LIMIT", "5")
    with pytest.raises(ResourceError):
        verify_singular_cover(WORKED)


@pytest.mark.parametrize("theta,N,expected", [
    (1, 2, ["0-", "1-"]),
    (2, 2, ["00", "01", "10", "11"]),
    (2, 5, ["00---", "01---", "10---", "11---"]),
])
def test_regular_prefix_cover(theta, N, expected):
    F = regular_prefix_cover(theta, N)
    assert F.patterns == expected
    assert prefix_ladder_refine(F).patterns == expected
    assert is_dense(F)[0] and is_antichain(F)[0]


def test_regular_prefix_cover_ranges():
    with pytest.raises(InputError):
        regular_prefix_cover(3, 2)
    with pytest.raises(InputError):
        regular_prefix_cover(0, 2)
