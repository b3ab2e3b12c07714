import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boxtop import CoverError, InputError
from boxtop.generators import random_tail_cover
from boxtop.tailbox import (
    TOP,
    IntervalBox,
    RudinTrace,
    Singleton as S,
    Tail as T,
    TailBoxCover,
    box_contains,
    family_rank,
    full_box,
    rudin_refine,
    split_box,
    verify_box_refinement,
)


def box(*factors):
    return IntervalBox(tuple(factors))


def points(coords):
    return list(itertools.product(*(list(range(m)) + [TOP] for m in coords)))


def point_set(U, coords):
    axes = []
    for f, m in zip(U.factors, coords):
        axes.append([f.v] if isinstance(f, S) else list(range(f.a, m)) + [TOP])
    return set(itertools.product(*axes))


def test_box_contains():
    U = box(T(1), S(0))
    assert box_contains(U, (TOP, 0))
    assert not box_contains(U, (0, 0))
    assert box_contains(box(T(0)), (TOP,))
    with pytest.raises(InputError):
        box_contains(U, (0,))


def test_box_relations_match_point_sets():
    coords = (3,)
    factors = [S(v) for v in range(3)] + [T(a) for a in range(3)]
    for f, g in itertools.product(factors, repeat=2):
        A, B = point_set(box(f), coords), point_set(box(g), coords)
        assert box(f).subset_of(box(g)) == (A <= B)
        assert box(f).disjoint_from(box(g)) == (not A & B)


def test_profile_checks():
    with pytest.raises(InputError):
        TailBoxCover((2,), (box(S(2)),))
    with pytest.raises(InputError):
        TailBoxCover((2, 2), (box(S(0)),))
    with pytest.raises(InputError):
        TailBoxCover((0,), ())
    with pytest.raises(InputError):
        IntervalBox(("x",))


ONE = TailBoxCover((2,), (box(T(1)), box(S(0)), box(S(1))))


def test_split_one_coordinate():
    assert split_box(full_box((2,)), ONE) == [box(T(1)), box(S(0))]


def test_split_keeps_fitting_box():
    assert split_box(box(S(0)), ONE) == [box(S(0))]


def test_split_two_coordinates():
    O = TailBoxCover((2, 2), (box(T(1), T(1)),) + tuple(box(S(a), S(b)) for a in range(2) for b in range(2)))
    pieces = split_box(full_box((2, 2)), O)
    assert pieces == [box(T(1), T(1)), box(S(0), T(1)), box(T(1), S(0)), box(S(0), S(0))]
    sets = [point_set(p, (2, 2)) for p in pieces]
    assert sum(map(len, sets)) == 9 and set().union(*sets) == set(points((2, 2)))


def test_split_not_a_cover():
    with pytest.raises(CoverError, match="not a cover"):
        split_box(full_box((2,)), TailBoxCover((2,), (box(S(0)),)))


@given(st.integers(0, 10_000))
@settings(max_examples=150, deadline=None)
def test_split_partitions_the_box(seed):
    rng = random.Random(seed)
    coords = [rng.randint(1, 5) for _ in range(rng.randint(1, 4))]
    O = random_tail_cover(rng, coords, rng.randint(0, 5))
    U = full_box(coords)
    # descend a few random levels to test non-full boxes too
    for _ in range(rng.randint(0, 2)):
        U = rng.choice(split_box(U, O))
    pieces = split_box(U, O)
    sets = [point_set(p, coords) for p in pieces]
    assert sum(map(len, sets)) == len(point_set(U, coords))
    assert set().union(*sets) == point_set(U, coords)
    if len(pieces) > 1:
        G = next(G for G in O.boxes if G.contains(U.top_corner()))
        assert pieces[0].subset_of(G)


def test_rudin_examples():
    assert rudin_refine(ONE) == [box(S(0)), box(T(1))]
    trace = RudinTrace(0, [])
    assert rudin_refine(TailBoxCover((3,), (box(T(0)), box(S(1)))), trace) == [box(T(0))]
    assert trace.iterations == 0
    O = TailBoxCover((3, 3), (box(T(2), T(2)),) + tuple(box(S(v), T(0)) for v in range(3))
                     + tuple(box(T(0), S(v)) for v in range(3)))
    trace = RudinTrace(0, [])
    R = rudin_refine(O, trace, check_stages=True)
    assert trace.iterations <= 3
    cert = verify_box_refinement(O, R)
    assert cert.ok
    counted = [sum(U.contains(p) for U in R) for p in points((3, 3))]
    assert len(counted) == 16 and set(counted) == {1}


def test_rudin_rank_strictly_drops():
    rng = random.Random(9)
    for _ in range(100):
        coords = [rng.randint(1, 5) for _ in range(rng.randint(1, 4))]
        O = random_tail_cover(rng, coords, rng.randint(0, 6))
        trace = RudinTrace(0, [])
        R = rudin_refine(O, trace)
        assert all(b < a for a, b in zip(trace.ranks, trace.ranks[1:]))
        assert trace.ranks[-1] == family_rank(R, coords)


def test_rudin_propagates_cover_error():
    with pytest.raises(CoverError):
        rudin_refine(TailBoxCover((2,), (box(T(1)),)))


def test_verify_reports_failures():
    R = rudin_refine(ONE)
    missing = verify_box_refinement(ONE, R[1:])
    assert not missing.covers_ok and missing.witnesses["covers"] == [0]
    dup = verify_box_refinement(ONE, R + R[:1])
    assert not dup.disjoint_ok and dup.witnesses["disjoint"] == [[{"t": "S", "v": 0}]] * 2
    coarse = verify_box_refinement(TailBoxCover((2,), (box(S(0)), box(T(1)))), [box(T(0))])
    assert not coarse.refines_ok and coarse.covers_ok


def test_json_round_trip():
    O = random_tail_cover(random.Random(1), [2, 3], 4)
    text = O.to_json()
    assert TailBoxCover.from_json(text).to_json() == text
    assert json.loads(text)["coords"] == [2, 3]
    for bad in ("{", '{"coords": [2]}', '{"coords": [2], "boxes": [[{"t": "X"}]]}',
                '{"coords": [2], "boxes": [[{"t": "S"}]]}', '{"coords": [2], "boxes": [5]}'):
        with pytest.raises(InputError):
            TailBoxCover.from_json(bad)
