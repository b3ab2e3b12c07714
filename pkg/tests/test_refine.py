import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boxtop import CubeFamily, DimensionTooSmallError, InputError, NotDenseError, parse_cube, parse_point
from boxtop.covers import certify_b_refinement
from boxtop.generators import random_dense_family, random_family
from boxtop.refine import diagonal_witness, disjointify, escape_point, prefix_ladder_refine
from conftest import points_of, union_of


def all_points(dim):
    return {format(v, f"0{dim}b") for v in range(1 << dim)}


def assert_partition(R, target):
    seen = set()
    for c in R:
        pts = points_of(c)
        assert not pts & seen, f"{c} overlaps an earlier cube"
        seen |= pts
    assert seen == target


@pytest.mark.parametrize("pats,order,expected", [
    (["0-", "10", "11"], None, ["0-", "10", "11"]),
    (["---"], None, ["---"]),
    (["--1", "--0"], None, [format(v, "03b") for v in range(8)]),
    (["--1", "--0"], (2, 0, 1), ["--0", "--1"]),
])
def test_ladder_examples(fam, pats, order, expected):
    R = prefix_ladder_refine(fam(*pats), order)
    assert R.patterns == expected
    assert_partition(R, all_points(R.dim))


def test_ladder_rejects_non_dense(fam):
    with pytest.raises(NotDenseError) as err:
        prefix_ladder_refine(fam("0-"))
    assert str(err.value.witness) == "10"


def test_ladder_witness_follows_order(fam):
    # uncovered points are 010 and 110; in order (1, 2, 0) the least is 010 too,
    # in order (0, 1, 2) it is 010; flip to make the order matter
    S = fam("0-0", "1-0", "-01", "011")
    with pytest.raises(NotDenseError) as err:
        prefix_ladder_refine(S)
    assert str(err.value.witness) == "111"


def test_ladder_bad_order(fam):
    with pytest.raises(InputError):
        prefix_ladder_refine(fam("0-", "1-"), (0, 0))


@pytest.mark.parametrize("pats,expected", [
    (["0-", "1-"], ["0-", "1-"]),
    (["---"], ["---"]),
    (["1-", "-1", "00"], ["1-", "01", "00"]),
])
def test_disjointify_examples(fam, pats, expected):
    assert disjointify(fam(*pats)).patterns == expected


def test_disjointify_drops_covered_members(fam):
    assert disjointify(fam("--", "0-", "11")).patterns == ["--"]


def test_disjointify_coalesce(fam):
    assert disjointify(fam("0-", "1-", "--"), coalesce=True).patterns == ["--"]
    assert disjointify(fam("-0", "-1", "1-")).patterns == ["-0", "-1"]
    S = fam("00-", "1-1", "---")
    R = disjointify(S)
    # each member's new part is expanded over the supports seen so far
    assert R.patterns == ["00-", "101", "111", "010", "011", "100", "110"]
    C = disjointify(S, coalesce=True)
    assert C.patterns == ["00-", "1-1", "-10", "011", "100"]
    assert certify_b_refinement(S, C).ok


def test_disjointify_coarse_pieces_past_limit(fam):
    S = fam("00--", "----")
    fine = disjointify(S)
    coarse = disjointify(S, naive_limit=0)
    assert fine.patterns == ["00--", "01--", "10--", "11--"]
    assert coarse.patterns == ["00--", "01--", "1---"]
    for R in (fine, coarse):
        assert certify_b_refinement(S, R).ok


@given(st.integers(0, 10_000), st.integers(1, 9), st.integers(0, 10))
@settings(max_examples=200, deadline=None)
def test_disjointify_partitions_the_union(seed, dim, n):
    rng = random.Random(seed)
    S = random_family(rng, dim, n)
    for coalesce in (False, True):
        R = disjointify(S, coalesce=coalesce)
        assert_partition(R, union_of(S.patterns))
        for r in R:
            assert any(r.extends(s) for s in S)


@given(st.integers(0, 10_000), st.integers(1, 9))
@settings(max_examples=200, deadline=None)
def test_ladder_output_is_prefix_partition(seed, dim):
    rng = random.Random(seed)
    S = random_dense_family(rng, dim, rng.randint(1, 8), min_support=1)
    order = list(range(dim))
    rng.shuffle(order)
    R = prefix_ladder_refine(S, order)
    assert_partition(R, all_points(dim))
    for r in R:
        assert any(r.extends(s) for s in S)
        # the support is an initial segment of the order
        k = r.size
        assert r.support == set(order[:k])


@pytest.mark.parametrize("U,O,expected", [
    ("0---", "0-1-", "0-00"),
    ("01--", "1---", "01--"),
    ("01--", "0---", None),
])
def test_escape_point(U, O, expected):
    e = escape_point(parse_cube(U), parse_cube(O))
    if expected is None:
        assert e is None
    else:
        assert e.value & parse_cube(U).mask == parse_cube(U).bits
        assert str(e) in points_of(parse_cube(U)) - points_of(parse_cube(O))


def test_diagonal_examples():
    x = parse_point("0000")
    O = diagonal_witness(x, [parse_cube("00--"), parse_cube("0-0-")])
    assert O.pattern == "-00-"
    assert "0010" in points_of(parse_cube("00--")) - points_of(O)
    assert "0100" in points_of(parse_cube("0-0-")) - points_of(O)
    assert diagonal_witness(parse_point("00"), []).pattern == "--"
    with pytest.raises(DimensionTooSmallError) as err:
        diagonal_witness(parse_point("11"), [parse_cube("11")])
    assert err.value.index == 0


def test_diagonal_rejects_cube_missing_x():
    with pytest.raises(InputError):
        diagonal_witness(parse_point("00"), [parse_cube("1-")])
    with pytest.raises(InputError):
        diagonal_witness(parse_point("00"), [parse_cube("1--")])


@given(st.integers(0, 10_000))
@settings(max_examples=200, deadline=None)
def test_diagonal_escapes_by_enumeration(seed):
    rng = random.Random(seed)
    dim = rng.randint(1, 8)
    x = rng.getrandbits(dim)
    xs = format(x, f"0{dim}b")
    U_list = []
    for _ in range(rng.randint(0, dim)):
        keep = rng.sample(range(dim), rng.randint(0, dim - 1))
        U_list.append(parse_cube("".join(xs[i] if i in keep else "-" for i in range(dim))))
    try:
        O = diagonal_witness(parse_point(xs), U_list)
    except DimensionTooSmallError:
        return
    assert xs in points_of(O)
    for U in U_list:
        assert points_of(U) - points_of(O)
