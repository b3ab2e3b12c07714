import json

import pytest

from boxtop import (
    Cube,
    CubeFamily,
    InputError,
    Point,
    ResourceError,
    complement_cubes,
    contains_point,
    cube_cardinality,
    cube_points,
    is_compatible,
    meet,
    parse_cube,
    parse_point,
    support,
)
from conftest import points_of


def test_parse_reads_assignment():
    c = parse_cube("0-1")
    assert c.dim == 3
    assert c.assignment == {0: 0, 2: 1}
    assert parse_cube("---").assignment == {}


@pytest.mark.parametrize("bad", ["0-1x", "", "01 ", 5, None])
def test_parse_rejects_garbage(bad):
    with pytest.raises(InputError):
        parse_cube(bad)


@pytest.mark.parametrize("text,expected", [("0-1", {0, 2}), ("---", set()), ("11", {0, 1})])
def test_support(text, expected):
    assert support(parse_cube(text)) == expected


@pytest.mark.parametrize("a,b,expected", [("0-", "-1", True), ("0-", "1-", False), ("01-", "0-1", True)])
def test_compatible_matches_point_sets(a, b, expected):
    s, t = parse_cube(a), parse_cube(b)
    assert is_compatible(s, t) is expected
    assert bool(points_of(s) & points_of(t)) is expected


@pytest.mark.parametrize("a,b,expected", [("0-", "-1", "01"), ("0-", "1-", None), ("0--", "--1", "0-1")])
def test_meet(a, b, expected):
    m = meet(parse_cube(a), parse_cube(b))
    if expected is None:
        assert m is None
    else:
        assert m.pattern == expected
        assert points_of(m) == points_of(parse_cube(a)) & points_of(parse_cube(b))


def test_contains_point():
    assert contains_point(parse_cube("0-1"), parse_point("001"))
    assert not contains_point(parse_cube("0-1"), parse_point("100"))
    for v in range(8):
        assert contains_point(parse_cube("---"), Point(3, v))
    with pytest.raises(InputError):
        contains_point(parse_cube("0-"), parse_point("001"))


@pytest.mark.parametrize("text,expected", [("0-", {"00", "01"}), ("11", {"11"}),
                                           ("-0-", {"000", "001", "100", "101"})])
def test_cube_points(text, expected):
    pts = cube_points(parse_cube(text))
    assert {str(p) for p in pts} == expected == points_of(parse_cube(text))
    assert pts == sorted(pts)


def test_cube_points_respects_limit():
    with pytest.raises(ResourceError):
        cube_points(parse_cube("-" * 30))
    with pytest.raises(ResourceError):
        cube_points(parse_cube("----"), limit=3)


@pytest.mark.parametrize("text,expected", [("1-", ["0-"]), ("---", []), ("1-0-", ["0---", "1-1-"])])
def test_complement(text, expected):
    s = parse_cube(text)
    comp = complement_cubes(s)
    assert comp.patterns == expected
    everything = {format(v, f"0{s.dim}b") for v in range(1 << s.dim)}
    covered = [points_of(c) for c in comp]
    assert set().union(*covered) == everything - points_of(s)
    assert sum(len(c) for c in covered) == len(everything - points_of(s))


@pytest.mark.parametrize("text,expected", [("0-1", 2), ("---", 8), ("11", 1)])
def test_cardinality(text, expected):
    assert cube_cardinality(parse_cube(text)) == expected == len(points_of(parse_cube(text)))


def test_extends_is_reverse_inclusion():
    big, small = parse_cube("0--"), parse_cube("0-1")
    assert small.extends(big) and not big.extends(small)


def test_cube_validation():
    with pytest.raises(InputError):
        Cube(0, 0, 0)
    with pytest.raises(InputError):
        Cube(2, 0b100, 0)
    with pytest.raises(InputError):
        Cube(2, 0b10, 0b01)
    assert Cube.from_assignment(3, {0: 1, 2: 0}).pattern == "1-0"
    with pytest.raises(InputError):
        Cube.from_assignment(2, {0: 2})
    assert Cube.from_point(parse_point("101")).pattern == "101"


def test_point_basics():
    p = parse_point("0110")
    assert p.bits == (0, 1, 1, 0) and p[1] == 1 and str(p) == "0110"
    with pytest.raises(InputError):
        parse_point("01-")
    with pytest.raises(InputError):
        Point(2, 4)


def test_family_budget_and_dims(fam):
    with pytest.raises(InputError):
        fam("0-", "011")
    with pytest.raises(InputError):
        fam("01", budget=1)
    assert fam("0-", budget=1).max_support == 1
    with pytest.raises(InputError):
        CubeFamily.of([])


def test_text_format_round_trip(fam):
    text = "# comment\n0-1\n\n1--  # trailing\n"
    f = CubeFamily.from_text(text)
    assert f.patterns == ["0-1", "1--"]
    assert CubeFamily.from_text(f.to_text()).to_text() == f.to_text()
    assert len(CubeFamily.from_text("", dim=3)) == 0
    with pytest.raises(InputError):
        CubeFamily.from_text("")
    with pytest.raises(InputError, match="line 2"):
        CubeFamily.from_text("01\n0x\n")


def test_json_format_round_trip(fam):
    f = fam("0-1", "1--", budget=2)
    text = f.to_json()
    assert json.loads(text) == {"lambda": 3, "cubes": ["0-1", "1--"], "support_budget": 2}
    assert CubeFamily.from_json(text).to_json() == text
    empty = CubeFamily(4)
    assert CubeFamily.from_json(empty.to_json()).dim == 4
    for bad in ['{"cubes": []}', '{"lambda": "3", "cubes": []}', "[", '{"lambda": 2, "cubes": "01"}']:
        with pytest.raises(InputError):
            CubeFamily.from_json(bad)


def test_canonical_sorts_patterns(fam):
    assert fam("1-", "0-", "-1").canonical().patterns == ["-1", "0-", "1-"]
