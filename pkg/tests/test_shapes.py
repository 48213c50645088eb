import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rectdecomp.shapes import (
    Cut,
    IntervalShape,
    RectangleShape,
    ShapeError,
    classify_block,
    enumerate_intervals,
    enumerate_rectangles,
    hooks,
    local_hooks,
    restrict_interval,
    sigma,
)


def _brute_force_intervals(nx, ny):
    # independent check on bitmasks: convex under the product order and connected by comparability
    pts = [(x, y) for x in range(1, nx + 1) for y in range(1, ny + 1)]
    le = lambda a, b: a[0] <= b[0] and a[1] <= b[1]
    count = 0
    for mask in range(1, 1 << len(pts)):
        s = [p for i, p in enumerate(pts) if mask >> i & 1]
        members = set(s)
        convex = all(q in members for a in s for b in s if le(a, b)
                     for q in pts if le(a, q) and le(q, b))
        if not convex:
            continue
        seen, stack = {s[0]}, [s[0]]
        while stack:
            a = stack.pop()
            for b in s:
                if b not in seen and (le(a, b) or le(b, a)):
                    seen.add(b)
                    stack.append(b)
        count += len(seen) == len(s)
    return count


@pytest.mark.parametrize("nx,ny", [(1, 1), (2, 1), (2, 2), (3, 2), (3, 3)])
def test_interval_enumeration_matches_brute_force(nx, ny):
    assert len(enumerate_intervals(nx, ny)) == _brute_force_intervals(nx, ny)


def test_interval_counts_frozen():
    assert [len(enumerate_intervals(n, n)) for n in (2, 3, 4)] == [11, 83, 678]


def test_interval_enumeration_limit():
    with pytest.raises(ShapeError):
        enumerate_intervals(5, 4)


@pytest.mark.parametrize("nx,ny", [(1, 1), (2, 3), (4, 4)])
def test_rectangle_count(nx, ny):
    assert len(enumerate_rectangles(nx, ny)) == nx * (nx + 1) // 2 * ny * (ny + 1) // 2


@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_rectangle_literal_round_trip(nx, ny, data):
    x1 = data.draw(st.integers(1, nx))
    x2 = data.draw(st.integers(x1, nx))
    y1 = data.draw(st.integers(1, ny))
    y2 = data.draw(st.integers(y1, ny))
    r = RectangleShape.from_bounds(x1, x2, y1, y2, nx, ny)
    assert RectangleShape.parse(r.literal(), nx, ny) == r
    assert r.cells == frozenset(itertools.product(range(x1, x2 + 1), range(y1, y2 + 1)))
    assert r.as_interval().as_rectangle(nx, ny) == r


def test_interval_literal_round_trip():
    for s in enumerate_intervals(3, 3):
        assert IntervalShape.parse(s.literal()) == s


@pytest.mark.parametrize("cells", [
    {(1, 1), (2, 2)},            # comparable but missing the points between
    {(1, 2), (2, 1)},            # incomparable points
    set(),
])
def test_bad_intervals_rejected(cells):
    with pytest.raises(ShapeError):
        IntervalShape(frozenset(cells))


def test_sigma_reflexive_and_strict_irreflexive():
    for r in enumerate_rectangles(3, 3):
        assert sigma(r, r) == (True, False)


def test_sigma_frozen():
    big = RectangleShape.from_bounds(1, 2, 1, 1, 3, 1)
    small = RectangleShape.from_bounds(2, 2, 1, 1, 3, 1)
    right = RectangleShape.from_bounds(2, 3, 1, 1, 3, 1)
    assert sigma(big, small) == (True, True)
    assert sigma(small, big) == (False, False)
    assert sigma(right, small) == (False, False)


def test_hooks_of_unit_square():
    bottom, top = local_hooks()
    assert bottom.cells == {(1, 1), (1, 2), (2, 1)}
    assert top.cells == {(1, 2), (2, 1), (2, 2)}
    assert not bottom.is_rectangle() and not top.is_rectangle()
    with pytest.raises(ShapeError):
        hooks((1, 1), (1, 2))


def test_block_classification():
    r = lambda *b: RectangleShape.from_bounds(*b, 3, 3)
    assert classify_block(r(1, 2, 1, 2)) == "birth_quadrant"
    assert classify_block(r(2, 3, 2, 3)) == "death_quadrant"
    assert classify_block(r(1, 3, 2, 2)) == "hband"
    assert classify_block(r(2, 2, 1, 3)) == "vband"
    assert classify_block(r(2, 2, 2, 2)) == "not_block"


def test_cut_order():
    cuts = [Cut(4, k) for k in range(5)]
    for a, b in itertools.product(cuts, repeat=2):
        assert a.lower_contains(b) == (set(b.lower) <= set(a.lower))
    with pytest.raises(ShapeError):
        Cut(3, 4)


def test_restrict_interval_splits_components():
    s = IntervalShape(frozenset({(1, 3), (2, 3), (2, 2), (3, 2), (3, 1)}))
    parts = restrict_interval(s, [1, 3], [1, 3])
    assert sorted(sorted(p.cells) for p in parts) == [[(1, 2)], [(2, 1)]]
