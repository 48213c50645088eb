import pytest
from hypothesis import given
from hypothesis import strategies as st

from rectdecomp.bimodule import indicator, random_rectangle_decomposable, shape_indicator
from rectdecomp.filtration import (
    NotWeaklyExact,
    Skeleton,
    all_filtrates,
    check_skeleton,
    counting_dim,
    double_filtration,
    filt_submodule,
    lift_rectangle,
    linking_condition,
    pointwise_filtration,
    skeleton_module,
    t_skeleton,
)
from rectdecomp.gallery import hook_counterexample
from rectdecomp.shapes import RectangleShape, enumerate_rectangles


def rect(*b, nx=3, ny=3):
    return RectangleShape.from_bounds(*b, nx, ny)


@given(st.integers(0, 10**6), st.sampled_from([2, 5]), st.integers(1, 4), st.integers(1, 3))
def test_counting_dims_equal_multiplicities(seed, p, nx, ny):
    m, truth = random_rectangle_decomposable(nx, ny, p, 5, seed=seed)
    for r in enumerate_rectangles(nx, ny):
        assert counting_dim(m, r) == truth.get(r, 0)


@given(st.integers(0, 10**6))
def test_pointwise_filtration_is_nested(seed):
    m, _ = random_rectangle_decomposable(3, 3, 2, 4, seed=seed)
    for r in enumerate_rectangles(3, 3):
        for t in r.cells:
            assert pointwise_filtration(m, r, t).nested()


def test_filt_submodules_are_submodules():
    m, _ = random_rectangle_decomposable(3, 3, 5, 5, seed=4)
    for r in enumerate_rectangles(3, 3):
        for sign in "+-":
            fam = filt_submodule(m, r, sign)
            assert fam.is_submodule()


def test_counting_requires_weak_exactness():
    with pytest.raises(NotWeaklyExact):
        counting_dim(hook_counterexample(), RectangleShape.from_bounds(1, 1, 1, 1, 3, 2))


def test_linking_condition_example():
    m = indicator(3, 3, [(x, y) for x in (1, 2) for y in (2, 3)])
    r = rect(1, 3, 1, 3)
    assert not linking_condition(m, r)
    assert linking_condition(m, rect(1, 2, 2, 3))


def test_counting_of_v_plus_as_module_overcounts():
    # k_{[1,2]} contributes k_{[2,2]} to V+ of R = [2,2]; only V- removes it
    m = indicator(2, 1, [(1, 1), (2, 1)])
    r = RectangleShape.from_bounds(2, 2, 1, 1, 2, 1)
    assert counting_dim(m, r) == 0
    assert counting_dim(filt_submodule(m, r, "+").as_module(), r) == 1
    double_filtration(m, r, verify=True)


def test_filtrates_frozen():
    m = indicator(2, 1, [(1, 1), (2, 1)])
    fs = all_filtrates(m)
    assert [(f.rect.literal(), f.multiplicity) for f in fs] == [("1..2,1..1", 1)]


def test_skeleton_frozen():
    m, _ = random_rectangle_decomposable(4, 4, 5, 4, seed=11)
    assert t_skeleton(m, (1, 1)).to_dict() == {"point": [1, 1], "cols": [1, 4], "rows": [1]}
    assert t_skeleton(m, (4, 4)).to_dict() == {"point": [4, 4], "cols": [4], "rows": [4]}


def test_skeleton_of_zero_space_is_the_point():
    m = indicator(3, 3, [(1, 1)])
    assert t_skeleton(m, (2, 2)) == Skeleton((2, 2), (2,), (2,))


@given(st.integers(0, 10**6), st.sampled_from([2, 5]))
def test_skeleton_properties(seed, p):
    m, _ = random_rectangle_decomposable(4, 3, p, 5, seed=seed)
    for t in m.points():
        res = check_skeleton(m, t_skeleton(m, t))
        assert res.ok, res.failures


def test_lift_of_skeleton_rectangle():
    # a bar [1,3] on a 3x1 grid seen from t = 2: the skeleton keeps only column 2
    m = shape_indicator(rect(1, 3, 1, 1, ny=1), 3, 1)
    sk = t_skeleton(m, (2, 1))
    assert sk.cols == (2,)
    g = skeleton_module(m, sk)
    r = lift_rectangle(m, sk, RectangleShape.from_bounds(1, 1, 1, 1, g.nx, g.ny))
    assert r == rect(1, 3, 1, 1, ny=1)
