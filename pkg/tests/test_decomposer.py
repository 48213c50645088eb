from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rectdecomp import field as F
from rectdecomp.bimodule import (
    direct_sum,
    indicator,
    random_interval_decomposable,
    random_module,
    random_rectangle_decomposable,
    shape_indicator,
)
from rectdecomp.decomposer import (
    CertificationError,
    NotWeaklyExact,
    compose,
    decompose_rectangles,
    end_dim,
    hom_space,
    interval_decompose,
    is_natural,
    is_summand,
    local_condition_check,
    rectangle_sum,
    split_by_idempotent,
    strong_exact,
    weak_exact,
)
from rectdecomp.gallery import hook_counterexample
from rectdecomp.shapes import RectangleShape, enumerate_rectangles


def _hom_oracle(r, s):
    # k_R -> k_S is nonzero iff on each axis S starts no later and ends inside R
    return int(s.x1 <= r.x1 <= s.x2 <= r.x2 and s.y1 <= r.y1 <= s.y2 <= r.y2)


def test_hom_between_rectangles_matches_oracle():
    rects = enumerate_rectangles(3, 2)
    for r in rects:
        for s in rects:
            got = hom_space(shape_indicator(r, 3, 2), shape_indicator(s, 3, 2)).dim
            assert got == _hom_oracle(r, s), (r, s)


@given(st.integers(0, 10**6))
def test_hom_elements_are_natural(seed):
    a = random_module(2, 2, 3, 2, seed=seed)
    b = random_module(2, 2, 3, 2, seed=seed + 1)
    for phi in hom_space(a, b).elements:
        assert is_natural(phi, a, b)


@given(st.integers(0, 10**6), st.sampled_from([2, 5]))
def test_end_dim_of_rectangle_sums(seed, p):
    m, truth = random_rectangle_decomposable(3, 2, p, 3, seed=seed)
    # End of a sum is the sum of Homs between summands
    rects = list(truth.elements())
    want = sum(_hom_oracle(r, s) for r in rects for s in rects)
    assert end_dim(m) == want


def test_weak_exactness_of_indicators():
    assert weak_exact(shape_indicator(RectangleShape.from_bounds(1, 2, 2, 3, 3, 3), 3, 3)).verdict
    rep = weak_exact(hook_counterexample())
    assert not rep.verdict
    assert (rep.witness.s, rep.witness.t, rep.witness.condition) == ((1, 1), (3, 2), "image")


def test_strong_exactness_frozen():
    inner = shape_indicator(RectangleShape.from_bounds(2, 2, 2, 2, 3, 3), 3, 3)
    assert weak_exact(inner).verdict
    rep = strong_exact(inner)
    assert not rep.verdict and rep.witness.condition == "middle"
    band = shape_indicator(RectangleShape.from_bounds(1, 3, 2, 2, 3, 3), 3, 3)
    assert strong_exact(band).verdict


@given(st.integers(0, 10**6), st.sampled_from([2, 5]), st.integers(1, 4), st.integers(1, 4))
def test_certified_round_trip(seed, p, nx, ny):
    m, truth = random_rectangle_decomposable(nx, ny, p, 4, seed=seed)
    dec = decompose_rectangles(m, certify=True)
    assert dec.certified and dec.summands == truth
    assert sum(f.multiplicity for f in dec.filtrates) == sum(truth.values())


def test_decompose_refuses_hook():
    with pytest.raises(NotWeaklyExact) as exc:
        decompose_rectangles(hook_counterexample())
    assert exc.value.witness.condition == "image"
    with pytest.raises(CertificationError):
        decompose_rectangles(hook_counterexample(), check=False)


def test_rectangle_sum_reassembles():
    m, truth = random_rectangle_decomposable(3, 3, 5, 4, seed=8)
    dec = decompose_rectangles(m)
    assert rectangle_sum(dec, 3, 3, 5).dims_by_row() == m.dims_by_row()


@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_interval_peeling_recovers_ground_truth(seed, p):
    m, truth = random_interval_decomposable(3, 2, p, 3, seed=seed)
    dec = interval_decompose(m)
    assert dec is not None and dec.summands == truth


def test_summand_and_idempotent_split():
    r = RectangleShape.from_bounds(1, 2, 1, 1, 2, 2)
    m = direct_sum(shape_indicator(r, 2, 2, 3), indicator(2, 2, [(2, 1), (2, 2)], 3))
    f, g = is_summand(m, r.as_interval())
    gf = compose(g, f, 3)
    assert all(np.array_equal(gf[t], F.identity(1)) for t in r.cells)
    a, b = split_by_idempotent(m, compose(f, g, 3))
    assert a.dims_by_row() == [[1, 1], [0, 0]]
    assert b.dims_by_row() == [[0, 1], [0, 1]]
    assert is_summand(m, RectangleShape.from_bounds(1, 2, 1, 2, 2, 2).as_interval()) is None


@given(st.integers(0, 10**6))
def test_local_check_agrees_with_weak_exactness(seed):
    m = random_module(3, 3, 2, 2, seed=seed)
    assert local_condition_check(m, "rectangles").verdict == weak_exact(m).verdict


def test_local_classes_on_hook():
    m = hook_counterexample()
    assert not local_condition_check(m, "rectangles").verdict
    assert local_condition_check(m, "rectangles_plus_top_hooks").verdict
    assert not local_condition_check(m, "rectangles_plus_bottom_hooks").verdict
    assert local_condition_check(m, "intervals").verdict
    with pytest.raises(ValueError):
        local_condition_check(m, "blocks")


def test_decomposition_json():
    m = shape_indicator(RectangleShape.from_bounds(1, 2, 1, 1, 2, 1), 2, 1)
    doc = decompose_rectangles(m, certify=True).to_dict()
    assert doc["summands"] == [{"shape": "1..2,1..1", "multiplicity": 1}]
    assert doc["certified"] and doc["iso"] == {"1,1": [[1]], "2,1": [[1]]}
    assert Counter() == decompose_rectangles(indicator(2, 1, [])).summands
