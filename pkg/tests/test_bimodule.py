import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rectdecomp import field as F
from rectdecomp.bimodule import (
    GridModule,
    ModuleFormatError,
    ValidationError,
    conjugate,
    direct_sum,
    from_dict,
    indicator,
    load,
    random_bases,
    random_module,
    random_rectangle_decomposable,
    restrict,
    save,
    validate,
)
from rectdecomp.decomposer import is_isomorphism


@given(st.integers(1, 4), st.integers(1, 4), st.sampled_from([2, 3, 5]), st.integers(0, 10**6))
def test_random_modules_commute_and_round_trip(nx, ny, p, seed):
    m = random_module(nx, ny, p, 3, seed=seed)
    assert validate(m).ok
    assert load(save(m)) == m


@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 10**6))
def test_rho_is_functorial(nx, ny, seed):
    m = random_module(nx, ny, 5, 2, seed=seed)
    for s in m.points():
        for t in m.points():
            if s[0] <= t[0] and s[1] <= t[1]:
                for u in m.points():
                    if t[0] <= u[0] and t[1] <= u[1]:
                        assert np.array_equal(m.rho(s, u), F.matmul(m.rho(t, u), m.rho(s, t), 5))


def test_json_format_frozen():
    m = indicator(2, 1, [(1, 1), (2, 1)])
    assert json.loads(save(m)) == {"p": 2, "nx": 2, "ny": 1, "dims": [[1, 1]],
                                    "hmaps": {"1,1": [[1]]}, "vmaps": {}}


def test_non_commuting_square_rejected():
    doc = {"p": 2, "nx": 2, "ny": 2, "dims": [[1, 1], [1, 1]],
           "hmaps": {"1,1": [[1]], "1,2": [[1]]}, "vmaps": {"1,1": [[1]], "2,1": [[0]]}}
    with pytest.raises(ValidationError) as exc:
        from_dict(doc)
    assert "(1, 1)" in str(exc.value)


@pytest.mark.parametrize("doc,err", [
    ({"p": 4, "nx": 1, "ny": 1, "dims": [[1]]}, ValidationError),
    ({"p": 2, "nx": 1, "ny": 1}, ModuleFormatError),
    ({"p": 2, "nx": 2, "ny": 1, "dims": [[1]]}, ModuleFormatError),
    ({"p": 2, "nx": 2, "ny": 1, "dims": [[1, 1]], "hmaps": {"1,1": [[2]]}}, ModuleFormatError),
    ({"p": 2, "nx": 2, "ny": 1, "dims": [[1, 1]], "hmaps": {"1,1": [[1, 0]]}}, ValidationError),
    ({"p": 2, "nx": 2, "ny": 1, "dims": [[1, 1]], "hmaps": {"a": [[1]]}}, ModuleFormatError),
])
def test_malformed_documents(doc, err):
    with pytest.raises(err):
        from_dict(doc)


def test_invalid_json_text():
    with pytest.raises(ModuleFormatError, match="line 1"):
        load("{not json")


def test_conjugate_is_isomorphic(rng):
    m, _ = random_rectangle_decomposable(3, 3, 5, 4, seed=3)
    bases = random_bases(m, rng)
    c = conjugate(m, bases)
    assert is_isomorphism(bases, m, c)


def test_direct_sum_and_restrict():
    a = indicator(3, 2, [(1, 1), (2, 1)])
    b = indicator(3, 2, [(2, 1), (2, 2), (3, 1), (3, 2)])
    s = direct_sum(a, b)
    assert s.dims_by_row() == [[1, 2, 1], [0, 1, 1]]
    r = restrict(s, [1, 3], [1, 2])
    assert r.dims_by_row() == [[1, 1], [0, 1]]
    assert F.rank(r.hmaps[(1, 1)], 2) == 0


def test_dims_shape_checked():
    with pytest.raises(ValidationError):
        GridModule(2, 2, 2, np.ones((2, 3), dtype=int))
