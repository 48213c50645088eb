import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rectdecomp import _kernels as K
from rectdecomp import field as F

PRIMES = [2, 3, 5, 7, 10007]


@st.composite
def matrices(draw, max_rows=6, max_cols=6, primes=PRIMES):
    p = draw(st.sampled_from(primes))
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    seed = draw(st.integers(0, 2**32 - 1))
    return np.random.default_rng(seed).integers(0, p, size=(r, c)), p


@st.composite
def subspace_pairs(draw, primes=PRIMES):
    p = draw(st.sampled_from(primes))
    n = draw(st.integers(0, 6))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    a = rng.integers(0, p, size=(n, int(rng.integers(0, n + 2))))
    b = rng.integers(0, p, size=(n, int(rng.integers(0, n + 2))))
    return F.Subspace.span(a, p), F.Subspace.span(b, p)


def test_rank_frozen():
    # rank over Q is 2, over GF(2) the rows are dependent
    m = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert F.rank(m, 2) == 2
    assert F.rank(m, 3) == 3


def test_inverse_frozen():
    m = np.array([[2, 1], [1, 1]])
    assert np.array_equal(F.inverse(m, 5), np.array([[1, 4], [4, 2]]))


def test_singular_inverse_rejected():
    with pytest.raises(ValueError, match="singular"):
        F.inverse(np.array([[1, 1], [1, 1]]), 2)


def test_non_prime_rejected():
    with pytest.raises(ValueError):
        F.FieldSpec(4)


@given(matrices())
def test_kernels_agree(mp):
    a, p = mp
    r1, p1 = K.rref_numpy(a, p)
    if K.rref_numba is not None:
        r2, p2 = K.rref_numba(a, p)
        assert np.array_equal(r1, r2) and np.array_equal(p1, p2)


@given(matrices())
def test_rank_nullity(mp):
    a, p = mp
    ker = F.kernel_matrix(a, p)
    assert F.rank(a, p) + ker.shape[1] == a.shape[1]
    assert not F.matmul(a, ker, p).any()


@given(subspace_pairs())
def test_modular_dimension_formula(pair):
    a, b = pair
    assert (a + b).dim + (a & b).dim == a.dim + b.dim
    assert (a & b) <= a and a <= (a + b)


@given(subspace_pairs())
def test_canonical_basis_is_unique(pair):
    a, _ = pair
    shuffled = F.Subspace.span(F.matmul(a.basis, F.random_invertible(a.dim, a.p, np.random.default_rng(1)), a.p), a.p)
    assert shuffled == a and np.array_equal(shuffled.basis, a.basis)


@given(matrices(), st.integers(0, 2**32 - 1))
def test_preimage_and_pushforward(mp, seed):
    a, p = mp
    rng = np.random.default_rng(seed)
    s = F.Subspace.span(rng.integers(0, p, size=(a.shape[0], 2)), p)
    pre = F.preimage(a, s)
    assert F.pushforward(a, pre) <= s
    assert F.kernel_basis(a, p) <= pre


@given(subspace_pairs())
def test_complement_within(pair):
    a, b = pair
    inner, outer = a & b, a
    w = F.complement_within(inner, outer, outer)
    assert w.dim == outer.dim - inner.dim
    assert (w & inner).dim == 0 and (w + inner) == outer


def test_complement_constraint_too_small():
    p = 2
    outer = F.Subspace.full(2, p)
    inner = F.Subspace.zero(2, p)
    constraint = F.Subspace.span(np.array([[1], [0]]), p)
    with pytest.raises(F.ComplementError):
        F.complement_within(inner, outer, constraint)


def test_large_prime_products_are_exact():
    p = 2**31 - 1
    a = np.full((3, 3), p - 1, dtype=np.int64)
    # (p-1)^2 * 3 overflows int64 accumulators; the result must still be exact
    want = (3 * (p - 1) ** 2) % p
    assert F.matmul(a, a, p)[0, 0] == want


def test_backend_flag_selects_numpy():
    code = "from rectdecomp import _kernels as K; print(K.backend())"
    env = dict(os.environ, RECTDECOMP_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
