"""Exact linear algebra over a prime field GF(p).

Matrices are plain ``numpy`` int64 arrays with entries in ``[0, p)``.  A
:class:`Subspace` stores a basis in reduced column echelon form, which is
unique for each subspace, so equality of subspaces is equality of arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ._kernels import rref

MAX_PRIME = 2**31


class DimensionError(ValueError):
    """Operands live in spaces of different dimension."""


class ComplementError(ValueError):
    """The requested complement does not exist inside the constraint space."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The prime field GF(p)."""

    p: int = 2

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not is_prime(int(self.p)):
            raise ValueError(f"field characteristic must be prime, got {self.p!r}")
        if self.p >= MAX_PRIME:
            raise ValueError(f"p must be below {MAX_PRIME}")


def as_matrix(entries, p: int, shape: tuple[int, int] | None = None) -> np.ndarray:
    a = np.asarray(entries, dtype=np.int64)
    if shape is not None:
        a = a.reshape(shape)
    if a.ndim != 2:
        raise ValueError("matrix must be two-dimensional")
    return a % p


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot compose {a.shape} with {b.shape}")
    if a.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1])
    if (p - 1) ** 2 * a.shape[1] < 2**63:
        return (a @ b) % p
    # large primes would overflow the int64 accumulator
    out = (a.astype(object) @ b.astype(object)) % p
    return out.astype(np.int64)


def rank(m: np.ndarray, p: int) -> int:
    if m.size == 0:
        return 0
    return int(rref(m, p)[1].size)


def inverse(m: np.ndarray, p: int) -> np.ndarray:
    n = m.shape[0]
    if m.shape != (n, n):
        raise DimensionError("only square matrices are invertible")
    if n == 0:
        return zeros(0, 0)
    r, piv = rref(np.hstack([m % p, identity(n)]), p)
    if piv.size < n or piv[n - 1] != n - 1:
        raise ValueError("matrix is singular")
    return r[:, n:].copy()


class Subspace:
    """A subspace of GF(p)^n held by its reduced column echelon basis."""

    __slots__ = ("basis", "p", "pivots", "_key")

    def __init__(self, basis: np.ndarray, p: int, pivots: np.ndarray):
        # trusted constructor; use Subspace.span for arbitrary generators
        basis.setflags(write=False)
        self.basis = basis
        self.p = p
        self.pivots = pivots
        self._key = None

    @classmethod
    def span(cls, generators: np.ndarray, p: int) -> "Subspace":
        """Span of the columns of ``generators`` (an n x k matrix)."""
        g = np.asarray(generators, dtype=np.int64)
        n = g.shape[0]
        if g.shape[1] == 0 or n == 0:
            return cls.zero(n, p)
        r, piv = rref(g.T, p)
        k = piv.size
        return cls(np.ascontiguousarray(r[:k].T), p, piv)

    @classmethod
    def zero(cls, n: int, p: int) -> "Subspace":
        return cls(zeros(n, 0), p, np.empty(0, dtype=np.int64))

    @classmethod
    def full(cls, n: int, p: int) -> "Subspace":
        return cls(identity(n), p, np.arange(n, dtype=np.int64))

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def key(self):
        if self._key is None:
            self._key = (self.ambient_dim, self.dim, self.basis.tobytes())
        return self._key

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.p == other.p and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, p={self.p})"

    def coordinates(self, vectors: np.ndarray) -> np.ndarray:
        """Coordinates of vectors already known to lie in the subspace."""
        return vectors[self.pivots, :] % self.p

    def __add__(self, other: "Subspace") -> "Subspace":
        return sum_(self, other)

    def __and__(self, other: "Subspace") -> "Subspace":
        return intersection(self, other)

    def __le__(self, other: "Subspace") -> bool:
        return contains(other, self)

    def __ge__(self, other: "Subspace") -> bool:
        return contains(self, other)


def _check_same(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim:
        raise DimensionError(f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")
    if a.p != b.p:
        raise DimensionError("subspaces over different fields")


def kernel_matrix(m: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning the null space of ``m`` (not canonicalised)."""
    rows, cols = m.shape
    if cols == 0:
        return zeros(0, 0)
    if rows == 0:
        return identity(cols)
    r, piv = rref(m, p)
    free = [c for c in range(cols) if c not in set(piv.tolist())]
    out = zeros(cols, len(free))
    for j, f in enumerate(free):
        out[f, j] = 1
        for i, c in enumerate(piv):
            out[c, j] = (-r[i, f]) % p
    return out


def kernel_basis(m: np.ndarray, p: int) -> Subspace:
    return Subspace.span(kernel_matrix(m, p), p)


def image_basis(m: np.ndarray, p: int) -> Subspace:
    return Subspace.span(m, p)


def sum_(a: Subspace, b: Subspace) -> Subspace:
    _check_same(a, b)
    if a.is_zero() or b.is_full():
        return b
    if b.is_zero() or a.is_full():
        return a
    return Subspace.span(np.hstack([a.basis, b.basis]), a.p)


def sum_all(spaces: Iterable[Subspace], n: int, p: int) -> Subspace:
    gens = [s.basis for s in spaces if s.dim]
    if not gens:
        return Subspace.zero(n, p)
    return Subspace.span(np.hstack(gens), p)


def intersection(a: Subspace, b: Subspace) -> Subspace:
    _check_same(a, b)
    if a.is_zero() or b.is_full():
        return a
    if b.is_zero() or a.is_full():
        return b
    # a x = b y  <=>  [A | -B] (x, y) = 0
    k = kernel_matrix(np.hstack([a.basis, (-b.basis) % a.p]), a.p)
    if k.shape[1] == 0:
        return Subspace.zero(a.ambient_dim, a.p)
    return Subspace.span(matmul(a.basis, k[: a.dim], a.p), a.p)


def contains(a: Subspace, b: Subspace) -> bool:
    """True iff ``b`` is a subspace of ``a``."""
    _check_same(a, b)
    if b.dim > a.dim:
        return False
    if b.is_zero() or a.is_full():
        return True
    # vectors in a are determined by their pivot coordinates
    return bool(np.array_equal(matmul(a.basis, a.coordinates(b.basis), a.p), b.basis))


def preimage(m: np.ndarray, s: Subspace) -> Subspace:
    p = s.p
    if m.shape[0] != s.ambient_dim:
        raise DimensionError(f"map has {m.shape[0]} rows but subspace lives in dim {s.ambient_dim}")
    cols = m.shape[1]
    if s.is_full():
        return Subspace.full(cols, p)
    if s.is_zero():
        return kernel_basis(m, p)
    k = kernel_matrix(np.hstack([m % p, (-s.basis) % p]), p)
    return Subspace.span(k[:cols], p)


def pushforward(m: np.ndarray, s: Subspace) -> Subspace:
    if m.shape[1] != s.ambient_dim:
        raise DimensionError(f"map has {m.shape[1]} columns but subspace lives in dim {s.ambient_dim}")
    if s.is_zero():
        return Subspace.zero(m.shape[0], s.p)
    return Subspace.span(matmul(m, s.basis, s.p), s.p)


def complement_within(inner: Subspace, outer: Subspace, constraint: Subspace) -> Subspace:
    """A complement of ``inner`` in ``outer`` chosen inside ``constraint``.

    Greedy: the echelon generators of ``outer & constraint`` are taken in
    pivot order and kept whenever they enlarge the running span.
    """
    _check_same(inner, outer)
    _check_same(inner, constraint)
    if not contains(outer, inner):
        raise ComplementError("inner subspace is not contained in outer subspace")
    candidates = intersection(outer, constraint)
    p = inner.p
    running = inner
    chosen = []
    for j in range(candidates.dim):
        v = candidates.basis[:, j : j + 1]
        grown = sum_(running, Subspace.span(v, p))
        if grown.dim > running.dim:
            chosen.append(v)
            running = grown
    if running.dim != outer.dim:
        raise ComplementError(
            f"inner + (outer & constraint) has dim {running.dim}, outer has dim {outer.dim}"
        )
    if not chosen:
        return Subspace.zero(inner.ambient_dim, p)
    return Subspace.span(np.hstack(chosen), p)


def direct_sum_subspace(a: Subspace, b: Subspace) -> Subspace:
    """``a (+) b`` inside the block space of dimension a.ambient + b.ambient."""
    p = a.p
    na, nb = a.ambient_dim, b.ambient_dim
    g = zeros(na + nb, a.dim + b.dim)
    g[:na, : a.dim] = a.basis
    g[na:, a.dim :] = b.basis
    return Subspace.span(g, p)


def random_invertible(n: int, p: int, rng: np.random.Generator, steps: int | None = None) -> np.ndarray:
    """Product of random elementary matrices; invertible by construction."""
    m = identity(n)
    if n == 0:
        return m
    if steps is None:
        steps = 3 * n + 2
    for _ in range(steps):
        kind = rng.integers(3)
        i = int(rng.integers(n))
        if kind == 0 and n > 1:
            j = int(rng.integers(n - 1))
            j = j + 1 if j >= i else j
            c = int(rng.integers(1, p)) if p > 1 else 1
            m[i] = (m[i] + c * m[j]) % p
        elif kind == 1 and p > 2:
            m[i] = (m[i] * int(rng.integers(1, p))) % p
        elif n > 1:
            j = int(rng.integers(n))
            m[[i, j]] = m[[j, i]]
    return m
