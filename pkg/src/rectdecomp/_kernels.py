"""Row reduction over GF(p).

Two implementations of the same kernel live here: a numba-compiled loop and a
vectorised numpy version.  The compiled one is used unless numba is missing or
``RECTDECOMP_DISABLE_NUMBA`` is set to a truthy value in the environment.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def _env_disabled() -> bool:
    return os.environ.get("RECTDECOMP_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


USE_NUMBA = HAVE_NUMBA and not _env_disabled()


def rref_numpy(a: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Reduced row echelon form of ``a`` mod ``p``; returns (R, pivot columns)."""
    a = np.array(a, dtype=np.int64) % p
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        if col.any():
            a -= np.outer(col, a[r])
            a %= p
        pivots.append(c)
        r += 1
    return a, np.asarray(pivots, dtype=np.int64)


def _inv_mod(a, p):
    # extended Euclid; a is nonzero mod p
    t, new_t = 0, 1
    r, new_r = p, a
    while new_r != 0:
        q = r // new_r
        t, new_t = new_t, t - q * new_t
        r, new_r = new_r, r - q * new_r
    if t < 0:
        t += p
    return t


if HAVE_NUMBA:
    _inv_mod_jit = njit(cache=True)(_inv_mod)

    @njit(cache=True)
    def _rref_jit(a, p):
        rows, cols = a.shape
        pivots = np.empty(min(rows, cols), dtype=np.int64)
        for i in range(rows):
            for j in range(cols):
                a[i, j] %= p
        r = 0
        for c in range(cols):
            if r == rows:
                break
            i = r
            while i < rows and a[i, c] == 0:
                i += 1
            if i == rows:
                continue
            if i != r:
                for j in range(cols):
                    tmp = a[r, j]
                    a[r, j] = a[i, j]
                    a[i, j] = tmp
            inv = _inv_mod_jit(a[r, c], p)
            for j in range(c, cols):
                a[r, j] = (a[r, j] * inv) % p
            for k in range(rows):
                f = a[k, c]
                if k != r and f != 0:
                    for j in range(c, cols):
                        a[k, j] = (a[k, j] - f * a[r, j]) % p
            pivots[r] = c
            r += 1
        return a, pivots[:r]

    def rref_numba(a: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
        work = np.array(a, dtype=np.int64, order="C")
        if work.size == 0:
            return work % p, np.empty(0, dtype=np.int64)
        return _rref_jit(work, np.int64(p))
else:  # pragma: no cover
    rref_numba = None


def rref(a: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    if USE_NUMBA:
        return rref_numba(a, p)
    return rref_numpy(a, p)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
