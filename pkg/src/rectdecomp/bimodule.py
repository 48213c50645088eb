"""Persistence bimodules over a finite grid {1..nx} x {1..ny}.

A :class:`GridModule` stores one dimension per grid point, a matrix for every
horizontal edge (x, y) -> (x+1, y) and every vertical edge (x, y) -> (x, y+1).
Matrices act on column vectors, so an edge matrix has shape
``(dim target, dim source)``.
"""
from __future__ import annotations

import json
from collections import Counter
from typing import Iterable, Mapping

import numpy as np

from . import field as F
from .shapes import (
    Point,
    ShapeError,
    enumerate_intervals,
    enumerate_rectangles,
    leq,
)


class ModuleFormatError(ValueError):
    """Malformed module document."""


class ValidationError(ValueError):
    """A structural invariant of a grid module fails."""

    def __init__(self, message: str, where=None):
        super().__init__(message)
        self.where = where


class GridModule:
    def __init__(
        self,
        p: int,
        nx: int,
        ny: int,
        dims,
        hmaps: Mapping[Point, np.ndarray] | None = None,
        vmaps: Mapping[Point, np.ndarray] | None = None,
        check: bool = True,
    ):
        F.FieldSpec(int(p))
        if nx < 1 or ny < 1:
            raise ValidationError(f"grid must be at least 1x1, got {nx}x{ny}")
        self.p = int(p)
        self.nx, self.ny = int(nx), int(ny)
        d = np.asarray(dims, dtype=np.int64)
        if d.shape != (self.nx, self.ny):
            raise ValidationError(f"dims array has shape {d.shape}, expected {(self.nx, self.ny)}")
        if (d < 0).any():
            raise ValidationError("negative dimension")
        d.setflags(write=False)
        self.dims = d
        self.hmaps = self._fill(hmaps or {}, horizontal=True)
        self.vmaps = self._fill(vmaps or {}, horizontal=False)
        self._rho: dict = {}
        if check:
            report = validate(self)
            if not report.ok:
                raise ValidationError(report.message, report.where)

    def _fill(self, given: Mapping[Point, np.ndarray], horizontal: bool) -> dict:
        out = {}
        dx, dy = (1, 0) if horizontal else (0, 1)
        kind = "horizontal" if horizontal else "vertical"
        for x in range(1, self.nx + 1 - dx):
            for y in range(1, self.ny + 1 - dy):
                shape = (self.dim((x + dx, y + dy)), self.dim((x, y)))
                m = given.get((x, y))
                if m is None:
                    if shape[0] and shape[1]:
                        raise ValidationError(f"missing {kind} map at {(x, y)}", (x, y))
                    m = F.zeros(*shape)
                m = np.asarray(m, dtype=np.int64)
                if m.size == 0:
                    m = m.reshape(shape) if m.shape != shape and 0 in shape else m
                if m.shape != shape:
                    raise ValidationError(
                        f"{kind} map at {(x, y)} has shape {m.shape}, expected {shape}", (x, y)
                    )
                m = m % self.p
                m.setflags(write=False)
                out[(x, y)] = m
        extra = set(given) - set(out)
        if extra:
            raise ValidationError(f"{kind} maps given for edges outside the grid: {sorted(extra)}")
        return out

    @property
    def shape(self) -> tuple[int, int]:
        return self.nx, self.ny

    def dim(self, t: Point) -> int:
        return int(self.dims[t[0] - 1, t[1] - 1])

    def points(self) -> list[Point]:
        return [(x, y) for y in range(1, self.ny + 1) for x in range(1, self.nx + 1)]

    def total_dim(self) -> int:
        return int(self.dims.sum())

    def is_zero(self) -> bool:
        return self.total_dim() == 0

    def rho(self, s: Point, t: Point) -> np.ndarray:
        """Transition map M_s -> M_t, composed right then up."""
        s, t = tuple(s), tuple(t)
        if not leq(s, t):
            raise ValueError(f"{s} is not below {t}")
        key = (s, t)
        hit = self._rho.get(key)
        if hit is not None:
            return hit
        if s == t:
            out = F.identity(self.dim(s))
        elif t[1] > s[1]:
            below = (t[0], t[1] - 1)
            out = F.matmul(self.vmaps[below], self.rho(s, below), self.p)
        else:
            left = (t[0] - 1, t[1])
            out = F.matmul(self.hmaps[left], self.rho(s, left), self.p)
        out.setflags(write=False)
        self._rho[key] = out
        return out

    def kernel(self, s: Point, t: Point) -> F.Subspace:
        return F.kernel_basis(self.rho(s, t), self.p)

    def image(self, s: Point, t: Point) -> F.Subspace:
        return F.image_basis(self.rho(s, t), self.p)

    def __eq__(self, other):
        if not isinstance(other, GridModule):
            return NotImplemented
        return (
            self.p == other.p
            and self.shape == other.shape
            and np.array_equal(self.dims, other.dims)
            and all(np.array_equal(self.hmaps[e], other.hmaps[e]) for e in self.hmaps)
            and all(np.array_equal(self.vmaps[e], other.vmaps[e]) for e in self.vmaps)
        )

    __hash__ = None

    def __repr__(self):
        return f"GridModule({self.nx}x{self.ny}, p={self.p}, total_dim={self.total_dim()})"

    def dims_by_row(self) -> list[list[int]]:
        return [[self.dim((x, y)) for x in range(1, self.nx + 1)] for y in range(1, self.ny + 1)]


class ValidationReport:
    def __init__(self, ok: bool, message: str = "ok", where=None):
        self.ok, self.message, self.where = ok, message, where

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return f"ValidationReport(ok={self.ok}, message={self.message!r})"


def validate(m: GridModule) -> ValidationReport:
    """Check that every unit square commutes; report the first failure."""
    for y in range(1, m.ny):
        for x in range(1, m.nx):
            right_up = F.matmul(m.vmaps[(x + 1, y)], m.hmaps[(x, y)], m.p)
            up_right = F.matmul(m.hmaps[(x, y + 1)], m.vmaps[(x, y)], m.p)
            if not np.array_equal(right_up, up_right):
                return ValidationReport(False, f"unit square at {(x, y)} does not commute", (x, y))
    return ValidationReport(True)


def zero_module(nx: int, ny: int, p: int = 2) -> GridModule:
    return GridModule(p, nx, ny, np.zeros((nx, ny), dtype=np.int64))


def indicator(nx: int, ny: int, cells: Iterable[Point], p: int = 2) -> GridModule:
    """Indicator module: k on the cells, identities between cells, zero elsewhere."""
    cells = frozenset(tuple(c) for c in cells)
    for x, y in cells:
        if not (1 <= x <= nx and 1 <= y <= ny):
            raise ShapeError(f"cell {(x, y)} outside the {nx}x{ny} grid")
    dims = np.zeros((nx, ny), dtype=np.int64)
    for x, y in cells:
        dims[x - 1, y - 1] = 1
    one = np.ones((1, 1), dtype=np.int64)
    hm = {(x, y): one for (x, y) in cells if (x + 1, y) in cells}
    vm = {(x, y): one for (x, y) in cells if (x, y + 1) in cells}
    return GridModule(p, nx, ny, dims, hm, vm)


def shape_indicator(shape, nx: int, ny: int, p: int = 2) -> GridModule:
    return indicator(nx, ny, shape.cells, p)


def restrict(m: GridModule, cols: list[int], rows: list[int]) -> GridModule:
    cols, rows = list(cols), list(rows)
    if not cols or not rows:
        raise ValueError("restriction needs nonempty index sets")
    if cols != sorted(set(cols)) or rows != sorted(set(rows)):
        raise ValueError("index sets must be strictly increasing")
    if cols[0] < 1 or cols[-1] > m.nx or rows[0] < 1 or rows[-1] > m.ny:
        raise ValueError("index out of range")
    nx, ny = len(cols), len(rows)
    dims = np.array([[m.dim((x, y)) for y in rows] for x in cols], dtype=np.int64)
    hm = {}
    vm = {}
    for i, x in enumerate(cols):
        for j, y in enumerate(rows):
            if i + 1 < nx:
                hm[(i + 1, j + 1)] = m.rho((x, y), (cols[i + 1], y))
            if j + 1 < ny:
                vm[(i + 1, j + 1)] = m.rho((x, y), (x, rows[j + 1]))
    return GridModule(m.p, nx, ny, dims, hm, vm, check=False)


def _block_diag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = F.zeros(a.shape[0] + b.shape[0], a.shape[1] + b.shape[1])
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0] :, a.shape[1] :] = b
    return out


def direct_sum(a: GridModule, b: GridModule) -> GridModule:
    if a.shape != b.shape or a.p != b.p:
        raise ValueError("direct sum needs modules on the same grid and field")
    hm = {e: _block_diag(a.hmaps[e], b.hmaps[e]) for e in a.hmaps}
    vm = {e: _block_diag(a.vmaps[e], b.vmaps[e]) for e in a.vmaps}
    return GridModule(a.p, a.nx, a.ny, a.dims + b.dims, hm, vm, check=False)


def direct_sum_all(mods: list[GridModule], nx: int, ny: int, p: int) -> GridModule:
    out = zero_module(nx, ny, p)
    for m in mods:
        out = direct_sum(out, m)
    return out


def conjugate(m: GridModule, bases: Mapping[Point, np.ndarray]) -> GridModule:
    """Change of basis: maps become B_t . rho . B_s^-1."""
    inv = {}
    for t in m.points():
        b = np.asarray(bases[t], dtype=np.int64) % m.p
        if b.shape != (m.dim(t), m.dim(t)):
            raise ValueError(f"basis at {t} has shape {b.shape}, expected {(m.dim(t),) * 2}")
        try:
            inv[t] = F.inverse(b, m.p)
        except ValueError as exc:
            raise ValueError(f"basis at {t} is singular") from exc
    bases = {t: np.asarray(bases[t], dtype=np.int64) % m.p for t in m.points()}

    def move(mat, s, t):
        return F.matmul(F.matmul(bases[t], mat, m.p), inv[s], m.p)

    hm = {(x, y): move(mat, (x, y), (x + 1, y)) for (x, y), mat in m.hmaps.items()}
    vm = {(x, y): move(mat, (x, y), (x, y + 1)) for (x, y), mat in m.vmaps.items()}
    return GridModule(m.p, m.nx, m.ny, m.dims, hm, vm)


def random_bases(m: GridModule, rng: np.random.Generator) -> dict:
    return {t: F.random_invertible(m.dim(t), m.p, rng) for t in m.points()}


def _random_in_span(basis: np.ndarray, count: int, p: int, rng) -> np.ndarray:
    # count uniform random vectors of the column span, returned as rows
    if basis.shape[1] == 0:
        return F.zeros(count, basis.shape[0])
    coeffs = rng.integers(0, p, size=(basis.shape[1], count))
    return F.matmul(basis, coeffs, p).T.copy()


def random_module(nx: int, ny: int, p: int = 2, max_dim: int = 3, seed: int | None = None,
                  rng: np.random.Generator | None = None) -> GridModule:
    """A random module: the maps of each unit square are drawn uniformly among
    those completing the square, given its bottom and left edges."""
    rng = rng if rng is not None else np.random.default_rng(seed)
    dims = rng.integers(0, max_dim + 1, size=(nx, ny))
    d = lambda x, y: int(dims[x - 1, y - 1])
    hm, vm = {}, {}
    for x in range(1, nx):
        hm[(x, 1)] = rng.integers(0, p, size=(d(x + 1, 1), d(x, 1)))
    for y in range(1, ny):
        vm[(1, y)] = rng.integers(0, p, size=(d(1, y + 1), d(1, y)))
    for y in range(2, ny + 1):
        for x in range(2, nx + 1):
            # choose h: (x-1,y)->(x,y) and v: (x,y-1)->(x,y) with h.vleft = v.hbottom
            vleft = vm[(x - 1, y - 1)]
            hbot = hm[(x - 1, y - 1)]
            a = d(x - 1, y - 1)
            c, b = d(x - 1, y), d(x, y - 1)
            g = np.vstack([vleft, (-hbot) % p]).reshape(c + b, a)
            # each row [h_row | v_row] lies in the left kernel of g
            rows = _random_in_span(F.kernel_matrix(g.T, p), d(x, y), p, rng)
            hm[(x - 1, y)] = rows[:, :c]
            vm[(x, y - 1)] = rows[:, c:]
    return GridModule(p, nx, ny, dims, hm, vm)


def random_rectangle_decomposable(nx: int, ny: int, p: int = 2, count: int = 3, seed: int | None = None,
                                  rng: np.random.Generator | None = None):
    """Conjugated sum of ``count`` random rectangle indicators, with the ground truth."""
    rng = rng if rng is not None else np.random.default_rng(seed)
    pool = enumerate_rectangles(nx, ny)
    picks = [pool[int(i)] for i in rng.integers(0, len(pool), size=count)]
    m = direct_sum_all([shape_indicator(r, nx, ny, p) for r in picks], nx, ny, p)
    return conjugate(m, random_bases(m, rng)), Counter(picks)


def random_interval_decomposable(nx: int, ny: int, p: int = 2, count: int = 3, seed: int | None = None,
                                 rng: np.random.Generator | None = None):
    rng = rng if rng is not None else np.random.default_rng(seed)
    pool = enumerate_intervals(nx, ny)
    picks = [pool[int(i)] for i in rng.integers(0, len(pool), size=count)]
    m = direct_sum_all([shape_indicator(s, nx, ny, p) for s in picks], nx, ny, p)
    return conjugate(m, random_bases(m, rng)), Counter(picks)


# serialization


def to_dict(m: GridModule) -> dict:
    def maps(d):
        out = {}
        for (x, y), mat in sorted(d.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            if mat.size:
                out[f"{x},{y}"] = mat.tolist()
        return out

    return {"p": m.p, "nx": m.nx, "ny": m.ny, "dims": m.dims_by_row(),
            "hmaps": maps(m.hmaps), "vmaps": maps(m.vmaps)}


def save(m: GridModule) -> str:
    return json.dumps(to_dict(m))


def _parse_key(key: str, where: str) -> Point:
    try:
        x, y = key.split(",")
        return int(x), int(y)
    except ValueError as exc:
        raise ModuleFormatError(f"{where}: edge key {key!r} is not of the form 'x,y'") from exc


def _parse_matrix(rows, where: str) -> np.ndarray:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ModuleFormatError(f"{where}: matrix must be a list of rows")
    if rows and len({len(r) for r in rows}) != 1:
        raise ModuleFormatError(f"{where}: matrix rows have different lengths {[len(r) for r in rows]}")
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            if not isinstance(v, int) or isinstance(v, bool):
                raise ModuleFormatError(f"{where}: entry ({i},{j}) is not an integer")
    return np.array(rows, dtype=np.int64).reshape(len(rows), len(rows[0]) if rows else 0)


def from_dict(doc: dict) -> GridModule:
    if not isinstance(doc, dict):
        raise ModuleFormatError("module document must be a JSON object")
    for key in ("p", "nx", "ny", "dims"):
        if key not in doc:
            raise ModuleFormatError(f"missing field {key!r}")
    p, nx, ny = doc["p"], doc["nx"], doc["ny"]
    for name, v in (("p", p), ("nx", nx), ("ny", ny)):
        if not isinstance(v, int) or isinstance(v, bool):
            raise ModuleFormatError(f"field {name!r} must be an integer")
    if not F.is_prime(p) or p >= F.MAX_PRIME:
        raise ValidationError(f"p={p} is not a supported prime")
    rows = doc["dims"]
    if not isinstance(rows, list) or len(rows) != ny:
        raise ModuleFormatError(f"dims must have {ny} rows")
    for j, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != nx:
            raise ModuleFormatError(f"dims row {j + 1} must have {nx} entries")
        if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in row):
            raise ModuleFormatError(f"dims row {j + 1} must hold nonnegative integers")
    dims = np.array(rows, dtype=np.int64).T
    maps = []
    for name in ("hmaps", "vmaps"):
        raw = doc.get(name, {})
        if not isinstance(raw, dict):
            raise ModuleFormatError(f"{name} must be an object")
        parsed = {}
        for key, rows_ in raw.items():
            where = f"{name}[{key}]"
            mat = _parse_matrix(rows_, where)
            if mat.size and ((mat < 0) | (mat >= p)).any():
                raise ModuleFormatError(f"{where}: entries must lie in [0, {p})")
            parsed[_parse_key(key, name)] = mat
        maps.append(parsed)
    return GridModule(p, nx, ny, dims, maps[0], maps[1])


def load(text: str) -> GridModule:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModuleFormatError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return from_dict(doc)
