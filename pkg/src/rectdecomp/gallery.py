"""Two families of modules that are locally well behaved but globally not:

* ``psi(m)``: an indecomposable module on the (m+1) x (m+1) grid whose
  restrictions to strict subgrids all split into intervals;
* ``hook_counterexample``: an indecomposable module whose restriction to every
  square splits into rectangles and top hooks.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from . import field as F
from .bimodule import GridModule, restrict
from .decomposer import (
    NotWeaklyExact,
    decompose_rectangles,
    end_dim,
    interval_decompose,
    nondegenerate_pairs,
    square_restriction,
    square_weak_witness,
)
from .shapes import IntervalShape, Point, hooks, is_nondegenerate, leq, local_hooks, square_corners


def _unit(m: int, i: int) -> np.ndarray:
    v = F.zeros(m, 1)
    v[i - 1, 0] = 1
    return v


def psi(m: int, p: int = 2) -> GridModule:
    """The module built from the k -> k^m arrows iota_1..iota_m and delta_m."""
    if m < 2:
        raise ValueError("psi needs m >= 2")
    n = m + 1
    dims = np.zeros((n, n), dtype=np.int64)
    # row y = m + 2 - i: k at x = i, k^m to its right
    for i in range(1, m + 1):
        y = m + 2 - i
        dims[i - 1, y - 1] = 1
        for x in range(i + 1, n + 1):
            dims[x - 1, y - 1] = m
    dims[n - 1, 0] = 1
    ident = F.identity(m)
    hm, vm = {}, {}
    for i in range(1, m + 1):
        y = m + 2 - i
        hm[(i, y)] = _unit(m, i)
        if y < n:
            vm[(i, y)] = _unit(m, i)
        for x in range(i + 1, n):
            hm[(x, y)] = ident
        if y < n:
            for x in range(i + 1, n + 1):
                vm[(x, y)] = ident
    vm[(n, 1)] = np.ones((m, 1), dtype=np.int64)
    return GridModule(p, n, n, dims, hm, vm)


@dataclass(frozen=True)
class PsiSpec:
    m: int
    nx: int
    ny: int
    xs: tuple  # strictly increasing column indices, one per psi column
    ys: tuple

    def __post_init__(self):
        for name, idx, size in (("xs", self.xs, self.nx), ("ys", self.ys, self.ny)):
            if len(idx) != self.m + 1:
                raise ValueError(f"{name} must have {self.m + 1} entries")
            if list(idx) != sorted(set(idx)) or idx[0] < 1 or idx[-1] > size:
                raise ValueError(f"{name} must be strictly increasing inside 1..{size}")


def psi_embedded(spec: PsiSpec, p: int = 2) -> GridModule:
    """psi(m) pushed into a larger grid: M_t = psi at the largest index below t, else 0."""
    base = psi(spec.m, p)

    def floor(idx, v):
        return sum(1 for u in idx if u <= v)

    def at(t):
        a, b = floor(spec.xs, t[0]), floor(spec.ys, t[1])
        return (a, b) if a and b else None

    dims = np.zeros((spec.nx, spec.ny), dtype=np.int64)
    for x in range(1, spec.nx + 1):
        for y in range(1, spec.ny + 1):
            u = at((x, y))
            dims[x - 1, y - 1] = base.dim(u) if u else 0

    def edge(s, t):
        us, ut = at(s), at(t)
        if us is None or ut is None:
            return None
        return base.rho(us, ut)

    hm = {}
    vm = {}
    for x in range(1, spec.nx + 1):
        for y in range(1, spec.ny + 1):
            if x < spec.nx:
                e = edge((x, y), (x + 1, y))
                if e is not None:
                    hm[(x, y)] = e
            if y < spec.ny:
                e = edge((x, y), (x, y + 1))
                if e is not None:
                    vm[(x, y)] = e
    return GridModule(p, spec.nx, spec.ny, dims, hm, vm)


# hook counterexample

# the five-point poset P: 0 = (x1,y1), 1 = (x1,y2), 2 = (x2,y1), 3 = (x2,y2), 4 = (x3,y2)
P_DIMS = (0, 1, 1, 2, 1)
P_ORDER = {(i, i) for i in range(5)} | {(0, 1), (0, 2), (0, 3), (0, 4), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)}


def p_map(i: int, j: int) -> np.ndarray:
    """Map of the small module from region i to region j (i <= j in P)."""
    if (i, j) not in P_ORDER:
        raise ValueError(f"{i} is not below {j} in P")
    if i == j:
        return F.identity(P_DIMS[i])
    table = {
        (1, 3): [[1], [1]],
        (2, 3): [[1], [0]],
        (3, 4): [[1, 0]],
        (1, 4): [[1]],
        (2, 4): [[1]],
    }
    if (i, j) in table:
        return np.array(table[(i, j)], dtype=np.int64)
    return F.zeros(P_DIMS[j], P_DIMS[i])


@dataclass(frozen=True)
class HookSpec:
    """Columns x1 < x2 < x3 and rows y1 < y2 of the grid G on an nx x ny grid.

    The interval S is {x >= x2 or y >= ys} inside the hull of G; ``ys``
    defaults to y2 and may be lowered so that the x1 column meets S more than
    once.  ``transpose`` swaps the axes; ``dual`` takes the linear dual and
    reflects the grid, turning top hooks into bottom hooks.
    """

    x: tuple = (1, 2, 3)
    y: tuple = (1, 2)
    nx: int = 3
    ny: int = 2
    ys: Optional[int] = None
    transpose: bool = False
    dual: bool = False

    def __post_init__(self):
        x1, x2, x3 = self.x
        y1, y2 = self.y
        if not (1 <= x1 < x2 < x3 <= self.nx and 1 <= y1 < y2 <= self.ny):
            raise ValueError(f"hook indices {self.x}, {self.y} invalid on a {self.nx}x{self.ny} grid")
        if not y1 < self.s_row <= y2:
            raise ValueError(f"ys must satisfy y1 < ys <= y2, got {self.s_row}")

    @property
    def s_row(self) -> int:
        return self.y[1] if self.ys is None else self.ys

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx) if self.transpose else (self.nx, self.ny)

    def in_hull(self, t: Point) -> bool:
        return self.x[0] <= t[0] <= self.x[2] and self.y[0] <= t[1] <= self.y[1]

    def in_s(self, t: Point) -> bool:
        return self.in_hull(t) and (t[0] >= self.x[1] or t[1] >= self.s_row)

    def region(self, t: Point) -> Optional[int]:
        """Index i of the part P_i containing t, in the untransformed grid."""
        if not self.in_hull(t):
            return None
        x1, _, x3 = self.x
        y1 = self.y[0]
        if t[0] == x1:
            return 1 if self.in_s(t) else 0
        if t[0] == x3:
            return 4
        if t[1] > y1 and self.in_s(t):
            return 3
        return 2

    def s_interval(self) -> IntervalShape:
        cells = [(x, y) for x in range(self.x[0], self.x[2] + 1)
                 for y in range(self.y[0], self.y[1] + 1) if self.in_s((x, y))]
        return IntervalShape(frozenset(cells))

    def to_grid(self, t: Point) -> Point:
        """Untransformed point -> point of the emitted module."""
        x, y = t
        if self.dual:
            x, y = self.nx + 1 - x, self.ny + 1 - y
        return (y, x) if self.transpose else (x, y)

    def from_grid(self, t: Point) -> Point:
        x, y = (t[1], t[0]) if self.transpose else t
        if self.dual:
            x, y = self.nx + 1 - x, self.ny + 1 - y
        return x, y


def _hook_base(spec: HookSpec, p: int) -> GridModule:
    nx, ny = spec.nx, spec.ny
    dims = np.zeros((nx, ny), dtype=np.int64)
    for x in range(1, nx + 1):
        for y in range(1, ny + 1):
            r = spec.region((x, y))
            dims[x - 1, y - 1] = P_DIMS[r] if r is not None else 0
    hm, vm = {}, {}
    for x in range(1, nx + 1):
        for y in range(1, ny + 1):
            s = spec.region((x, y))
            if s is None:
                continue
            for (dx, dy), maps in (((1, 0), hm), ((0, 1), vm)):
                r = spec.region((x + dx, y + dy))
                if r is not None:
                    maps[(x, y)] = p_map(s, r)
    return GridModule(p, nx, ny, dims, hm, vm)


def transpose_module(m: GridModule) -> GridModule:
    hm = {(y, x): mat for (x, y), mat in m.vmaps.items()}
    vm = {(y, x): mat for (x, y), mat in m.hmaps.items()}
    return GridModule(m.p, m.ny, m.nx, m.dims.T.copy(), hm, vm)


def dual_module(m: GridModule) -> GridModule:
    """Linear dual composed with the point reflection of the grid."""
    nx, ny = m.nx, m.ny
    dims = m.dims[::-1, ::-1].copy()
    hm = {(x, y): m.hmaps[(nx - x, ny + 1 - y)].T.copy() for x in range(1, nx) for y in range(1, ny + 1)}
    vm = {(x, y): m.vmaps[(nx + 1 - x, ny - y)].T.copy() for x in range(1, nx + 1) for y in range(1, ny)}
    return GridModule(m.p, nx, ny, dims, hm, vm)


def hook_counterexample(spec: HookSpec | None = None, p: int = 2) -> GridModule:
    spec = spec or HookSpec()
    m = _hook_base(spec, p)
    if spec.dual:
        m = dual_module(m)
    if spec.transpose:
        m = transpose_module(m)
    return m


# the square diagrams of the case analysis, keyed by the regions of (s, c, b, t)
# with c = (t_x, s_y) and b = (s_x, t_y); value: does a top hook summand appear
HOOK_SQUARE_CASES = {
    (0, 2, 1, 3): False,
    (0, 3, 1, 3): True,
    (0, 4, 1, 4): True,
    (1, 3, 1, 3): False,
    (1, 4, 1, 4): False,
    (2, 2, 2, 2): False,
    (2, 2, 2, 3): False,
    (2, 3, 2, 3): False,
    (2, 2, 3, 3): False,
    (2, 3, 3, 3): True,
    (2, 4, 2, 4): False,
    (2, 4, 3, 4): False,
    (3, 3, 3, 3): False,
    (3, 4, 3, 4): False,
}

# comparability of the parts: "" none, "<=" comparable only along a line, "sq" a square exists
PART_TABLE = [
    ["<=", "<=", "sq", "sq", "sq"],
    ["", "<=", "", "sq", "sq"],
    ["", "", "sq", "sq", "sq"],
    ["", "", "", "sq", "sq"],
    ["", "", "", "", "<="],
]


def square_case(spec: HookSpec, s: Point, t: Point) -> Optional[tuple]:
    _, c, b, _ = square_corners(s, t)
    regions = tuple(spec.region(u) for u in (s, c, b, t))
    return None if None in regions else regions


def expected_square(regions: tuple) -> Optional[bool]:
    """Top-hook flag for a region pattern; squares whose s and b both lie in P_0 only
    see zeros on the left edge and split into rectangles."""
    if regions[0] == 0 and regions[2] == 0:
        return False
    return HOOK_SQUARE_CASES.get(regions)


@dataclass
class SuiteReport:
    name: str
    checks: list = dc_field(default_factory=list)  # (label, ok, detail)
    meta: dict = dc_field(default_factory=dict)

    def add(self, label: str, ok: bool, detail: str = ""):
        self.checks.append((label, bool(ok), detail))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failures(self) -> list:
        return [(label, detail) for label, ok, detail in self.checks if not ok]

    def to_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok,
                "checks": [{"check": l, "ok": o, "detail": d} for l, o, d in self.checks]}


def product_subgrids(nx: int, ny: int, max_cols: int, max_rows: int):
    for a in range(1, max_cols + 1):
        for cols in itertools.combinations(range(1, nx + 1), a):
            for b in range(1, max_rows + 1):
                for rows in itertools.combinations(range(1, ny + 1), b):
                    yield list(cols), list(rows)


def verify_local_intervals(m: GridModule, size: int, report: SuiteReport, label: str):
    bad = []
    count = 0
    for cols, rows in product_subgrids(m.nx, m.ny, size, size):
        if len(cols) == m.nx and len(rows) == m.ny:
            continue
        count += 1
        if interval_decompose(restrict(m, cols, rows)) is None:
            bad.append((cols, rows))
    report.add(f"{label}: {count} subgrids of size <= {size}x{size} split into intervals",
               not bad, f"failing subgrids {bad[:3]}" if bad else "")


def verify_psi(m: int, p: int = 2) -> SuiteReport:
    rep = SuiteReport(f"psi({m})")
    mod = psi(m, p)
    e = end_dim(mod)
    rep.add("end_dim = 1", e == 1, f"end_dim = {e}")
    rep.add("not interval-decomposable", interval_decompose(mod) is None)
    rep.add("not weakly exact", not decompose_ok(mod))
    verify_local_intervals(mod, m, rep, "restrictions")
    return rep


def verify_psi_embedded(spec: PsiSpec, p: int = 2) -> SuiteReport:
    rep = SuiteReport(f"psi({spec.m}) in {spec.nx}x{spec.ny} via {spec.xs},{spec.ys}")
    mod = psi_embedded(spec, p)
    e = end_dim(mod)
    rep.add("end_dim = 1", e == 1, f"end_dim = {e}")
    rep.add("not interval-decomposable", interval_decompose(mod) is None)
    verify_local_intervals(mod, spec.m, rep, "restrictions")
    return rep


def decompose_ok(m: GridModule) -> bool:
    try:
        decompose_rectangles(m)
        return True
    except NotWeaklyExact:
        return False


def verify_hook(spec: HookSpec | None = None, p: int = 2) -> SuiteReport:
    spec = spec or HookSpec()
    rep = SuiteReport(f"hook {spec}")
    mod = hook_counterexample(spec, p)
    e = end_dim(mod)
    rep.add("end_dim = 1", e == 1, f"end_dim = {e}")
    try:
        decompose_rectangles(mod)
        rep.add("rectangle decomposition refused", False, "decomposition unexpectedly succeeded")
    except NotWeaklyExact as exc:
        w = exc.witness
        again = square_weak_witness(mod, w.s, w.t)
        rep.add("rectangle decomposition refused with a genuine witness", again is not None, str(w))
    s_shape = spec.s_interval()
    q0 = (spec.x[0], spec.y[0]), (spec.x[2], spec.y[1])
    top = hooks(*q0)[1]
    rep.add("S meets the outer square in its top hook",
            frozenset(c for c in s_shape.cells if c in {*square_corners(*q0)}) == top)

    allowed_hook = local_hooks()[0 if spec.dual else 1]
    hook_squares = []
    bad = []
    for s, t in nondegenerate_pairs(mod.nx, mod.ny):
        dec = interval_decompose(square_restriction(mod, s, t))
        if dec is None:
            bad.append((s, t, "no interval decomposition"))
            continue
        shapes = list(dec.summands)
        non_rect = [sh for sh in shapes if not sh.is_rectangle()]
        if any(sh != allowed_hook for sh in non_rect):
            bad.append((s, t, dec.multiset()))
        if non_rect:
            hook_squares.append((s, t))
        # compare against the case table, in the untransformed coordinates
        s0, t0 = spec.from_grid(s), spec.from_grid(t)
        lo = (min(s0[0], t0[0]), min(s0[1], t0[1]))
        hi = (max(s0[0], t0[0]), max(s0[1], t0[1]))
        regions = square_case(spec, lo, hi)
        if regions is None:
            if non_rect:
                bad.append((s, t, "hook on a square leaving the hull"))
            continue
        want = expected_square(regions)
        if want is None:
            bad.append((s, t, f"region pattern {regions} missing from the case table"))
        elif want != bool(non_rect):
            bad.append((s, t, f"pattern {regions}: hook expected {want}, found {bool(non_rect)}"))
        dims = tuple(P_DIMS[r] for r in regions)
        got = tuple(mod.dim(spec.to_grid(u)) for u in square_corners(lo, hi))
        if dims != got:
            bad.append((s, t, f"dims {got} differ from the diagram {dims}"))
    rep.add("every square splits into rectangles and allowed hooks, matching the case table",
            not bad, str(bad[:3]) if bad else "")
    rep.add("some square exhibits a hook", bool(hook_squares), f"{len(hook_squares)} squares")
    rep.meta = {"hook_squares": hook_squares}
    return rep


def part_table_check(spec: HookSpec, exact: bool) -> tuple[bool, list]:
    """Compare the comparability of the parts with PART_TABLE.

    With ``exact`` every "sq" cell must be realized by a nondegenerate square;
    otherwise only the absence claims are enforced.
    """
    pts = [(x, y) for x in range(spec.x[0], spec.x[2] + 1) for y in range(spec.y[0], spec.y[1] + 1)]
    rel = [[set() for _ in range(5)] for _ in range(5)]
    problems = []
    for s in pts:
        for t in pts:
            if not leq(s, t):
                continue
            i, j = spec.region(s), spec.region(t)
            if (i, j) not in P_ORDER:
                problems.append(f"{s} <= {t} but P{i} is not below P{j}")
            rel[i][j].add("sq" if is_nondegenerate(s, t) else "<=")
    for i in range(5):
        for j in range(5):
            want, got = PART_TABLE[i][j], rel[i][j]
            if want == "" and got:
                problems.append(f"P{i} -> P{j}: expected no relation, found {sorted(got)}")
            if want == "<=" and "sq" in got:
                problems.append(f"P{i} -> P{j}: unexpected nondegenerate square")
            if exact and want == "sq" and "sq" not in got:
                problems.append(f"P{i} -> P{j}: no nondegenerate square realized")
            if exact and want == "<=" and not got:
                problems.append(f"P{i} -> P{j}: no relation realized")
    return not problems, problems


def case_coverage(spec: HookSpec) -> set:
    seen = set()
    for s, t in nondegenerate_pairs(spec.nx, spec.ny):
        r = square_case(spec, s, t)
        if r is not None:
            seen.add(r)
    return seen


def big_hook_spec(**kw) -> HookSpec:
    """A hook instance large enough to realize every square pattern of the case table."""
    return HookSpec(x=(2, 5, 7), y=(1, 5), nx=7, ny=6, ys=4, **kw)
