"""Supports on a finite grid: cuts, rectangles, intervals, hooks and blocks.

Points are ``(x, y)`` tuples with 1-based coordinates.  This module is pure
combinatorics; module constructors that need a shape (indicator modules)
live in :mod:`rectdecomp.bimodule`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

Point = tuple[int, int]

INTERVAL_ENUM_LIMIT = 16


class ShapeError(ValueError):
    pass


def leq(s: Point, t: Point) -> bool:
    return s[0] <= t[0] and s[1] <= t[1]


def comparable(s: Point, t: Point) -> bool:
    return leq(s, t) or leq(t, s)


@dataclass(frozen=True, order=True)
class Cut:
    """Threshold cut of the axis {1..n}: lower part {1..k}, upper part {k+1..n}."""

    n: int
    k: int

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ShapeError(f"cut threshold {self.k} outside 0..{self.n}")

    @property
    def lower(self) -> range:
        return range(1, self.k + 1)

    @property
    def upper(self) -> range:
        return range(self.k + 1, self.n + 1)

    def lower_contains(self, other: "Cut") -> bool:
        """True iff other.lower is a subset of self.lower."""
        return other.k <= self.k


@dataclass(frozen=True, order=True)
class RectangleShape:
    """Rectangle [x1, x2] x [y1, y2] held as its four cuts."""

    lcut: Cut
    rcut: Cut
    bcut: Cut
    tcut: Cut

    def __post_init__(self):
        if self.lcut.n != self.rcut.n or self.bcut.n != self.tcut.n:
            raise ShapeError("cuts of one axis must share the axis size")
        if not (self.lcut.k < self.rcut.k and self.bcut.k < self.tcut.k):
            raise ShapeError("rectangle is empty")

    @classmethod
    def from_bounds(cls, x1: int, x2: int, y1: int, y2: int, nx: int, ny: int) -> "RectangleShape":
        if not (1 <= x1 <= x2 <= nx and 1 <= y1 <= y2 <= ny):
            raise ShapeError(f"bounds {x1}..{x2},{y1}..{y2} invalid on a {nx}x{ny} grid")
        return cls(Cut(nx, x1 - 1), Cut(nx, x2), Cut(ny, y1 - 1), Cut(ny, y2))

    @classmethod
    def parse(cls, text: str, nx: int, ny: int) -> "RectangleShape":
        try:
            xs, ys = text.strip().split(",")
            x1, x2 = (int(v) for v in xs.split(".."))
            y1, y2 = (int(v) for v in ys.split(".."))
        except ValueError as exc:
            raise ShapeError(f"bad rectangle literal {text!r}, expected 'x1..x2,y1..y2'") from exc
        return cls.from_bounds(x1, x2, y1, y2, nx, ny)

    @property
    def x1(self) -> int:
        return self.lcut.k + 1

    @property
    def x2(self) -> int:
        return self.rcut.k

    @property
    def y1(self) -> int:
        return self.bcut.k + 1

    @property
    def y2(self) -> int:
        return self.tcut.k

    @property
    def grid(self) -> tuple[int, int]:
        return self.lcut.n, self.bcut.n

    @property
    def corner(self) -> Point:
        """The minimal point of the rectangle."""
        return self.x1, self.y1

    @property
    def bounds(self) -> tuple[int, int, int, int]:
        return self.x1, self.x2, self.y1, self.y2

    def __contains__(self, t) -> bool:
        return self.x1 <= t[0] <= self.x2 and self.y1 <= t[1] <= self.y2

    def in_upset(self, t: Point) -> bool:
        return t[0] >= self.x1 and t[1] >= self.y1

    @cached_property
    def cells(self) -> frozenset:
        return frozenset(itertools.product(range(self.x1, self.x2 + 1), range(self.y1, self.y2 + 1)))

    def literal(self) -> str:
        return f"{self.x1}..{self.x2},{self.y1}..{self.y2}"

    def as_interval(self) -> "IntervalShape":
        return IntervalShape(self.cells)

    def __repr__(self):
        return f"Rect[{self.literal()}]"


def sigma(r1: RectangleShape, r2: RectangleShape) -> tuple[bool, bool]:
    """Evaluate r1 sigma r2; returns (holds, strict)."""
    if r1.grid != r2.grid:
        raise ShapeError("rectangles live on different grids")
    left = r1.lcut.k <= r2.lcut.k
    bottom = r1.bcut.k <= r2.bcut.k
    top_right = (
        r1.rcut.k < r2.rcut.k
        or r1.tcut.k < r2.tcut.k
        or (r1.rcut.k <= r2.rcut.k and r1.tcut.k <= r2.tcut.k)
    )
    holds = left and bottom and top_right
    return holds, holds and r1 != r2


def enumerate_rectangles(nx: int, ny: int) -> list[RectangleShape]:
    out = []
    for y1 in range(1, ny + 1):
        for y2 in range(y1, ny + 1):
            for x1 in range(1, nx + 1):
                for x2 in range(x1, nx + 1):
                    out.append(RectangleShape.from_bounds(x1, x2, y1, y2, nx, ny))
    return out


def is_convex(cells: frozenset) -> bool:
    """Every grid point between two members is a member."""
    pts = list(cells)
    for s in pts:
        for t in pts:
            if leq(s, t):
                for x in range(s[0], t[0] + 1):
                    for y in range(s[1], t[1] + 1):
                        if (x, y) not in cells:
                            return False
    return True


def is_connected(cells: frozenset) -> bool:
    """Connected for the comparability relation."""
    if not cells:
        return False
    pts = list(cells)
    seen = {pts[0]}
    stack = [pts[0]]
    while stack:
        s = stack.pop()
        for t in pts:
            if t not in seen and comparable(s, t):
                seen.add(t)
                stack.append(t)
    return len(seen) == len(pts)


def components(cells: Iterable[Point]) -> list[frozenset]:
    remaining = set(cells)
    out = []
    while remaining:
        start = min(remaining)
        comp = {start}
        stack = [start]
        remaining.discard(start)
        while stack:
            s = stack.pop()
            for t in [u for u in remaining if comparable(s, u)]:
                remaining.discard(t)
                comp.add(t)
                stack.append(t)
        out.append(frozenset(comp))
    return sorted(out, key=lambda c: sorted(c))


@dataclass(frozen=True)
class IntervalShape:
    """A convex, connected, nonempty set of grid points."""

    cells: frozenset

    def __post_init__(self):
        cells = frozenset((int(x), int(y)) for x, y in self.cells)
        object.__setattr__(self, "cells", cells)
        if not cells:
            raise ShapeError("interval must be nonempty")
        if not is_convex(cells):
            raise ShapeError("cell set is not convex")
        if not is_connected(cells):
            raise ShapeError("cell set is not connected")

    def __contains__(self, t) -> bool:
        return tuple(t) in self.cells

    def __len__(self):
        return len(self.cells)

    def columns(self) -> dict[int, tuple[int, int]]:
        cols: dict[int, list[int]] = {}
        for x, y in self.cells:
            cols.setdefault(x, []).append(y)
        return {x: (min(ys), max(ys)) for x, ys in sorted(cols.items())}

    def literal(self) -> str:
        return ";".join(f"{x}:{lo}..{hi}" for x, (lo, hi) in self.columns().items())

    @classmethod
    def parse(cls, text: str) -> "IntervalShape":
        cells = set()
        try:
            for part in text.strip().split(";"):
                x, rng = part.split(":")
                lo, hi = (int(v) for v in rng.split(".."))
                cells.update((int(x), y) for y in range(lo, hi + 1))
        except ValueError as exc:
            raise ShapeError(f"bad interval literal {text!r}, expected 'x:y1..y2;...'") from exc
        return cls(frozenset(cells))

    def as_rectangle(self, nx: int, ny: int) -> RectangleShape | None:
        xs = [c[0] for c in self.cells]
        ys = [c[1] for c in self.cells]
        r = RectangleShape.from_bounds(min(xs), max(xs), min(ys), max(ys), nx, ny)
        return r if r.cells == self.cells else None

    def is_rectangle(self) -> bool:
        xs = [c[0] for c in self.cells]
        ys = [c[1] for c in self.cells]
        return (max(xs) - min(xs) + 1) * (max(ys) - min(ys) + 1) == len(self.cells)

    def sort_key(self):
        return (-len(self.cells), sorted(self.cells))

    def __repr__(self):
        return f"Interval[{self.literal()}]"


def _staircases(nx: int, ny: int) -> Iterator[dict[int, tuple[int, int]]]:
    # intervals are runs of consecutive columns, each a row range [lo, hi];
    # moving right, lo and hi never increase and consecutive ranges overlap
    ranges = [(lo, hi) for lo in range(1, ny + 1) for hi in range(lo, ny + 1)]

    def extend(profile, x):
        yield dict(profile)
        if x > nx:
            return
        plo, phi = profile[x - 1]
        for lo, hi in ranges:
            if lo <= plo and hi <= phi and hi >= plo:
                profile[x] = (lo, hi)
                yield from extend(profile, x + 1)
                del profile[x]

    for x0 in range(1, nx + 1):
        for r in ranges:
            yield from extend({x0: r}, x0 + 1)


def enumerate_intervals(nx: int, ny: int) -> list[IntervalShape]:
    if nx * ny > INTERVAL_ENUM_LIMIT:
        raise ShapeError(f"interval enumeration limited to {INTERVAL_ENUM_LIMIT} grid points")
    out = []
    for profile in _staircases(nx, ny):
        cells = frozenset((x, y) for x, (lo, hi) in profile.items() for y in range(lo, hi + 1))
        out.append(IntervalShape(cells))
    out.sort(key=IntervalShape.sort_key)
    return out


def square_corners(s: Point, t: Point) -> tuple[Point, Point, Point, Point]:
    """(s, c, b, t) with c = (t_x, s_y) to the right and b = (s_x, t_y) above."""
    return s, (t[0], s[1]), (s[0], t[1]), t


def is_nondegenerate(s: Point, t: Point) -> bool:
    return s[0] < t[0] and s[1] < t[1]


def hooks(s: Point, t: Point) -> tuple[frozenset, frozenset]:
    """(bottom hook, top hook) of the square with corners s < t, as cell sets.

    The bottom hook drops the top corner, the top hook drops the bottom one.
    They are intervals of the four-point square; in the grid itself they are
    convex only when the square is a unit square.
    """
    if not is_nondegenerate(s, t):
        raise ShapeError(f"square {s} -> {t} is degenerate")
    a, c, b, d = square_corners(s, t)
    return frozenset({a, b, c}), frozenset({b, c, d})


def local_hooks() -> tuple[IntervalShape, IntervalShape]:
    """Bottom and top hook of the 2x2 grid."""
    h1, h2 = hooks((1, 1), (2, 2))
    return IntervalShape(h1), IntervalShape(h2)


BLOCK_TAGS = ("birth_quadrant", "death_quadrant", "hband", "vband")


def block_tags(r: RectangleShape) -> list[str]:
    nx, ny = r.grid
    x_init, x_final = r.x1 == 1, r.x2 == nx
    y_init, y_final = r.y1 == 1, r.y2 == ny
    tags = []
    if x_init and y_init:
        tags.append("birth_quadrant")
    if x_final and y_final:
        tags.append("death_quadrant")
    if x_init and x_final:
        tags.append("hband")
    if y_init and y_final:
        tags.append("vband")
    return tags


def classify_block(r: RectangleShape) -> str:
    tags = block_tags(r)
    return tags[0] if tags else "not_block"


def restrict_interval(s: IntervalShape, cols: list[int], rows: list[int]) -> list[IntervalShape]:
    """Components of s on the subgrid, re-indexed to 1..len(cols) x 1..len(rows)."""
    xi = {x: i + 1 for i, x in enumerate(cols)}
    yi = {y: j + 1 for j, y in enumerate(rows)}
    kept = [(xi[x], yi[y]) for x, y in s.cells if x in xi and y in yi]
    return [IntervalShape(c) for c in components(kept)]
