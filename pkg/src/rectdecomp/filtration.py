"""Rectangle filtrations of a grid module and the objects built on them.

For a rectangle R and a point t in R, images coming from the left/bottom and
kernels going to the right/top are combined into two nested subspaces
V-(t) <= V+(t) of M_t.  Their quotient at the minimal corner of R counts the
copies of k_R in M, and a complement inside the filtration of V+ gives an
explicit submodule isomorphic to those copies.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import field as F
from .bimodule import GridModule, restrict
from .shapes import Point, RectangleShape, enumerate_rectangles


class NotWeaklyExact(ValueError):
    def __init__(self, witness, message: str = "module is not weakly exact"):
        super().__init__(f"{message}: {witness}")
        self.witness = witness


class FiltrationError(RuntimeError):
    """An identity that must hold for weakly exact modules failed."""


def _cache(m: GridModule) -> dict:
    c = m.__dict__.get("_derived")
    if c is None:
        c = m.__dict__["_derived"] = {}
    return c


def require_weakly_exact(m: GridModule):
    from .decomposer import weak_exact

    report = weak_exact(m)
    if not report.verdict:
        raise NotWeaklyExact(report.witness)


@dataclass(frozen=True)
class FiltSpaces:
    """All filtration spaces of M_t for one rectangle."""

    t: Point
    il_plus: F.Subspace
    il_minus: F.Subspace
    ib_plus: F.Subspace
    ib_minus: F.Subspace
    kr_plus: F.Subspace
    kr_minus: F.Subspace
    kt_plus: F.Subspace
    kt_minus: F.Subspace
    im_plus: F.Subspace
    im_minus: F.Subspace
    ker_plus: F.Subspace
    ker_minus: F.Subspace
    v_plus: F.Subspace
    v_minus: F.Subspace

    def nested(self) -> bool:
        pairs = [
            (self.il_minus, self.il_plus), (self.ib_minus, self.ib_plus),
            (self.kr_minus, self.kr_plus), (self.kt_minus, self.kt_plus),
            (self.im_minus, self.im_plus), (self.ker_minus, self.ker_plus),
            (self.v_minus, self.v_plus),
        ]
        return all(F.contains(big, small) for small, big in pairs)


def pointwise_filtration(m: GridModule, r: RectangleShape, t: Point) -> FiltSpaces:
    t = tuple(t)
    if t not in r:
        raise ValueError(f"{t} is not in {r}")
    key = ("filt", r, t)
    cache = _cache(m)
    if key in cache:
        return cache[key]
    p, n = m.p, m.dim(t)
    tx, ty = t
    zero = F.Subspace.zero(n, p)
    full = F.Subspace.full(n, p)
    # images: largest realizing index of the lower cut, least of the upper cut
    il_plus = m.image((r.x1, ty), t)
    il_minus = m.image((r.x1 - 1, ty), t) if r.x1 > 1 else zero
    ib_plus = m.image((tx, r.y1), t)
    ib_minus = m.image((tx, r.y1 - 1), t) if r.y1 > 1 else zero
    # kernels: an empty upper cut means everything dies at infinity
    kr_plus = m.kernel(t, (r.x2 + 1, ty)) if r.x2 < m.nx else full
    kr_minus = m.kernel(t, (r.x2, ty))
    kt_plus = m.kernel(t, (tx, r.y2 + 1)) if r.y2 < m.ny else full
    kt_minus = m.kernel(t, (tx, r.y2))

    im_plus = il_plus & ib_plus
    im_minus = (il_minus + ib_minus) & im_plus
    ker_plus = (kr_plus + kt_minus) & (kr_minus + kt_plus)
    ker_minus = kr_minus + kt_minus
    v_plus = im_plus & ker_plus
    v_minus = (im_plus & ker_minus) + (im_minus & ker_plus)
    out = FiltSpaces(t, il_plus, il_minus, ib_plus, ib_minus, kr_plus, kr_minus, kt_plus, kt_minus,
                     im_plus, im_minus, ker_plus, ker_minus, v_plus, v_minus)
    cache[key] = out
    return out


@dataclass
class SubmoduleFamily:
    """A subspace of M_t for every grid point t."""

    base: GridModule
    spaces: dict = dc_field(default_factory=dict)

    def space(self, t: Point) -> F.Subspace:
        return self.spaces[tuple(t)]

    def dim(self, t: Point) -> int:
        return self.space(t).dim

    def dims(self) -> np.ndarray:
        m = self.base
        return np.array([[self.dim((x, y)) for y in range(1, m.ny + 1)] for x in range(1, m.nx + 1)])

    def is_submodule(self) -> bool:
        m = self.base
        for (x, y), mat in m.hmaps.items():
            if not F.contains(self.space((x + 1, y)), F.pushforward(mat, self.space((x, y)))):
                return False
        for (x, y), mat in m.vmaps.items():
            if not F.contains(self.space((x, y + 1)), F.pushforward(mat, self.space((x, y)))):
                return False
        return True

    def as_module(self) -> GridModule:
        """The family as a grid module, in the echelon coordinates of each space."""
        m = self.base
        dims = self.dims()

        def induced(mat, s, t):
            src, dst = self.space(s), self.space(t)
            return dst.coordinates(F.matmul(mat, src.basis, m.p))

        hm = {(x, y): induced(mat, (x, y), (x + 1, y)) for (x, y), mat in m.hmaps.items()}
        vm = {(x, y): induced(mat, (x, y), (x, y + 1)) for (x, y), mat in m.vmaps.items()}
        return GridModule(m.p, m.nx, m.ny, dims, hm, vm)


def filt_submodule(m: GridModule, r: RectangleShape, sign: str = "+", check: bool = True) -> SubmoduleFamily:
    """V+ or V- pushed forward from the corner of R over its upset, zero elsewhere."""
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    key = ("family", r, sign)
    cache = _cache(m)
    if key in cache:
        return cache[key]
    if check:
        require_weakly_exact(m)
    t0 = r.corner
    fs = pointwise_filtration(m, r, t0)
    seed = fs.v_plus if sign == "+" else fs.v_minus
    spaces = {}
    for t in m.points():
        if r.in_upset(t):
            spaces[t] = F.pushforward(m.rho(t0, t), seed)
        else:
            spaces[t] = F.Subspace.zero(m.dim(t), m.p)
    fam = SubmoduleFamily(m, spaces)
    cache[key] = fam
    return fam


def counting_dim(m: GridModule, r: RectangleShape, check: bool = True) -> int:
    """Multiplicity of k_R: dim V+ - dim V- at the minimal corner of R."""
    if check:
        require_weakly_exact(m)
    fs = pointwise_filtration(m, r, r.corner)
    return fs.v_plus.dim - fs.v_minus.dim


def linking_condition(m: GridModule, r: RectangleShape) -> bool:
    """Kr+ & Kt+ <= Im_R+ at every point of R."""
    for t in r.cells:
        fs = pointwise_filtration(m, r, t)
        if not F.contains(fs.im_plus, fs.kr_plus & fs.kt_plus):
            return False
    return True


@dataclass(frozen=True)
class DoubleFiltSpaces:
    t: Point
    im_plus: F.Subspace
    im_minus: F.Subspace
    w_plus: F.Subspace
    w_minus: F.Subspace
    dying: F.Subspace  # Kr+ & Kt+ inside V+


def _closed_forms(m: GridModule, r: RectangleShape, t: Point) -> DoubleFiltSpaces:
    fs = pointwise_filtration(m, r, t)
    v = fs.v_plus
    kt_m, kr_m = fs.kt_minus & v, fs.kr_minus & v
    w_minus = kt_m + kr_m
    dying = fs.kt_plus & fs.kr_plus & v
    w_plus = dying + w_minus
    return DoubleFiltSpaces(t, v, F.Subspace.zero(v.ambient_dim, m.p), w_plus, w_minus, dying)


def _lift(sub: F.Subspace, basis: np.ndarray, p: int) -> F.Subspace:
    # subspace given in coordinates of basis -> subspace of the ambient space
    return F.pushforward(basis, sub)


def double_filtration(m: GridModule, r: RectangleShape, verify: bool = True) -> dict:
    """Filtration of V+ taken as a module in its own right, at every t in R.

    Spaces are returned in the coordinates of M_t.  With ``verify`` the
    recomputation inside V+ is compared against the closed forms, and V+ is
    checked to be weakly exact.
    """
    from .decomposer import weak_exact

    require_weakly_exact(m)
    out = {t: _closed_forms(m, r, t) for t in sorted(r.cells)}
    if not verify:
        return out
    fam = filt_submodule(m, r, "+", check=False)
    sub = fam.as_module()
    rep = weak_exact(sub)
    if not rep.verdict:
        raise FiltrationError(f"V+ of {r} is not weakly exact: {rep.witness}")
    for t, closed in out.items():
        inner = pointwise_filtration(sub, r, t)
        basis = fam.space(t).basis
        got = {
            "im_plus": _lift(inner.im_plus, basis, m.p),
            "im_minus": _lift(inner.im_minus, basis, m.p),
            "w_plus": _lift(inner.v_plus, basis, m.p),
            "w_minus": _lift(inner.v_minus, basis, m.p),
            "dying": _lift(inner.kr_plus & inner.kt_plus, basis, m.p),
        }
        for name, space in got.items():
            if space != getattr(closed, name):
                raise FiltrationError(f"double filtration of {r} at {t}: {name} differs from its closed form")
        if not F.contains(inner.im_plus, inner.kr_plus & inner.kt_plus):
            raise FiltrationError(f"linking condition fails inside V+ for {r} at {t}")
    return out


@dataclass
class Filtrate:
    """Explicit copies of k_R inside M: generators at the corner, transported over R."""

    rect: RectangleShape
    generators: np.ndarray  # columns in M_{t0}
    family: SubmoduleFamily

    @property
    def multiplicity(self) -> int:
        return self.generators.shape[1]

    def vectors_at(self, t: Point) -> np.ndarray:
        m = self.family.base
        if t not in self.rect:
            return F.zeros(m.dim(t), 0)
        return F.matmul(m.rho(self.rect.corner, t), self.generators, m.p)


def rectangle_filtrate(m: GridModule, r: RectangleShape, check: bool = True) -> Filtrate:
    if check:
        require_weakly_exact(m)
    t0 = r.corner
    df = _closed_forms(m, r, t0)
    # on a finite grid a summand k_R' with R' strictly sigma-below R can meet the
    # upset of t0 exactly in R, so V- is quotiented out as well
    v_minus = pointwise_filtration(m, r, t0).v_minus
    w = F.complement_within(df.w_minus + v_minus, df.w_plus + v_minus, df.dying)
    spaces = {}
    for t in m.points():
        if t in r:
            spaces[t] = F.pushforward(m.rho(t0, t), w)
        else:
            spaces[t] = F.Subspace.zero(m.dim(t), m.p)
    return Filtrate(r, w.basis, SubmoduleFamily(m, spaces))


def all_filtrates(m: GridModule, check: bool = True) -> list[Filtrate]:
    if check:
        require_weakly_exact(m)
    out = []
    for r in enumerate_rectangles(m.nx, m.ny):
        if m.dim(r.corner) == 0:
            continue
        f = rectangle_filtrate(m, r, check=False)
        if f.multiplicity:
            out.append(f)
    return out


# skeleta


@dataclass(frozen=True)
class Skeleton:
    """A subgrid through t realizing every kernel out of and image into M_t."""

    t: Point
    cols: tuple
    rows: tuple

    @property
    def origin(self) -> Point:
        return self.cols.index(self.t[0]) + 1, self.rows.index(self.t[1]) + 1

    def to_dict(self) -> dict:
        return {"point": list(self.t), "cols": list(self.cols), "rows": list(self.rows)}


def _axis_indices(m: GridModule, t: Point, axis: int) -> list[int]:
    n_axis = m.nx if axis == 0 else m.ny
    total = m.dim(t)

    def at(v):
        return (v, t[1]) if axis == 0 else (t[0], v)

    keep = [t[axis]]
    if total == 0:
        return keep
    # kernels to the right/top: first index of every new dimension below dim M_t
    seen = {0}
    for v in range(t[axis] + 1, n_axis + 1):
        d = m.kernel(t, at(v)).dim
        if d not in seen and d < total:
            keep.append(v)
        seen.add(d)
    # images from the left/bottom: last index of every new dimension above 0
    seen = {total}
    for v in range(t[axis] - 1, 0, -1):
        d = m.image(at(v), t).dim
        if d not in seen and d > 0:
            keep.append(v)
        seen.add(d)
    return sorted(keep)


def t_skeleton(m: GridModule, t: Point) -> Skeleton:
    t = tuple(t)
    return Skeleton(t, tuple(_axis_indices(m, t, 0)), tuple(_axis_indices(m, t, 1)))


def skeleton_module(m: GridModule, sk: Skeleton) -> GridModule:
    return restrict(m, list(sk.cols), list(sk.rows))


def lift_rectangle(m: GridModule, sk: Skeleton, r_sk: RectangleShape) -> RectangleShape:
    """The rectangle of the full grid whose cuts at t match those of r_sk."""
    if sk.origin not in r_sk:
        raise ValueError(f"skeleton rectangle {r_sk} does not contain the base point")
    t = sk.t

    def at(axis, v):
        return (v, t[1]) if axis == 0 else (t[0], v)

    def upper(axis, idx):
        n_axis = m.nx if axis == 0 else m.ny
        start = (sk.cols, sk.rows)[axis][idx - 1]
        d = m.kernel(t, at(axis, start)).dim
        v = start
        while v + 1 <= n_axis and m.kernel(t, at(axis, v + 1)).dim == d:
            v += 1
        return v

    def lower(axis, idx):
        start = (sk.cols, sk.rows)[axis][idx - 1]
        d = m.image(at(axis, start), t).dim
        v = start
        while v - 1 >= 1 and m.image(at(axis, v - 1), t).dim == d:
            v -= 1
        return v

    return RectangleShape.from_bounds(
        lower(0, r_sk.x1), upper(0, r_sk.x2), lower(1, r_sk.y1), upper(1, r_sk.y2), m.nx, m.ny
    )


@dataclass
class SkeletonCheck:
    ok: bool
    failures: list

    def __bool__(self):
        return self.ok


def check_skeleton(m: GridModule, sk: Skeleton, lift: bool = True) -> SkeletonCheck:
    """Verify the realization properties of a skeleton and, optionally, its lifts."""
    failures = []
    t = sk.t
    total = m.dim(t)
    if t[0] not in sk.cols or t[1] not in sk.rows:
        failures.append("skeleton misses t")
        return SkeletonCheck(False, failures)
    for axis, idx in ((0, sk.cols), (1, sk.rows)):
        n_axis = m.nx if axis == 0 else m.ny
        at = (lambda v: (v, t[1])) if axis == 0 else (lambda v: (t[0], v))
        pos = idx.index(t[axis])
        full = F.Subspace.full(total, m.p)
        zero = F.Subspace.zero(total, m.p)
        kers = [m.kernel(t, at(v)) for v in idx[pos:]] + [full]
        ims = [zero] + [m.image(at(v), t) for v in idx[: pos + 1]]
        if total:
            for a, b in zip(kers, kers[1:]):
                if not (F.contains(b, a) and b.dim > a.dim):
                    failures.append(f"axis {axis}: kernels not strictly increasing")
            for a, b in zip(ims, ims[1:]):
                if not (F.contains(b, a) and b.dim > a.dim):
                    failures.append(f"axis {axis}: images not strictly increasing")
        for v in range(t[axis], n_axis + 1):
            if m.kernel(t, at(v)) not in kers:
                failures.append(f"axis {axis}: kernel to {v} not realized")
        for v in range(1, t[axis] + 1):
            if m.image(at(v), t) not in ims:
                failures.append(f"axis {axis}: image from {v} not realized")
    if lift and not failures:
        failures.extend(_check_lifts(m, sk))
    return SkeletonCheck(not failures, failures)


def _check_lifts(m: GridModule, sk: Skeleton) -> list:
    failures = []
    g = skeleton_module(m, sk)
    o = sk.origin
    seen = {}
    total_sk = total_lift = 0
    for r_sk in enumerate_rectangles(g.nx, g.ny):
        if o not in r_sk:
            continue
        r = lift_rectangle(m, sk, r_sk)
        if r in seen:
            failures.append(f"{r_sk} and {seen[r]} lift to the same {r}")
        seen[r] = r_sk
        if not (sk.cols[r_sk.x1 - 1] >= r.x1 and sk.cols[r_sk.x2 - 1] <= r.x2
                and sk.rows[r_sk.y1 - 1] >= r.y1 and sk.rows[r_sk.y2 - 1] <= r.y2):
            failures.append(f"{r_sk} is not contained in its lift {r}")
        a, b = pointwise_filtration(g, r_sk, o), pointwise_filtration(m, r, sk.t)
        for name in ("il_plus", "il_minus", "ib_plus", "ib_minus",
                     "kr_plus", "kr_minus", "kt_plus", "kt_minus"):
            if getattr(a, name) != getattr(b, name):
                failures.append(f"{r_sk} -> {r}: {name} differs")
        c_sk = counting_dim(g, r_sk, check=False)
        c = counting_dim(m, r, check=False)
        if c_sk != c:
            failures.append(f"{r_sk} -> {r}: counting dims {c_sk} != {c}")
        total_sk += c_sk
        total_lift += c
    if total_sk != m.dim(sk.t) or total_lift != m.dim(sk.t):
        failures.append(f"counting dims sum to {total_sk}/{total_lift}, expected {m.dim(sk.t)}")
    return failures
