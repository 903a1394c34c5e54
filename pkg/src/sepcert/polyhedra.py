"""Rational polyhedra, unions of polyhedra, and the exact kernel built
on them: membership, emptiness with Farkas witnesses, distances,
Fourier-Motzkin projection, Minkowski sums/differences, localization to
norm balls, and the boundary/interior trichotomy for unions.

Every operation is a pure function of immutable values; results carry
machine-checkable certificates wherever a claim of emptiness or
interiority is made.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator

from . import lp
from .errors import EmptyRegionError, OracleRegimeError
from .linalg import Vector, add, concat, dot, is_zero, neg, primitive, sub, zero
from .norms import PolyhedralNorm

Row = tuple[Vector, Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def row_primitive(row: Row) -> Row:
    n, c = row
    joint = primitive(tuple(n) + (c,))
    return joint[:-1], joint[-1]


def canonical_rows(rows) -> tuple[Row, ...]:
    """Primitive scaling, trivial-row removal, order-preserving dedup.

    A row 0 <= c with c < 0 is kept: it marks the polyhedron as empty.
    """
    out: list[Row] = []
    seen = set()
    for n, c in rows:
        n = tuple(Fraction(a) for a in n)
        c = Fraction(c)
        if is_zero(n) and c >= 0:
            continue
        n, c = row_primitive((n, c))
        key = (n, c)
        if key not in seen:
            seen.add(key)
            out.append((n, c))
    return tuple(out)


@dataclass(frozen=True)
class Polyhedron:
    dim: int
    rows: tuple[Row, ...]

    @classmethod
    def make(cls, dim: int, rows) -> Polyhedron:
        rows = canonical_rows(rows)
        for n, _ in rows:
            if len(n) != dim:
                raise ValueError("row dimension mismatch")
        return cls(dim, rows)

    @classmethod
    def whole_space(cls, dim: int) -> Polyhedron:
        return cls(dim, ())

    def contains(self, x: Vector) -> bool:
        return all(dot(n, x) <= c for n, c in self.rows)

    def interior_contains(self, x: Vector) -> bool:
        return all(dot(n, x) < c for n, c in self.rows if not is_zero(n))

    def active_rows(self, x: Vector) -> tuple[int, ...]:
        return tuple(i for i, (n, c) in enumerate(self.rows)
                     if not is_zero(n) and dot(n, x) == c)

    def translate(self, v: Vector) -> Polyhedron:
        return Polyhedron(self.dim, tuple((n, c + dot(n, v)) for n, c in self.rows))

    def intersect(self, rows) -> Polyhedron:
        return Polyhedron.make(self.dim, self.rows + tuple(rows))

    def feasible_point(self) -> Vector | None:
        return _feasible_point_cached(self.dim, self.rows)

    def is_empty(self) -> bool:
        return self.feasible_point() is None


@lru_cache(maxsize=16384)
def _feasible_point_cached(dim: int, rows: tuple[Row, ...]) -> Vector | None:
    res = lp.feasible_point(rows) if rows else lp.LPResult(lp.LPStatus.OPTIMAL, x=zero(dim))
    if res.status is lp.LPStatus.OPTIMAL:
        return res.x if rows else zero(dim)
    return None


@dataclass(frozen=True)
class EmptinessCertificate:
    """Self-contained witness that a conjunction of rows is empty.

    ``le`` and ``strict`` are the tested rows; the multipliers combine
    them to 0 <= -1 (or to 0 <= 0 with positive strict mass when only
    the strict part fails).
    """

    le: tuple[Row, ...]
    strict: tuple[Row, ...]
    le_multipliers: tuple[Fraction, ...]
    strict_multipliers: tuple[Fraction, ...]

    def verify(self) -> bool:
        cert = lp.StrictCertificate(self.le_multipliers, (), self.strict_multipliers)
        return cert.verify(self.le, (), self.strict)


@dataclass(frozen=True)
class EmptyCheck:
    empty: bool
    point: Vector | None = None
    certificate: EmptinessCertificate | None = None


def intersect_empty(polys, extra_rows=(), strict_rows=()) -> EmptyCheck:
    """Decide emptiness of an intersection of polyhedra plus extra rows.

    Returns a common point when nonempty, otherwise exact multipliers.
    ``strict_rows`` are enforced as strict inequalities, which is how
    open balls enter emptiness questions.
    """
    polys = tuple(polys)
    if polys:
        dims = {p.dim for p in polys}
        if len(dims) != 1:
            raise ValueError("dimension mismatch between pieces")
    le: tuple[Row, ...] = ()
    for p in polys:
        le += p.rows
    le += tuple(extra_rows)
    strict = tuple(strict_rows)
    res = lp.feasible_point_strict(le, (), strict)
    if res.feasible:
        return EmptyCheck(False, point=res.x)
    cert = EmptinessCertificate(le, strict, res.certificate.le_multipliers,
                                res.certificate.strict_multipliers)
    if not cert.verify():
        raise AssertionError("internal error: emptiness certificate failed re-verification")
    return EmptyCheck(True, certificate=cert)


@dataclass(frozen=True)
class ExactRegion:
    """A finite union of nonempty rational polyhedra."""

    dim: int
    pieces: tuple[Polyhedron, ...]

    @classmethod
    def make(cls, dim: int, pieces) -> ExactRegion:
        kept = tuple(p for p in pieces if not p.is_empty())
        for p in kept:
            if p.dim != dim:
                raise ValueError("piece dimension mismatch")
        return cls(dim, kept)

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    def contains(self, x: Vector) -> bool:
        return any(p.contains(x) for p in self.pieces)

    def translate(self, v: Vector) -> ExactRegion:
        return ExactRegion(self.dim, tuple(p.translate(v) for p in self.pieces))

    def pieces_containing(self, x: Vector) -> tuple[int, ...]:
        return tuple(i for i, p in enumerate(self.pieces) if p.contains(x))


@dataclass(frozen=True)
class OracleRegion:
    """Membership-oracle region with a bounding box and a grid step.

    Verdicts that rely on an oracle backend are only ever reported at
    the stated grid resolution.
    """

    dim: int
    member: Callable[[Vector], bool]
    bbox: Polyhedron
    step: Fraction
    label: str = "oracle"

    def contains(self, x: Vector) -> bool:
        return bool(self.member(x))

    def translate(self, v: Vector) -> OracleRegion:
        base = self.member
        return OracleRegion(self.dim, lambda x: base(sub(x, v)),
                            self.bbox.translate(v), self.step, self.label)

    def grid(self) -> Iterator[Vector]:
        lo, hi = bounding_intervals(self.bbox)
        axes = []
        for a, b in zip(lo, hi):
            start = (a / self.step).__ceil__()
            stop = (b / self.step).__floor__()
            axes.append([k * self.step for k in range(start, stop + 1)])
        for combo in itertools.product(*axes):
            yield tuple(combo)

    def member_grid(self) -> list[Vector]:
        return [x for x in self.grid() if self.bbox.contains(x) and self.member(x)]


Region = ExactRegion | OracleRegion


def require_exact(region: Region, what: str) -> ExactRegion:
    if isinstance(region, OracleRegion):
        raise OracleRegimeError(f"{what} needs an exact backend")
    return region


def bounding_intervals(box: Polyhedron) -> tuple[Vector, Vector]:
    lo = []
    hi = []
    for k in range(box.dim):
        e = [_ZERO] * box.dim
        e[k] = _ONE
        res_max = lp.solve(tuple(e), box.rows, maximize=True)
        res_min = lp.solve(tuple(e), box.rows)
        if res_max.status is not lp.LPStatus.OPTIMAL or res_min.status is not lp.LPStatus.OPTIMAL:
            raise ValueError("bounding box is unbounded or empty")
        hi.append(res_max.value)
        lo.append(res_min.value)
    return tuple(lo), tuple(hi)


# ---------------------------------------------------------------------------
# Distances


def dist_point_region(x: Vector, region: Region, norm: PolyhedralNorm):
    """(d(x, region), attaining witness).  Oracle backends give a grid
    estimate at the region's stated resolution."""
    if isinstance(region, OracleRegion):
        best = None
        for p in region.member_grid():
            d = norm.eval(sub(x, p))
            if best is None or d < best[0]:
                best = (d, p)
        if best is None:
            raise EmptyRegionError("no oracle member found on the grid")
        return best
    if region.is_empty:
        raise EmptyRegionError("distance to an empty region")
    best = None
    for piece in region.pieces:
        got = _dist_point_piece(x, piece, norm)
        if best is None or got[0] < best[0]:
            best = got
    return best


def _dist_point_piece(x: Vector, piece: Polyhedron, norm: PolyhedralNorm):
    d = piece.dim
    nv = d + 1
    rows: list[Row] = []
    for n, c in piece.rows:
        rows.append((tuple(n) + (_ZERO,), c))
    for f in norm.facets:
        # <f, x - y> <= t
        rows.append((tuple(-a for a in f) + (Fraction(-1),), -dot(f, x)))
    obj = (_ZERO,) * d + (_ONE,)
    res = lp.solve(obj, rows)
    assert res.status is lp.LPStatus.OPTIMAL, "distance LP must attain its minimum"
    return res.value, res.x[:d]


def dist_region_region(a_region: Region, b_region: Region, norm: PolyhedralNorm):
    """Exact d(A, B) with an attaining pair; exact backends only."""
    A = require_exact(a_region, "dist_region_region")
    B = require_exact(b_region, "dist_region_region")
    if A.is_empty or B.is_empty:
        raise EmptyRegionError("distance between empty regions")
    best = None
    d = A.dim
    for P in A.pieces:
        for Q in B.pieces:
            rows: list[Row] = []
            for n, c in P.rows:
                rows.append((tuple(n) + (_ZERO,) * (d + 1), c))
            for n, c in Q.rows:
                rows.append(((_ZERO,) * d + tuple(n) + (_ZERO,), c))
            for f in norm.facets:
                rows.append((tuple(f) + tuple(-a for a in f) + (Fraction(-1),), _ZERO))
            obj = (_ZERO,) * (2 * d) + (_ONE,)
            res = lp.solve(obj, rows)
            assert res.status is lp.LPStatus.OPTIMAL
            if best is None or res.value < best[0]:
                best = (res.value, res.x[:d], res.x[d:2 * d])
    return best


def dist_region_region_estimate(a_region: OracleRegion, b_region: OracleRegion,
                                norm: PolyhedralNorm):
    """Coarse grid estimate of d(A, B) for oracle backends."""
    pa = a_region.member_grid()
    pb = b_region.member_grid()
    if not pa or not pb:
        raise EmptyRegionError("no oracle members found on the grid")
    best = None
    for p in pa:
        for q in pb:
            d = norm.eval(sub(p, q))
            if best is None or d < best[0]:
                best = (d, p, q)
    return best


# ---------------------------------------------------------------------------
# Fourier-Motzkin projection and Minkowski arithmetic


def _prune_redundant(rows: list[Row]) -> list[Row]:
    rows = list(canonical_rows(rows))
    i = 0
    while i < len(rows):
        others = rows[:i] + rows[i + 1:]
        n, c = rows[i]
        res = lp.solve(n, others, maximize=True)
        if res.status is lp.LPStatus.OPTIMAL and res.value <= c:
            del rows[i]
        elif res.status is lp.LPStatus.INFEASIBLE:
            # The rest of the system is already empty; this row adds nothing.
            del rows[i]
        else:
            i += 1
    return rows


def eliminate_coords(rows, dim: int, drop: tuple[int, ...]) -> tuple[Row, ...]:
    """Project {x : rows} onto the coordinates outside ``drop``."""
    cur = [(list(n), c) for n, c in rows]
    live = list(range(dim))
    for target in sorted(drop, reverse=True):
        k = live.index(target)
        pos = [(n, c) for n, c in cur if n[k] > 0]
        negs = [(n, c) for n, c in cur if n[k] < 0]
        zeros = [(n, c) for n, c in cur if n[k] == 0]
        new: list[tuple[list[Fraction], Fraction]] = [(n[:k] + n[k + 1:], c) for n, c in zeros]
        for np_, cp in pos:
            for nm, cm in negs:
                coef_p = -nm[k]
                coef_m = np_[k]
                combo = [coef_p * a + coef_m * b for a, b in zip(np_, nm)]
                cc = coef_p * cp + coef_m * cm
                new.append((combo[:k] + combo[k + 1:], cc))
        live.pop(k)
        pruned = _prune_redundant([(tuple(n), c) for n, c in new])
        cur = [(list(n), c) for n, c in pruned]
    return tuple((tuple(n), c) for n, c in cur)


def minkowski_combine(p: Polyhedron, q: Polyhedron, sign: int) -> Polyhedron:
    """{a + sign*b : a in p, b in q} by variable elimination."""
    d = p.dim
    rows: list[Row] = []
    s = Fraction(sign)
    for n, c in p.rows:
        rows.append((tuple(n) + tuple(-s * a for a in n), c))
    for n, c in q.rows:
        rows.append(((_ZERO,) * d + tuple(n), c))
    out = eliminate_coords(rows, 2 * d, tuple(range(d, 2 * d)))
    return Polyhedron.make(d, out)


def minkowski_difference(a_region: Region, b_region: Region) -> ExactRegion:
    """A - B = {a - b} as a union over piece pairs."""
    A = require_exact(a_region, "minkowski_difference")
    B = require_exact(b_region, "minkowski_difference")
    pieces = [minkowski_combine(p, q, -1) for p in A.pieces for q in B.pieces]
    return ExactRegion.make(A.dim, pieces)


def minkowski_sum(a_region: Region, b_region: Region) -> ExactRegion:
    A = require_exact(a_region, "minkowski_sum")
    B = require_exact(b_region, "minkowski_sum")
    pieces = [minkowski_combine(p, q, 1) for p in A.pieces for q in B.pieces]
    return ExactRegion.make(A.dim, pieces)


def localize(region: Region, center: Vector, radius: Fraction,
             norm: PolyhedralNorm) -> Region:
    """region intersected with the closed ``radius``-ball at ``center``."""
    if radius <= 0:
        raise ValueError("localization radius must be positive")
    ball = norm.ball_rows(center, radius)
    if isinstance(region, OracleRegion):
        box = region.bbox.intersect(ball)
        base = region.member
        ball_poly = Polyhedron.make(region.dim, ball)
        return OracleRegion(region.dim,
                            lambda x: base(x) and ball_poly.contains(x),
                            box, region.step, region.label)
    return ExactRegion.make(region.dim, [p.intersect(ball) for p in region.pieces])


# ---------------------------------------------------------------------------
# Interior / boundary trichotomy for unions


@dataclass(frozen=True)
class InteriorCertificate:
    """Why x is interior: either one piece contains it strictly, or every
    escape selection (one active row per containing piece) is strictly
    infeasible."""

    strict_piece: int | None = None
    selection_certificates: tuple[EmptinessCertificate, ...] = ()


@dataclass(frozen=True)
class BoundaryEscape:
    """Direction leaving the union: x + t*direction is outside for all
    rational t in (0, t_max]."""

    direction: Vector
    t_max: Fraction


@dataclass(frozen=True)
class PositionResult:
    position: str  # "outside" | "boundary" | "interior"
    escape: BoundaryEscape | None = None
    interior_certificate: InteriorCertificate | None = None


def union_position(region: ExactRegion, x: Vector) -> PositionResult:
    """Classify x against a union of polyhedra, with certificates.

    Only pieces containing x matter locally: the others are closed sets
    at positive distance.  x is interior iff no selection of one active
    row per containing piece is strictly violable.
    """
    containing = [region.pieces[i] for i in region.pieces_containing(x)]
    if not containing:
        return PositionResult("outside")
    for idx, piece in enumerate(containing):
        if piece.interior_contains(x):
            return PositionResult(
                "interior", interior_certificate=InteriorCertificate(strict_piece=idx))
    active_sets = []
    for piece in containing:
        rows = [piece.rows[i] for i in piece.active_rows(x)]
        if not rows:
            # No nontrivial active row means x is interior to this piece.
            return PositionResult(
                "interior", interior_certificate=InteriorCertificate(strict_piece=0))
        active_sets.append(rows)
    certs: list[EmptinessCertificate] = []
    for selection in itertools.product(*active_sets):
        strict = tuple((neg(n), -c) for n, c in selection)  # <n,y> > c
        res = lp.feasible_point_strict((), (), strict)
        if res.feasible:
            w = sub(res.x, x)
            t_max = _escape_bound(region, containing, x, w)
            return PositionResult("boundary", escape=BoundaryEscape(w, t_max))
        certs.append(EmptinessCertificate((), strict, (),
                                          res.certificate.strict_multipliers))
    return PositionResult("interior",
                          interior_certificate=InteriorCertificate(
                              selection_certificates=tuple(certs)))


def _escape_bound(region: ExactRegion, containing: list[Polyhedron],
                  x: Vector, w: Vector) -> Fraction:
    t_max = _ONE
    containing_ids = set(id(p) for p in containing)
    for piece in region.pieces:
        if id(piece) in containing_ids:
            continue
        # x violates some row of this piece; keep it violated along x + t*w.
        for n, c in piece.rows:
            gap = dot(n, x) - c
            if gap > 0:
                drift = dot(n, w)
                if drift < 0:
                    t_max = min(t_max, gap / (-2 * drift))
                break
        else:
            raise AssertionError("piece marked non-containing has no violated row")
    return t_max


def union_boundary_contains(region: ExactRegion, x: Vector) -> bool:
    return union_position(region, x).position == "boundary"


# ---------------------------------------------------------------------------
# Product-space constructions


def product_polyhedron(parts) -> Polyhedron:
    parts = tuple(parts)
    dim = sum(p.dim for p in parts)
    rows: list[Row] = []
    offset = 0
    for p in parts:
        for n, c in p.rows:
            rows.append(((_ZERO,) * offset + tuple(n) + (_ZERO,) * (dim - offset - p.dim), c))
        offset += p.dim
    return Polyhedron.make(dim, rows)


def product_region(regions) -> ExactRegion:
    regions = [require_exact(r, "product_region") for r in regions]
    dim = sum(r.dim for r in regions)
    pieces = [product_polyhedron(combo)
              for combo in itertools.product(*(r.pieces for r in regions))]
    return ExactRegion.make(dim, pieces)


def diagonal_region(region: ExactRegion, copies: int) -> ExactRegion:
    """{(x, ..., x) : x in region} inside the ``copies``-fold product."""
    d = region.dim
    dim = d * copies
    pieces = []
    for p in region.pieces:
        rows: list[Row] = []
        for n, c in p.rows:
            rows.append((tuple(n) + (_ZERO,) * (dim - d), c))
        for block in range(copies - 1):
            for k in range(d):
                e = [_ZERO] * dim
                e[block * d + k] = _ONE
                e[(block + 1) * d + k] = Fraction(-1)
                rows.append((tuple(e), _ZERO))
                rows.append((tuple(-a for a in e), _ZERO))
        pieces.append(Polyhedron.make(dim, rows))
    return ExactRegion.make(dim, pieces)


def product_reduction(regions, points, base_norm: PolyhedralNorm):
    """Reduce n >= 2 sets in Q^d to a pair in Q^(d(n-1)).

    The first set is the product of the first n-1 regions, the second is
    the diagonal restricted to the last region; reference points embed
    accordingly.  For n = 2 this is the identity pairing.
    """
    regions = list(regions)
    points = list(points)
    if len(regions) < 2:
        raise ValueError("need at least two regions")
    if len(regions) != len(points):
        raise ValueError("one reference point per region")
    from .norms import product_norm
    if len(regions) == 2:
        return regions[0], regions[1], points[0], points[1], base_norm
    head = [require_exact(r, "product_reduction") for r in regions[:-1]]
    last = require_exact(regions[-1], "product_reduction")
    a_region = product_region(head)
    b_region = diagonal_region(last, len(regions) - 1)
    a_point = concat(*points[:-1])
    b_point = concat(*([points[-1]] * (len(regions) - 1)))
    norm = product_norm([base_norm] * (len(regions) - 1))
    return a_region, b_region, a_point, b_point, norm
