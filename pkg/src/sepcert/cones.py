"""Tangent cones, normal cones and dual-norm distances to cones.

Cones carry both a generator (conic hull) form and an H-form; the two
are cross-checked on construction.  For a single polyhedron the normal
cone at a point is the conic hull of the active row normals; for a
union it is the intersection of the normal cones of the pieces that
contain the point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import lp
from .dd import cone_contains, rays_from_rows, rows_from_rays
from .errors import OracleRegimeError
from .linalg import Vector, dot, is_zero, neg, primitive, zero
from .norms import PolyhedralNorm
from .polyhedra import ExactRegion, OracleRegion, Polyhedron, Region

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class Cone:
    dim: int
    generators: tuple[Vector, ...]
    hrows: tuple[Vector, ...]

    @classmethod
    def from_generators(cls, gens, dim: int) -> Cone:
        gens = _canonical_rays(gens)
        hrows = rows_from_rays(gens, dim)
        cone = cls(dim, gens, hrows)
        cone._cross_check()
        return cone

    @classmethod
    def from_hrows(cls, rows, dim: int) -> Cone:
        rows = _canonical_rays(rows)
        gens = rays_from_rows(rows, dim)
        cone = cls(dim, gens, rows)
        cone._cross_check()
        return cone

    @classmethod
    def trivial(cls, dim: int) -> Cone:
        return cls.from_generators((), dim)

    @classmethod
    def full_space(cls, dim: int) -> Cone:
        return cls.from_hrows((), dim)

    def _cross_check(self) -> None:
        for g in self.generators:
            for h in self.hrows:
                if dot(h, g) > 0:
                    raise AssertionError("cone representations disagree")

    def contains(self, x: Vector) -> bool:
        # The H-form is complete for the cone by construction.
        return is_zero(x) or all(dot(h, x) <= 0 for h in self.hrows)

    @property
    def is_trivial(self) -> bool:
        return not self.generators

    def negate(self) -> Cone:
        return Cone(self.dim, tuple(sorted(neg(g) for g in self.generators)),
                    tuple(sorted(neg(h) for h in self.hrows)))

    def intersect(self, other: Cone) -> Cone:
        if self.dim != other.dim:
            raise ValueError("cone dimension mismatch")
        return Cone.from_hrows(self.hrows + other.hrows, self.dim)

    def same_cone(self, other: Cone) -> bool:
        return (self.dim == other.dim
                and all(other.contains(g) for g in self.generators)
                and all(self.contains(g) for g in other.generators))


def _canonical_rays(vectors) -> tuple[Vector, ...]:
    out = []
    seen = set()
    for v in vectors:
        v = primitive(tuple(Fraction(a) for a in v))
        if is_zero(v) or v in seen:
            continue
        seen.add(v)
        out.append(v)
    return tuple(sorted(out))


def tangent_cone(piece: Polyhedron, a: Vector) -> Cone:
    """{v : <n, v> <= 0 for rows active at a}; requires a in piece."""
    if not piece.contains(a):
        raise ValueError("tangent cone asked at a point outside the polyhedron")
    rows = tuple(piece.rows[i][0] for i in piece.active_rows(a))
    return Cone.from_hrows(rows, piece.dim)


def normal_cone_piece(piece: Polyhedron, a: Vector) -> Cone:
    """Conic hull of the active row normals (polar of the tangent cone)."""
    if not piece.contains(a):
        raise ValueError("normal cone asked at a point outside the polyhedron")
    gens = tuple(piece.rows[i][0] for i in piece.active_rows(a))
    return Cone.from_generators(gens, piece.dim)


def normal_cone(region: Region, a: Vector) -> Cone:
    """Normal cone to a union: intersection over pieces containing a.

    Pieces at positive distance are locally irrelevant (they are closed),
    so only containing pieces take part.
    """
    if isinstance(region, OracleRegion):
        raise OracleRegimeError("normal cones need an exact backend")
    idxs = region.pieces_containing(a)
    if not idxs:
        raise ValueError("normal cone asked at a point outside the region")
    hrows: tuple[Vector, ...] = ()
    for i in idxs:
        hrows += normal_cone_piece(region.pieces[i], a).hrows
    return Cone.from_hrows(hrows, region.dim)


def dist_to_cone(xstar: Vector, cone: Cone, dual_norm: PolyhedralNorm):
    """(min_{y in cone} ||xstar - y||, attaining y), via generator coords."""
    if cone.is_trivial:
        return dual_norm.eval(xstar), zero(cone.dim)
    gens = cone.generators
    k = len(gens)
    rows: list[tuple[Vector, Fraction]] = []
    for f in dual_norm.facets:
        coeffs = tuple(-dot(f, g) for g in gens) + (Fraction(-1),)
        rows.append((coeffs, -dot(f, xstar)))
    for i in range(k):
        e = [_ZERO] * (k + 1)
        e[i] = Fraction(-1)
        rows.append((tuple(e), _ZERO))
    obj = (_ZERO,) * k + (_ONE,)
    res = lp.solve(obj, rows)
    assert res.status is lp.LPStatus.OPTIMAL
    lam = res.x[:k]
    witness = zero(cone.dim)
    for li, g in zip(lam, gens):
        witness = tuple(w + li * gi for w, gi in zip(witness, g))
    return res.value, witness


def eps_normal_member(xstar: Vector, a: Vector, region: Region, eps: Fraction,
                      norm: PolyhedralNorm) -> bool:
    """Exact test of <xstar, v> <= eps*||v|| over all directions v into
    the region at a.

    The norm ball is split into its facet sectors so each subproblem is
    a bounded LP; the test holds iff every sector maximum is <= 0.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if isinstance(region, OracleRegion):
        raise OracleRegimeError("eps-normal membership needs an exact backend")
    idxs = region.pieces_containing(a)
    if not idxs:
        raise ValueError("point outside the region")
    d = region.dim
    for i in idxs:
        tc = tangent_cone(region.pieces[i], a)
        for m, fm in enumerate(norm.facets):
            rows: list[tuple[Vector, Fraction]] = [(h, _ZERO) for h in tc.hrows]
            for j, fj in enumerate(norm.facets):
                if j != m:
                    rows.append((tuple(b - c for b, c in zip(fj, fm)), _ZERO))
            rows.append((fm, _ONE))
            obj = tuple(x - eps * f for x, f in zip(xstar, fm))
            res = lp.solve(obj, rows, maximize=True)
            assert res.status is lp.LPStatus.OPTIMAL
            if res.value > 0:
                return False
    return True
