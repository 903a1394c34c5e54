"""Local conical structure of polyhedral unions.

Near a point of a union of polyhedra everything is conical: within a
computable rational radius, each containing piece agrees with its
tangent cone and every other piece is invisible.  This module computes
that radius, the tangent-cone union, and the local fan: the finitely
many normal cones available at points arbitrarily close to the
reference point, indexed by sign cells of the active hyperplanes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import lp
from .cones import Cone, tangent_cone
from .errors import OracleRegimeError
from .linalg import Vector, add, dot, is_zero, neg, primitive, scale, sub, zero
from .norms import PolyhedralNorm
from .polyhedra import ExactRegion, OracleRegion, Polyhedron, Region, dist_point_region

_ZERO = Fraction(0)
_ONE = Fraction(1)


class FaceCapExceeded(RuntimeError):
    """Cell enumeration hit the configured cap; reported, never truncated."""


@dataclass(frozen=True)
class LocalStructure:
    """Tangent cones of the containing pieces and the radius on which
    the region coincides with their union around the point."""

    point: Vector
    piece_indices: tuple[int, ...]
    cones: tuple[Cone, ...]
    radius: Fraction  # conical-validity radius r*, always > 0

    def cone_region(self) -> ExactRegion:
        """The tangent structure as a region of apex-0 cones."""
        dim = len(self.point)
        pieces = [Polyhedron.make(dim, tuple((h, _ZERO) for h in c.hrows))
                  for c in self.cones]
        return ExactRegion.make(dim, pieces)


def local_structure(region: Region, point: Vector, norm: PolyhedralNorm,
                    fallback_radius: Fraction = _ONE) -> LocalStructure:
    """Compute tangent cones at ``point`` and the validity radius.

    Within the radius r*: region ∩ ball = (union of tangent cones,
    shifted to the point) ∩ ball.  r* is the minimum of the scaled
    slacks of inactive rows and the distances to non-containing pieces.
    """
    if isinstance(region, OracleRegion):
        raise OracleRegimeError("local structure needs an exact backend")
    idxs = region.pieces_containing(point)
    if not idxs:
        raise ValueError("local structure asked outside the region")
    dual = norm.dual()
    radius = fallback_radius
    cones = []
    for i in idxs:
        piece = region.pieces[i]
        active = set(piece.active_rows(point))
        for j, (n, c) in enumerate(piece.rows):
            if j in active or is_zero(n):
                continue
            slack = c - dot(n, point)
            radius = min(radius, slack / dual.eval(n))
        cones.append(tangent_cone(piece, point))
    for i, piece in enumerate(region.pieces):
        if i in idxs:
            continue
        d, _ = dist_point_region(point, ExactRegion(region.dim, (piece,)), norm)
        radius = min(radius, d)
    if radius <= 0:
        raise AssertionError("internal error: conical radius must be positive")
    return LocalStructure(point, tuple(idxs), tuple(cones), radius)


@dataclass(frozen=True)
class FanCell:
    """One sign cell of the local fan at a reference point.

    ``direction`` w is a representative: points x = point + t*w for small
    t > 0 all carry the same normal cone of the union, ``cone``.
    """

    direction: Vector
    cone: Cone
    active_signature: tuple[tuple[int, int], ...]  # (hyperplane idx, sign)


def _oriented(v: Vector) -> tuple[Vector, int]:
    p = primitive(v)
    for a in p:
        if a != 0:
            if a < 0:
                return neg(p), -1
            return p, 1
    return p, 1


def local_normal_fan(region: Region, point: Vector) -> tuple[FanCell, ...]:
    """All normal cones of the union available arbitrarily near ``point``.

    Enumerates the sign cells of the central arrangement of the rows
    active at the point (other rows and pieces are locally invisible),
    keeps the cells whose directions enter the region, and intersects
    per-piece active-normal hulls on each cell.
    """
    if isinstance(region, OracleRegion):
        raise OracleRegimeError("normal fans need an exact backend")
    idxs = region.pieces_containing(point)
    if not idxs:
        raise ValueError("normal fan asked outside the region")
    dim = region.dim
    tangents = {i: tangent_cone(region.pieces[i], point) for i in idxs}
    active_normals: dict[int, tuple[Vector, ...]] = {
        i: tuple(region.pieces[i].rows[j][0] for j in region.pieces[i].active_rows(point))
        for i in idxs}

    hyperplanes: list[Vector] = []
    seen = set()
    for i in idxs:
        for n in active_normals[i]:
            o, _ = _oriented(n)
            if o not in seen:
                seen.add(o)
                hyperplanes.append(o)

    cells: list[FanCell] = []
    seen_sig = set()
    for signs in itertools.product((-1, 0, 1), repeat=len(hyperplanes)):
        eq = []
        strict = []
        for h, s in zip(hyperplanes, signs):
            if s == 0:
                eq.append((h, _ZERO))
            elif s > 0:
                strict.append((neg(h), _ZERO))   # <h, w> > 0
            else:
                strict.append((h, _ZERO))        # <h, w> < 0
        res = lp.feasible_point_strict((), eq, strict)
        if not res.feasible:
            continue
        w = res.x if res.x is not None else zero(dim)
        inside = [i for i in idxs if tangents[i].contains(w)]
        if not inside:
            continue
        cone = None
        for i in inside:
            gens = tuple(n for n in active_normals[i] if dot(n, w) == 0)
            piece_cone = Cone.from_generators(gens, dim)
            cone = piece_cone if cone is None else cone.intersect(piece_cone)
        sig = tuple((k, s) for k, s in enumerate(signs))
        if sig not in seen_sig:
            seen_sig.add(sig)
            cells.append(FanCell(w, cone, sig))
    return tuple(cells)


@dataclass(frozen=True)
class RegionCell:
    """A locus of constant normal cone inside a locality ball."""

    representative: Vector
    cone: Cone
    piece_index: int
    active_rows: tuple[int, ...]


def enumerate_region_cells(region: Region, center: Vector, locality: Fraction,
                           norm: PolyhedralNorm, cap: int = 10_000) -> tuple[RegionCell, ...]:
    """Cells of the region's face arrangement meeting the open locality
    ball around ``center``, each with a strict-interior representative.

    The number of visited sign vectors is capped; hitting the cap raises
    rather than silently truncating.
    """
    if isinstance(region, OracleRegion):
        raise OracleRegimeError("cell enumeration needs an exact backend")
    dim = region.dim
    hyperplanes: list[tuple[Vector, Fraction]] = []
    seen = set()
    for piece in region.pieces:
        for n, c in piece.rows:
            if is_zero(n):
                continue
            joint = primitive(tuple(n) + (c,))
            flip = next((1 if a > 0 else -1 for a in joint[:-1] if a != 0), 1)
            row = (scale(flip, joint[:-1]), flip * joint[-1])
            if row not in seen:
                seen.add(row)
                hyperplanes.append(row)
    ball_strict = [(f, locality + dot(f, center)) for f in norm.facets]

    cells: list[RegionCell] = []
    seen_active = set()
    visited = 0

    def recurse(k: int, eq: list, strict: list) -> None:
        nonlocal visited
        visited += 1
        if visited > cap:
            raise FaceCapExceeded(f"more than {cap} sign cells explored")
        res = lp.feasible_point_strict((), eq, strict + ball_strict)
        if not res.feasible:
            return
        if k == len(hyperplanes):
            x = res.x
            if not region.contains(x):
                return
            piece_idx = region.pieces_containing(x)[0]
            cone = None
            for i in region.pieces_containing(x):
                piece = region.pieces[i]
                gens = tuple(piece.rows[j][0] for j in piece.active_rows(x))
                pc = Cone.from_generators(gens, dim)
                cone = pc if cone is None else cone.intersect(pc)
            key = tuple(sorted(
                (i, tuple(region.pieces[i].active_rows(x)))
                for i in region.pieces_containing(x)))
            if key in seen_active:
                return
            seen_active.add(key)
            cells.append(RegionCell(x, cone, piece_idx,
                                    tuple(region.pieces[piece_idx].active_rows(x))))
            return
        n, c = hyperplanes[k]
        recurse(k + 1, eq + [(n, c)], strict)
        recurse(k + 1, eq, strict + [(n, c)])
        recurse(k + 1, eq, strict + [(neg(n), -c)])

    recurse(0, [], [])
    return tuple(cells)
