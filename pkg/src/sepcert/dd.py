"""Double description for rational polyhedral cones at desk dimension.

A cone is handled in two interchangeable forms: a finite set of
generating rays, and a finite set of homogeneous inequality normals
{y : <h, y> <= 0}.  Conversion in either direction is the same polar
computation, done by incremental halfspace insertion with exact
arithmetic and LP-based pruning of redundant rays.
"""

from __future__ import annotations

from fractions import Fraction

from . import lp
from .linalg import Vector, dot, is_zero, neg, primitive, scale, sub, unit

DIMENSION_CAP = 6

_ZERO = Fraction(0)


class DimensionCapExceeded(ValueError):
    pass


def cone_contains(gens: tuple[Vector, ...], x: Vector) -> bool:
    """Exact membership of x in the conic hull of ``gens``."""
    if is_zero(x):
        return True
    if not gens:
        return False
    dim = len(x)
    eq = []
    for d in range(dim):
        eq.append((tuple(g[d] for g in gens), x[d]))
    le = []
    for i in range(len(gens)):
        e = [_ZERO] * len(gens)
        e[i] = Fraction(-1)
        le.append((tuple(e), _ZERO))
    return lp.feasible_point(le, eq).status is lp.LPStatus.OPTIMAL


def _prune(gens: list[Vector]) -> list[Vector]:
    out = list(dict.fromkeys(gens))
    i = 0
    while i < len(out):
        rest = tuple(out[:i] + out[i + 1:])
        if cone_contains(rest, out[i]):
            del out[i]
        else:
            i += 1
    return out


def rays_from_rows(rows, dim: int) -> tuple[Vector, ...]:
    """Generators of {y in Q^dim : <h, y> <= 0 for every h in rows}.

    The zero cone comes back as an empty tuple.  Also computes polars:
    feeding generators of K as ``rows`` yields generators of the polar
    cone, which serve as the H-form normals of K itself.
    """
    if dim > DIMENSION_CAP:
        raise DimensionCapExceeded(
            f"cone conversion limited to dimension {DIMENSION_CAP}, got {dim}")
    gens: list[Vector] = []
    for k in range(dim):
        e = unit(dim, k)
        gens.append(e)
        gens.append(neg(e))
    for h in rows:
        if is_zero(h):
            continue
        pos = [g for g in gens if dot(h, g) > 0]
        zero = [g for g in gens if dot(h, g) == 0]
        negs = [g for g in gens if dot(h, g) < 0]
        new = zero + negs
        for p in pos:
            dp = dot(h, p)
            for m in negs:
                dm = dot(h, m)
                combined = primitive(sub(scale(dp, m), scale(dm, p)))
                if not is_zero(combined):
                    new.append(combined)
        gens = _prune([primitive(g) for g in new])
    return tuple(sorted(gens))


def rows_from_rays(gens, dim: int) -> tuple[Vector, ...]:
    """H-form normals of the conic hull of ``gens`` (its polar's rays)."""
    return rays_from_rows(tuple(gens), dim)


def vertices_of_polytope(rows, dim: int) -> tuple[tuple[Vector, ...], tuple[Vector, ...]]:
    """Vertices and recession rays of {x : <n_i, x> <= c_i}.

    ``rows`` are (normal, rhs) pairs.  Works by enumerating the rays of
    the homogenization cone; a bounded polyhedron has no recession rays.
    """
    hom_rows = [tuple(n) + (-c,) for n, c in rows]
    hom_rows.append((_ZERO,) * dim + (Fraction(-1),))
    rays = rays_from_rows(hom_rows, dim + 1)
    verts: list[Vector] = []
    recession: list[Vector] = []
    for r in rays:
        t = r[dim]
        if t > 0:
            verts.append(tuple(x / t for x in r[:dim]))
        else:
            recession.append(r[:dim])
    return tuple(sorted(verts)), tuple(sorted(recession))
