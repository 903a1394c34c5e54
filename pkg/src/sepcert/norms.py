"""Polyhedral norms with exact evaluation and exact duals.

A norm is carried by two linked descriptions of its unit ball B:

* ``facets`` f with B = {x : <f, x> <= 1}, so ||v|| = max_f <f, v>;
* ``vertices`` p with B = conv{p}, so the dual norm is max_p <p, y>.

Polarity swaps the two lists, which makes ``dual()`` an involution with
no arithmetic at all.  Everything stays rational, so every ball, every
distance and every normalization constraint downstream is linear.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import lp
from .dd import vertices_of_polytope
from .linalg import Vector, check_dim, dot, neg, unit

_ZERO = Fraction(0)
_ONE = Fraction(1)


class InvalidNorm(ValueError):
    pass


@dataclass(frozen=True)
class PolyhedralNorm:
    kind: str
    dim: int
    facets: tuple[Vector, ...]
    vertices: tuple[Vector, ...]

    def eval(self, v: Vector) -> Fraction:
        """||v||, exactly."""
        check_dim(v, self.dim)
        return max(dot(f, v) for f in self.facets)

    def dual(self) -> PolyhedralNorm:
        return PolyhedralNorm(kind=f"dual({self.kind})", dim=self.dim,
                              facets=self.vertices, vertices=self.facets)

    def ball_rows(self, center: Vector, radius: Fraction) -> tuple[tuple[Vector, Fraction], ...]:
        """Rows of {x : ||x - center|| <= radius}."""
        check_dim(center, self.dim)
        return tuple((f, radius + dot(f, center)) for f in self.facets)

    def same_ball(self, other: PolyhedralNorm) -> bool:
        if self.dim != other.dim:
            return False
        mine = {tuple(v) for v in self.vertices}
        theirs = {tuple(v) for v in other.vertices}
        return mine == theirs


def max_norm(dim: int) -> PolyhedralNorm:
    facets = []
    for k in range(dim):
        facets.append(unit(dim, k))
        facets.append(neg(unit(dim, k)))
    vertices = [tuple(Fraction(s) for s in signs)
                for signs in itertools.product((-1, 1), repeat=dim)]
    return PolyhedralNorm("max", dim, tuple(facets), tuple(sorted(vertices)))


def sum_norm(dim: int) -> PolyhedralNorm:
    m = max_norm(dim)
    return PolyhedralNorm("sum", dim, facets=m.vertices, vertices=m.facets)


def polytope_norm(facet_rows) -> PolyhedralNorm:
    """Norm whose unit ball is {x : <n, x> <= c} for the given rows.

    The ball must be a symmetric bounded polytope with 0 in its
    interior; all three conditions are verified exactly.
    """
    rows = [(tuple(Fraction(a) for a in n), Fraction(c)) for n, c in facet_rows]
    if not rows:
        raise InvalidNorm("a polytope norm needs at least one facet row")
    dim = len(rows[0][0])
    if any(c <= 0 for _, c in rows):
        raise InvalidNorm("0 must be strictly inside the unit ball")
    scaled = [tuple(a / c for a in n) for n, c in rows]
    scaled = _prune_ball_facets(scaled, dim)
    verts, recession = vertices_of_polytope([(f, _ONE) for f in scaled], dim)
    if recession:
        raise InvalidNorm("unit ball is unbounded")
    if {tuple(neg(v)) for v in verts} != {tuple(v) for v in verts}:
        raise InvalidNorm("unit ball is not symmetric")
    return PolyhedralNorm("polytope", dim, tuple(sorted(scaled)), verts)


def product_norm(factors: list[PolyhedralNorm] | tuple[PolyhedralNorm, ...],
                 kind: str = "product-max") -> PolyhedralNorm:
    """Maximum norm on the product space: ||(x_1..x_k)|| = max ||x_i||_i."""
    factors = tuple(factors)
    dim = sum(n.dim for n in factors)
    facets: list[Vector] = []
    offset = 0
    for n in factors:
        for f in n.facets:
            facets.append((_ZERO,) * offset + tuple(f) + (_ZERO,) * (dim - offset - n.dim))
        offset += n.dim
    vertices = [sum(combo, ()) for combo in itertools.product(*(n.vertices for n in factors))]
    return PolyhedralNorm(kind, dim, tuple(facets), tuple(sorted(vertices)))


def _prune_ball_facets(facets: list[Vector], dim: int) -> list[Vector]:
    out = list(dict.fromkeys(facets))
    i = 0
    while i < len(out):
        rest = out[:i] + out[i + 1:]
        rows = [(f, _ONE) for f in rest]
        res = lp.solve(out[i], rows, maximize=True)
        if res.status is lp.LPStatus.OPTIMAL and res.value <= 1:
            del out[i]
        else:
            i += 1
    return out
