"""Geometry kernel: norms, distances, emptiness, Minkowski arithmetic."""

from __future__ import annotations

import random
from fractions import Fraction as F

import pytest

from sepcert.linalg import sub, vec
from sepcert.norms import max_norm, polytope_norm, product_norm, sum_norm
from sepcert.polyhedra import (
    ExactRegion,
    Polyhedron,
    bounding_intervals,
    dist_point_region,
    dist_region_region,
    intersect_empty,
    localize,
    minkowski_difference,
    product_reduction,
    union_position,
)
from sepcert.scalars import format_scalar, parse_scalar

MAX2 = max_norm(2)
SUM2 = sum_norm(2)


def halfplane(nx, ny, c):
    return Polyhedron.make(2, [((F(nx), F(ny)), F(c))])


def region(*pieces):
    return ExactRegion.make(pieces[0].dim, pieces)


LOWER = halfplane(0, 1, 0)          # x2 <= 0
UPPER1 = halfplane(0, -1, -1)       # x2 >= 1
QUADRANT = Polyhedron.make(2, [((F(1), F(0)), F(0)), ((F(0), F(1)), F(0))])


def test_scalar_round_trip():
    assert format_scalar(parse_scalar("-7/3")) == "-7/3"
    assert format_scalar(parse_scalar("42")) == "42"
    with pytest.raises(ValueError):
        parse_scalar("1.5")


def test_norm_eval_examples():
    assert MAX2.eval(vec(0, 0)) == 0
    assert MAX2.eval(vec(3, -4)) == 4
    assert SUM2.eval(vec(3, -4)) == 7
    diamond = polytope_norm([((F(1), F(1)), F(1)), ((F(1), F(-1)), F(1)),
                             ((F(-1), F(1)), F(1)), ((F(-1), F(-1)), F(1))])
    # Diamond with vertices +-e1, +-e2 is exactly the sum norm.
    assert diamond.eval(vec("1/2", "1/3")) == F(5, 6)
    assert diamond.same_ball(SUM2)


def test_dual_round_trip():
    assert MAX2.dual().same_ball(SUM2)
    assert SUM2.dual().same_ball(MAX2)
    assert MAX2.dual().dual().same_ball(MAX2)
    prod = product_norm([MAX2, MAX2])
    assert prod.dual().dual().same_ball(prod)
    # Dual of a product max-norm adds the factor dual norms.
    y = vec(1, 2, -3, 0)
    assert prod.dual().eval(y) == SUM2.eval(y[:2]) + SUM2.eval(y[2:])


def test_norm_axioms_randomized():
    rng = random.Random(7)
    for _ in range(50):
        u = vec(rng.randint(-5, 5), F(rng.randint(-10, 10), rng.randint(1, 7)))
        v = vec(rng.randint(-5, 5), F(rng.randint(-10, 10), rng.randint(1, 7)))
        t = F(rng.randint(-9, 9), rng.randint(1, 5))
        for n in (MAX2, SUM2):
            assert n.eval(tuple(a + b for a, b in zip(u, v))) <= n.eval(u) + n.eval(v)
            assert n.eval(tuple(t * a for a in u)) == abs(t) * n.eval(u)
            assert (n.eval(u) == 0) == (u == (0, 0))


def test_dist_point_region_examples():
    r = region(LOWER)
    d, w = dist_point_region(vec(-3, -1), r, MAX2)
    assert d == 0 and w == vec(-3, -1)
    d, w = dist_point_region(vec(0, 2), r, MAX2)
    assert d == 2 and LOWER.contains(w) and MAX2.eval(sub(vec(0, 2), w)) == 2
    d, w = dist_point_region(vec(1, 1), region(QUADRANT), SUM2)
    assert d == 2 and QUADRANT.contains(w)


def test_dist_region_region_examples():
    d, a, b = dist_region_region(region(LOWER), region(UPPER1), SUM2)
    assert d == 1
    assert LOWER.contains(a) and UPPER1.contains(b)
    assert SUM2.eval(sub(a, b)) == 1
    # Overlapping regions meet at distance zero with a common point.
    d, a, b = dist_region_region(region(LOWER), region(halfplane(0, -1, 0)), SUM2)
    assert d == 0 and a == b
    boxy_a = Polyhedron.make(2, [((F(1), F(0)), F(0)), ((F(0), F(1)), F(0))])
    boxy_b = Polyhedron.make(2, [((F(-1), F(0)), F(-2)), ((F(0), F(-1)), F(-1))])
    d, a, b = dist_region_region(region(boxy_a), region(boxy_b), MAX2)
    assert d == 2


def test_intersect_empty_certificates():
    chk = intersect_empty([LOWER, UPPER1])
    assert chk.empty
    assert chk.certificate.verify()
    assert chk.certificate.le_multipliers == (F(1), F(1))
    chk = intersect_empty([LOWER, halfplane(0, -1, 0)])
    assert not chk.empty
    assert LOWER.contains(chk.point)


def test_intersect_empty_open_ball():
    # Lower halfplane meets the open unit ball around (0,1) only on the
    # ball's boundary in the max norm, so the strict system is empty.
    strict = [(f, F(1) + f[1]) for f in MAX2.facets]
    chk = intersect_empty([LOWER], strict_rows=strict)
    assert chk.empty and chk.certificate.verify()


def test_minkowski_difference_examples():
    pt = lambda x, y: Polyhedron.make(2, [
        ((F(1), F(0)), F(x)), ((F(-1), F(0)), F(-x)),
        ((F(0), F(1)), F(y)), ((F(0), F(-1)), F(-y))])
    d = minkowski_difference(region(pt(2, 3)), region(pt(1, 1)))
    assert len(d.pieces) == 1
    assert d.contains(vec(1, 2)) and not d.contains(vec(0, 0))
    d = minkowski_difference(region(LOWER), region(UPPER1))
    assert d.contains(vec(5, -1)) and not d.contains(vec(0, F("-1/2")))


def test_minkowski_membership_sampled():
    rng = random.Random(3)
    A = region(QUADRANT)
    B = region(halfplane(1, 1, 1))
    D = minkowski_difference(A, B)
    for _ in range(40):
        x = vec(F(rng.randint(-8, 8), 2), F(rng.randint(-8, 8), 2))
        # x in A-B iff some b in B has x+b in A.
        direct = not intersect_empty(
            [B.pieces[0], QUADRANT.translate(tuple(-a for a in x))]).empty
        assert D.contains(x) == direct


def test_localize():
    plane = ExactRegion.make(2, [Polyhedron.whole_space(2)])
    sq = localize(plane, vec(0, 0), F(1), MAX2)
    assert sq.contains(vec(1, 1)) and not sq.contains(vec(1, F("9/8")))
    lower_diamond = localize(region(LOWER), vec(0, 0), F(1), SUM2)
    assert lower_diamond.contains(vec(0, -1))
    assert not lower_diamond.contains(vec(F("3/4"), F("-1/2")))
    far = region(halfplane(-1, 0, -10))  # x1 >= 10
    assert localize(far, vec(0, 0), F(1), MAX2).is_empty


def test_union_position_trichotomy():
    two = region(halfplane(0, 1, 0), halfplane(0, -1, 0))  # whole plane as union
    got = union_position(two, vec(0, 0))
    assert got.position == "interior"
    assert got.interior_certificate is not None
    one = region(LOWER)
    got = union_position(one, vec(3, 0))
    assert got.position == "boundary"
    w, tmax = got.escape.direction, got.escape.t_max
    assert w[1] > 0 and tmax > 0
    assert union_position(one, vec(0, 1)).position == "outside"


def test_union_position_needs_selections():
    # Union of two quadrants covering a halfplane plus more: the origin
    # is on the boundary (the open upper-left quadrant is missed).
    A = region(QUADRANT,
               Polyhedron.make(2, [((F(-1), F(0)), F(0)), ((F(0), F(-1)), F(0))]))
    got = union_position(A, vec(0, 0))
    assert got.position == "boundary"
    w = got.escape.direction
    assert (w[0] < 0 < w[1]) or (w[1] < 0 < w[0])


def test_bounding_intervals():
    box = Polyhedron.make(2, MAX2.ball_rows(vec(1, 0), F(2)))
    lo, hi = bounding_intervals(box)
    assert lo == vec(-1, -2) and hi == vec(3, 2)


def test_product_reduction_three_sets():
    A1 = region(LOWER)
    A2 = region(halfplane(1, 0, 0))
    A3 = region(halfplane(-1, -1, 0))
    a, b, pa, pb, norm = product_reduction(
        [A1, A2, A3], [vec(0, 0), vec(0, 0), vec(0, 0)], MAX2)
    assert a.dim == 4 and b.dim == 4 and norm.dim == 4
    # Diagonal membership: (x, x) with x in A3 = {x1 + x2 >= 0}.
    assert b.contains(vec(1, 0, 1, 0))
    assert not b.contains(vec(1, 0, 0, 1))
    assert not b.contains(vec(-1, 0, -1, 0))
    # A common point of the three halfplanes embeds into both product
    # sets, so the product pair intersects exactly when the sets do.
    common = vec(0, 0)
    assert all(r.contains(common) for r in (A1, A2, A3))
    assert a.contains(common + common) and b.contains(common + common)

    # n=2 is the identity pairing.
    ra, rb, qa, qb, n2 = product_reduction([A1, A2], [vec(0, 0), vec(0, 0)], MAX2)
    assert ra is A1 and rb is A2 and n2 is MAX2
