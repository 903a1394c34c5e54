"""Dual-side constructions, separation values, and theorem conversions."""

from __future__ import annotations

import random
from fractions import Fraction as F

import pytest

from sepcert.cones import Cone, dist_to_cone, normal_cone
from sepcert.duality import (
    DualPair,
    FORM_NEAR_OPPOSITE,
    FORM_SMALL_SUM,
    balance_to_opposite,
    check_separation_condition,
    convert_conditions,
    difference_separation,
    directed_separation,
    dual_pair_from_shifts,
    limit_separation,
    nonlocal_separation,
    project_to_cones,
    separation_infimum,
    shifts_from_dual_pair,
    support_point_search,
    validate_dual_pair,
)
from sepcert.linalg import add, neg, vec, zero
from sepcert.norms import max_norm, sum_norm
from sepcert.polyhedra import ExactRegion, Polyhedron
from sepcert.systems import Level, SetSystem, ShiftWitness, verify_shift_witness

MAX2 = max_norm(2)
SUM2 = sum_norm(2)


def halfplane(nx, ny, c):
    return Polyhedron.make(2, [((F(nx), F(ny)), F(c))])


def region(*pieces):
    return ExactRegion.make(pieces[0].dim, pieces)


LOWER = region(halfplane(0, 1, 0))
UPPER = region(halfplane(0, -1, 0))
UPPER1 = region(halfplane(0, -1, -1))
TILTED = region(halfplane(1, 1, 0))

COMPLEMENTARY = SetSystem.make(LOWER, UPPER, vec(0, 0), vec(0, 0), MAX2)
CROSSING = SetSystem.make(LOWER, TILTED, vec(0, 0), vec(0, 0), MAX2)


def test_balance_to_opposite_fixed_point():
    k1 = Cone.from_generators([vec(1, 0)], 2)
    k2 = Cone.from_generators([vec(-1, 0)], 2)
    z1, z2 = vec("1/2", 0), vec("-1/2", 0)
    o1, o2 = balance_to_opposite(z1, z2, k1, k2, F(1, 2), SUM2)
    assert o1 == z1 and o2 == z2


def test_balance_to_opposite_worked_instance():
    # Hand-applied construction: z' = (z1 - z2)/2 then normalize.
    k1 = Cone.from_generators([vec(1, 0)], 2)
    k2 = Cone.from_generators([vec(-4, 1)], 2)
    z1 = vec("1/2", 0)
    z2 = vec("-2/5", "1/10")
    assert SUM2.eval(z1) + SUM2.eval(z2) == 1
    assert SUM2.eval(add(z1, z2)) == F(1, 5)
    o1, o2 = balance_to_opposite(z1, z2, k1, k2, F(1, 4), SUM2)
    assert o1 == vec("9/20", "-1/20") and o2 == neg(o1)
    bound = F(1, 4) / (2 * (1 - F(1, 4)))
    for o, k in ((o1, k1), (o2, k2)):
        d, _ = dist_to_cone(o, k, SUM2)
        assert d < bound


def test_balance_gate():
    k1 = Cone.from_generators([vec(1, 0)], 2)
    k2 = Cone.from_generators([vec(-4, 1)], 2)
    with pytest.raises(ValueError):
        balance_to_opposite(vec("1/2", 0), vec("-2/5", "1/10"), k1, k2, F(1, 5), SUM2)


def test_project_to_cones_worked_instance():
    k1 = Cone.from_generators([vec(1, 4)], 2)
    k2 = Cone.from_generators([vec(0, -1)], 2)
    z1, z2 = vec(0, "1/2"), vec(0, "-1/2")
    o1, o2 = project_to_cones(z1, z2, k1, k2, F(1, 4), SUM2)
    # Nearest points are (1/8, 1/2) and z2 itself; mass 9/8.
    assert o1 == vec("1/9", "4/9") and o2 == vec(0, "-4/9")
    assert SUM2.eval(add(o1, o2)) == F(1, 9)
    assert SUM2.eval(add(o1, o2)) < F(1, 4) / (1 - F(1, 4))


def test_project_identity_when_inside():
    k1 = Cone.from_generators([vec(0, 1)], 2)
    k2 = Cone.from_generators([vec(0, -1)], 2)
    z1, z2 = vec(0, "1/2"), vec(0, "-1/2")
    o1, o2 = project_to_cones(z1, z2, k1, k2, F(1, 8), SUM2)
    assert o1 == z1 and o2 == z2
    with pytest.raises(ValueError):
        project_to_cones(z1, z2, k1, k2, F(0), SUM2)


def test_limit_separation_values():
    sep = limit_separation(COMPLEMENTARY)
    assert sep.value == 0 and sep.zero_pair is not None
    sep = limit_separation(CROSSING)
    assert sep.value == 1 and sep.zero_pair is None


def test_separation_infimum_crossing_is_one():
    got = separation_infimum(CROSSING, F(1, 2))
    assert got.value == 1
    got = separation_infimum(COMPLEMENTARY, F(1, 2))
    assert got.value == 0


def test_check_separation_condition():
    v = check_separation_condition(COMPLEMENTARY, FORM_SMALL_SUM, F(1, 4))
    assert v.proved
    pair = v.certificate
    assert validate_dual_pair(pair, COMPLEMENTARY)
    v = check_separation_condition(CROSSING, FORM_SMALL_SUM, F(1, 2))
    assert v.refuted
    v = check_separation_condition(COMPLEMENTARY, FORM_NEAR_OPPOSITE, F(1, 4))
    assert v.proved
    assert validate_dual_pair(v.certificate, COMPLEMENTARY)
    v = check_separation_condition(CROSSING, FORM_NEAR_OPPOSITE, F(1, 2))
    assert v.refuted


def test_convert_conditions_round_trip():
    eps = F(1, 3)
    xi = eps / (1 + eps)
    v = check_separation_condition(COMPLEMENTARY, FORM_SMALL_SUM, xi)
    assert v.proved
    pair = v.certificate
    out = convert_conditions(pair, "ii_to_i", COMPLEMENTARY)
    assert out.form == FORM_NEAR_OPPOSITE and out.eps == eps
    assert validate_dual_pair(out, COMPLEMENTARY)
    # And back: the i-form pair at xi' converts to a ii-form at eps'.
    xi2 = out.eps / (1 + out.eps)
    inner = DualPair(out.aprime, out.bprime, out.astar, out.bstar, xi2,
                     FORM_NEAR_OPPOSITE)
    if validate_dual_pair(inner, COMPLEMENTARY):
        back = convert_conditions(inner, "i_to_ii", COMPLEMENTARY)
        assert back.form == FORM_SMALL_SUM
        assert validate_dual_pair(back, COMPLEMENTARY)


def test_support_point_search():
    got, cone = support_point_search(LOWER, vec(3, 0), F(1, 2), MAX2)
    assert got == vec(3, 0)
    assert cone.generators == (vec(0, 1),)
    with pytest.raises(ValueError):
        support_point_search(LOWER, vec(0, -1), F(1, 2), MAX2)  # interior
    # Union corner: a nearby point with a 2-generator cone exists.
    quad = region(Polyhedron.make(2, [((F(1), F(0)), F(0)), ((F(0), F(1)), F(0))]))
    got, cone = support_point_search(quad, vec(0, 0), F(1, 2), MAX2)
    assert len(cone.generators) == 2


def test_difference_separation_parallel():
    a_pt, b_pt, astar = difference_separation(LOWER, UPPER1, F(1, 4), MAX2)
    assert astar == vec(0, 1)
    assert a_pt[1] == 0 and b_pt[1] == 1
    assert MAX2.eval(vec(*[x - y for x, y in zip(a_pt, b_pt)])) < 1 + F(1, 4)
    # Complementary halfspaces: 0 on the boundary of A - B, still fine.
    a_pt, b_pt, astar = difference_separation(LOWER, UPPER, F(1, 4), MAX2)
    assert astar == vec(0, 1) and MAX2.eval(vec(*[x - y for x, y in zip(a_pt, b_pt)])) < F(1, 4)
    # Crossing halfplanes: 0 is interior to A - B, no separation there.
    with pytest.raises(ValueError):
        difference_separation(LOWER, TILTED, F(1, 4), MAX2)


def test_directed_separation_parallel():
    s = SetSystem.make(LOWER, UPPER1, vec(0, 0), vec(0, 1), MAX2)
    got = directed_separation(s, F(1, 2), F(1), F(1, 2))
    assert got is not None
    assert got.deviation < F(1, 2)
    assert got.direction_value >= 0
    # Tight direction factor still satisfiable on aligned faces.
    got = directed_separation(s, F(1, 2), F(1), F(9, 10))
    assert got is not None
    with pytest.raises(ValueError):
        directed_separation(COMPLEMENTARY, F(1, 2), F(1), F(1, 2))


def test_shifts_from_dual_pair():
    v = check_separation_condition(COMPLEMENTARY, FORM_SMALL_SUM, F(1, 4))
    w = shifts_from_dual_pair(v.certificate, COMPLEMENTARY, F(1, 8))
    assert w is not None
    assert w.rho is not None and w.rho < F(1, 8)
    assert verify_shift_witness(COMPLEMENTARY, w, F(1, 4), Level.APPROX_STATIONARY)


def test_dual_pair_from_shifts():
    eps = F(1, 4)
    rho = F(1, 16)
    w = ShiftWitness(u=vec(0, eps * rho / 2), v=zero(2), rho=rho,
                     aprime=vec(0, 0), bprime=vec(0, 0))
    delta = F(1, 16) * (eps + 1) + F(1, 100)
    pair = dual_pair_from_shifts(COMPLEMENTARY, w, eps, delta)
    assert pair is not None
    assert validate_dual_pair(pair, COMPLEMENTARY)
    with pytest.raises(ValueError):
        dual_pair_from_shifts(COMPLEMENTARY, w, eps, rho)  # delta below bound


def test_nonlocal_separation():
    # Parallel halfspaces: disjoint, hence relaxed-extremal automatically.
    s = SetSystem.make(LOWER, UPPER1, vec(0, 0), vec(0, 1), MAX2)
    v = nonlocal_separation(s, F(1, 2))
    assert v.proved
    pair = v.certificate
    assert validate_dual_pair(pair, s)
    # Complementary halfspaces: intersecting and extremal.
    v = nonlocal_separation(COMPLEMENTARY, F(1, 2))
    assert v.proved
    # Crossing halfplanes: 0 is interior to A - B, precondition fails.
    with pytest.raises(ValueError):
        nonlocal_separation(CROSSING, F(1, 2))


def test_lemma_bounds_randomized_small():
    rng = random.Random(20)
    violations = 0
    for _ in range(60):
        dim = rng.choice((2, 3))
        dn = rng.choice((sum_norm(dim), max_norm(dim)))
        g1 = vec(*[rng.randint(-3, 3) for _ in range(dim)])
        if all(c == 0 for c in g1):
            g1 = vec(*([1] + [0] * (dim - 1)))
        k1 = Cone.from_generators([g1], dim)
        w = vec(*[F(rng.randint(-2, 2), 8) for _ in range(dim)])
        z2_raw = add(neg(g1), w)
        k2 = Cone.from_generators([z2_raw], dim)
        s = dn.eval(g1) + dn.eval(z2_raw)
        z1 = vec(*[c / s for c in g1])
        z2 = vec(*[c / s for c in z2_raw])
        gap = dn.eval(add(z1, z2))
        if gap >= F(1, 2):
            continue
        eps = (gap + 1) / 2 if gap > 0 else F(1, 4)
        o1, o2 = balance_to_opposite(z1, z2, k1, k2, eps, dn)
        bound = eps / (2 * (1 - eps))
        for o, k in ((o1, k1), (o2, k2)):
            d, _ = dist_to_cone(o, k, dn)
            if d >= bound:
                violations += 1
    assert violations == 0
