"""Mapping view: evaluation, rates, and the product-space crosschecks."""

from __future__ import annotations

import random
from fractions import Fraction as F

import pytest

from sepcert.linalg import vec, zero
from sepcert.mappings import (
    MappingView,
    crosscheck_primal_dual,
    dom_s_region,
    estimate_rate,
    evaluate,
    intersection_region,
    product_boundary_condition,
)
from sepcert.norms import max_norm
from sepcert.polyhedra import ExactRegion, Polyhedron
from sepcert.systems import SetSystem

MAX2 = max_norm(2)


def halfplane(nx, ny, c):
    return Polyhedron.make(2, [((F(nx), F(ny)), F(c))])


def region(*pieces):
    return ExactRegion.make(pieces[0].dim, pieces)


LOWER = region(halfplane(0, 1, 0))
UPPER = region(halfplane(0, -1, 0))
TILTED = region(halfplane(1, 1, 0))

COMPLEMENTARY = SetSystem.make(LOWER, UPPER, vec(0, 0), vec(0, 0), MAX2)
CROSSING = SetSystem.make(LOWER, TILTED, vec(0, 0), vec(0, 0), MAX2)


def test_evaluate_basics():
    fa, fb = evaluate(MappingView(CROSSING, "F"), vec(0, 0))
    assert fa.contains(vec(0, -1)) and fb.contains(vec(-1, 0))
    s = evaluate(MappingView(CROSSING, "S"), (vec(0, 0), vec(0, 0)))
    assert s.contains(zero(2))  # 0 in S(a, b) always
    s2 = evaluate(MappingView(CROSSING, "S"), (vec(0, "1/4"), vec(0, 0)))
    assert not s2.is_empty


def test_graph_duality_sampled():
    rng = random.Random(2)
    view_s = MappingView(CROSSING, "S")
    for _ in range(60):
        x = vec(F(rng.randint(-4, 4), 4), F(rng.randint(-4, 4), 4))
        y = vec(F(rng.randint(-4, 4), 4), F(rng.randint(-4, 4), 4))
        z = vec(F(rng.randint(-4, 4), 4), F(rng.randint(-4, 4), 4))
        in_f = (CROSSING.A.translate(tuple(-c for c in x)).contains(y)
                and CROSSING.B.translate(tuple(-c for c in x)).contains(z))
        s_region = evaluate(view_s, (y, z))
        assert in_f == s_region.contains(x)


def test_dom_s_positions():
    dom = dom_s_region(CROSSING)
    assert dom.dim == 4
    # Crossing halfplanes always intersect, so dom S is everything.
    assert dom.contains(vec(5, -3, 2, 7))
    dom2 = dom_s_region(COMPLEMENTARY)
    assert dom2.contains(vec(0, 0, 0, 0))
    assert not dom2.contains(vec(0, "1/2", 0, "-1/2"))


def test_rates_crossing_positive_metric_regularity():
    est = estimate_rate(MappingView(CROSSING, "F"), "metric_regularity", F(1, 4))
    assert est.alpha_upper is None or est.alpha_upper > 0
    est = estimate_rate(MappingView(CROSSING, "F"), "aubin", F(1, 4))
    assert est.alpha_upper is None or est.alpha_upper > 0


def test_rates_complementary_hit_zero():
    est = estimate_rate(MappingView(COMPLEMENTARY, "F"), "metric_regularity", F(1, 4))
    assert est.alpha_upper == 0
    est = estimate_rate(MappingView(COMPLEMENTARY, "S"), "lipschitz_lsc", F(1, 4))
    assert est.alpha_upper == 0


def test_covering_rates():
    est = estimate_rate(MappingView(CROSSING, "F"), "covering", F(1, 4))
    assert est.alpha_lower > 0  # interior: covering holds with exact radius
    est = estimate_rate(MappingView(COMPLEMENTARY, "F"), "covering", F(1, 4))
    assert est.alpha_lower == 0 and est.alpha_upper == 0


def test_crosscheck_consistency():
    rep = crosscheck_primal_dual(CROSSING)
    assert rep.consistent and rep.dom_s_position == "interior"
    rep = crosscheck_primal_dual(COMPLEMENTARY)
    assert rep.consistent and rep.dom_s_position == "boundary"
    assert not rep.warnings


def test_product_boundary_condition():
    assert product_boundary_condition(COMPLEMENTARY).proved
    assert product_boundary_condition(CROSSING).refuted
    e423_a = region(Polyhedron.make(2, [((F(0), F(1)), F(0)), ((F(0), F(-1)), F(1))]))
    e423_b = region(Polyhedron.make(2, [((F(-1), F(0)), F(-1)),
                                        ((F(0), F(1)), F(1)),
                                        ((F("-1/2"), F(-1)), F(-1)),
                                        ((F(0), F(-1)), F("-1/8"))]))
    s = SetSystem.make(e423_a, e423_b, vec(1, -1), vec(1, 1), MAX2)
    assert product_boundary_condition(s).proved
