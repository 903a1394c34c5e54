"""Primal checks on the worked examples and their verdict chains."""

from __future__ import annotations

from fractions import Fraction as F

import pytest

from sepcert.linalg import vec, zero
from sepcert.norms import max_norm, sum_norm
from sepcert.polyhedra import ExactRegion, Polyhedron
from sepcert.primal import (
    check_relative_approx_stationary,
    check_relative_extremal,
    check_relative_locally_extremal,
    check_relative_stationary,
    check_translation_invariance,
    implication_chain,
    metric_char_approx_stationary,
    reduce_n_sets,
    stability_probe,
    witness_from_distance,
)
from sepcert.systems import Level, SetSystem, ShiftWitness, verify_shift_witness

MAX2 = max_norm(2)


def halfplane(nx, ny, c):
    return Polyhedron.make(2, [((F(nx), F(ny)), F(c))])


def region(*pieces):
    return ExactRegion.make(pieces[0].dim, pieces)


def system(A, B, a, b, norm=MAX2):
    return SetSystem.make(A, B, vec(*a), vec(*b), norm)


LOWER = region(halfplane(0, 1, 0))                       # x2 <= 0
UPPER = region(halfplane(0, -1, 0))                      # x2 >= 0
UPPER1 = region(halfplane(0, -1, -1))                    # x2 >= 1
TILTED = region(halfplane(1, 1, 0))                      # x1 + x2 <= 0
E312_A = region(halfplane(0, 1, 0), halfplane(1, 0, -1))
E312_B = region(Polyhedron.make(2, [((F(0), F(-1)), F(0)),
                                    ((F(2), F(-1)), F(1)),
                                    ((F(-2), F(-1)), F(1))]))
E423_A = region(Polyhedron.make(2, [((F(0), F(1)), F(0)), ((F(0), F(-1)), F(1))]))
E423_B = region(Polyhedron.make(2, [((F(-1), F(0)), F(-1)),
                                    ((F(0), F(1)), F(1)),
                                    ((F("-1/2"), F(-1)), F(-1)),
                                    ((F(0), F(-1)), F("-1/8"))]))

COMPLEMENTARY = system(LOWER, UPPER, (0, 0), (0, 0))
CROSSING = system(LOWER, TILTED, (0, 0), (0, 0))


def test_complementary_halfspaces_all_proved():
    report = implication_chain(COMPLEMENTARY)
    assert report.vector() == ("proved",) * 4
    assert report.convex_single_piece and report.all_equal


def test_crossing_halfplanes_all_refuted():
    report = implication_chain(CROSSING)
    assert report.vector() == ("refuted",) * 4
    assert report.all_equal


def test_whole_plane_refuted():
    plane = ExactRegion.make(2, [Polyhedron.whole_space(2)])
    s = system(plane, plane, (1, 2), (1, 2))
    assert check_relative_extremal(s).refuted


def test_e312_standin_verdicts():
    at_origin = system(E312_A, E312_B, (0, 0), (0, 0))
    assert check_relative_extremal(at_origin).refuted
    assert check_relative_locally_extremal(at_origin, F(1, 2)).proved
    assert check_relative_stationary(at_origin).proved
    assert check_relative_approx_stationary(at_origin).proved
    at_corner = system(E312_A, E312_B, (-1, 1), (-1, 1))
    assert check_relative_locally_extremal(at_corner, F(1, 4)).refuted
    assert check_relative_approx_stationary(at_corner).refuted


def test_e32_distance_witness():
    s = system(LOWER, UPPER1, (0, 0), (0, 1), norm=sum_norm(2))
    w = witness_from_distance(s, F(1, 4))
    assert w is not None
    assert w.u == vec(0, "1/8") and w.v == vec(0, "-1/8")
    assert verify_shift_witness(s, w, F(1, 4), Level.EXTREMAL)
    assert check_relative_extremal(s).proved


def test_e423_standin_extremal():
    s = system(E423_A, E423_B, (1, -1), (1, 1))
    assert check_relative_extremal(s).proved
    assert check_relative_approx_stationary(s).proved


def test_witness_size_gates():
    w = ShiftWitness(u=vec(0, "1/2"), v=zero(2), rho=F(1, 4))
    # max norm of shifts must be < eps * rho at the stationary level.
    assert not verify_shift_witness(COMPLEMENTARY, w, F(1, 2), Level.STATIONARY)
    good = ShiftWitness(u=vec(0, "1/32"), v=zero(2), rho=F(1, 4))
    assert verify_shift_witness(COMPLEMENTARY, good, F(1, 2), Level.STATIONARY)


def test_verify_example_shift():
    s = system(LOWER, UPPER, (0, 0), (0, 0))
    eps = F(1, 8)
    w = ShiftWitness(u=vec(0, eps / 2), v=zero(2))
    assert verify_shift_witness(s, w, eps, Level.EXTREMAL)
    w_bad = ShiftWitness(u=vec(0, -eps / 2), v=zero(2))
    assert not verify_shift_witness(s, w_bad, eps, Level.EXTREMAL)


def test_metric_characterization_matches_checks():
    assert metric_char_approx_stationary(COMPLEMENTARY, F(1, 4))
    assert not metric_char_approx_stationary(CROSSING, F(1, 4))


def test_translation_invariance():
    assert check_translation_invariance(CROSSING, vec(1, 0), vec(0, 1))
    assert check_translation_invariance(COMPLEMENTARY, vec("-3/2", 5), vec(2, "1/3"))


def test_stability_probe_complementary():
    rep = stability_probe(COMPLEMENTARY, F(1, 2), F(1, 4),
                          [(vec(0, 0), vec(0, 0)), (vec("1/4", 0), vec(0, "1/4"))])
    assert len(rep.results) == 2
    for _, _, w in rep.results:
        assert w.rho < F(1, 4)


def test_stability_probe_needs_stationarity():
    with pytest.raises(ValueError):
        stability_probe(CROSSING, F(1, 2), F(1, 4), [(vec(0, 0), vec(0, 0))])


def test_reduce_n_sets_chain():
    # Three halfplanes with lineal common structure: product reduction
    # must produce a working 4-dimensional system.
    s = reduce_n_sets([LOWER, UPPER, region(halfplane(1, 0, 0))],
                      [vec(0, 0), vec(0, 0), vec(0, 0)], MAX2)
    assert s.dim == 4
    v = check_relative_approx_stationary(s, schedule=(F(1, 2), F(1, 4)))
    assert v.status.value in ("proved", "refuted")
