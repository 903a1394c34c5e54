"""Dual-side machinery: generalized separation certificates.

The two normalization constructions (`balance_to_opposite`,
`project_to_cones`) convert between the "unit vector nearly normal to
both sets" and the "exact normals with small sum" forms, with the exact
accuracy bounds re-verified on every call.

The separation infimum is the quantity deciding approximate
stationarity: the minimum of ||a* + b*|| over exact normals at nearby
points under the normalization ||a*|| + ||b*|| = 1.  For polyhedral
unions the available normal cones near a point stabilize to the local
fan, so the limit value is an exact rational, equal to zero precisely
when two cells carry opposite nonzero normals.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction

from . import lp
from .cones import Cone, dist_to_cone, normal_cone
from .errors import SoundnessError
from .linalg import Vector, add, dot, neg, scale, sub, zero
from .norms import PolyhedralNorm
from .polyhedra import (
    ExactRegion,
    dist_region_region,
    minkowski_difference,
    union_position,
)
from .structure import RegionCell, enumerate_region_cells, local_normal_fan, local_structure
from .systems import (
    SetSystem,
    ShiftWitness,
    Verdict,
    proved,
    refuted,
    shifted_intersection_empty,
    unknown,
)

logger = logging.getLogger(__name__)

_ZERO = Fraction(0)
_ONE = Fraction(1)
_HALF = Fraction(1, 2)
_TWO = Fraction(2)

FORM_NEAR_OPPOSITE = "i"     # one unit vector close to both normal cones
FORM_SMALL_SUM = "ii"        # exact normals, unit norm sum, small vector sum
FORM_RELATIVE_GAP = "iii"    # ||a*+b*|| < eps * (||a*|| + ||b*||)


@dataclass(frozen=True)
class DualPair:
    aprime: Vector
    bprime: Vector
    astar: Vector
    bstar: Vector
    eps: Fraction
    form: str = FORM_SMALL_SUM


def validate_dual_pair(pair: DualPair, system: SetSystem) -> bool:
    """Exact re-check of a dual pair in its stated form."""
    dn = system.dual_norm
    if not (system.A.contains(pair.aprime) and system.B.contains(pair.bprime)):
        return False
    if pair.form == FORM_NEAR_OPPOSITE:
        if dn.eval(pair.astar) != 1 or pair.bstar != neg(pair.astar):
            return False
        ka = normal_cone(system.A, pair.aprime)
        kb = normal_cone(system.B, pair.bprime)
        da, _ = dist_to_cone(pair.astar, ka, dn)
        db, _ = dist_to_cone(neg(pair.astar), kb, dn)
        return da < pair.eps and db < pair.eps
    ka = normal_cone(system.A, pair.aprime)
    kb = normal_cone(system.B, pair.bprime)
    if not (ka.contains(pair.astar) and kb.contains(pair.bstar)):
        return False
    na, nb = dn.eval(pair.astar), dn.eval(pair.bstar)
    ns = dn.eval(add(pair.astar, pair.bstar))
    if pair.form == FORM_SMALL_SUM:
        return na + nb == 1 and ns < pair.eps
    if pair.form == FORM_RELATIVE_GAP:
        return (na + nb) > 0 and ns < pair.eps * (na + nb)
    raise ValueError(f"unknown dual form {pair.form!r}")


def audit_dual_pair(pair: DualPair, system: SetSystem, context: str) -> None:
    if not validate_dual_pair(pair, system):
        raise SoundnessError(f"constructed dual pair failed validation in {context}")


# ---------------------------------------------------------------------------
# The two normalization constructions


def balance_to_opposite(z1: Vector, z2: Vector, k1: Cone, k2: Cone,
                        eps: Fraction, dn: PolyhedralNorm) -> tuple[Vector, Vector]:
    """From cone members with unit norm sum and small vector sum, build
    an exactly opposite pair staying eps/(2(1-eps))-close to the cones."""
    if not (0 < eps < 1):
        raise ValueError("eps must lie in (0, 1)")
    if dn.eval(z1) + dn.eval(z2) != 1:
        raise ValueError("input norms must sum to one")
    if dn.eval(add(z1, z2)) >= eps:
        raise ValueError("input vector sum must be smaller than eps")
    if not (k1.contains(z1) and k2.contains(z2)):
        raise ValueError("inputs must belong to their cones")
    half_diff = scale(_HALF, sub(z1, z2))
    s = dn.eval(half_diff) + dn.eval(neg(half_diff))
    zh1 = scale(_ONE / s, half_diff)
    zh2 = neg(zh1)
    bound = eps / (2 * (1 - eps))
    if dn.eval(zh1) + dn.eval(zh2) != 1 or add(zh1, zh2) != zero(len(z1)):
        raise SoundnessError("balanced pair lost its normalization")
    for zh, k in ((zh1, k1), (zh2, k2)):
        d, _ = dist_to_cone(zh, k, dn)
        if d >= bound:
            raise SoundnessError("balanced pair exceeded the accuracy bound")
    return zh1, zh2


def project_to_cones(z1: Vector, z2: Vector, k1: Cone, k2: Cone,
                     eps: Fraction, dn: PolyhedralNorm) -> tuple[Vector, Vector]:
    """From an exactly opposite unit-sum pair close to the cones, build
    cone members with unit norm sum and vector sum below eps/(1-eps)."""
    if not (0 < eps < 1):
        raise ValueError("eps must lie in (0, 1)")
    if dn.eval(z1) + dn.eval(z2) != 1:
        raise ValueError("input norms must sum to one")
    if add(z1, z2) != zero(len(z1)):
        raise ValueError("inputs must be exactly opposite")
    d1, y1 = dist_to_cone(z1, k1, dn)
    d2, y2 = dist_to_cone(z2, k2, dn)
    if d1 + d2 >= eps:
        raise ValueError("inputs are not close enough to the cones")
    s = dn.eval(y1) + dn.eval(y2)
    if s <= 1 - eps:
        raise SoundnessError("projected pair lost too much mass")
    zh1 = scale(_ONE / s, y1)
    zh2 = scale(_ONE / s, y2)
    if not (k1.contains(zh1) and k2.contains(zh2)):
        raise SoundnessError("projected pair left its cones")
    if dn.eval(zh1) + dn.eval(zh2) != 1:
        raise SoundnessError("projected pair lost its normalization")
    if dn.eval(add(zh1, zh2)) >= eps / (1 - eps):
        raise SoundnessError("projected pair exceeded the accuracy bound")
    return zh1, zh2


# ---------------------------------------------------------------------------
# Separation infimum


@dataclass(frozen=True)
class OppositePair:
    """Nonzero z normal to A at a nearby point with -z normal to B."""

    astar: Vector
    cell_a_direction: Vector
    cell_b_direction: Vector
    aprime: Vector
    bprime: Vector


@dataclass(frozen=True)
class LimitSeparation:
    """Exact limit of the separation infimum as the locality shrinks.

    ``value`` is None when no normalized pair exists at all (both fans
    trivial); ``zero_pair`` is set exactly when the value is zero.
    """

    value: Fraction | None
    zero_pair: OppositePair | None


@dataclass(frozen=True)
class SeparationValue:
    value: Fraction | None
    attained_at: tuple[RegionCell, RegionCell] | None
    astar: Vector | None
    bstar: Vector | None


def _min_sum_over_cones(ka: Cone, kb: Cone, dn: PolyhedralNorm):
    """min ||a*+b*|| s.t. a* in ka, b* in kb, ||a*||+||b*|| = 1.

    The norm equalities are linearized by enumerating, for each side,
    the dual-ball facet attaining the norm; every subproblem is an LP.
    Returns (value, astar, bstar) or None when infeasible (both cones
    trivial)."""
    ga, gb = ka.generators, kb.generators
    na, nb = len(ga), len(gb)
    if na + nb == 0:
        return None
    best = None
    facets = dn.facets
    for fp in facets:
        for fq in facets:
            # Variables: lambda (na), mu (nb), t.
            nv = na + nb + 1
            rows: list[tuple[Vector, Fraction]] = []
            for fm in facets:
                coeffs = [dot(fm, g) for g in ga] + [dot(fm, g) for g in gb] + [Fraction(-1)]
                rows.append((tuple(coeffs), _ZERO))
            for fm in facets:
                ca = [dot(fm, g) - dot(fp, g) for g in ga] + [_ZERO] * nb + [_ZERO]
                rows.append((tuple(ca), _ZERO))
                cb = [_ZERO] * na + [dot(fm, g) - dot(fq, g) for g in gb] + [_ZERO]
                rows.append((tuple(cb), _ZERO))
            for i in range(na + nb):
                e = [_ZERO] * nv
                e[i] = Fraction(-1)
                rows.append((tuple(e), _ZERO))
            norm_row = tuple([dot(fp, g) for g in ga] + [dot(fq, g) for g in gb] + [_ZERO])
            eq = [(norm_row, _ONE)]
            obj = (_ZERO,) * (na + nb) + (_ONE,)
            res = lp.solve(obj, rows, eq)
            if res.status is not lp.LPStatus.OPTIMAL:
                continue
            lam = res.x[:na]
            mu = res.x[na:na + nb]
            astar = zero(ka.dim)
            for li, g in zip(lam, ga):
                astar = add(astar, scale(li, g))
            bstar = zero(kb.dim)
            for mi, g in zip(mu, gb):
                bstar = add(bstar, scale(mi, g))
            # The sector rows make t exactly the dual norm of the sum.
            value = dn.eval(add(astar, bstar))
            if dn.eval(astar) + dn.eval(bstar) != 1:
                continue
            if best is None or value < best[0]:
                best = (value, astar, bstar)
    return best


def limit_separation(system: SetSystem) -> LimitSeparation:
    """Exact eps->0 limit of the separation infimum, via the local fans.

    Zero iff some fan cell of A and some fan cell of B carry opposite
    nonzero normals; then the pair of relocated points is returned and
    audited.  Otherwise the positive minimum (or None for interior-type
    points with no nontrivial normals anywhere nearby)."""
    fan_a = local_normal_fan(system.A, system.a)
    fan_b = local_normal_fan(system.B, system.b)
    for ca in fan_a:
        if ca.cone.is_trivial:
            continue
        for cb in fan_b:
            if cb.cone.is_trivial:
                continue
            inter = ca.cone.intersect(cb.cone.negate())
            if inter.generators:
                z = inter.generators[0]
                aprime = _cell_point(system, system.A, system.a, ca.direction)
                bprime = _cell_point(system, system.B, system.b, cb.direction)
                if not normal_cone(system.A, aprime).contains(z):
                    raise SoundnessError("fan cell lost its normal on relocation (A)")
                if not normal_cone(system.B, bprime).contains(neg(z)):
                    raise SoundnessError("fan cell lost its normal on relocation (B)")
                pair = OppositePair(z, ca.direction, cb.direction, aprime, bprime)
                return LimitSeparation(_ZERO, pair)
    best = None
    dn = system.dual_norm
    seen = set()
    for ca in fan_a:
        for cb in fan_b:
            key = (ca.cone.generators, cb.cone.generators)
            if key in seen:
                continue
            seen.add(key)
            got = _min_sum_over_cones(ca.cone, cb.cone, dn)
            if got is None:
                continue
            if got[0] == 0:
                raise SoundnessError("zero separation value escaped the fan pair test")
            if best is None or got[0] < best:
                best = got[0]
    return LimitSeparation(best, None)


def _cell_point(system: SetSystem, region, point: Vector, direction: Vector) -> Vector:
    if all(c == 0 for c in direction):
        return point
    ls = local_structure(region, point, system.norm)
    t = ls.radius / (2 * system.norm.eval(direction))
    return add(point, scale(t, direction))


def separation_infimum(system: SetSystem, locality: Fraction,
                       face_cap: int = 10_000) -> SeparationValue:
    """Exact infimum of ||a*+b*|| over normalized exact normals at cells
    meeting the open locality balls around the reference points."""
    if locality <= 0:
        raise ValueError("locality must be positive")
    cells_a = enumerate_region_cells(system.A, system.a, locality, system.norm, face_cap)
    cells_b = enumerate_region_cells(system.B, system.b, locality, system.norm, face_cap)
    dn = system.dual_norm
    best: tuple | None = None
    for ca in cells_a:
        for cb in cells_b:
            got = _min_sum_over_cones(ca.cone, cb.cone, dn)
            if got is None:
                continue
            if best is None or got[0] < best[0]:
                best = (got[0], ca, cb, got[1], got[2])
    if best is None:
        return SeparationValue(None, None, None, None)
    return SeparationValue(best[0], (best[1], best[2]), best[3], best[4])


# ---------------------------------------------------------------------------
# Separation conditions at a given eps


def check_separation_condition(system: SetSystem, form: str, eps: Fraction,
                               face_cap: int = 10_000) -> Verdict:
    """Decide the generalized separation condition in the given form at
    the given eps, with a concrete dual pair or the exact obstruction."""
    if not (0 < eps < 1):
        raise ValueError("eps must lie in (0, 1)")
    if form in (FORM_SMALL_SUM, FORM_RELATIVE_GAP):
        sep = separation_infimum(system, eps, face_cap)
        if sep.value is not None and sep.value < eps:
            pair = DualPair(sep.attained_at[0].representative,
                            sep.attained_at[1].representative,
                            sep.astar, sep.bstar, eps, form)
            audit_dual_pair(pair, system, "check_separation_condition")
            return proved(pair, detail=f"separation value {sep.value}")
        return refuted(sep, detail=f"separation value {sep.value} >= {eps}")
    if form != FORM_NEAR_OPPOSITE:
        raise ValueError(f"unknown separation form {form!r}")
    cells_a = enumerate_region_cells(system.A, system.a, eps, system.norm, face_cap)
    cells_b = enumerate_region_cells(system.B, system.b, eps, system.norm, face_cap)
    best = None
    for ca in cells_a:
        for cb in cells_b:
            got = _min_deviation_unit(ca.cone, cb.cone, system.dual_norm)
            if got is None:
                continue
            if best is None or got[0] < best[0]:
                best = (got[0], ca, cb, got[1])
    if best is not None and best[0] < eps:
        pair = DualPair(best[1].representative, best[2].representative,
                        best[3], neg(best[3]), eps, FORM_NEAR_OPPOSITE)
        audit_dual_pair(pair, system, "check_separation_condition")
        return proved(pair, detail=f"deviation {best[0]}")
    return refuted(best[0] if best else None,
                   detail="no unit vector is eps-close to both normal cones")


def _min_deviation_unit(ka: Cone, kb: Cone, dn: PolyhedralNorm):
    """min max(d(a*, ka), d(-a*, kb)) over the dual unit sphere.

    Linearized over the facet of the dual ball attaining ||a*|| = 1.
    Returns (value, astar) or None if the sphere section is empty."""
    d = ka.dim
    ga, gb = ka.generators, kb.generators
    na, nb = len(ga), len(gb)
    best = None
    for fp in dn.facets:
        # Variables: astar (d), lambda (na), mu (nb), t.
        nv = d + na + nb + 1
        rows: list[tuple[Vector, Fraction]] = []
        for fm in dn.facets:
            # <fm, astar - sum lam g> <= t
            coeffs = list(fm) + [-dot(fm, g) for g in ga] + [_ZERO] * nb + [Fraction(-1)]
            rows.append((tuple(coeffs), _ZERO))
            # <fm, -astar - sum mu g> <= t
            coeffs = [-x for x in fm] + [_ZERO] * na + [-dot(fm, g) for g in gb] + [Fraction(-1)]
            rows.append((tuple(coeffs), _ZERO))
            # sector: <fm, astar> <= <fp, astar> = 1
            if fm != fp:
                rows.append((tuple(x - y for x, y in zip(fm, fp)) + (_ZERO,) * (na + nb + 1),
                             _ZERO))
        for i in range(na + nb):
            e = [_ZERO] * nv
            e[d + i] = Fraction(-1)
            rows.append((tuple(e), _ZERO))
        eq = [(tuple(fp) + (_ZERO,) * (na + nb + 1), _ONE)]
        obj = (_ZERO,) * (d + na + nb) + (_ONE,)
        res = lp.solve(obj, rows, eq)
        if res.status is not lp.LPStatus.OPTIMAL:
            continue
        astar = res.x[:d]
        value = res.value
        if dn.eval(astar) != 1:
            continue
        if best is None or value < best[0]:
            best = (value, astar)
    return best


def convert_conditions(pair: DualPair, direction: str, system: SetSystem) -> DualPair:
    """Translate a dual pair between its two forms.

    The source must be valid at xi = eps/(1+eps); the output is valid at
    eps and re-verified.  The accuracy loss is exactly the composition
    of the two normalization constructions."""
    xi = pair.eps
    eps = xi / (1 - xi)
    dn = system.dual_norm
    ka = normal_cone(system.A, pair.aprime)
    kb = normal_cone(system.B, pair.bprime)
    if direction == "ii_to_i":
        if pair.form != FORM_SMALL_SUM or not validate_dual_pair(pair, system):
            raise ValueError("source pair is not a valid small-sum pair")
        zh1, zh2 = balance_to_opposite(pair.astar, pair.bstar, ka, kb, xi, dn)
        astar = scale(_TWO, zh1)
        out = DualPair(pair.aprime, pair.bprime, astar, neg(astar), eps,
                       FORM_NEAR_OPPOSITE)
        audit_dual_pair(out, system, "convert_conditions ii->i")
        return out
    if direction == "i_to_ii":
        if pair.form != FORM_NEAR_OPPOSITE or not validate_dual_pair(pair, system):
            raise ValueError("source pair is not a valid near-opposite pair")
        z1 = scale(_HALF, pair.astar)
        z2 = neg(z1)
        zh1, zh2 = project_to_cones(z1, z2, ka, kb, xi, dn)
        out = DualPair(pair.aprime, pair.bprime, zh1, zh2, eps, FORM_SMALL_SUM)
        audit_dual_pair(out, system, "convert_conditions i->ii")
        return out
    raise ValueError(f"unknown conversion direction {direction!r}")


# ---------------------------------------------------------------------------
# Support points and difference separation


def support_point_search(region: ExactRegion, xbar: Vector, eps: Fraction,
                         norm: PolyhedralNorm) -> tuple[Vector, Cone]:
    """A point of the region within the open eps-ball of a boundary
    point carrying a nontrivial normal cone."""
    pos = union_position(region, xbar)
    if pos.position != "boundary":
        raise ValueError(f"support search needs a boundary point, got {pos.position}")
    fan = local_normal_fan(region, xbar)
    order = sorted(fan, key=lambda c: (any(x != 0 for x in c.direction),
                                       c.active_signature))
    for cell in order:
        if cell.cone.is_trivial:
            continue
        if all(c == 0 for c in cell.direction):
            return xbar, cell.cone
        ls = local_structure(region, xbar, norm)
        t = min(ls.radius, eps) / (2 * norm.eval(cell.direction))
        point = add(xbar, scale(t, cell.direction))
        got = normal_cone(region, point)
        if got.is_trivial:
            raise SoundnessError("fan promised a nontrivial normal cone")
        return point, got
    raise SoundnessError("boundary point of a polyhedral union with no support points nearby")


def difference_separation(a_region: ExactRegion, b_region: ExactRegion, eps: Fraction,
                          norm: PolyhedralNorm,
                          dual_norm: PolyhedralNorm | None = None):
    """(a, b, a*) with ||a*||_dual = 1, a* normal to A at a, -a* normal
    to B at b, and ||a - b|| < d(A, B) + eps.

    Works on the difference set: its boundary near the scaled closest
    pair carries a support point whose normal splits over A and B."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    dn = dual_norm if dual_norm is not None else norm.dual()
    diff = minkowski_difference(a_region, b_region)
    dim = diff.dim
    pos = union_position(diff, zero(dim))
    if pos.position == "interior":
        raise ValueError("0 is interior to A - B: the sets admit no separation here")
    if pos.position == "boundary":
        target = zero(dim)
    else:
        d, ap, bp = dist_region_region(a_region, b_region, norm)
        ray_pt = sub(ap, bp)
        t_bar = None
        for piece in diff.pieces:
            rows = [((dot(n, ray_pt),), c) for n, c in piece.rows]
            rows.append(((Fraction(-1),), _ZERO))
            rows.append(((_ONE,), _ONE))
            res = lp.solve((_ONE,), rows)
            if res.status is lp.LPStatus.OPTIMAL:
                if t_bar is None or res.x[0] < t_bar:
                    t_bar = res.x[0]
        if t_bar is None or t_bar <= 0:
            raise SoundnessError("closest-pair segment misses the difference set")
        target = scale(t_bar, ray_pt)
    q, cone = support_point_search(diff, target, eps * _HALF, norm)
    z = cone.generators[0]
    astar = scale(_ONE / dn.eval(z), z)
    a_pt, b_pt = _split_difference_point(a_region, b_region, q)
    if not normal_cone(a_region, a_pt).contains(astar):
        raise SoundnessError("difference normal failed to split over A")
    if not normal_cone(b_region, b_pt).contains(neg(astar)):
        raise SoundnessError("difference normal failed to split over B")
    d_ab, _, _ = dist_region_region(a_region, b_region, norm)
    if norm.eval(sub(a_pt, b_pt)) >= d_ab + eps:
        raise SoundnessError("split pair drifted beyond d(A,B) + eps")
    return a_pt, b_pt, astar


def _split_difference_point(a_region: ExactRegion, b_region: ExactRegion,
                            q: Vector) -> tuple[Vector, Vector]:
    d = a_region.dim
    for pa in a_region.pieces:
        for pb in b_region.pieces:
            rows: list[tuple[Vector, Fraction]] = []
            for n, c in pa.rows:
                rows.append((tuple(n) + (_ZERO,) * d, c))
            for n, c in pb.rows:
                rows.append(((_ZERO,) * d + tuple(n), c))
            eq = []
            for k in range(d):
                e = [_ZERO] * (2 * d)
                e[k] = _ONE
                e[d + k] = Fraction(-1)
                eq.append((tuple(e), q[k]))
            res = lp.feasible_point(rows, eq)
            if res.status is lp.LPStatus.OPTIMAL:
                return res.x[:d], res.x[d:]
    raise SoundnessError("difference point admits no decomposition")


# ---------------------------------------------------------------------------
# Directed separation for disjoint sets (with the direction condition)


@dataclass(frozen=True)
class DirectedSeparation:
    """Directed near-separation of a disjoint pair.

    The alignment condition is oriented so that it can coexist with the
    near-normality: a* close to N_A(a') points from A towards B, so it
    aligns with b' - a' (on parallel halfspaces any other orientation is
    exactly infeasible)."""

    aprime: Vector
    bprime: Vector
    astar: Vector
    deviation: Fraction          # d(a*, N_A(a')) + d(-a*, N_B(b'))
    direction_value: Fraction    # <a*, b' - a'> - tau * ||b' - a'||, >= 0
    refined: DualPair | None     # exact normals with small sum


def directed_separation(system: SetSystem, eps: Fraction, lam: Fraction,
                        tau: Fraction, with_direction: bool = True,
                        face_cap: int = 10_000) -> DirectedSeparation | None:
    """For disjoint sets with ||a-b|| < d(A,B) + eps: a unit a* nearly
    normal to A and nearly anti-normal to B at points within lam of the
    reference pair, aligned with a' - b' up to factor tau.

    Returns None (and logs) only on search-cap exhaustion; existence is
    guaranteed, so None flags a budget problem, not a refutation."""
    if not (lam > 0 and 0 < tau < 1 and 0 < eps < lam):
        raise ValueError("need lam > 0, tau in (0,1), eps in (0, lam)")
    d_ab, _, _ = dist_region_region(system.A, system.B, system.norm)
    if d_ab == 0:
        raise ValueError("directed separation needs disjoint sets")
    if system.norm.eval(sub(system.a, system.b)) >= d_ab + eps:
        raise ValueError("reference pair does not nearly attain the distance")
    dn = system.dual_norm
    cells_a = enumerate_region_cells(system.A, system.a, lam, system.norm, face_cap)
    cells_b = enumerate_region_cells(system.B, system.b, lam, system.norm, face_cap)
    bound = eps / lam
    for ca in cells_a:
        for cb in cells_b:
            gap = sub(cb.representative, ca.representative)
            gap_norm = system.norm.eval(gap)
            got = _directed_pair_lp(ca.cone, cb.cone, dn, gap, tau * gap_norm
                                    if with_direction else None)
            if got is None or got[0] >= bound:
                continue
            deviation, astar = got
            direction_value = dot(astar, gap) - tau * gap_norm
            refined = None
            half = scale(_HALF, astar)
            if deviation * _HALF < bound * _HALF:
                zh1, zh2 = project_to_cones(half, neg(half), ca.cone, cb.cone,
                                            bound * _HALF, dn)
                refined = DualPair(ca.representative, cb.representative, zh1, zh2,
                                   bound * _HALF / (1 - bound * _HALF), FORM_SMALL_SUM)
                audit_dual_pair(refined, system, "directed_separation refinement")
            return DirectedSeparation(ca.representative, cb.representative, astar,
                                      deviation, direction_value, refined)
    logger.warning("directed separation: no candidate within the cell cap")
    return None


def _directed_pair_lp(ka: Cone, kb: Cone, dn: PolyhedralNorm, gap: Vector,
                      direction_rhs: Fraction | None):
    """min d(a*, ka) + d(-a*, kb) over the dual sphere, optionally under
    the alignment constraint <a*, gap> >= direction_rhs."""
    d = ka.dim
    ga, gb = ka.generators, kb.generators
    na, nb = len(ga), len(gb)
    best = None
    for fp in dn.facets:
        # Variables: astar (d), lam (na), mu (nb), t1, t2.
        nv = d + na + nb + 2
        rows: list[tuple[Vector, Fraction]] = []
        for fm in dn.facets:
            coeffs = list(fm) + [-dot(fm, g) for g in ga] + [_ZERO] * nb + [Fraction(-1), _ZERO]
            rows.append((tuple(coeffs), _ZERO))
            coeffs = [-x for x in fm] + [_ZERO] * na + [-dot(fm, g) for g in gb] + [_ZERO, Fraction(-1)]
            rows.append((tuple(coeffs), _ZERO))
            if fm != fp:
                rows.append((tuple(x - y for x, y in zip(fm, fp)) + (_ZERO,) * (na + nb + 2),
                             _ZERO))
        for i in range(na + nb):
            e = [_ZERO] * nv
            e[d + i] = Fraction(-1)
            rows.append((tuple(e), _ZERO))
        if direction_rhs is not None:
            rows.append((tuple(-x for x in gap) + (_ZERO,) * (na + nb + 2), -direction_rhs))
        eq = [(tuple(fp) + (_ZERO,) * (na + nb + 2), _ONE)]
        obj = (_ZERO,) * (d + na + nb) + (_ONE, _ONE)
        res = lp.solve(obj, rows, eq)
        if res.status is not lp.LPStatus.OPTIMAL:
            continue
        astar = res.x[:d]
        if dn.eval(astar) != 1:
            continue
        if best is None or res.value < best[0]:
            best = (res.value, astar)
    return best


# ---------------------------------------------------------------------------
# Forward and backward conversions between shifts and dual pairs


def shifts_from_dual_pair(pair: DualPair, system: SetSystem, delta: Fraction,
                          max_halvings: int = 12) -> ShiftWitness | None:
    """From exact normals with small sum, produce verified shifts: with
    gamma = eps - ||a*+b*|| > 0, shifting each set along the vertex
    attaining its normal's norm empties the local intersection."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if pair.form != FORM_SMALL_SUM or not validate_dual_pair(pair, system):
        raise ValueError("need a valid small-sum dual pair")
    dn = system.dual_norm
    gamma = pair.eps - dn.eval(add(pair.astar, pair.bstar))
    c = pair.eps - gamma * _HALF
    p_a = max(dn.facets, key=lambda f: dot(f, pair.astar))
    p_b = max(dn.facets, key=lambda f: dot(f, pair.bstar))
    ls_a = local_structure(system.A, pair.aprime, system.norm)
    ls_b = local_structure(system.B, pair.bprime, system.norm)
    rho = min(delta * _HALF, min(ls_a.radius, ls_b.radius) / (1 + pair.eps))
    for _ in range(max_halvings):
        w = ShiftWitness(u=scale(c * rho, p_a), v=scale(c * rho, p_b), rho=rho,
                         aprime=pair.aprime, bprime=pair.bprime)
        chk = shifted_intersection_empty(system, pair.aprime, pair.bprime,
                                         w.u, w.v, rho)
        size = max(system.norm.eval(w.u), system.norm.eval(w.v))
        if chk.empty and size < pair.eps * rho and rho < delta:
            return w
        rho = rho * _HALF
    logger.warning("shifts_from_dual_pair: halving budget exhausted")
    return None


def dual_pair_from_shifts(system: SetSystem, witness: ShiftWitness, eps: Fraction,
                          delta: Fraction, face_cap: int = 10_000) -> DualPair | None:
    """From verified shifts at (eps, rho), a small-sum dual pair at eps
    within the open delta-balls; delta must exceed the displacement of
    the witness points plus rho * (eps + 1)."""
    if witness.rho is None or witness.rho <= 0:
        raise ValueError("the witness must carry a finite positive rho")
    base_a = witness.aprime if witness.aprime is not None else system.a
    base_b = witness.bprime if witness.bprime is not None else system.b
    size = max(system.norm.eval(witness.u), system.norm.eval(witness.v))
    if size >= eps * witness.rho:
        raise ValueError("witness shifts are not below eps * rho")
    if not shifted_intersection_empty(system, base_a, base_b,
                                      witness.u, witness.v, witness.rho).empty:
        raise ValueError("witness does not empty the shifted intersection")
    moved = max(system.norm.eval(sub(base_a, system.a)),
                system.norm.eval(sub(base_b, system.b)))
    if delta <= moved + witness.rho * (eps + 1):
        raise ValueError("delta is below the displacement bound")
    sep = separation_infimum(system, delta, face_cap)
    if sep.value is None or sep.value >= eps:
        raise SoundnessError(
            "a verified shift witness admits no dual pair within the delta ball")
    pair = DualPair(sep.attained_at[0].representative,
                    sep.attained_at[1].representative,
                    sep.astar, sep.bstar, eps, FORM_SMALL_SUM)
    audit_dual_pair(pair, system, "dual_pair_from_shifts")
    return pair


def nonlocal_separation(system: SetSystem, eps: Fraction,
                        face_cap: int = 10_000) -> Verdict:
    """Separation for pairs extremal in the relaxed, nonlocal sense: the
    proximity constraint becomes ||a - b|| < d(A, B) + eps.

    Small shifts make the sets disjoint, the directed separation of the
    shifted pair yields exact normals, and the result maps back."""
    if not (0 < eps < 1):
        raise ValueError("eps must lie in (0, 1)")
    diff = minkowski_difference(system.A, system.B)
    pos = union_position(diff, zero(system.dim))
    if pos.position == "interior":
        raise ValueError("the pair is not extremal in the relaxed sense")
    eps_small = eps / 16
    if pos.position == "boundary":
        t = min(pos.escape.t_max, eps_small / (2 * system.norm.eval(pos.escape.direction)))
        u = scale(t, pos.escape.direction)
    else:
        u = zero(system.dim)
    a_shift = system.A.translate(neg(u))
    d_prime, ap, bp = dist_region_region(a_shift, system.B, system.norm)
    if d_prime <= 0:
        raise SoundnessError("shifted sets must be disjoint")
    shifted = SetSystem.make(a_shift, system.B, ap, bp, system.norm, system.dual_norm)
    lam = eps / 4
    eps_zn = min(eps * eps / 8, d_prime * _HALF, lam * _HALF)
    got = directed_separation(shifted, eps_zn, lam, _HALF, with_direction=False,
                              face_cap=face_cap)
    if got is None or got.refined is None:
        logger.warning("nonlocal separation: search budget exhausted")
        return unknown("nonlocal separation search exhausted")
    refined = got.refined
    pair = DualPair(add(refined.aprime, u), refined.bprime,
                    refined.astar, refined.bstar, eps, FORM_SMALL_SUM)
    audit_dual_pair(pair, system, "nonlocal_separation")
    d_ab, _, _ = dist_region_region(system.A, system.B, system.norm)
    if system.norm.eval(sub(pair.aprime, pair.bprime)) >= d_ab + eps:
        raise SoundnessError("nonlocal pair exceeded the distance-slack bound")
    return proved(pair, detail="relaxed-extremal separation")
