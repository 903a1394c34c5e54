"""The set-valued-mapping view of a pair of sets.

Two mappings carry the pair's regularity structure: the fan-out map
sending x to (A - x) x (B - x), and its inverse sending (y, z) to
(A - y) cap (B - z).  The pair is extremal relative to (a, b) exactly
when (a, b) sits on the boundary of the inverse map's domain, and the
failure of metric regularity / Aubin-type estimates at small scales is
the mapping-side face of approximate stationarity.

Rates are reported for the positive properties; consumers apply the
negation.  Sampled ratios are exact rationals (LP distances); an empty
intersection counts as infinitely far, so such samples pin the rate of
lower-semicontinuity-type properties to zero.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import SoundnessError
from .linalg import Vector, add, concat, neg, scale, sub, zero
from .norms import product_norm
from .polyhedra import (
    ExactRegion,
    Polyhedron,
    Region,
    diagonal_region,
    dist_point_region,
    eliminate_coords,
    minkowski_sum,
    product_region,
    union_position,
)
from .structure import local_normal_fan
from .systems import SetSystem, Verdict, proved, refuted

_ZERO = Fraction(0)
_ONE = Fraction(1)
_HALF = Fraction(1, 2)

RATE_PROPERTIES = ("covering", "semiregularity", "lipschitz_lsc",
                   "metric_regularity", "aubin")


@dataclass(frozen=True)
class MappingView:
    system: SetSystem
    which: str  # "F" (fan-out) or "S" (intersection)

    def __post_init__(self):
        if self.which not in ("F", "S"):
            raise ValueError("which must be 'F' or 'S'")


def evaluate(view: MappingView, point):
    """F(x) as a pair of translated regions; S(y, z) as one region."""
    system = view.system
    if view.which == "F":
        x = tuple(point)
        return (system.A.translate(neg(x)), system.B.translate(neg(x)))
    y, z = point
    return intersection_region(system, tuple(y), tuple(z))


def intersection_region(system: SetSystem, y: Vector, z: Vector) -> ExactRegion:
    pieces = []
    for pa in system.A.translate(neg(y)).pieces:
        for pb in system.B.translate(neg(z)).pieces:
            pieces.append(Polyhedron.make(system.dim, pa.rows + pb.rows))
    return ExactRegion.make(system.dim, pieces)


def dom_s_region(system: SetSystem) -> ExactRegion:
    """dom S = {(y, z) : (A - y) cap (B - z) nonempty}, by eliminating
    the intersection variable."""
    d = system.dim
    pieces = []
    for pa in system.A.pieces:
        for pb in system.B.pieces:
            rows = []
            for n, c in pa.rows:
                rows.append((tuple(n) + (_ZERO,) * d + tuple(n), c))
            for n, c in pb.rows:
                rows.append(((_ZERO,) * d + tuple(n) + tuple(n), c))
            out = eliminate_coords(rows, 3 * d, tuple(range(2 * d, 3 * d)))
            pieces.append(Polyhedron.make(2 * d, out))
    return ExactRegion.make(2 * d, pieces)


@dataclass(frozen=True)
class RateSample:
    label: str
    ratio: Fraction


@dataclass(frozen=True)
class RateEstimate:
    property: str
    alpha_lower: Fraction
    alpha_upper: Fraction | None  # None: no informative sample (bound +inf)
    samples: tuple[RateSample, ...]


def estimate_rate(view: MappingView, property: str, delta: Fraction,
                  grid: int = 2) -> RateEstimate:
    """Sampled modulus of the requested regularity property in the
    delta-window, witness-first then a coordinate grid.

    alpha_upper bounds the best possible rank from above by the worst
    sampled ratio; alpha_lower is only nonzero where the modulus is
    exact (covering on a boundary/interior dichotomy)."""
    if property not in RATE_PROPERTIES:
        raise ValueError(f"unknown property {property!r}")
    if delta <= 0:
        raise ValueError("delta must be positive")
    system = view.system
    if not system.exact:
        raise ValueError("rate estimation needs exact backends")
    if property == "covering":
        return _covering_rate(system, delta, grid)
    offsets = _sample_offsets(system, delta, grid)
    samples: list[RateSample] = []
    if property in ("semiregularity", "lipschitz_lsc"):
        for dy, dz in offsets:
            y, z = add(system.a, dy), add(system.b, dz)
            gap = max(system.norm.eval(dy), system.norm.eval(dz))
            if gap == 0:
                continue
            inter = intersection_region(system, y, z)
            if inter.is_empty:
                samples.append(RateSample(f"S({_fmt(y)},{_fmt(z)}) empty", _ZERO))
                continue
            dist, _ = dist_point_region(zero(system.dim), inter, system.norm)
            if dist == 0:
                continue
            samples.append(RateSample(f"S({_fmt(y)},{_fmt(z)})", gap / dist))
    elif property == "metric_regularity":
        for dy, dz in offsets:
            y, z = add(system.a, dy), add(system.b, dz)
            for w in _w_samples(system, delta):
                da, _ = dist_point_region(y, system.A.translate(neg(w)), system.norm)
                db, _ = dist_point_region(z, system.B.translate(neg(w)), system.norm)
                numer = max(da, db)
                if numer == 0:
                    continue
                inter = intersection_region(system, y, z)
                if inter.is_empty:
                    samples.append(RateSample(
                        f"S({_fmt(y)},{_fmt(z)}) empty", _ZERO))
                    continue
                denom, _ = dist_point_region(w, inter, system.norm)
                if denom == 0:
                    continue
                samples.append(RateSample(
                    f"w={_fmt(w)} (y,z)=({_fmt(y)},{_fmt(z)})", numer / denom))
    else:  # aubin
        for dy, dz in offsets:
            y, z = add(system.a, dy), add(system.b, dz)
            base = intersection_region(system, y, z)
            if base.is_empty:
                continue
            _, w = dist_point_region(zero(system.dim), base, system.norm)
            for dy2, dz2 in offsets:
                y2, z2 = add(system.a, dy2), add(system.b, dz2)
                move = max(system.norm.eval(sub(y2, y)), system.norm.eval(sub(z2, z)))
                if move == 0:
                    continue
                inter2 = intersection_region(system, y2, z2)
                if inter2.is_empty:
                    samples.append(RateSample(
                        f"S({_fmt(y2)},{_fmt(z2)}) empty", _ZERO))
                    continue
                dist, _ = dist_point_region(w, inter2, system.norm)
                if dist == 0:
                    continue
                samples.append(RateSample(f"w={_fmt(w)} move {_fmt(sub(y2, y))}",
                                          move / dist))
    upper = min((s.ratio for s in samples), default=None)
    return RateEstimate(property, _ZERO, upper, tuple(samples))


def _covering_rate(system: SetSystem, delta: Fraction, grid: int) -> RateEstimate:
    dom = dom_s_region(system)
    anchor = concat(system.a, system.b)
    pos = union_position(dom, anchor)
    if pos.position != "interior":
        return RateEstimate("covering", _ZERO, _ZERO,
                            (RateSample("(a,b) not interior to dom S", _ZERO),))
    # An exact inscribed-ball radius from the best containing piece.
    pnorm = product_norm([system.norm, system.norm])
    dual = pnorm.dual()
    best = _ZERO
    for i in dom.pieces_containing(anchor):
        piece = dom.pieces[i]
        r = None
        for n, c in piece.rows:
            if all(x == 0 for x in n):
                continue
            slack = (c - sum(a * b for a, b in zip(n, anchor))) / dual.eval(n)
            r = slack if r is None else min(r, slack)
        if r is None:
            r = delta
        best = max(best, r)
    return RateEstimate("covering", best, None,
                        (RateSample("inscribed ball radius", best),))


def _sample_offsets(system: SetSystem, delta: Fraction, grid: int):
    offsets: list[tuple[Vector, Vector]] = []
    seen = set()

    def push(dy: Vector, dz: Vector) -> None:
        key = (dy, dz)
        if key not in seen:
            seen.add(key)
            offsets.append((dy, dz))

    push(zero(system.dim), zero(system.dim))
    # Witness-derived offsets: approximate-stationarity shifts at the
    # window scale, where the piecewise structure is extremal.
    from .primal import check_relative_approx_stationary
    sched = tuple(e * delta for e in (Fraction(1, 2), Fraction(1, 8), Fraction(1, 32)))
    verdict = check_relative_approx_stationary(system, schedule=sched)
    if verdict.proved:
        for _, w in verdict.certificate.witnesses.entries:
            base_a = w.aprime if w.aprime is not None else system.a
            base_b = w.bprime if w.bprime is not None else system.b
            push(sub(add(base_a, w.u), system.a), sub(add(base_b, w.v), system.b))
    for cell in local_normal_fan(system.A, system.a):
        if any(c != 0 for c in cell.direction):
            d = scale(delta / (2 * system.norm.eval(cell.direction)), cell.direction)
            push(d, zero(system.dim))
            push(neg(d), zero(system.dim))
    steps = [delta * Fraction(k, grid) for k in range(-grid, grid + 1)]
    for k, s in enumerate(steps):
        e = tuple((s if i == k % system.dim else _ZERO) for i in range(system.dim))
        push(e, zero(system.dim))
        push(zero(system.dim), e)
    return offsets


def _w_samples(system: SetSystem, delta: Fraction):
    out = [zero(system.dim)]
    for k in range(system.dim):
        e = [_ZERO] * system.dim
        e[k] = delta * _HALF
        out.append(tuple(e))
    return out


def _fmt(v: Vector) -> str:
    from .scalars import format_scalar
    return "(" + ",".join(format_scalar(c) for c in v) + ")"


# ---------------------------------------------------------------------------
# Cross-checks against the primal verdicts


@dataclass(frozen=True)
class CrosscheckReport:
    extremal_primal: str
    dom_s_position: str
    consistent: bool
    warnings: tuple[str, ...]


def crosscheck_primal_dual(system: SetSystem) -> CrosscheckReport:
    """Exact: relative extremality must match (a, b) on the boundary of
    dom S.  Sampled: the regularity rates must agree in sign with the
    approximate-stationarity verdict (warnings, not errors)."""
    from .primal import check_relative_approx_stationary, check_relative_extremal
    extremal = check_relative_extremal(system)
    dom = dom_s_region(system)
    pos = union_position(dom, concat(system.a, system.b))
    boundary = pos.position == "boundary"
    if extremal.proved != boundary:
        raise SoundnessError(
            f"extremality verdict {extremal.status.value} disagrees with "
            f"dom-S position {pos.position}")
    warnings: list[str] = []
    approx = check_relative_approx_stationary(system)
    est = estimate_rate(MappingView(system, "F"), "metric_regularity", Fraction(1, 4))
    if approx.proved and est.alpha_upper is not None and est.alpha_upper > Fraction(1, 8):
        warnings.append("approximately stationary but sampled regularity rate "
                        f"stayed at {est.alpha_upper}")
    if approx.refuted and est.alpha_upper is not None and est.alpha_upper == 0:
        warnings.append("regular pair produced a zero sampled rate")
    return CrosscheckReport(extremal.status.value, pos.position,
                            extremal.proved == boundary, tuple(warnings))


def product_boundary_condition(system: SetSystem) -> Verdict:
    """Boundary condition in the doubled space: (a, b) on the boundary
    of (A x B) + diagonal, equivalent to relative extremality; any
    disagreement with the direct check is a soundness error."""
    from .primal import check_relative_extremal
    d = system.dim
    if 2 * d > 6:
        raise ValueError("product construction exceeds the dimension cap")
    tilde_a = product_region([system.A, system.B])
    whole = ExactRegion.make(d, [Polyhedron.whole_space(d)])
    tilde_b = diagonal_region(whole, 2)
    total = minkowski_sum(tilde_a, tilde_b)
    pos = union_position(total, concat(system.a, system.b))
    extremal = check_relative_extremal(system)
    verdict = proved(pos) if pos.position == "boundary" else refuted(pos)
    if verdict.proved != extremal.proved:
        raise SoundnessError("product boundary test disagrees with relative extremality")
    return verdict
