"""Set systems, shift witnesses, verdicts, and exact witness checking.

A SetSystem is the object every check operates on: a pair of regions, a
reference point inside each, and a primal/dual norm pair.  The
conventional situation (one common point) is the special case a = b.

Shift witnesses assert that small translations of the two sets pull
them apart near the reference points; `verify_shift_witness` re-checks
such a claim from scratch with exact LPs, which is also how every
emitted certificate is audited.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction

from .errors import SoundnessError
from .linalg import Vector, add, neg, sub, zero
from .norms import PolyhedralNorm
from .polyhedra import (
    EmptinessCertificate,
    ExactRegion,
    OracleRegion,
    Region,
    intersect_empty,
)

_ZERO = Fraction(0)


class Level(str, Enum):
    EXTREMAL = "extremal"
    LOCALLY_EXTREMAL = "locally_extremal"
    STATIONARY = "stationary"
    APPROX_STATIONARY = "approx_stationary"


CHAIN_ORDER = (Level.EXTREMAL, Level.LOCALLY_EXTREMAL,
               Level.STATIONARY, Level.APPROX_STATIONARY)


@dataclass(frozen=True)
class SetSystem:
    A: Region
    B: Region
    a: Vector
    b: Vector
    norm: PolyhedralNorm
    dual_norm: PolyhedralNorm

    @classmethod
    def make(cls, A: Region, B: Region, a: Vector, b: Vector,
             norm: PolyhedralNorm, dual_norm: PolyhedralNorm | None = None) -> SetSystem:
        if not A.contains(a):
            raise ValueError("reference point a does not belong to A")
        if not B.contains(b):
            raise ValueError("reference point b does not belong to B")
        dn = dual_norm if dual_norm is not None else norm.dual()
        if not dn.same_ball(norm.dual()):
            raise ValueError("dual_norm is not the dual of norm")
        return cls(A, B, a, b, norm, dn)

    @property
    def dim(self) -> int:
        return len(self.a)

    @property
    def exact(self) -> bool:
        return isinstance(self.A, ExactRegion) and isinstance(self.B, ExactRegion)

    @property
    def conventional(self) -> bool:
        return self.a == self.b

    def translated(self, u: Vector, v: Vector) -> SetSystem:
        return SetSystem(self.A.translate(neg(u)), self.B.translate(neg(v)),
                         sub(self.a, u), sub(self.b, v), self.norm, self.dual_norm)


@dataclass(frozen=True)
class ShiftWitness:
    """(u, v, rho) with optional relocated points for the approximate level.

    rho = None encodes the nonlocal case (no ball constraint).
    """

    u: Vector
    v: Vector
    rho: Fraction | None = None
    aprime: Vector | None = None
    bprime: Vector | None = None


class VerdictStatus(str, Enum):
    PROVED = "proved"
    REFUTED = "refuted"
    LIKELY = "likely"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    status: VerdictStatus
    certificate: object | None = None
    resolution: Fraction | None = None
    detail: str = ""

    @property
    def proved(self) -> bool:
        return self.status is VerdictStatus.PROVED

    @property
    def refuted(self) -> bool:
        return self.status is VerdictStatus.REFUTED


def proved(certificate=None, detail: str = "") -> Verdict:
    return Verdict(VerdictStatus.PROVED, certificate, detail=detail)


def refuted(certificate=None, detail: str = "") -> Verdict:
    return Verdict(VerdictStatus.REFUTED, certificate, detail=detail)


def likely(status_like: VerdictStatus, resolution: Fraction, detail: str = "") -> Verdict:
    return Verdict(VerdictStatus.LIKELY, None, resolution,
                   detail=f"{detail} (grid evidence for {status_like.value})".strip())


def unknown(detail: str = "") -> Verdict:
    return Verdict(VerdictStatus.UNKNOWN, detail=detail)


@dataclass(frozen=True)
class ShiftCheck:
    empty: bool
    point: Vector | None = None
    certificates: tuple[EmptinessCertificate, ...] = ()
    resolution: Fraction | None = None  # set when decided on an oracle grid


def shifted_intersection_empty(system: SetSystem, base_a: Vector, base_b: Vector,
                               u: Vector, v: Vector,
                               rho: Fraction | None) -> ShiftCheck:
    """Decide (A - base_a - u) cap (B - base_b - v) [cap rho-ball] = empty.

    The rho-ball is the closed ball at the origin in the system norm.
    Exact backends get piece-pair Farkas certificates; oracle backends
    are scanned on their grid and the answer carries that resolution.
    """
    off_a = neg(add(base_a, u))
    off_b = neg(add(base_b, v))
    ball = system.norm.ball_rows(zero(system.dim), rho) if rho is not None else ()
    if system.exact:
        certs: list[EmptinessCertificate] = []
        for pa in system.A.pieces:
            for pb in system.B.pieces:
                chk = intersect_empty([pa.translate(off_a), pb.translate(off_b)],
                                      extra_rows=ball)
                if not chk.empty:
                    return ShiftCheck(False, point=chk.point)
                certs.append(chk.certificate)
        return ShiftCheck(True, certificates=tuple(certs))
    return _shifted_empty_grid(system, off_a, off_b, ball)


def _shifted_empty_grid(system: SetSystem, off_a: Vector, off_b: Vector,
                        ball) -> ShiftCheck:
    oracle = system.A if isinstance(system.A, OracleRegion) else system.B
    probe = oracle if isinstance(oracle, OracleRegion) else None
    assert probe is not None
    from .polyhedra import Polyhedron
    ball_poly = Polyhedron.make(system.dim, ball) if ball else None

    def in_shifted(region: Region, off: Vector, x: Vector) -> bool:
        return region.contains(sub(x, off))

    # Scan the oracle grid shifted into the common frame.
    for p in probe.member_grid():
        x = add(p, off_a if probe is system.A else off_b)
        if ball_poly is not None and not ball_poly.contains(x):
            continue
        if in_shifted(system.A, off_a, x) and in_shifted(system.B, off_b, x):
            return ShiftCheck(False, point=x, resolution=probe.step)
    return ShiftCheck(True, resolution=probe.step)


def verify_shift_witness(system: SetSystem, witness: ShiftWitness, eps: Fraction,
                         level: Level) -> bool:
    """Exact re-check of a shift witness at the stated level and eps.

    Size gates follow the level: plain extremality bounds the shifts by
    eps; the stationarity levels additionally demand rho in (0, eps) and
    shifts below eps * rho; the approximate level also relocates the
    reference points within the open eps-balls.
    """
    size = max(system.norm.eval(witness.u), system.norm.eval(witness.v))
    if level in (Level.EXTREMAL, Level.LOCALLY_EXTREMAL):
        if size >= eps:
            return False
        if level is Level.LOCALLY_EXTREMAL and (witness.rho is None or witness.rho <= 0):
            return False
    else:
        if witness.rho is None or not (0 < witness.rho < eps):
            return False
        if size >= eps * witness.rho:
            return False
    base_a, base_b = system.a, system.b
    if level is Level.APPROX_STATIONARY:
        if witness.aprime is not None:
            if not system.A.contains(witness.aprime):
                return False
            if system.norm.eval(sub(witness.aprime, system.a)) >= eps:
                return False
            base_a = witness.aprime
        if witness.bprime is not None:
            if not system.B.contains(witness.bprime):
                return False
            if system.norm.eval(sub(witness.bprime, system.b)) >= eps:
                return False
            base_b = witness.bprime
    rho = witness.rho if level is not Level.EXTREMAL else None
    return shifted_intersection_empty(system, base_a, base_b,
                                      witness.u, witness.v, rho).empty


def audit_witness(system: SetSystem, witness: ShiftWitness, eps: Fraction,
                  level: Level, context: str) -> None:
    """Re-verify a witness this package itself constructed."""
    if not verify_shift_witness(system, witness, eps, level):
        raise SoundnessError(f"constructed witness failed verification in {context}")
