"""Exact rational linear programming.

A dense two-phase simplex over `fractions.Fraction` with Bland's rule,
so every run terminates and every verdict is exact.  Infeasibility is
returned together with Farkas multipliers that recombine the constraint
rows into the contradiction 0 <= -1; systems mixing strict and
non-strict inequalities get the analogous transposition certificate.

Problems are stated over free variables x in Q^n:

    minimize    c . x
    subject to  a_i . x <= b_i        (rows ``le``)
                a_j . x  = b_j        (rows ``eq``)

All helpers below reduce to :func:`solve`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .linalg import Vector, dot

Row = tuple[Vector, Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class LPStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class FarkasCertificate:
    """Multipliers proving that a system of rows is infeasible.

    The le-multipliers are nonnegative, the combined coefficient vector
    is zero and the combined right-hand side equals -1.
    """

    le_multipliers: tuple[Fraction, ...]
    eq_multipliers: tuple[Fraction, ...]

    def verify(self, le: tuple[Row, ...], eq: tuple[Row, ...] = ()) -> bool:
        le, eq = tuple(le), tuple(eq)
        if len(self.le_multipliers) != len(le) or len(self.eq_multipliers) != len(eq):
            return False
        if any(m < 0 for m in self.le_multipliers):
            return False
        rows = le + eq
        dim = len(rows[0][0]) if rows else 0
        combo = [_ZERO] * dim
        rhs = _ZERO
        for m, (coeffs, b) in zip(self.le_multipliers + self.eq_multipliers, rows):
            for k, a in enumerate(coeffs):
                combo[k] += m * a
            rhs += m * b
        return all(a == 0 for a in combo) and rhs == Fraction(-1)


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    x: Vector | None = None
    value: Fraction | None = None
    farkas: FarkasCertificate | None = None
    ray: Vector | None = None


class _Simplex:
    """Tableau state: tab = B^-1 A (row major), rhs = B^-1 b >= 0."""

    def __init__(self, tab: list[list[Fraction]], rhs: list[Fraction], basis: list[int]):
        self.tab = tab
        self.rhs = rhs
        self.basis = basis
        self.m = len(rhs)
        self.n = len(tab[0]) if tab else 0

    def pivot(self, row: int, col: int, cost: list[Fraction]) -> None:
        tr = self.tab[row]
        inv = _ONE / tr[col]
        if inv != 1:
            for j in range(self.n):
                if tr[j] != 0:
                    tr[j] *= inv
            self.rhs[row] *= inv
        for i in range(self.m):
            if i == row:
                continue
            ti = self.tab[i]
            f = ti[col]
            if f == 0:
                continue
            for j in range(self.n):
                if tr[j] != 0:
                    ti[j] -= f * tr[j]
            self.rhs[i] -= f * self.rhs[row]
        f = cost[col]
        if f != 0:
            for j in range(self.n):
                if tr[j] != 0:
                    cost[j] -= f * tr[j]
        self.basis[row] = col

    def run(self, cost: list[Fraction], eligible: list[bool]) -> int | None:
        """Bland-rule minimization; None at optimum, else unbounded column."""
        while True:
            enter = -1
            for j in range(self.n):
                if eligible[j] and cost[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return None
            leave = -1
            best: Fraction | None = None
            for i in range(self.m):
                a = self.tab[i][enter]
                if a > 0:
                    ratio = self.rhs[i] / a
                    if best is None or ratio < best or (
                            ratio == best and self.basis[i] < self.basis[leave]):
                        best = ratio
                        leave = i
            if leave < 0:
                return enter
            self.pivot(leave, enter, cost)

    def reduced_costs(self, raw_cost: list[Fraction]) -> list[Fraction]:
        cost = list(raw_cost)
        for i in range(self.m):
            f = cost[self.basis[i]]
            if f != 0:
                ti = self.tab[i]
                for j in range(self.n):
                    if ti[j] != 0:
                        cost[j] -= f * ti[j]
        for i in range(self.m):
            cost[self.basis[i]] = _ZERO
        return cost


def solve(objective: Vector, le: tuple[Row, ...] | list[Row],
          eq: tuple[Row, ...] | list[Row] = (), maximize: bool = False) -> LPResult:
    """Solve an LP over free variables exactly."""
    le = tuple(le)
    eq = tuple(eq)
    n = len(objective)
    for coeffs, _ in le + eq:
        if len(coeffs) != n:
            raise ValueError("row dimension does not match objective")
    c_obj = [-Fraction(v) for v in objective] if maximize else [Fraction(v) for v in objective]

    m = len(le) + len(eq)
    if m == 0:
        if all(v == 0 for v in c_obj):
            return LPResult(LPStatus.OPTIMAL, x=(_ZERO,) * n, value=_ZERO)
        ray = tuple(-v for v in c_obj)
        return LPResult(LPStatus.UNBOUNDED, x=(_ZERO,) * n,
                        ray=_orient_ray(ray, objective, maximize))

    # Split x = u - w with u, w >= 0; slack per le row; artificial per row.
    n_struct = 2 * n
    n_slack = len(le)
    art0 = n_struct + n_slack
    n_total = art0 + m
    sigma: list[int] = []
    tab: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    all_rows = list(le) + list(eq)
    for i, (coeffs, b) in enumerate(all_rows):
        s = -1 if b < 0 else 1
        sigma.append(s)
        row = [_ZERO] * n_total
        for k, a in enumerate(coeffs):
            if a != 0:
                row[k] = s * a
                row[n + k] = -s * a
        if i < len(le):
            row[n_struct + i] = Fraction(s)
        row[art0 + i] = _ONE
        tab.append(row)
        rhs.append(s * b)

    sx = _Simplex(tab, rhs, [art0 + i for i in range(m)])

    # Phase I: minimize the sum of artificials.
    phase1_raw = [_ZERO] * art0 + [_ONE] * m
    cost = sx.reduced_costs(phase1_raw)
    sx.run(cost, [True] * n_total)
    infeas = sum((sx.rhs[i] for i in range(sx.m) if sx.basis[i] >= art0), _ZERO)
    if infeas > 0:
        y = [_ONE - cost[art0 + i] for i in range(m)]
        lam = [-sigma[i] * y[i] for i in range(m)]
        total = sum((mu * b for mu, (_, b) in zip(lam, all_rows)), _ZERO)
        if total >= 0:
            raise AssertionError("internal error: Farkas combination is not negative")
        lam = [mu / -total for mu in lam]
        cert = FarkasCertificate(tuple(lam[:len(le)]), tuple(lam[len(le):]))
        if not cert.verify(le, eq):
            raise AssertionError("internal error: Farkas certificate failed re-verification")
        return LPResult(LPStatus.INFEASIBLE, farkas=cert)

    # Drive surviving artificials out of the basis or drop redundant rows.
    drop: list[int] = []
    for i in range(sx.m):
        if sx.basis[i] >= art0:
            piv_col = next((j for j in range(art0) if sx.tab[i][j] != 0), None)
            if piv_col is None:
                drop.append(i)
            else:
                sx.pivot(i, piv_col, cost)
    for i in reversed(drop):
        del sx.tab[i], sx.rhs[i], sx.basis[i]
    sx.m = len(sx.rhs)

    # Phase II on the true objective; artificial columns are frozen out.
    phase2_raw = [_ZERO] * n_total
    for k in range(n):
        phase2_raw[k] = c_obj[k]
        phase2_raw[n + k] = -c_obj[k]
    cost = sx.reduced_costs(phase2_raw)
    eligible = [j < art0 for j in range(n_total)]
    enter = sx.run(cost, eligible)
    x = _extract_x(sx, n)
    if enter is not None:
        dz = [_ZERO] * n_total
        dz[enter] = _ONE
        for i in range(sx.m):
            dz[sx.basis[i]] = -sx.tab[i][enter]
        ray = tuple(dz[k] - dz[n + k] for k in range(n))
        return LPResult(LPStatus.UNBOUNDED, x=x, ray=_orient_ray(ray, objective, maximize))
    return LPResult(LPStatus.OPTIMAL, x=x, value=dot(x, objective))


def _extract_x(sx: _Simplex, n: int) -> Vector:
    z: dict[int, Fraction] = {}
    for i, col in enumerate(sx.basis):
        z[col] = sx.rhs[i]
    return tuple(z.get(k, _ZERO) - z.get(n + k, _ZERO) for k in range(n))


def _orient_ray(ray: Vector, objective: Vector, maximize: bool) -> Vector:
    d = dot(ray, objective)
    if (maximize and d < 0) or (not maximize and d > 0):
        return tuple(-v for v in ray)
    return ray


def feasible_point(le, eq=()) -> LPResult:
    """Find any point of {x : le, eq} or a Farkas certificate."""
    le = tuple(le)
    eq = tuple(eq)
    dim = len(le[0][0]) if le else (len(eq[0][0]) if eq else 0)
    return solve((_ZERO,) * dim, le, eq)


@dataclass(frozen=True)
class StrictCertificate:
    """Transposition certificate that a mixed strict system is empty.

    For rows {a_i.x <= b_i, c_j.x = d_j, e_k.x < f_k} the multipliers
    (le and strict parts nonnegative) combine the coefficient vectors to
    zero while either the combined rhs is -1, or it is <= 0 with total
    strict-row mass 1.
    """

    le_multipliers: tuple[Fraction, ...]
    eq_multipliers: tuple[Fraction, ...]
    strict_multipliers: tuple[Fraction, ...]

    def verify(self, le, eq=(), strict=()) -> bool:
        le, eq, strict = tuple(le), tuple(eq), tuple(strict)
        if (len(self.le_multipliers), len(self.eq_multipliers),
                len(self.strict_multipliers)) != (len(le), len(eq), len(strict)):
            return False
        if any(m < 0 for m in self.le_multipliers + self.strict_multipliers):
            return False
        rows = le + eq + strict
        mults = self.le_multipliers + self.eq_multipliers + self.strict_multipliers
        dim = len(rows[0][0]) if rows else 0
        combo = [_ZERO] * dim
        rhs = _ZERO
        for m, (coeffs, b) in zip(mults, rows):
            for k, a in enumerate(coeffs):
                combo[k] += m * a
            rhs += m * b
        if any(a != 0 for a in combo):
            return False
        if rhs == Fraction(-1):
            return True
        return rhs <= 0 and sum(self.strict_multipliers, _ZERO) == _ONE


@dataclass(frozen=True)
class StrictResult:
    feasible: bool
    x: Vector | None = None
    certificate: StrictCertificate | None = None


def feasible_point_strict(le, eq=(), strict=()) -> StrictResult:
    """Decide {le, eq, strict-<} exactly, with a point or a certificate."""
    le = tuple(le)
    eq = tuple(eq)
    strict = tuple(strict)
    if not strict:
        res = feasible_point(le, eq)
        if res.status is LPStatus.OPTIMAL:
            return StrictResult(True, x=res.x)
        return StrictResult(False, certificate=StrictCertificate(
            res.farkas.le_multipliers, res.farkas.eq_multipliers, ()))

    dim = len(strict[0][0])
    # Maximize the common slack t of the strict rows, capped at 1; the
    # system is strictly feasible exactly when the optimum is positive.
    obj = (_ZERO,) * dim + (_ONE,)
    aug_le = [(tuple(c) + (_ZERO,), b) for c, b in le]
    aug_le += [(tuple(c) + (_ONE,), b) for c, b in strict]
    aug_le.append(((_ZERO,) * dim + (_ONE,), _ONE))
    aug_eq = [(tuple(c) + (_ZERO,), b) for c, b in eq]
    res = solve(obj, aug_le, aug_eq, maximize=True)
    if res.status is LPStatus.INFEASIBLE:
        # Even the closed relaxation is empty; the t-column forces zero
        # mass on the strict rows and the cap in any Farkas combination.
        lam = res.farkas.le_multipliers
        cert = StrictCertificate(lam[:len(le)], res.farkas.eq_multipliers,
                                 lam[len(le):len(le) + len(strict)])
        if not cert.verify(le, eq, strict):
            raise AssertionError("internal error: strict certificate failed re-verification")
        return StrictResult(False, certificate=cert)
    assert res.status is LPStatus.OPTIMAL, "t is capped, the LP cannot be unbounded"
    if res.value > 0:
        return StrictResult(True, x=res.x[:dim])

    # Strictly infeasible: the transposition certificate solves a closed
    # feasibility problem over the multipliers themselves.
    nle, neq, nst = len(le), len(eq), len(strict)
    nvars = nle + neq + nst
    rows_le: list[Row] = []
    for i in list(range(nle)) + list(range(nle + neq, nvars)):
        e = [_ZERO] * nvars
        e[i] = Fraction(-1)
        rows_le.append((tuple(e), _ZERO))
    rows_eq: list[Row] = []
    for d in range(dim):
        coeffs = tuple(row[0][d] for row in le + eq + strict)
        rows_eq.append((coeffs, _ZERO))
    rhs_coeffs = tuple(row[1] for row in le + eq + strict)
    mass = (_ZERO,) * (nle + neq) + (_ONE,) * nst
    alt = feasible_point(rows_le + [(rhs_coeffs, _ZERO)], rows_eq + [(mass, _ONE)])
    lam: list[Fraction]
    if alt.status is LPStatus.OPTIMAL:
        lam = list(alt.x)
    else:
        # Fall back to a pure Farkas contradiction, normalized to rhs -1.
        alt = feasible_point(rows_le + [(rhs_coeffs, Fraction(-1))], rows_eq)
        if alt.status is not LPStatus.OPTIMAL:
            raise AssertionError("internal error: no transposition certificate found")
        total = sum((m * b for m, b in zip(alt.x, rhs_coeffs)), _ZERO)
        lam = [m / -total for m in alt.x]
    cert = StrictCertificate(tuple(lam[:nle]), tuple(lam[nle:nle + neq]),
                             tuple(lam[nle + neq:]))
    if not cert.verify(le, eq, strict):
        raise AssertionError("internal error: strict certificate failed re-verification")
    return StrictResult(False, certificate=cert)
