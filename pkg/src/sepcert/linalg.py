"""Small exact vector helpers over tuples of Fractions."""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .scalars import as_scalar

Vector = tuple[Fraction, ...]


class DimensionMismatch(ValueError):
    pass


def vec(*coords: int | str | Fraction) -> Vector:
    return tuple(as_scalar(c) for c in coords)


def as_vector(coords) -> Vector:
    return tuple(as_scalar(c) for c in coords)


def zero(dim: int) -> Vector:
    return (Fraction(0),) * dim


def unit(dim: int, k: int) -> Vector:
    return tuple(Fraction(1 if i == k else 0) for i in range(dim))


def check_dim(v: Vector, dim: int) -> None:
    if len(v) != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {len(v)}")


def add(u: Vector, v: Vector) -> Vector:
    if len(u) != len(v):
        raise DimensionMismatch(f"{len(u)} vs {len(v)}")
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Vector, v: Vector) -> Vector:
    if len(u) != len(v):
        raise DimensionMismatch(f"{len(u)} vs {len(v)}")
    return tuple(a - b for a, b in zip(u, v))


def neg(v: Vector) -> Vector:
    return tuple(-a for a in v)


def scale(t: Fraction | int, v: Vector) -> Vector:
    t = Fraction(t)
    return tuple(t * a for a in v)


def dot(u: Vector, v: Vector) -> Fraction:
    if len(u) != len(v):
        raise DimensionMismatch(f"{len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def is_zero(v: Vector) -> bool:
    return all(a == 0 for a in v)


def concat(*vs: Vector) -> Vector:
    out: tuple[Fraction, ...] = ()
    for v in vs:
        out = out + tuple(v)
    return out


def primitive(v: Vector) -> Vector:
    """Scale a nonzero vector by a positive rational to primitive integer form.

    Gives a canonical representative of the ray through ``v``; the zero
    vector maps to itself.
    """
    if is_zero(v):
        return v
    denom_lcm = 1
    for a in v:
        denom_lcm = denom_lcm * a.denominator // gcd(denom_lcm, a.denominator)
    ints = [int(a * denom_lcm) for a in v]
    g = 0
    for n in ints:
        g = gcd(g, abs(n))
    return tuple(Fraction(n, g) for n in ints)
