"""Exact rational scalars and their canonical string form.

Every number that takes part in a decision is a `fractions.Fraction`;
floats never enter the decision path.  The wire format is decimal-free:
``"p"`` for integers and ``"p/q"`` otherwise, with ``q > 0`` and the
fraction fully reduced.
"""

from __future__ import annotations

import re
from fractions import Fraction

Scalar = Fraction

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/([1-9]\d*))?$")


class ScalarParseError(ValueError):
    """Raised for literals that are not exact rationals (e.g. "1.5")."""


def parse_scalar(text: str) -> Fraction:
    """Parse a decimal-free rational literal ``"p"`` or ``"p/q"``."""
    m = _RATIONAL_RE.match(text.strip())
    if m is None:
        raise ScalarParseError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    return Fraction(num, den)


def format_scalar(value: Fraction) -> str:
    """Canonical serialization, inverse of :func:`parse_scalar`."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def as_scalar(value: int | str | Fraction) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings; reject floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_scalar(value)
    raise ScalarParseError(f"inexact scalar rejected: {value!r}")
