"""Shared exception types."""

from __future__ import annotations


class SoundnessError(AssertionError):
    """An internal invariant was breached (primal/dual disagreement,
    certificate failing re-verification, implication-chain violation).

    The CLI maps this to exit code 3; it must never fire on the shipped
    corpus.
    """


class OracleRegimeError(ValueError):
    """An exact-only operation was called on an oracle-backed region."""


class EmptyRegionError(ValueError):
    """An operation that needs a nonempty region received an empty one."""
