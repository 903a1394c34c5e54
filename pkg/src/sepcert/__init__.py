"""Exact toolkit for extremality, stationarity and generalized separation
of pairs of sets given as finite unions of rational polyhedra."""

from __future__ import annotations

__version__ = "0.1.0"
