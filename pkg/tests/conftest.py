"""Shared deterministic instance generators for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction as F

from sepcert.linalg import dot, vec
from sepcert.norms import max_norm, sum_norm
from sepcert.polyhedra import ExactRegion, Polyhedron
from sepcert.systems import SetSystem


def random_point(rng: random.Random, dim: int) -> tuple:
    return vec(*[F(rng.randint(-2, 2), rng.randint(1, 2)) for _ in range(dim)])


def random_piece(rng: random.Random, point, dim: int, max_rows: int = 3,
                 force_tight: bool = False) -> Polyhedron:
    """A polyhedron guaranteed to contain ``point``; rows are tight at it
    about half the time so reference points sit on boundaries."""
    rows = []
    n_rows = rng.randint(1, max_rows)
    for i in range(n_rows):
        normal = tuple(F(rng.randint(-3, 3)) for _ in range(dim))
        if all(c == 0 for c in normal):
            normal = tuple(F(1 if k == i % dim else 0) for k in range(dim))
        tight = force_tight and i == 0 or rng.random() < 0.5
        slack = F(0) if tight else rng.choice([F(1, 2), F(1), F(2)])
        rows.append((normal, dot(normal, point) + slack))
    return Polyhedron.make(dim, rows)


def random_region(rng: random.Random, point, dim: int = 2,
                  max_pieces: int = 2) -> ExactRegion:
    pieces = [random_piece(rng, point, dim, force_tight=True)]
    for _ in range(rng.randint(0, max_pieces - 1)):
        pieces.append(random_piece(rng, point, dim))
    return ExactRegion.make(dim, pieces)


def random_union_system(rng: random.Random, dim: int = 2,
                        conventional: bool = False) -> SetSystem:
    a = random_point(rng, dim)
    b = a if conventional else random_point(rng, dim)
    norm = rng.choice([max_norm(dim), sum_norm(dim)])
    return SetSystem.make(random_region(rng, a, dim), random_region(rng, b, dim),
                          a, b, norm)


def random_convex_system(rng: random.Random, dim: int = 2) -> SetSystem:
    a = random_point(rng, dim)
    b = a if rng.random() < 0.5 else random_point(rng, dim)
    norm = rng.choice([max_norm(dim), sum_norm(dim)])
    A = ExactRegion.make(dim, [random_piece(rng, a, dim, force_tight=True)])
    B = ExactRegion.make(dim, [random_piece(rng, b, dim, force_tight=True)])
    return SetSystem.make(A, B, a, b, norm)
