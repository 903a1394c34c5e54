"""Scene files: JSON descriptions of regions, points, norms and queries.

Rational literals are decimal-free strings ("p" or "p/q"); decimals are
rejected.  Non-polyhedral sets come from a fixed oracle family (no code
execution): the parabola epigraph (exact rational membership) and
exponential epigraphs/strips (membership via a deterministic rational
series approximation, which is why oracle verdicts carry a resolution).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .linalg import Vector, as_vector
from .norms import PolyhedralNorm, max_norm, polytope_norm, sum_norm
from .polyhedra import ExactRegion, OracleRegion, Polyhedron, Region
from .scalars import ScalarParseError, as_scalar
from .systems import SetSystem

QUERY_KINDS = (
    "extremal", "locally-extremal", "stationary", "approx-stationary",
    "ep-condition", "separation-infimum", "zn", "nonlocal-ep",
    "rates", "crosscheck", "product-boundary", "chain", "distance",
)


class SceneError(ValueError):
    """Parse or validation failure; carries a location string."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass(frozen=True)
class Query:
    kind: str
    args: dict


@dataclass(frozen=True)
class Scene:
    name: str
    dim: int
    norm: PolyhedralNorm
    regions: dict
    points: dict
    queries: tuple[Query, ...]

    def system(self, args: dict) -> SetSystem:
        a_name = args.get("A", "A")
        b_name = args.get("B", "B")
        pa = args.get("a", "a")
        pb = args.get("b", "b")
        for name, table, what in ((a_name, self.regions, "region"),
                                  (b_name, self.regions, "region"),
                                  (pa, self.points, "point"),
                                  (pb, self.points, "point")):
            if name not in table:
                raise SceneError(f"query args", f"unknown {what} name {name!r}")
        return SetSystem.make(self.regions[a_name], self.regions[b_name],
                              self.points[pa], self.points[pb], self.norm)


def _scalar(node, where: str) -> Fraction:
    try:
        return as_scalar(node)
    except (ScalarParseError, TypeError) as exc:
        raise SceneError(where, str(exc)) from None


def _vector(node, dim: int, where: str) -> Vector:
    if not isinstance(node, list) or len(node) != dim:
        raise SceneError(where, f"expected a list of {dim} rationals")
    return tuple(_scalar(c, where) for c in node)


def _parse_norm(node, dim: int) -> PolyhedralNorm:
    kind = node.get("kind", "max")
    if kind == "max":
        return max_norm(dim)
    if kind == "sum":
        return sum_norm(dim)
    if kind == "polytope":
        rows = []
        for i, row in enumerate(node.get("facets", ())):
            where = f"norm.facets[{i}]"
            rows.append((_vector(row["normal"], dim, where),
                         _scalar(row["rhs"], where)))
        return polytope_norm(rows)
    raise SceneError("norm.kind", f"unknown norm kind {kind!r}")


def _parse_polyhedron(node, dim: int, where: str) -> Polyhedron:
    rows = []
    for i, row in enumerate(node.get("rows", ())):
        rows.append((_vector(row["normal"], dim, f"{where}.rows[{i}].normal"),
                     _scalar(row["rhs"], f"{where}.rows[{i}].rhs")))
    return Polyhedron.make(dim, rows)


ORACLE_FAMILIES = ("parabola", "exp-above", "exp-strip")


def _parse_region(node, dim: int, norm: PolyhedralNorm, where: str) -> Region:
    if "pieces" in node:
        pieces = [_parse_polyhedron(p, dim, f"{where}.pieces[{i}]")
                  for i, p in enumerate(node["pieces"])]
        region = ExactRegion.make(dim, pieces)
        if not region.pieces:
            raise SceneError(where, "region has no nonempty piece")
        return region
    if "oracle" in node:
        spec = node["oracle"]
        family = spec.get("family")
        if family not in ORACLE_FAMILIES:
            raise SceneError(f"{where}.oracle.family",
                             f"unknown oracle family {family!r}")
        if dim != 2:
            raise SceneError(where, "oracle families are planar")
        bbox = _parse_polyhedron(spec["bbox"], dim, f"{where}.oracle.bbox")
        step = _scalar(spec.get("step", "1/8"), f"{where}.oracle.step")
        shift = _scalar(spec.get("shift", "0"), f"{where}.oracle.shift")
        member = _oracle_member(family, shift)
        return OracleRegion(dim, member, bbox, step, label=family)
    raise SceneError(where, "region needs 'pieces' or 'oracle'")


def _oracle_member(family: str, shift: Fraction):
    if family == "parabola":
        return lambda x: x[1] >= x[0] * x[0]
    if family == "exp-above":
        return lambda x: x[1] >= exp_rational(-x[0]) + shift
    if family == "exp-strip":
        return lambda x: exp_rational(-x[0]) + shift <= x[1] <= 1 + shift
    raise AssertionError(family)


@lru_cache(maxsize=65536)
def exp_rational(t: Fraction) -> Fraction:
    """Deterministic rational approximation of e^t for |t| <= 4.

    A 40-term Taylor sum; the tail is below 2^-70 on this range, far
    under every grid resolution in use.
    """
    if abs(t) > 4:
        raise ValueError("exponential oracle argument out of range")
    total = Fraction(1)
    term = Fraction(1)
    for n in range(1, 41):
        term = term * t / n
        total += term
    return total


def parse_scene(text: str, name: str = "scene") -> Scene:
    """Parse and validate a scene document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    if not isinstance(doc, dict):
        raise SceneError("document", "top level must be an object")
    dim = doc.get("dim")
    if not isinstance(dim, int) or dim <= 0:
        raise SceneError("dim", "must be a positive integer")
    norm = _parse_norm(doc.get("norm", {"kind": "max"}), dim)
    regions = {}
    for rname, rnode in doc.get("regions", {}).items():
        regions[rname] = _parse_region(rnode, dim, norm, f"regions.{rname}")
    points = {}
    for pname, pnode in doc.get("points", {}).items():
        points[pname] = _vector(pnode, dim, f"points.{pname}")
    queries = []
    for i, qnode in enumerate(doc.get("queries", ())):
        kind = qnode.get("kind")
        if kind not in QUERY_KINDS:
            raise SceneError(f"queries[{i}].kind", f"unknown query kind {kind!r}")
        args = qnode.get("args", {})
        if not isinstance(args, dict):
            raise SceneError(f"queries[{i}].args", "must be an object")
        queries.append(Query(kind, args))
    scene = Scene(doc.get("name", name), dim, norm, regions, points, tuple(queries))
    for q in scene.queries:
        _validate_query_args(scene, q)
    return scene


_KNOWN_ARGS = {
    "extremal": {"A", "B", "a", "b", "mode", "schedule"},
    "locally-extremal": {"A", "B", "a", "b", "rho"},
    "stationary": {"A", "B", "a", "b", "schedule"},
    "approx-stationary": {"A", "B", "a", "b", "schedule"},
    "ep-condition": {"A", "B", "a", "b", "form", "eps"},
    "separation-infimum": {"A", "B", "a", "b", "locality"},
    "zn": {"A", "B", "a", "b", "eps", "lambda", "tau", "zn3"},
    "nonlocal-ep": {"A", "B", "a", "b", "eps"},
    "rates": {"A", "B", "a", "b", "property", "delta", "grid"},
    "crosscheck": {"A", "B", "a", "b"},
    "product-boundary": {"A", "B", "a", "b"},
    "chain": {"A", "B", "a", "b", "rho", "schedule"},
    "distance": {"A", "B", "norm"},
}


def _validate_query_args(scene: Scene, query: Query) -> None:
    allowed = _KNOWN_ARGS[query.kind]
    for key in query.args:
        if key not in allowed:
            raise SceneError(f"query {query.kind!r}",
                             f"unexpected argument {key!r}")
    for key in ("A", "B"):
        name = query.args.get(key, key)
        if name not in scene.regions:
            raise SceneError(f"query {query.kind!r}", f"unknown region {name!r}")
    if query.kind != "distance":
        for key in ("a", "b"):
            name = query.args.get(key, key)
            if name not in scene.points:
                raise SceneError(f"query {query.kind!r}", f"unknown point {name!r}")


def load_scene(path) -> Scene:
    from pathlib import Path
    p = Path(path)
    return parse_scene(p.read_text(encoding="utf-8"), name=p.stem.replace(".scene", ""))
