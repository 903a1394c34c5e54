"""Query dispatch and report emission.

Reports are plain JSON-able dictionaries so that the JSON form
round-trips exactly; rationals are serialized as decimal-free strings.
Identical scene + query + configuration yields byte-identical output
(timings are opt-in precisely to keep that property).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from fractions import Fraction

from . import duality, mappings, primal
from .errors import SoundnessError
from .linalg import Vector
from .polyhedra import (
    EmptinessCertificate,
    InteriorCertificate,
    dist_point_region,
    dist_region_region,
    dist_region_region_estimate,
    ExactRegion,
    OracleRegion,
)
from .scalars import format_scalar
from .scenes import Query, Scene
from .structure import RegionCell
from .systems import Level, SetSystem, ShiftWitness, Verdict, VerdictStatus
from .systems import verify_shift_witness

REPORT_VERSION = "v1"


def _ser_scalar(x: Fraction | None):
    return None if x is None else format_scalar(x)


def _ser_vector(v: Vector | None):
    return None if v is None else [format_scalar(c) for c in v]


def serialize_certificate(obj) -> dict | list | None:
    """Certificates as JSON-able data, recursively."""
    if obj is None:
        return None
    if isinstance(obj, ShiftWitness):
        return {"type": "shift_witness", "u": _ser_vector(obj.u), "v": _ser_vector(obj.v),
                "rho": _ser_scalar(obj.rho), "aprime": _ser_vector(obj.aprime),
                "bprime": _ser_vector(obj.bprime)}
    if isinstance(obj, primal.WitnessFamily):
        return {"type": "witness_family", "level": obj.level.value,
                "entries": [{"eps": _ser_scalar(e), "witness": serialize_certificate(w)}
                            for e, w in obj.entries]}
    if isinstance(obj, primal.ApproxStationaryCertificate):
        return {"type": "approx_stationary",
                "witnesses": serialize_certificate(obj.witnesses),
                "opposite_normal": _ser_vector(obj.opposite_normal),
                "point_a": _ser_vector(obj.cell_a), "point_b": _ser_vector(obj.cell_b)}
    if isinstance(obj, primal.InteriorityRefutation):
        return {"type": "interiority", "where": obj.where,
                "certificate": serialize_certificate(obj.certificate)}
    if isinstance(obj, InteriorCertificate):
        return {"type": "interior",
                "strict_piece": obj.strict_piece,
                "selections": [serialize_certificate(c)
                               for c in obj.selection_certificates]}
    if isinstance(obj, EmptinessCertificate):
        return {"type": "emptiness",
                "le_rows": [[_ser_vector(n), _ser_scalar(c)] for n, c in obj.le],
                "strict_rows": [[_ser_vector(n), _ser_scalar(c)] for n, c in obj.strict],
                "le_multipliers": [_ser_scalar(m) for m in obj.le_multipliers],
                "strict_multipliers": [_ser_scalar(m) for m in obj.strict_multipliers]}
    if isinstance(obj, duality.DualPair):
        return {"type": "dual_pair", "form": obj.form,
                "aprime": _ser_vector(obj.aprime), "bprime": _ser_vector(obj.bprime),
                "astar": _ser_vector(obj.astar), "bstar": _ser_vector(obj.bstar),
                "eps": _ser_scalar(obj.eps)}
    if isinstance(obj, duality.LimitSeparation):
        return {"type": "separation_limit", "value": _ser_scalar(obj.value),
                "zero_pair": None if obj.zero_pair is None else {
                    "astar": _ser_vector(obj.zero_pair.astar),
                    "point_a": _ser_vector(obj.zero_pair.aprime),
                    "point_b": _ser_vector(obj.zero_pair.bprime)}}
    if isinstance(obj, duality.SeparationValue):
        return {"type": "separation_value", "value": _ser_scalar(obj.value),
                "astar": _ser_vector(obj.astar), "bstar": _ser_vector(obj.bstar),
                "attained_at": None if obj.attained_at is None else [
                    serialize_certificate(c) for c in obj.attained_at]}
    if isinstance(obj, RegionCell):
        return {"type": "face_point", "representative": _ser_vector(obj.representative),
                "piece_index": obj.piece_index,
                "active_rows": list(obj.active_rows)}
    if isinstance(obj, duality.DirectedSeparation):
        return {"type": "directed_separation",
                "aprime": _ser_vector(obj.aprime), "bprime": _ser_vector(obj.bprime),
                "astar": _ser_vector(obj.astar),
                "deviation": _ser_scalar(obj.deviation),
                "direction_value": _ser_scalar(obj.direction_value),
                "refined": serialize_certificate(obj.refined)}
    if isinstance(obj, mappings.RateEstimate):
        return {"type": "rate_estimate", "property": obj.property,
                "alpha_lower": _ser_scalar(obj.alpha_lower),
                "alpha_upper": _ser_scalar(obj.alpha_upper),
                "samples": [{"label": s.label, "ratio": _ser_scalar(s.ratio)}
                            for s in obj.samples]}
    if isinstance(obj, mappings.CrosscheckReport):
        return {"type": "crosscheck", "extremal": obj.extremal_primal,
                "dom_s_position": obj.dom_s_position,
                "consistent": obj.consistent, "warnings": list(obj.warnings)}
    if isinstance(obj, primal.ChainReport):
        return {"type": "chain",
                "vector": list(obj.vector()),
                "convex_single_piece": obj.convex_single_piece,
                "all_equal": obj.all_equal}
    if isinstance(obj, str):
        return {"type": "note", "text": obj}
    return {"type": "opaque", "repr": repr(obj)}


@dataclass
class QueryResult:
    """A report record plus the live objects for certificate audits."""

    record: dict
    system: SetSystem | None
    verdict: Verdict | None
    payload: object | None = None


def _regime(system: SetSystem | None) -> str:
    if system is None:
        return "exact"
    return "exact" if system.exact else "oracle"


def _sched(args: dict):
    raw = args.get("schedule")
    if raw is None:
        return None
    from .scalars import as_scalar
    return tuple(as_scalar(x) for x in raw)


def run_query(scene: Scene, query: Query, face_cap: int = 10_000,
              grid: int = 2) -> tuple[QueryResult, float]:
    """Dispatch one query; the record is deterministic and JSON-able."""
    from .scalars import as_scalar
    args = query.args
    t0 = time.perf_counter()
    system: SetSystem | None = None
    verdict: Verdict | None = None
    payload = None
    value = None

    if query.kind == "distance":
        A = scene.regions[args.get("A", "A")]
        B = scene.regions[args.get("B", "B")]
        if isinstance(A, OracleRegion) or isinstance(B, OracleRegion):
            if isinstance(A, OracleRegion) and isinstance(B, OracleRegion):
                d, pa, pb = dist_region_region_estimate(A, B, scene.norm)
                step = min(A.step, B.step)
            else:
                oracle, other = (A, B) if isinstance(A, OracleRegion) else (B, A)
                best = None
                for p in oracle.member_grid():
                    dd, w = dist_point_region(p, other, scene.norm)
                    if best is None or dd < best[0]:
                        best = (dd, w, p) if oracle is B else (dd, p, w)
                if best is None:
                    raise ValueError("no oracle member found on the grid")
                d, pa, pb = best
                step = oracle.step
            verdict = Verdict(VerdictStatus.LIKELY, resolution=step,
                              detail=f"grid distance {format_scalar(d)}")
            value = d
        else:
            d, pa, pb = dist_region_region(A, B, scene.norm)
            verdict = Verdict(VerdictStatus.PROVED,
                              detail=f"distance {format_scalar(d)} attained")
            value = d
        payload = (pa, pb)
    else:
        system = scene.system(args)
        if query.kind == "extremal":
            verdict = primal.check_relative_extremal(
                system, mode=args.get("mode", "both_shifts"), schedule=_sched(args))
        elif query.kind == "locally-extremal":
            verdict = primal.check_relative_locally_extremal(
                system, as_scalar(args.get("rho", "1")))
        elif query.kind == "stationary":
            verdict = primal.check_relative_stationary(system, _sched(args))
        elif query.kind == "approx-stationary":
            verdict = primal.check_relative_approx_stationary(system, _sched(args))
        elif query.kind == "chain":
            payload = primal.implication_chain(
                system, as_scalar(args.get("rho", "1")), _sched(args))
            verdict = Verdict(VerdictStatus.PROVED,
                              detail="chain " + "/".join(payload.vector()))
        elif query.kind == "ep-condition":
            verdict = duality.check_separation_condition(
                system, args.get("form", "ii"), as_scalar(args.get("eps", "1/2")),
                face_cap)
        elif query.kind == "separation-infimum":
            payload = duality.separation_infimum(
                system, as_scalar(args.get("locality", "1/2")), face_cap)
            value = payload.value
            verdict = Verdict(VerdictStatus.PROVED,
                              detail=f"value {_ser_scalar(payload.value)}")
        elif query.kind == "zn":
            got = duality.directed_separation(
                system, as_scalar(args.get("eps", "1/4")),
                as_scalar(args.get("lambda", "1")),
                as_scalar(args.get("tau", "1/2")),
                with_direction=bool(args.get("zn3", True)), face_cap=face_cap)
            payload = got
            verdict = (Verdict(VerdictStatus.PROVED, detail="directed separation found")
                       if got is not None else
                       Verdict(VerdictStatus.UNKNOWN, detail="search cap exhausted"))
        elif query.kind == "nonlocal-ep":
            verdict = duality.nonlocal_separation(
                system, as_scalar(args.get("eps", "1/2")), face_cap)
        elif query.kind == "rates":
            prop = args.get("property", "metric_regularity")
            payload = mappings.estimate_rate(
                mappings.MappingView(system, "F"), prop,
                as_scalar(args.get("delta", "1/4")), int(args.get("grid", grid)))
            verdict = Verdict(VerdictStatus.PROVED,
                              detail=f"{prop} alpha_upper "
                                     f"{_ser_scalar(payload.alpha_upper)}")
        elif query.kind == "crosscheck":
            payload = mappings.crosscheck_primal_dual(system)
            verdict = Verdict(VerdictStatus.PROVED if payload.consistent
                              else VerdictStatus.UNKNOWN,
                              detail="mapping view consistent")
        elif query.kind == "product-boundary":
            verdict = mappings.product_boundary_condition(system)
        else:
            raise ValueError(f"unhandled query kind {query.kind!r}")

    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    record = {
        "kind": query.kind,
        "args": dict(sorted(args.items())),
        "status": verdict.status.value,
        "detail": verdict.detail,
        "regime": _regime(system),
        "resolution": _ser_scalar(verdict.resolution),
        "value": _ser_scalar(value),
        "certificate": serialize_certificate(
            payload if payload is not None else verdict.certificate),
    }
    return QueryResult(record, system, verdict, payload), elapsed_ms


def run_scene(scene: Scene, kinds=None, face_cap: int = 10_000, grid: int = 2,
              timings: bool = False) -> dict:
    """Run all (or a filtered subset of) queries of a scene."""
    results = []
    for query in scene.queries:
        if kinds is not None and query.kind not in kinds:
            continue
        res, ms = run_query(scene, query, face_cap, grid)
        if timings:
            res.record["timing_ms"] = round(ms, 3)
        results.append(res)
    return {
        "version": REPORT_VERSION,
        "scene": scene.name,
        "results": [r.record for r in results],
        "_live": results,
    }


def emit_report(report: dict, fmt: str = "json") -> bytes:
    """Serialize a report; the JSON form round-trips byte-exactly."""
    payload = {k: v for k, v in report.items() if not k.startswith("_")}
    if fmt == "json":
        return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode()
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = [f"scene: {payload.get('scene', '?')} (report {payload['version']})"]
    for rec in payload["results"]:
        argtxt = ", ".join(f"{k}={v}" for k, v in rec["args"].items())
        line = f"  {rec['kind']}({argtxt}): {rec['status'].upper()}"
        if rec.get("value") is not None:
            line += f" value={rec['value']}"
        if rec.get("resolution") is not None:
            line += f" resolution={rec['resolution']}"
        if rec.get("detail"):
            line += f" -- {rec['detail']}"
        if "timing_ms" in rec:
            line += f" [{rec['timing_ms']} ms]"
        lines.append(line)
    return ("\n".join(lines) + "\n").encode()


def audit_report(report: dict) -> int:
    """Independent re-verification of every certificate in a report.

    Returns the number of certificates checked; raises SoundnessError on
    the first failure.  This is the pass behind the guarantee that exit
    code 3 never fires on the shipped corpus.
    """
    checked = 0
    for res in report.get("_live", ()):
        v = res.verdict
        if v is None or res.system is None:
            continue
        cert = v.certificate
        checked += _audit_certificate(res.system, cert)
        if res.payload is not None and res.payload is not cert:
            checked += _audit_certificate(res.system, res.payload)
    return checked


def _audit_certificate(system: SetSystem, cert) -> int:
    checked = 0
    if cert is None:
        return 0
    if isinstance(cert, primal.WitnessFamily):
        for eps, w in cert.entries:
            if not verify_shift_witness(system, w, eps, cert.level):
                raise SoundnessError("witness family entry failed re-verification")
            checked += 1
        return checked
    if isinstance(cert, primal.ApproxStationaryCertificate):
        return _audit_certificate(system, cert.witnesses)
    if isinstance(cert, ShiftWitness):
        return 0  # bare witnesses are audited through their families
    if isinstance(cert, duality.DualPair):
        if not duality.validate_dual_pair(cert, system):
            raise SoundnessError("dual pair failed re-verification")
        return 1
    if isinstance(cert, duality.DirectedSeparation):
        if cert.refined is not None:
            if not duality.validate_dual_pair(cert.refined, system):
                raise SoundnessError("refined dual pair failed re-verification")
            return 1
        return 0
    if isinstance(cert, EmptinessCertificate):
        if not cert.verify():
            raise SoundnessError("emptiness certificate failed re-verification")
        return 1
    if isinstance(cert, primal.InteriorityRefutation):
        for sel in cert.certificate.selection_certificates:
            if not sel.verify():
                raise SoundnessError("interiority selection failed re-verification")
            checked += 1
        return checked
    if isinstance(cert, primal.ChainReport):
        for lvl, verdict in cert.verdicts.items():
            checked += _audit_certificate(system, verdict.certificate)
        return checked
    if isinstance(cert, duality.LimitSeparation):
        return 0
    return 0
