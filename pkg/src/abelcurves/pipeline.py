"""Approximation of a piecewise-linear curve by certified curves of the same topology."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from .certify import CurveReport, certify_curve
from .deform import (
    BadSet,
    DeformError,
    TriangleFamily,
    bad_set,
    degree_reduce,
    has_horizontal_edge,
    needs_reduction,
    pick_parameters,
    rectangularize,
    rotate_generic,
)
from .exact import q, q_str
from .metrics import h1_length, hausdorff_distance
from .smoothing import SmoothingFamily, smoothable_corners
from .topology import CurveGraph, graph_hash, graph_to_json

log = logging.getLogger(__name__)


@dataclass
class Schedule:
    count: int = 3
    max_len: int = 4
    order: int = 8
    epsilon: Fraction = Fraction(1, 20)
    smoothing: bool = True
    smoothing_scale: Fraction = Fraction(1, 2)
    rotation_index: int = 2
    workers: int = 1

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "L": self.max_len,
            "N": self.order,
            "epsilon": q_str(q(self.epsilon)),
            "smoothing": self.smoothing,
            "smoothing_scale": q_str(q(self.smoothing_scale)),
            "rotation_index": self.rotation_index,
        }


@dataclass
class Emitted:
    index: int
    t: Fraction | None
    s: Fraction | None
    curve: object
    report: CurveReport
    rank: int
    d_h: float
    d_h_error: float
    h1: float
    checks: dict = field(default_factory=dict)

    def to_json(self, h1_input: float) -> dict:
        return {
            "index": self.index,
            "t": None if self.t is None else q_str(self.t),
            "s": None if self.s is None else q_str(self.s),
            "rank": self.rank,
            "d_H": self.d_h,
            "d_H_error": self.d_h_error,
            "H1": self.h1,
            "H1_gap": abs(self.h1 - h1_input),
            "certificate": self.report.to_json(),
            "parameter_checks": self.checks,
        }


@dataclass
class PipelineResult:
    input: CurveGraph
    schedule: Schedule
    stages: list[dict] = field(default_factory=list)
    emitted: list[Emitted] = field(default_factory=list)
    bad_sets: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @property
    def h1_input(self) -> float:
        return h1_length(self.input)

    def manifest(self) -> dict:
        h1 = self.h1_input
        return {
            "input": graph_hash(self.input),
            "rank": self.input.rank,
            "H1_input": h1,
            "schedule": self.schedule.to_json(),
            "stages": self.stages,
            "bad_sets": self.bad_sets,
            "curves": [e.to_json(h1) for e in self.emitted],
            "warnings": self.warnings,
        }


def _stage(result: PipelineResult, name: str, g: CurveGraph, **extra) -> None:
    entry = {"stage": name, "rank": g.rank, "vertices": len(g.vertices), "edges": len(g.edges)}
    entry.update(extra)
    result.stages.append(entry)


def prepare(g: CurveGraph, schedule: Schedule, result: PipelineResult):
    """rotate -> degree reduce -> rectangularize; returns the rectangular curve and its triangles."""
    cur = g.atomize()
    _stage(result, "input", cur)
    if cur.is_rectangular():
        _stage(result, "rectangular", cur, skipped=True)
        return cur, []
    if has_horizontal_edge(cur):
        cur, tag = rotate_generic(cur, schedule.rotation_index)
        _stage(result, "rotate", cur, rotation=tag)
    if any(needs_reduction(cur, v) for v in cur.vertices):
        eps = q(schedule.epsilon)
        for _ in range(12):
            try:
                reduced = degree_reduce(cur, eps)
                break
            except DeformError as exc:
                result.warnings.append(f"degree_reduce: {exc}; halving epsilon")
                eps /= 2
        else:
            raise DeformError("degree reduction failed for every epsilon tried")
        cur = reduced
        _stage(result, "degree_reduce", cur, epsilon=q_str(eps))
    rect, triangles = rectangularize(cur)
    _stage(result, "rectangularize", rect, triangles=len(triangles))
    return rect, triangles


def _certified_words(report: CurveReport):
    return [c.word for c in report.certificates if c.outcome == "nonidentity"]


def _check_params(bad: BadSet, t) -> dict:
    vals = {}
    for w, (j, p) in sorted(bad.witnesses.items()):
        v = p(t)
        vals[" ".join(f"g{abs(x)}" + ("-" if x < 0 else "") for x in w)] = {"index": j, "value": q_str(v) if isinstance(v, Fraction) else float(v)}
    return {"outside_bad_set": not bad.contains(t), "witness_values": vals,
            "all_nonzero": all(p(t) != 0 for _, p in bad.witnesses.values())}


def approximate_universal(g: CurveGraph, schedule: Schedule | None = None) -> PipelineResult:
    """Emit curves of the same rank converging to ``g``, each certified up to (L, N)."""
    schedule = schedule or Schedule()
    if not g.is_affine():
        raise DeformError("the pipeline needs a piecewise-linear curve")
    result = PipelineResult(g, schedule)
    L, N = schedule.max_len, schedule.order
    rect, triangles = prepare(g, schedule, result)
    base_report = certify_curve(rect, L, N, workers=schedule.workers)
    _stage(result, "certify_base", rect, status=base_report.status, words=len(base_report.certificates))
    if not base_report.certified:
        result.warnings.append(f"base curve has unknown words: {base_report.to_json()['unknown']}")

    # stage I: triangle isotopy toward the prepared curve
    if triangles:
        fam = TriangleFamily(rect, triangles)
        bad = bad_set(fam, _certified_words(base_report), N)
        result.bad_sets["triangle"] = bad.to_json()
        targets = [1 - Fraction(1, 2**i) for i in range(1, schedule.count + 1)]
        ts = pick_parameters(bad, targets, toward=1)
        pl = []
        for t in ts:
            c = fam.curve(t)
            _stage(result, "triangle_isotopy", c, t=q_str(t))
            pl.append((t, c, _check_params(bad, t)))
    else:
        pl = [(None, rect, {}) for _ in range(schedule.count)]

    # stage II: corner smoothing, one family per distinct piecewise-linear curve
    cache: dict = {}
    for i, (t, c, tchecks) in enumerate(pl, start=1):
        key = graph_hash(c)
        if key not in cache:
            rep = base_report if c is rect else certify_curve(c, L, N, workers=schedule.workers)
            sfam = None
            sbad = None
            if schedule.smoothing and smoothable_corners(c):
                sfam = SmoothingFamily(c)
                sbad = bad_set(sfam, _certified_words(rep), N)
                result.bad_sets[f"smoothing[{i}]"] = sbad.to_json()
            cache[key] = (rep, sfam, sbad)
        rep, sfam, sbad = cache[key]
        checks = {"triangle": tchecks} if tchecks else {}
        s = None
        if sfam is not None:
            base_s = schedule.smoothing_scale * ((1 - t) if t is not None else Fraction(1, 2 ** (i - 1)))
            s = pick_parameters(sbad, [base_s], toward=0)[0]
            curve = sfam.curve(s)
            report = certify_curve(c, L, N, sig_fn=curve.word_signature, label=f"{key}@s={q_str(s)}")
            checks["smoothing"] = _check_params(sbad, s)
            _stage(result, "smoothing", c, s=q_str(s), corners=len(sfam.rho))
        else:
            curve, report = c, rep
        if not report.certified:
            result.warnings.append(f"curve {i}: unknown words {report.to_json()['unknown']}")
        dh = hausdorff_distance(curve, g)
        result.emitted.append(Emitted(i, t, s, curve, report, c.rank, dh.value, dh.error, h1_length(curve), checks))
        log.info("emitted curve %d: d_H=%.6g H1=%.6g status=%s", i, dh.value, result.emitted[-1].h1, report.status)
    return result


def curve_file(e: Emitted) -> dict:
    if isinstance(e.curve, CurveGraph):
        return graph_to_json(e.curve)
    return e.curve.to_json()
