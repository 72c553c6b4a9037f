"""Hausdorff distance and length of curves (graphs or smoothed curves)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .topology import CurveGraph

EXACT_BUDGET = 4_000_000


@dataclass(frozen=True)
class Distance:
    value: float
    error: float
    method: str

    def __float__(self) -> float:
        return self.value


def _polylines(curve, n: int) -> tuple[list[np.ndarray], bool]:
    """Polyline approximations and whether they are the curve itself (affine graph)."""
    if isinstance(curve, CurveGraph):
        out, exact = [], True
        for e in curve.edges:
            for s in e.path.segments:
                if s.is_affine():
                    out.append(np.array([[float(c) for c in s.start], [float(c) for c in s.end]]))
                else:
                    exact = False
                    u = np.linspace(0.0, 1.0, n + 1)
                    xs = np.polyval([float(c) for c in reversed(s.x_poly.coeffs)] or [0.0], u)
                    ys = np.polyval([float(c) for c in reversed(s.y_poly.coeffs)] or [0.0], u)
                    out.append(np.stack([xs, ys], axis=1))
        return out, exact
    return curve.polylines(n), False


def _segments(lines: list[np.ndarray]) -> np.ndarray:
    segs = [np.stack([pl[:-1], pl[1:]], axis=1) for pl in lines if len(pl) > 1]
    return np.concatenate(segs) if segs else np.zeros((0, 2, 2))


def point_to_segments(p: np.ndarray, segs: np.ndarray, chunk: int = 2048) -> np.ndarray:
    """Distance from each point in p (n x 2) to the union of segments (m x 2 x 2)."""
    a = segs[:, 0]
    d = segs[:, 1] - a
    dd = (d * d).sum(-1)
    dd = np.where(dd == 0, 1.0, dd)
    out = np.empty(len(p))
    for k in range(0, len(p), chunk):
        pk = p[k:k + chunk]
        rel = pk[:, None, :] - a[None]
        s = np.clip((rel * d[None]).sum(-1) / dd[None], 0.0, 1.0)
        diff = rel - s[..., None] * d[None]
        out[k:k + chunk] = np.sqrt((diff * diff).sum(-1).min(axis=1))
    return out


def _pieces(p0, dvec, segs):
    """Piecewise-quadratic dist^2 from p0 + s d to each segment: rows (lo, hi, c0, c1, c2, seg)."""
    rows = []
    for j, (q0, q1) in enumerate(segs):
        e = q1 - q0
        ee = e @ e
        de = dvec @ e
        base = (p0 - q0) @ e
        # lambda(s) = (base + s de) / ee; breakpoints at lambda = 0, 1
        cuts = [0.0, 1.0]
        if de != 0:
            for lam in (0.0, ee):
                s = (lam - base) / de
                if 0 < s < 1:
                    cuts.append(s)
        cuts.sort()
        for lo, hi in zip(cuts, cuts[1:]):
            if hi - lo <= 0:
                continue
            mid = (lo + hi) / 2
            lam = (base + mid * de) / ee
            if lam <= 0 or lam >= 1:
                r = p0 - (q0 if lam <= 0 else q1)
                rows.append((lo, hi, r @ r, 2 * (r @ dvec), dvec @ dvec, j))
            else:
                r = p0 - q0
                cr = r[0] * e[1] - r[1] * e[0]
                cd = dvec[0] * e[1] - dvec[1] * e[0]
                rows.append((lo, hi, cr * cr / ee, 2 * cr * cd / ee, cd * cd / ee, j))
    return np.array(rows)


def _directed_exact(a_segs: np.ndarray, b_segs: np.ndarray) -> float:
    best = 0.0
    for p0, p1 in a_segs:
        dvec = p1 - p0
        rows = _pieces(p0, dvec, b_segs)
        cands = [0.0, 1.0]
        n = len(rows)
        i, j = np.triu_indices(n, 1)
        keep = rows[i, 5] != rows[j, 5]
        i, j = i[keep], j[keep]
        lo = np.maximum(rows[i, 0], rows[j, 0])
        hi = np.minimum(rows[i, 1], rows[j, 1])
        ok = lo < hi
        i, j, lo, hi = i[ok], j[ok], lo[ok], hi[ok]
        c0 = rows[i, 2] - rows[j, 2]
        c1 = rows[i, 3] - rows[j, 3]
        c2 = rows[i, 4] - rows[j, 4]
        lin = np.abs(c2) < 1e-300
        with np.errstate(divide="ignore", invalid="ignore"):
            disc = c1 * c1 - 4 * c2 * c0
            sq = np.sqrt(np.where(disc >= 0, disc, np.nan))
            r1 = np.where(lin, -c0 / c1, (-c1 + sq) / (2 * c2))
            r2 = np.where(lin, np.nan, (-c1 - sq) / (2 * c2))
        for r in (r1, r2):
            good = np.isfinite(r) & (r >= lo) & (r <= hi)
            cands.extend(r[good].tolist())
        s = np.unique(np.clip(np.array(cands), 0.0, 1.0))
        pts = p0[None] + s[:, None] * dvec[None]
        best = max(best, float(point_to_segments(pts, b_segs).max()))
    return best


def _directed_sampled(a_lines: list[np.ndarray], b_segs: np.ndarray, spacing: float) -> tuple[float, float]:
    pts = []
    for pl in a_lines:
        for p0, p1 in zip(pl[:-1], pl[1:]):
            n = max(1, int(math.ceil(np.linalg.norm(p1 - p0) / spacing)))
            u = np.linspace(0.0, 1.0, n + 1)
            pts.append(p0[None] + u[:, None] * (p1 - p0)[None])
    pts = np.concatenate(pts)
    return float(point_to_segments(pts, b_segs).max()), spacing / 2


def _chord_error(curve, lines: list[np.ndarray], n: int) -> float:
    """Deviation of the polylines from the curve, estimated against a refinement."""
    if isinstance(curve, CurveGraph):
        fine, exact = _polylines(curve, 4 * n)
        if exact:
            return 0.0
    else:
        fine = curve.polylines(4 * n)
    pts = np.concatenate(fine)
    return float(point_to_segments(pts, _segments(lines)).max())


def hausdorff_distance(g1, g2, samples: int = 128, spacing: float = 1e-3) -> Distance:
    """Hausdorff distance between two curves with an error bound.

    Affine graphs of modest size use the exact candidate method (maxima of the
    distance-to-set function along a segment sit at endpoints or at points
    equidistant from two segments); larger or curved inputs are sampled.
    """
    l1, ex1 = _polylines(g1, samples)
    l2, ex2 = _polylines(g2, samples)
    s1, s2 = _segments(l1), _segments(l2)
    if ex1 and ex2 and len(s1) * (3 * len(s2)) ** 2 + len(s2) * (3 * len(s1)) ** 2 <= EXACT_BUDGET:
        d = max(_directed_exact(s1, s2), _directed_exact(s2, s1))
        return Distance(d, 1e-12 * max(1.0, d), "exact")
    chord = (0.0 if ex1 else _chord_error(g1, l1, samples)) + (0.0 if ex2 else _chord_error(g2, l2, samples))
    d12, e12 = _directed_sampled(l1, s2, spacing)
    d21, e21 = _directed_sampled(l2, s1, spacing)
    return Distance(max(d12, d21), max(e12, e21) + chord, "sampled")


def h1_length(curve) -> float:
    """Length: exact segment lengths for affine edges, quadrature for polynomial ones."""
    if not isinstance(curve, CurveGraph):
        return curve.h1_length()
    total = 0.0
    for e in curve.edges:
        for s in e.path.segments:
            if s.is_affine():
                (x0, y0), (x1, y1) = s.start, s.end
                total += math.hypot(float(x1 - x0), float(y1 - y0))
            else:
                dx, dy = s.x_poly.derivative(), s.y_poly.derivative()
                total += quad(lambda u: math.hypot(float(dx(u)), float(dy(u))), 0.0, 1.0, epsabs=1e-13, limit=200)[0]
    return total
