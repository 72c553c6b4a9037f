"""Corner smoothing of piecewise-linear curves.

Each smoothable corner v is mapped onto the model angle y = |x| by an affine
chart; the model curve y = |x| is replaced by y = t h(x/t).  A smoothed edge
is the product of three pieces: the half-core leaving its tail corner, a
straight middle, and the half-core entering its head corner.  The half-core
(s, h(s)), s in [0, 1], is integrated numerically once per depth; every
t-dependence is then exact: the leaving piece has signature t^k M^(k) S_half.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.special import expit

from .deform import Family
from .exact import q, q_str
from .paths import PlanarPath, Point
from .signature import (
    Signature,
    chen_chain,
    linear_transform,
    path_signature,
    sig_invert,
    sig_scale,
)
from .topology import CurveGraph, Word, generator_walks, word_walk

RTOL = 1e-13
ATOL = 1e-15


class SmoothingError(ValueError):
    pass


def corner_rho(x: float) -> float:
    return math.exp(-1.0 / x) if x > 0 else 0.0


def corner_h(x: float) -> float:
    """1/2 on |x| <= 1/2, |x| on |x| >= 1, a C-infinity blend in between."""
    ax = abs(x)
    if ax <= 0.5:
        return 0.5
    if ax >= 1:
        return ax
    r1, r2 = corner_rho(2 * ax - 1), corner_rho(2 - 2 * ax)
    return 0.5 + (ax - 0.5) * r1 / (r1 + r2)


def _blend(x: np.ndarray):
    """sigma = rho(2x-1) / (rho(2x-1) + rho(2-2x)) and its derivative for 1/2 < x < 1."""
    u, v = 2 * x - 1, 2 - 2 * x
    z = 1 / u - 1 / v
    sig = expit(-z)
    dsig = sig * (1 - sig) * (2 / u**2 + 2 / v**2)
    return sig, dsig


def h_vec(x) -> np.ndarray:
    x = np.abs(np.asarray(x, dtype=float))
    out = np.where(x >= 1, x, 0.5)
    mid = (x > 0.5) & (x < 1)
    if mid.any():
        sig, _ = _blend(x[mid])
        out[mid] = 0.5 + (x[mid] - 0.5) * sig
    return out


def h_prime(x: float) -> float:
    ax = abs(x)
    if ax <= 0.5:
        return 0.0
    if ax >= 1:
        return math.copysign(1.0, x)
    sig, dsig = _blend(np.array([ax]))
    d = float(sig[0] + (ax - 0.5) * dsig[0])
    return math.copysign(d, x)


def corner_isotopy(x, t) -> tuple[float, float]:
    """Model image of the angle point (x, |x|) at smoothing time t in (0, 1]."""
    if not 0 < t <= 1:
        raise ValueError("t must lie in (0, 1]")
    return (float(x), float(t) * corner_h(float(x) / float(t)))


@lru_cache(maxsize=None)
def _half_core_levels(depth: int) -> tuple:
    # flat part: straight from (0, 1/2) to (1/2, 1/2)
    levels = []
    cur = np.array([0.5, 0.0])
    for k in range(1, depth + 1):
        if k > 1:
            cur = np.multiply.outer(cur, np.array([0.5, 0.0])) / k
        levels.append(cur)
    sizes = [2**k for k in range(1, depth + 1)]
    y0 = np.concatenate([lv.ravel() for lv in levels])

    def rhs(s, y):
        a = np.array([1.0, h_prime(s)])
        out = np.empty_like(y)
        pos, prev = 0, np.array([1.0])
        for n in sizes:
            out[pos:pos + n] = np.multiply.outer(prev, a).ravel()
            prev = y[pos:pos + n]
            pos += n
        return out

    sol = solve_ivp(rhs, (0.5, 1.0), y0, method="DOP853", rtol=RTOL, atol=ATOL)
    if not sol.success:
        raise SmoothingError(f"half-core integration failed: {sol.message}")
    y = sol.y[:, -1]
    out, pos = [], 0
    for k, n in enumerate(sizes, start=1):
        out.append(y[pos:pos + n].reshape((2,) * k))
        pos += n
    return tuple(out)


def half_core_signature(depth: int) -> Signature:
    """Signature of s -> (s, h(s)), s in [0, 1] (float)."""
    return Signature([arr.copy() for arr in _half_core_levels(depth)])


def gamma1_signature(t, depth: int) -> Signature:
    """Model piece (t s, t h(s)), s in [0, 1]: the half-core dilated by t."""
    return sig_scale(half_core_signature(depth), float(t))


def gamma2_signature(t, depth: int) -> Signature:
    """Model piece from (t, t) to (1, 1); exact for rational t."""
    t = q(t)
    if t == 1:
        return Signature.zero(depth)
    return path_signature(PlanarPath.polyline([(t, t), (1, 1)]), depth)


class CornerChart:
    """Affine chart sending the model angle onto corner v: right branch along u_out, left along u_other."""

    def __init__(self, v: Point, u_out: Point, u_other: Point, rho: Fraction):
        self.v, self.u_out, self.u_other, self.rho = v, u_out, u_other, rho
        self.matrix = [
            [rho * (u_out[0] - u_other[0]) / 2, rho * (u_out[0] + u_other[0]) / 2],
            [rho * (u_out[1] - u_other[1]) / 2, rho * (u_out[1] + u_other[1]) / 2],
        ]

    def to_world(self, x, y):
        (a, b), (c, d) = self.matrix
        return (self.v[0] + a * x + b * y, self.v[1] + c * x + d * y)

    def to_world_array(self, pts: np.ndarray) -> np.ndarray:
        m = np.array(self.matrix, dtype=float)
        return np.array([float(self.v[0]), float(self.v[1])]) + pts @ m.T

    def leaving_signature(self, t, depth: int) -> Signature:
        return linear_transform(gamma1_signature(t, depth), [[float(x) for x in row] for row in self.matrix])

    def leaving_points(self, t, n: int) -> np.ndarray:
        s = np.linspace(0.0, 1.0, n + 1)
        model = np.stack([float(t) * s, float(t) * h_vec(s)], axis=1)
        return self.to_world_array(model)

    def leaving_length(self, t) -> float:
        m = np.array(self.matrix, dtype=float)
        flat = 0.5 * float(np.linalg.norm(m[:, 0]))

        def speed(s):
            return float(np.linalg.norm(m @ np.array([1.0, h_prime(s)])))

        curved, _ = quad(speed, 0.5, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)
        return float(t) * (flat + curved)

    def triangle(self) -> list[Point]:
        r = self.rho
        return [self.v, (self.v[0] + r * self.u_out[0], self.v[1] + r * self.u_out[1]),
                (self.v[0] + r * self.u_other[0], self.v[1] + r * self.u_other[1])]


def smoothable_corners(g: CurveGraph) -> list[int]:
    """Degree-2 vertices other than the basepoint whose two edges are not collinear."""
    out = []
    for v in sorted(g.vertices):
        if v == g.basepoint or g.degree(v) != 2:
            continue
        (i, di), (j, dj) = g.incident(v)
        if i == j:
            continue
        u, w = _out_vector(g, i, v), _out_vector(g, j, v)
        if u[0] * w[1] - u[1] * w[0] != 0:
            out.append(v)
    return out


def _out_vector(g: CurveGraph, i: int, v: int) -> Point:
    e = g.edges[i]
    a, b = g.point(e.tail), g.point(e.head)
    return (b[0] - a[0], b[1] - a[1]) if e.tail == v else (a[0] - b[0], a[1] - b[1])


def _dist_point_segment(p, a, b) -> float:
    p, a, b = (np.array([float(c) for c in x]) for x in (p, a, b))
    d = b - a
    s = np.clip((p - a) @ d / (d @ d), 0.0, 1.0)
    return float(np.linalg.norm(p - a - s * d))


def choose_radii(g: CurveGraph, corners: Sequence[int] | None = None) -> dict[int, Fraction]:
    """Chart scale rho_v per corner: at most 1/4, corner triangles within half the clearance, then
    halved until all corner triangles are exactly interior-disjoint from each other and from other edges."""
    from .geometry import interiors_disjoint

    if not g.is_atomic():
        raise SmoothingError("smoothing needs single-segment affine edges")
    corners = smoothable_corners(g) if corners is None else list(corners)
    rho: dict[int, Fraction] = {}
    for v in corners:
        (i, _), (j, _) = g.incident(v)
        u, w = _out_vector(g, i, v), _out_vector(g, j, v)
        others = [e for k, e in enumerate(g.edges) if k not in (i, j)]
        clear = min((_dist_point_segment(g.point(v), g.point(e.tail), g.point(e.head)) for e in others), default=math.inf)
        l1 = abs(u[0]) + abs(u[1]) + abs(w[0]) + abs(w[1])
        linf = min(max(abs(u[0]), abs(u[1])), max(abs(w[0]), abs(w[1])))
        r = Fraction(1, 4)
        while r * l1 > min(clear * (1 - 1e-9), float(linf)) / 2:
            r /= 2
        rho[v] = r
    for _ in range(40):
        charts = {v: _chart(g, v, rho[v]) for v in corners}
        bad = set()
        for x, v in enumerate(corners):
            tv = charts[v].triangle()
            for w in corners[x + 1:]:
                if not interiors_disjoint(tv, charts[w].triangle()):
                    bad.update((v, w))
            inc = {i for i, _ in g.incident(v)}
            for k, e in enumerate(g.edges):
                if k not in inc and not interiors_disjoint(tv, (g.point(e.tail), g.point(e.head))):
                    bad.add(v)
        if not bad:
            return rho
        for v in bad:
            rho[v] /= 2
    raise SmoothingError("could not separate the corner neighbourhoods")


def _chart(g: CurveGraph, v: int, rho: Fraction, out_edge: int | None = None) -> CornerChart:
    (i, _), (j, _) = g.incident(v)
    if out_edge is not None and out_edge == j:
        i, j = j, i
    return CornerChart(g.point(v), _out_vector(g, i, v), _out_vector(g, j, v), rho)


class SmoothedCurve:
    """The member at time t of the corner-smoothing family of a piecewise-linear curve."""

    def __init__(self, base: CurveGraph, t, rho: Mapping[int, Fraction] | None = None):
        if not base.is_atomic():
            base = base.atomize()
        self.base = base
        self.t = q(t)
        if not 0 <= self.t <= 1:
            raise ValueError("smoothing parameter must lie in [0, 1]")
        self.rho = dict(choose_radii(base) if rho is None else rho)
        self.walks = generator_walks(base)
        self._edge_sigs: dict = {}

    @property
    def rank(self) -> int:
        return self.base.rank

    def chart(self, v: int, edge: int) -> CornerChart | None:
        if v not in self.rho:
            return None
        return _chart(self.base, v, self.rho[v], out_edge=edge)

    def _ends(self, i: int):
        e = self.base.edges[i]
        return self.chart(e.tail, i), self.chart(e.head, i)

    def _middle(self, i: int) -> tuple[Point, Point]:
        e = self.base.edges[i]
        t = self.t
        ct, ch = self._ends(i)
        a, b = self.base.point(e.tail), self.base.point(e.head)
        if ct is not None:
            a = ct.to_world(t, t)
        if ch is not None:
            b = ch.to_world(t, t)
        return a, b

    def edge_signature(self, i: int, depth: int) -> Signature:
        key = (i, depth)
        if key not in self._edge_sigs:
            ct, ch = self._ends(i)
            a, b = self._middle(i)
            pieces = []
            if ct is not None and self.t != 0:
                pieces.append(ct.leaving_signature(self.t, depth))
            pieces.append(path_signature(PlanarPath.polyline([a, b]), depth).to_float() if a != b else Signature.zero(depth, exact=False))
            if ch is not None and self.t != 0:
                pieces.append(sig_invert(ch.leaving_signature(self.t, depth)))
            self._edge_sigs[key] = chen_chain(pieces, depth)
        return self._edge_sigs[key]

    def walk_signature(self, walk, depth: int) -> Signature:
        if not walk:
            return Signature.zero(depth, exact=False)
        sigs = [self.edge_signature(i, depth) if d == 1 else sig_invert(self.edge_signature(i, depth)) for i, d in walk]
        return chen_chain(sigs, depth)

    def word_signature(self, w: Sequence[int], depth: int) -> Signature:
        return self.walk_signature(word_walk(self.base, w, self.walks), depth)

    def edge_points(self, i: int, n: int = 64) -> np.ndarray:
        ct, ch = self._ends(i)
        a, b = self._middle(i)
        parts = []
        if ct is not None and self.t != 0:
            parts.append(ct.leaving_points(self.t, n))
        parts.append(np.array([[float(a[0]), float(a[1])], [float(b[0]), float(b[1])]]))
        if ch is not None and self.t != 0:
            parts.append(ch.leaving_points(self.t, n)[::-1])
        return np.concatenate(parts)

    def polylines(self, n: int = 64) -> list[np.ndarray]:
        return [self.edge_points(i, n) for i in range(len(self.base.edges))]

    def h1_length(self) -> float:
        total = 0.0
        for i in range(len(self.base.edges)):
            ct, ch = self._ends(i)
            a, b = self._middle(i)
            total += math.hypot(float(b[0] - a[0]), float(b[1] - a[1]))
            for c in (ct, ch):
                if c is not None and self.t != 0:
                    total += c.leaving_length(self.t)
        return total

    def to_json(self) -> dict:
        from .topology import graph_to_json

        return {
            "base": graph_to_json(self.base),
            "t": q_str(self.t),
            "rho": {str(v): q_str(r) for v, r in sorted(self.rho.items())},
        }


class SmoothingFamily(Family):
    """Corner smoothing of a piecewise-linear curve; t = 0 is the curve itself."""

    exact = False

    def __init__(self, base: CurveGraph, rho: Mapping[int, Fraction] | None = None):
        self.base = base.atomize()
        self.rho = dict(choose_radii(self.base) if rho is None else rho)
        self.walks = generator_walks(self.base)
        self._cache: dict = {}

    @property
    def rank(self) -> int:
        return self.base.rank

    def curve(self, t) -> SmoothedCurve:
        t = q(t)
        if t not in self._cache:
            self._cache[t] = SmoothedCurve(self.base, t, self.rho)
        return self._cache[t]

    def signature(self, t, word: Word, depth: int) -> Signature:
        return self.curve(t).word_signature(word, depth)

    def base_signature(self, word: Word, depth: int) -> Signature:
        from .topology import realize_word

        return path_signature(realize_word(self.base, word, self.walks), depth)
