"""Curve deformations: rotation, degree reduction, rectangularization, triangle isotopies,
parameter families of curves and the bad parameter sets of their witness coefficients."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .exact import Poly1, interpolate, isolate_roots, q, q_str
from .geometry import bbox, bboxes_overlap, interiors_disjoint
from .jets import first_departure
from .paths import PlanarPath, Point, Segment
from .signature import Signature, path_signature, return_map_jet
from .topology import (
    CurveError,
    CurveGraph,
    Edge,
    EmbeddingError,
    Word,
    free_reduce,
    generator_walks,
    segment_intersection,
    realize_word,
    word_text,
)


class DeformError(ValueError):
    pass


class DegreeBoundError(ArithmeticError):
    pass


# -- rotation ---------------------------------------------------------------------

def rotation_member(k: int) -> tuple[Fraction, Fraction]:
    """(cos, sin) of the rotation with tan(theta/2) = 1/k; k = 2 gives (3/5, 4/5)."""
    if k < 1:
        raise ValueError("family index starts at 1")
    kk = k * k
    return Fraction(kk - 1, kk + 1), Fraction(2 * k, kk + 1)


def rotate(g: CurveGraph, cos: Fraction, sin: Fraction) -> CurveGraph:
    def rot_pt(p):
        return (cos * p[0] - sin * p[1], sin * p[0] + cos * p[1])

    def rot_seg(s: Segment) -> Segment:
        return Segment(s.x_poly * cos - s.y_poly * sin, s.x_poly * sin + s.y_poly * cos)

    verts = {k: rot_pt(p) for k, p in g.vertices.items()}
    edges = [Edge(e.tail, e.head, PlanarPath([rot_seg(s) for s in e.path.segments])) for e in g.edges]
    return CurveGraph(verts, edges, g.basepoint)


def has_horizontal_edge(g: CurveGraph) -> bool:
    return any(s.is_affine() and s.start[1] == s.end[1] for _, _, s in g.segments())


def rotate_generic(g: CurveGraph, min_index: int = 2) -> tuple[CurveGraph, dict]:
    """Rotate by the first family member (k = min_index, min_index + 1, ...) leaving no edge horizontal."""
    if not has_horizontal_edge(g):
        return g, {"index": 0, "cos": "1", "sin": "0"}
    k = min_index
    while True:
        c, s = rotation_member(k)
        out = rotate(g, c, s)
        if not has_horizontal_edge(out):
            return out, {"index": k, "cos": q_str(c), "sin": q_str(s)}
        k += 1


# -- degree reduction ----------------------------------------------------------

def _direction(g: CurveGraph, i: int, v: int) -> Point:
    e = g.edges[i]
    a, b = g.point(e.tail), g.point(e.head)
    if e.tail == v:
        return (b[0] - a[0], b[1] - a[1])
    return (a[0] - b[0], a[1] - b[1])


def _collinear_pair(dirs: Sequence[Point]) -> bool:
    for x in range(len(dirs)):
        for y in range(x + 1, len(dirs)):
            u, w = dirs[x], dirs[y]
            if u[0] * w[1] - u[1] * w[0] == 0 and u[0] * w[0] + u[1] * w[1] < 0:
                return True
    return False


def needs_reduction(g: CurveGraph, v: int) -> bool:
    d = g.degree(v)
    if d <= 2:
        return False
    if d == 3:
        return not _collinear_pair([_direction(g, i, v) for i, _ in g.incident(v)])
    return True


def degree_reduce(g: CurveGraph, epsilon) -> CurveGraph:
    """Split every vertex of degree >= 3 (lacking a straight pair of edges) by two horizontal cuts.

    Each cut at height v_y +- delta joins the crossing points of the edges on
    that side by a horizontal interval; one extreme edge per side keeps its
    stub to v.  delta is chosen so the result is within ``epsilon`` of the
    input in the Hausdorff metric.
    """
    epsilon = q(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    g = g.atomize()
    if has_horizontal_edge(g):
        raise DeformError("horizontal edge present; apply rotate_generic first")
    for v in sorted(g.vertices):
        if v in g.vertices and needs_reduction(g, v):
            g = _reduce_vertex(g, v, epsilon)
    return g


def _reduce_vertex(g: CurveGraph, v: int, epsilon: Fraction) -> CurveGraph:
    vx, vy = g.point(v)
    inc = [(i, _direction(g, i, v)) for i, _ in g.incident(v)]
    if any(g.edges[i].tail == g.edges[i].head for i, _ in inc):
        raise DeformError(f"loop edge at vertex {v}")
    slack = min(abs(d[1]) for _, d in inc)
    delta = min(epsilon * min(abs(d[1]) / (abs(d[0]) + abs(d[1])) for _, d in inc), slack / 2)
    pts = dict(g.vertices)
    nxt = max(pts) + 1
    keep = [e for k, e in enumerate(g.edges) if k not in {i for i, _ in inc}]
    for sign in (1, -1):
        side = [(i, d) for i, d in inc if (d[1] > 0) == (sign > 0)]
        if not side:
            continue
        if len(side) == 1:
            keep.append(g.edges[side[0][0]])
            continue
        level = vy + sign * delta
        cross = []
        for i, d in side:
            s = sign * delta / d[1]
            cross.append((vx + s * d[0], i))
        cross.sort()
        ids = []
        for x, i in cross:
            pts[nxt] = (x, level)
            ids.append(nxt)
            e = g.edges[i]
            if e.tail == v:
                keep.append(Edge(nxt, e.head, PlanarPath.polyline([pts[nxt], g.point(e.head)])))
            else:
                keep.append(Edge(e.tail, nxt, PlanarPath.polyline([g.point(e.tail), pts[nxt]])))
            nxt += 1
        # the leftmost crossing keeps its stub, so v, the stub and the outer part stay collinear
        keep.append(Edge(v, ids[0], PlanarPath.polyline([g.point(v), pts[ids[0]]])))
        for a, b in zip(ids, ids[1:]):
            keep.append(Edge(a, b, PlanarPath.polyline([pts[a], pts[b]])))
    try:
        out = CurveGraph(pts, keep, g.basepoint)
    except CurveError as exc:
        raise DeformError(f"epsilon {epsilon} too large near vertex {v} ({exc}); try a smaller epsilon") from exc
    if out.rank != g.rank:
        raise DeformError(f"rank changed at vertex {v}")
    return out


# -- triangles and rectangularization -----------------------------------------

@dataclass(frozen=True)
class Triangle:
    """Right triangle with the right angle at ``corner``; cathetus K1 runs to ``end1``, K2 to ``end2``.

    The model frame sends corner, end1, end2 to (0,0), (a,0), (0,b).
    """

    corner: Point
    end1: Point
    end2: Point
    a: Fraction = Fraction(1)
    b: Fraction = Fraction(1)
    corner_id: int | None = None
    end1_id: int | None = None
    end2_id: int | None = None

    def to_model(self, p: Point) -> Point:
        u = (self.end1[0] - self.corner[0], self.end1[1] - self.corner[1])
        w = (self.end2[0] - self.corner[0], self.end2[1] - self.corner[1])
        det = u[0] * w[1] - u[1] * w[0]
        if det == 0:
            raise DeformError("degenerate triangle")
        dx, dy = q(p[0]) - self.corner[0], q(p[1]) - self.corner[1]
        s1 = (dx * w[1] - dy * w[0]) / det
        s2 = (u[0] * dy - u[1] * dx) / det
        return (s1 * self.a, s2 * self.b)

    def to_world(self, m: Point) -> Point:
        s1, s2 = m[0] / self.a, m[1] / self.b
        return (
            self.corner[0] + s1 * (self.end1[0] - self.corner[0]) + s2 * (self.end2[0] - self.corner[0]),
            self.corner[1] + s1 * (self.end1[1] - self.corner[1]) + s2 * (self.end2[1] - self.corner[1]),
        )

    def moved_corner(self, t) -> Point:
        return self.to_world(model_isotopy(self.a, self.b, (0, 0), t))

    def vertices(self) -> list[Point]:
        return [self.corner, self.end1, self.end2]

    def to_json(self) -> dict:
        return {
            "corner": [q_str(c) for c in self.corner],
            "end1": [q_str(c) for c in self.end1],
            "end2": [q_str(c) for c in self.end2],
            "a": q_str(self.a),
            "b": q_str(self.b),
            "ids": [self.corner_id, self.end1_id, self.end2_id],
        }


def model_isotopy(a, b, point, t) -> Point:
    """Image at time t of a point of the cathetii K1 = [0,a] x {0} or K2 = {0} x [0,b]."""
    a, b, t = q(a), q(b), q(t)
    x0, y0 = q(point[0]), q(point[1])
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    if y0 == 0 and 0 <= x0 <= a:
        return (a * t / 2 + (2 - t) * x0 / 2, b * t / 2 - b * t * x0 / (2 * a))
    if x0 == 0 and 0 <= y0 <= b:
        return (a * t / 2 - a * t * y0 / (2 * b), b * t / 2 + (2 - t) * y0 / 2)
    raise DeformError(f"point {point} is not on the cathetii of the ({a}, {b}) model triangle")


def triangle_isotopy(tri: Triangle, p: Point, t) -> Point:
    return tri.to_world(model_isotopy(tri.a, tri.b, tri.to_model(p), t))


def _axis_parallel(p: Point, r: Point) -> bool:
    return p[0] == r[0] or p[1] == r[1]


def _make_triangle(corner: Point, p: Point, r: Point, ids=(None, None, None)) -> Triangle:
    # K1 is the horizontal cathetus so that the legs are rational
    if corner[1] == p[1]:
        return Triangle(corner, p, r, abs(p[0] - corner[0]), abs(r[1] - corner[1]), *ids)
    return Triangle(corner, r, p, abs(r[0] - corner[0]), abs(p[1] - corner[1]), ids[0], ids[2], ids[1])


def rectangularize(g: CurveGraph, max_refine: int = 6) -> tuple[CurveGraph, list[Triangle]]:
    """Replace each slanted edge by a staircase of cathetii of right triangles on that edge.

    Staircases use n = 1, 2, 4, ... steps; per edge the corner side is chosen
    greedily (far from the centroid first) subject to exact interior
    disjointness of all triangles and the other edges.
    """
    g = g.atomize()
    if g.is_rectangular():
        return g, []
    for v in g.vertices:
        if needs_reduction(g, v):
            raise DeformError(f"vertex {v} has degree {g.degree(v)} without a straight pair; run degree_reduce first")
    pts = list(g.vertices.values())
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    segs = [(i, (g.point(e.tail), g.point(e.head))) for i, e in enumerate(g.edges)]
    last_error = None
    for level in range(max_refine + 1):
        n = 2**level
        try:
            return _staircase(g, n, (cx, cy), segs)
        except DeformError as exc:
            last_error = exc
    raise DeformError(f"cannot place disjoint triangles even with {2 ** max_refine} steps per edge: {last_error}")


def _staircase(g: CurveGraph, n: int, centroid, segs) -> tuple[CurveGraph, list[Triangle]]:
    placed: list[tuple[tuple, list[Point]]] = []
    choices: dict[int, list[tuple[Point, Point, Point]]] = {}
    for i, e in enumerate(g.edges):
        p, r = g.point(e.tail), g.point(e.head)
        if _axis_parallel(p, r):
            continue
        steps = [(p[0] + (r[0] - p[0]) * Fraction(k, n), p[1] + (r[1] - p[1]) * Fraction(k, n)) for k in range(n + 1)]
        tris = []
        for a, b in zip(steps, steps[1:]):
            options = [(a, (b[0], a[1]), b), (a, (a[0], b[1]), b)]
            # prefer the corner farther from the centroid, then horizontal-first
            options.sort(key=lambda t: -((t[1][0] - centroid[0]) ** 2 + (t[1][1] - centroid[1]) ** 2))
            for t in options:
                if _fits([t], i, placed, segs):
                    tris.append(t)
                    placed.append((bbox(t), list(t)))
                    break
            else:
                raise DeformError(f"no room for triangles on edge {i} near vertex {e.tail} with {n} steps")
        choices[i] = tris
    pts = dict(g.vertices)
    lookup = {p: k for k, p in pts.items()}
    nxt = max(pts) + 1

    def vid(p: Point) -> int:
        nonlocal nxt
        if p not in lookup:
            pts[nxt] = p
            lookup[p] = nxt
            nxt += 1
        return lookup[p]

    edges: list[Edge] = []
    triangles: list[Triangle] = []
    for i, e in enumerate(g.edges):
        if i not in choices:
            edges.append(e)
            continue
        for a, c, b in choices[i]:
            ia, ic, ib = vid(a), vid(c), vid(b)
            edges.append(Edge(ia, ic, PlanarPath.polyline([a, c])))
            edges.append(Edge(ic, ib, PlanarPath.polyline([c, b])))
            triangles.append(_make_triangle(c, a, b, (ic, ia, ib)))
    try:
        out = CurveGraph(pts, edges, g.basepoint)
    except CurveError as exc:
        raise DeformError(str(exc)) from exc
    if out.rank != g.rank or not out.is_rectangular():
        raise DeformError("staircase changed the rank")
    return out, triangles


def _box_touch(a, b) -> bool:
    return not (a[2] < b[0] or b[2] < a[0] or a[3] < b[1] or b[3] < a[1])


def _legs_clear(t, p: Point, r: Point) -> bool:
    """Cathetii of t meet segment pr at most in a common endpoint."""
    for u, w in ((t[0], t[1]), (t[1], t[2])):
        hit = segment_intersection(u, w, p, r)
        if hit is None:
            continue
        if hit == "overlap" or hit not in (u, w) or hit not in (p, r) or hit == t[1]:
            return False
    return True


def _fits(tris, edge_index: int, placed, segs) -> bool:
    for t in tris:
        box = bbox(t)
        for obox, other in placed:
            if _box_touch(box, obox):
                if not interiors_disjoint(t, other):
                    return False
                if not (_legs_clear(t, other[0], other[1]) and _legs_clear(t, other[1], other[2])):
                    return False
        for j, (p, r) in segs:
            if j == edge_index or not _box_touch(box, bbox((p, r))):
                continue
            if not interiors_disjoint(t, (p, r)) or not _legs_clear(t, p, r):
                return False
            # an edge may only touch the triangle at a shared curve vertex
            for x in (p, r):
                if x not in (t[0], t[2]) and _in_closed_triangle(x, t):
                    return False
    return True


def _in_closed_triangle(x: Point, t) -> bool:
    a, b, c = t
    d1 = (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0])
    d2 = (c[0] - b[0]) * (x[1] - b[1]) - (c[1] - b[1]) * (x[0] - b[0])
    d3 = (a[0] - c[0]) * (x[1] - c[1]) - (a[1] - c[1]) * (x[0] - c[0])
    return (d1 >= 0 and d2 >= 0 and d3 >= 0) or (d1 <= 0 and d2 <= 0 and d3 <= 0)


def corner_triangles(g: CurveGraph, corner_ids: Sequence[int]) -> list[Triangle]:
    """Triangles whose cathetii are the two edges at each listed right-angle corner of a rectangular curve."""
    out = []
    for c in corner_ids:
        inc = g.incident(c)
        if len(inc) != 2:
            raise DeformError(f"vertex {c} must have degree 2")
        ends = [g.other_end(i, d) for i, d in inc]
        p, r = g.point(ends[0]), g.point(ends[1])
        cp = g.point(c)
        if not (_axis_parallel(cp, p) and _axis_parallel(cp, r)) or (p[0] - cp[0]) * (r[0] - cp[0]) + (p[1] - cp[1]) * (r[1] - cp[1]) != 0:
            raise DeformError(f"vertex {c} is not a right-angle corner of axis-parallel edges")
        out.append(_make_triangle(cp, p, r, (c, ends[0], ends[1])))
    return out


# -- parameter families ---------------------------------------------------------

class Family:
    """A one-parameter family of curves with a fixed combinatorial type."""

    exact = True
    domain: tuple = (Fraction(0), Fraction(1))
    base_param = Fraction(0)

    def curve(self, t):
        raise NotImplementedError

    @property
    def rank(self) -> int:
        raise NotImplementedError

    def signature(self, t, word: Word, depth: int) -> Signature:
        raise NotImplementedError

    def default_nodes(self, order: int) -> list[Fraction]:
        lo, hi = self.domain
        n = order + 2
        return [lo + (hi - lo) * Fraction(k, n) for k in range(n + 1)]


class GraphFamily(Family):
    """Family of curve graphs sharing combinatorics; words use one fixed set of generator walks."""

    def __init__(self, base: CurveGraph):
        self.base = base
        self.walks = generator_walks(base)
        self._cache: dict = {}

    @property
    def rank(self) -> int:
        return self.base.rank

    def _build(self, t, validate: bool) -> CurveGraph:
        raise NotImplementedError

    def curve(self, t, validate: bool = True) -> CurveGraph:
        """The member at ``t``; ``validate=False`` skips the embeddedness check (degenerate endpoints)."""
        key = (q(t), validate)
        if key not in self._cache:
            self._cache[key] = self._build(key[0], validate)
        return self._cache[key]

    def signature(self, t, word: Word, depth: int) -> Signature:
        return path_signature(realize_word(self.curve(t, validate=False), word, self.walks), depth)


class TriangleFamily(GraphFamily):
    """Gamma_t: every triangle corner slides toward its hypotenuse midpoint; t = 0 is the rectangular curve."""

    def __init__(self, base: CurveGraph, triangles: Sequence[Triangle]):
        super().__init__(base)
        self.triangles = list(triangles)
        for tri in self.triangles:
            if tri.corner_id is None or base.point(tri.corner_id) != tri.corner:
                raise DeformError("triangle corners must be vertices of the base curve")
            if tri.corner_id == base.basepoint:
                raise DeformError("the basepoint cannot be a moving corner")

    def _build(self, t, validate: bool) -> CurveGraph:
        if not 0 <= t <= 1:
            raise ValueError("t must lie in [0, 1]")
        moved = {tri.corner_id: tri.moved_corner(t) for tri in self.triangles}
        return self.base.with_points(moved, validate=validate and t != 0)


def lower_lipschitz_linear(m) -> float:
    return float(np.linalg.svd(np.array(m, dtype=float), compute_uv=False).min())


def _lambda_in_range_linear(m, lam: Fraction) -> bool:
    # lam^2 < sigma_min^2 = (T - sqrt(T^2 - 4 det^2)) / 2, decided exactly
    (a, b), (c, d) = [[q(x) for x in row] for row in m]
    tr = a * a + b * b + c * c + d * d
    det = a * d - b * c
    disc = tr * tr - 4 * det * det
    rhs = tr - 2 * lam * lam
    return rhs > 0 and disc < rhs * rhs


class PerturbationFamily(GraphFamily):
    """(F + lambda I)(Gamma) for a map F that is linear (2x2 matrix) or given by vertex images."""

    def __init__(self, g: CurveGraph, f, samples: int = 64):
        g = g.atomize()
        if isinstance(f, Mapping):
            self.images = {int(k): (q(v[0]), q(v[1])) for k, v in f.items()}
            if set(self.images) != set(g.vertices):
                raise DeformError("vertex images must cover every vertex")
            if self.images[g.basepoint] != (0, 0):
                raise DeformError("F must fix the origin")
            self.matrix = None
            self.c1 = _estimate_lower_lipschitz(g, self.images, samples)
            self.c1_exact = False
        else:
            self.matrix = [[q(x) for x in row] for row in f]
            self.images = {k: self._apply(p) for k, p in g.vertices.items()}
            self.c1 = lower_lipschitz_linear(self.matrix)
            self.c1_exact = True
        if self.c1 <= 0:
            raise DeformError("F is not an embedding on the curve (lower Lipschitz bound is 0)")
        try:
            g.with_points(self.images)
        except CurveError as exc:
            raise DeformError(f"F is not an embedding on the curve: {exc}") from exc
        super().__init__(g)
        half = q(self.c1) / 2
        self.domain = (-half, half)
        self.base_param = Fraction(0)

    def _apply(self, p: Point) -> Point:
        (a, b), (c, d) = self.matrix
        return (a * p[0] + b * p[1], c * p[0] + d * p[1])

    def in_range(self, lam) -> bool:
        lam = q(lam)
        if self.matrix is not None:
            return _lambda_in_range_linear(self.matrix, lam)
        return abs(float(lam)) < self.c1

    def _build(self, lam, validate: bool) -> CurveGraph:
        if not self.in_range(lam):
            raise DeformError(f"lambda = {lam} outside (-c1, c1) with c1 = {self.c1:.6g}")
        moved = {k: (fp[0] + lam * self.base.point(k)[0], fp[1] + lam * self.base.point(k)[1]) for k, fp in self.images.items()}
        return self.base.with_points(moved, validate=validate)


def _estimate_lower_lipschitz(g: CurveGraph, images: Mapping[int, Point], samples: int) -> float:
    pts, imgs = [], []
    u = np.linspace(0.0, 1.0, samples + 1)
    for e in g.edges:
        p0, p1 = np.array(g.point(e.tail), float), np.array(g.point(e.head), float)
        f0, f1 = np.array(images[e.tail], float), np.array(images[e.head], float)
        pts.append(p0 + np.outer(u, p1 - p0))
        imgs.append(f0 + np.outer(u, f1 - f0))
    x, fx = np.concatenate(pts), np.concatenate(imgs)
    d = np.sqrt(((x[:, None] - x[None]) ** 2).sum(-1))
    fd = np.sqrt(((fx[:, None] - fx[None]) ** 2).sum(-1))
    mask = d > 1e-12
    return float((fd[mask] / d[mask]).min())


def perturb(g: CurveGraph, f, lam) -> CurveGraph:
    return PerturbationFamily(g, f).curve(lam)


# -- coefficient polynomials and bad sets ------------------------------------------

@dataclass
class FamilyFit:
    word: Word
    nodes: list
    polys: list[Poly1]
    residuals: list[float]
    exact: bool
    values: list = field(default_factory=list)

    def poly(self, j: int) -> Poly1:
        return self.polys[j - 1]


def _spread(n: int, j: int) -> list[int]:
    if j == 0:
        return [0]
    return sorted({round(k * (n - 1) / j) for k in range(j + 1)})


def fit_family(fam: Family, w: Sequence[int], order: int, nodes: Sequence | None = None, tol: float = 1e-9) -> FamilyFit:
    """Interpolate c_1(t)..c_N(t) with degree <= j through j+1 nodes and check the held-out ones."""
    nodes = [q(t) for t in (nodes if nodes is not None else fam.default_nodes(order))]
    if len(nodes) < order + 2:
        raise ValueError(f"need at least {order + 2} nodes, got {len(nodes)}")
    w = free_reduce(w)
    jets = []
    for t in nodes:
        if w:
            jets.append(return_map_jet(fam.signature(t, w, order), order))
        else:
            jets.append(None)
    values = [[(j.c(i) if j is not None else 0) for j in jets] for i in range(1, order + 1)]
    exact = fam.exact and all(j is None or j.exact for j in jets)
    polys, residuals = [], []
    for i, vals in enumerate(values, start=1):
        idx = _spread(len(nodes), min(i, len(nodes) - 2))
        pts = [(nodes[k], vals[k] if exact else float(vals[k])) for k in idx]
        p = interpolate(pts)
        held = [k for k in range(len(nodes)) if k not in idx]
        res = max(abs(float(p(nodes[k]) - vals[k])) for k in held)
        if exact and res != 0:
            raise DegreeBoundError(f"c_{i} of word {word_text(w)} is not a polynomial of degree <= {i} in the parameter")
        if not exact and res > tol:
            raise DegreeBoundError(f"c_{i} of word {word_text(w)} misses held-out nodes by {res:.3g} > {tol:g}")
        polys.append(p)
        residuals.append(res)
    return FamilyFit(w, nodes, polys, residuals, exact, values)


def family_coefficient_polys(fam: Family, w: Sequence[int], order: int, nodes: Sequence | None = None, tol: float = 1e-9) -> list[Poly1]:
    return fit_family(fam, w, order, nodes, tol).polys


@dataclass(frozen=True)
class BadInterval:
    lo: Fraction
    hi: Fraction
    word: Word
    index: int

    def contains(self, t) -> bool:
        return self.lo <= t <= self.hi

    def to_json(self) -> dict:
        return {"lo": q_str(self.lo), "hi": q_str(self.hi), "word": word_text(self.word), "index": self.index}


@dataclass
class BadSet:
    domain: tuple
    intervals: list[BadInterval] = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)

    def contains(self, t) -> bool:
        t = q(t)
        return any(iv.contains(t) for iv in self.intervals)

    def is_empty(self) -> bool:
        return not self.intervals

    def to_json(self) -> dict:
        return {
            "domain": [q_str(self.domain[0]), q_str(self.domain[1])],
            "intervals": [iv.to_json() for iv in self.intervals],
        }


class BaseNotCertifiedError(ValueError):
    pass


def _lebesgue(nodes: Sequence[Fraction], lo, hi) -> float:
    xs = np.array([float(t) for t in nodes])
    grid = np.linspace(float(lo), float(hi), 401)
    total = np.zeros_like(grid)
    for k, xk in enumerate(xs):
        others = np.delete(xs, k)
        total += np.abs(np.prod((grid[:, None] - others) / (xk - others), axis=1))
    return float(total.max())


def uncertain_set(p: Poly1, err: Fraction, interval: tuple) -> list[tuple[Fraction, Fraction]]:
    """Closed subintervals of ``interval`` where |p| <= err cannot be excluded (err constant >= 0)."""
    lo, hi = q(interval[0]), q(interval[1])
    if err == 0:
        return [(a, b) for a, b in isolate_roots(p, (lo, hi))]
    cuts = {lo, hi}
    for shifted in (p - Poly1([err]), p + Poly1([err])):
        if shifted.is_zero():
            continue
        for a, b in isolate_roots(shifted, (lo, hi)):
            cuts.update((a, b))
    cuts = sorted(cuts)
    out: list[tuple[Fraction, Fraction]] = []

    def bad(x):
        return abs(p(x)) <= err

    for a, b in zip(cuts, cuts[1:]):
        if bad((a + b) / 2) or bad(a) or bad(b):
            if out and out[-1][1] >= a:
                out[-1] = (out[-1][0], b)
            else:
                out.append((a, b))
    for x in cuts:
        if bad(x) and not any(a <= x <= b for a, b in out):
            out.append((x, x))
    return sorted(out)


def base_witness(fam: Family, w: Word, order: int):
    """Witness index at the base parameter, computed exactly when the base curve is rational."""
    sig = fam.base_signature(w, order) if hasattr(fam, "base_signature") else fam.signature(fam.base_param, w, order)
    jet = return_map_jet(sig, order)
    return first_departure(jet), jet


def bad_set(fam: Family, words: Sequence[Sequence[int]], order: int, interval: tuple | None = None,
            nodes: Sequence | None = None, tol: float = 1e-9) -> BadSet:
    """Parameters where some word's witness coefficient polynomial may vanish."""
    interval = tuple(q(x) for x in (interval or fam.domain))
    out = BadSet(interval)
    seen = set()
    for w in words:
        w = free_reduce(w)
        if not w or w in seen:
            continue
        seen.add(w)
        j, _ = base_witness(fam, w, order)
        if j is None:
            raise BaseNotCertifiedError(f"word {word_text(w)} has no nonzero coefficient up to order {order} at the base curve")
        fit = fit_family(fam, w, order, nodes, tol)
        p = fit.poly(j)
        if fit.exact:
            if p.is_zero():
                raise DegreeBoundError(f"witness polynomial c_{j} of word {word_text(w)} vanishes identically")
            ivs = isolate_roots(p, interval)
        else:
            pe = p.exact()
            if pe.is_zero():
                raise DegreeBoundError(f"witness polynomial c_{j} of word {word_text(w)} vanishes identically")
            resid = max(fit.residuals[j - 1], 1e-13 * max(1.0, max(abs(float(c)) for c in pe.coeffs)))
            err = q(10 * resid * _lebesgue(fit.nodes, *interval))
            ivs = uncertain_set(pe, err, interval)
        out.witnesses[w] = (j, p)
        out.intervals.extend(BadInterval(a, b, w, j) for a, b in ivs)
    out.intervals.sort(key=lambda iv: (iv.lo, iv.hi, iv.word))
    return out


def pick_parameters(bad: BadSet, targets: Sequence, toward) -> list[Fraction]:
    """Nudge each target toward ``toward`` until it clears the bad set and every witness polynomial is nonzero."""
    out = []
    toward = q(toward)
    for t in targets:
        t = q(t)
        step = abs(toward - t) / 8
        for _ in range(64):
            if not bad.contains(t) and all(p(t) != 0 for _, p in bad.witnesses.values()):
                break
            t = t + step if toward > t else t - step
            step /= 2
        else:
            raise DeformError(f"could not find a good parameter near {t}")
        out.append(t)
    return out
