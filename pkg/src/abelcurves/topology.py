"""Embedded curve graphs based at the origin, their free fundamental groups, and word loops."""
from __future__ import annotations

import hashlib
import json
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exact import Poly1, q, q_str
from .paths import PlanarPath, Point, Segment, chain, invert, translate


class CurveError(ValueError):
    pass


class DisconnectedError(CurveError):
    pass


class OriginError(CurveError):
    pass


class EmbeddingError(CurveError):
    pass


# -- words -----------------------------------------------------------------

Word = tuple[int, ...]


def parse_word_text(text: str) -> Word:
    """Parse ``"g1 g2 g1- g2-"`` (or ``"g1 g2^-1"``) into signed generator indices."""
    out = []
    for tok in text.replace(",", " ").split():
        tok = tok.strip()
        neg = tok.endswith("-") or tok.endswith("^-1")
        tok = tok.removesuffix("^-1").removesuffix("-")
        if not tok.startswith("g"):
            raise ValueError(f"bad generator token {tok!r}")
        idx = int(tok[1:])
        out.append(-idx if neg else idx)
    return tuple(out)


def word_text(w: Word) -> str:
    return " ".join(f"g{abs(x)}" + ("-" if x < 0 else "") for x in w)


def word_inverse(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def free_reduce(w: Sequence[int]) -> Word:
    """Cancel adjacent g g^-1 pairs until none remain."""
    stack: list[int] = []
    for x in w:
        if x == 0:
            raise ValueError("generator index 0 is not allowed")
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def cyclic_reduce(w: Sequence[int]) -> Word:
    w = list(free_reduce(w))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def canonical_word(w: Sequence[int]) -> Word:
    """Least representative of the conjugacy class of w and of w^-1 (cyclically reduced)."""
    w = cyclic_reduce(w)
    if not w:
        return w
    cands = []
    for base in (w, word_inverse(w)):
        for k in range(len(base)):
            cands.append(base[k:] + base[:k])
    return min(cands, key=_word_key)


def _word_key(w: Word) -> tuple:
    return tuple((abs(x), x < 0) for x in w)


def enumerate_words(m: int, max_len: int) -> list[Word]:
    """Canonical cyclically reduced words of length 1..max_len over m generators, in canonical order."""
    letters = sorted([i for i in range(1, m + 1)] + [-i for i in range(1, m + 1)], key=lambda x: (abs(x), x < 0))
    out: list[Word] = []
    frontier: list[Word] = [()]
    for length in range(1, max_len + 1):
        nxt = []
        for w in frontier:
            for x in letters:
                if w and w[-1] == -x:
                    continue
                nxt.append(w + (x,))
        frontier = nxt
        for w in frontier:
            if w[0] == -w[-1] and length > 1:
                continue
            if canonical_word(w) == w:
                out.append(w)
    return out


# -- exact planar geometry -----------------------------------------------

def _orient(a: Point, b: Point, c: Point):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a: Point, b: Point, p: Point) -> bool:
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def segment_intersection(a: Point, b: Point, c: Point, d: Point):
    """Exact intersection of closed segments ab and cd.

    Returns None, a single point, or the string "overlap" for collinear overlap
    of positive length.
    """
    o1, o2, o3, o4 = _orient(a, b, c), _orient(a, b, d), _orient(c, d, a), _orient(c, d, b)
    if o1 == 0 and o2 == 0:
        # collinear: project on the dominant axis
        axis = 0 if a[0] != b[0] or c[0] != d[0] else 1
        lo1, hi1 = sorted((a[axis], b[axis]))
        lo2, hi2 = sorted((c[axis], d[axis]))
        lo, hi = max(lo1, lo2), min(hi1, hi2)
        if lo > hi:
            return None
        if lo < hi:
            return "overlap"
        for p in (a, b, c, d):
            if p[axis] == lo and _on_segment(a, b, p) and _on_segment(c, d, p):
                return p
        return None
    if (o1 > 0) != (o2 > 0) and o1 != 0 and o2 != 0 and (o3 > 0) != (o4 > 0) and o3 != 0 and o4 != 0:
        denom = (b[0] - a[0]) * (d[1] - c[1]) - (b[1] - a[1]) * (d[0] - c[0])
        s = ((c[0] - a[0]) * (d[1] - c[1]) - (c[1] - a[1]) * (d[0] - c[0])) / denom
        return (a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]))
    for p, (u, v), o in ((c, (a, b), o1), (d, (a, b), o2), (a, (c, d), o3), (b, (c, d), o4)):
        if o == 0 and _on_segment(u, v, p):
            return p
    return None


# -- curve graphs ----------------------------------------------------------

@dataclass(frozen=True)
class Edge:
    tail: int
    head: int
    path: PlanarPath


class CurveGraph:
    """A connected embedded plane graph through the origin with polynomial edges."""

    def __init__(self, vertices: Mapping[int, Point], edges: Sequence[Edge], basepoint: int, validate: bool = True):
        self.vertices: dict[int, Point] = {int(k): (q(v[0]), q(v[1])) for k, v in sorted(vertices.items())}
        self.edges: tuple[Edge, ...] = tuple(edges)
        self.basepoint = basepoint
        if validate:
            self._validate()

    # construction helpers
    @classmethod
    def from_segments(cls, points: Mapping[int, Point], pairs: Iterable[tuple[int, int]], basepoint: int | None = None, validate: bool = True) -> "CurveGraph":
        pts = {k: (q(x), q(y)) for k, (x, y) in points.items()}
        edges = [Edge(a, b, PlanarPath.polyline([pts[a], pts[b]])) for a, b in pairs]
        if basepoint is None:
            basepoint = next((k for k, p in pts.items() if p == (0, 0)), None)
            if basepoint is None:
                raise OriginError("no vertex at the origin")
        return cls(pts, edges, basepoint, validate)

    @classmethod
    def polygon(cls, points: Sequence, validate: bool = True) -> "CurveGraph":
        """Closed polygon through the listed points (first one should be the origin)."""
        pts = {i: p for i, p in enumerate(points)}
        n = len(points)
        return cls.from_segments(pts, [(i, (i + 1) % n) for i in range(n)], validate=validate)

    @property
    def rank(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    def point(self, v: int) -> Point:
        return self.vertices[v]

    def degree(self, v: int) -> int:
        return sum((e.tail == v) + (e.head == v) for e in self.edges)

    def incident(self, v: int) -> list[tuple[int, int]]:
        """(edge index, direction) pairs leaving ``v``; direction -1 means the edge is walked backwards."""
        out = []
        for i, e in enumerate(self.edges):
            if e.tail == v:
                out.append((i, 1))
            if e.head == v:
                out.append((i, -1))
        return out

    def other_end(self, i: int, direction: int) -> int:
        e = self.edges[i]
        return e.head if direction == 1 else e.tail

    def edge_path(self, i: int, direction: int = 1) -> PlanarPath:
        p = self.edges[i].path
        return p if direction == 1 else invert(p)

    def is_affine(self) -> bool:
        return all(e.path.is_affine() for e in self.edges)

    def is_rectangular(self) -> bool:
        for e in self.edges:
            for s in e.path.segments:
                if not s.is_affine():
                    return False
                (x0, y0), (x1, y1) = s.start, s.end
                if x0 != x1 and y0 != y1:
                    return False
        return True

    def segments(self) -> list[tuple[int, int, Segment]]:
        return [(i, k, s) for i, e in enumerate(self.edges) for k, s in enumerate(e.path.segments)]

    def with_points(self, moved: Mapping[int, Point], validate: bool = True) -> "CurveGraph":
        """Same combinatorics, vertices moved, every edge a straight segment between its ends."""
        pts = dict(self.vertices)
        pts.update({k: (q(x), q(y)) for k, (x, y) in moved.items()})
        edges = [Edge(e.tail, e.head, PlanarPath.polyline([pts[e.tail], pts[e.head]])) for e in self.edges]
        return CurveGraph(pts, edges, self.basepoint, validate)

    def map_points(self, fn, validate: bool = True) -> "CurveGraph":
        if not self.is_atomic():
            raise CurveError("map_points needs single-segment affine edges")
        return self.with_points({k: fn(p) for k, p in self.vertices.items()}, validate)

    def is_atomic(self) -> bool:
        return all(len(e.path.segments) == 1 and e.path.segments[0].is_affine() for e in self.edges)

    def atomize(self) -> "CurveGraph":
        """Split polyline edges so every edge is one affine segment (adds degree-2 vertices)."""
        if self.is_atomic():
            return self
        if not self.is_affine():
            raise CurveError("only affine edges can be atomized")
        pts = dict(self.vertices)
        nxt = max(pts) + 1
        lookup = {p: k for k, p in pts.items()}
        pairs = []
        for e in self.edges:
            ids = [e.tail]
            for s in e.path.segments[:-1]:
                p = s.end
                if p in lookup:
                    raise EmbeddingError(f"edge passes through existing vertex {p}")
                pts[nxt] = p
                lookup[p] = nxt
                ids.append(nxt)
                nxt += 1
            ids.append(e.head)
            pairs.extend(zip(ids, ids[1:]))
        return CurveGraph.from_segments(pts, pairs, self.basepoint)

    # validation
    def _validate(self) -> None:
        if self.basepoint not in self.vertices:
            raise OriginError(f"basepoint {self.basepoint} is not a vertex")
        if self.vertices[self.basepoint] != (0, 0):
            raise OriginError(f"basepoint must be the origin, got {self.vertices[self.basepoint]}")
        for i, e in enumerate(self.edges):
            if e.tail not in self.vertices or e.head not in self.vertices:
                raise CurveError(f"edge {i} references a missing vertex")
            if e.path.is_constant():
                raise CurveError(f"edge {i} is a constant path")
            if e.path.start != self.vertices[e.tail] or e.path.end != self.vertices[e.head]:
                raise CurveError(f"edge {i} path does not run from vertex {e.tail} to vertex {e.head}")
        self._check_embedded()
        self._check_connected()

    def _check_connected(self) -> None:
        seen = {self.basepoint}
        todo = [self.basepoint]
        adj: dict[int, set] = {v: set() for v in self.vertices}
        for e in self.edges:
            adj[e.tail].add(e.head)
            adj[e.head].add(e.tail)
        while todo:
            v = todo.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        if len(seen) != len(self.vertices):
            missing = sorted(set(self.vertices) - seen)
            raise DisconnectedError(f"curve is disconnected; unreachable vertices {missing}")

    def _check_embedded(self) -> None:
        vertex_at = {p: k for k, p in self.vertices.items()}
        if len(vertex_at) != len(self.vertices):
            raise EmbeddingError("two vertices share a location")
        segs = self.segments()
        nseg = {i: len(e.path.segments) for i, e in enumerate(self.edges)}
        boxes = [_bbox(s) for _, _, s in segs]
        for x in range(len(segs)):
            i, k, s = segs[x]
            for y in range(x + 1, len(segs)):
                j, l, t = segs[y]
                if not _boxes_meet(boxes[x], boxes[y]):
                    continue
                allowed = _allowed_contacts(self, i, k, s, j, l, t, nseg, vertex_at)
                if s.is_affine() and t.is_affine():
                    hit = segment_intersection(s.start, s.end, t.start, t.end)
                    if hit is None:
                        continue
                    if hit == "overlap" or hit not in allowed:
                        raise EmbeddingError(f"edges {i} and {j} intersect at {hit}")
                else:
                    _check_poly_pair(s, t, allowed, i, j)


def _bbox(s: Segment):
    if s.is_affine():
        xs = (s.start[0], s.end[0])
        ys = (s.start[1], s.end[1])
        return (min(xs), min(ys), max(xs), max(ys))
    pts = _sample(s, 64)
    return (pts[:, 0].min() - 1e-3, pts[:, 1].min() - 1e-3, pts[:, 0].max() + 1e-3, pts[:, 1].max() + 1e-3)


def _boxes_meet(b1, b2) -> bool:
    return not (b1[2] < b2[0] or b2[2] < b1[0] or b1[3] < b2[1] or b2[3] < b1[1])


def _allowed_contacts(g: CurveGraph, i, k, s, j, l, t, nseg, vertex_at) -> set:
    """Points where segments s (edge i, piece k) and t (edge j, piece l) may legitimately touch."""
    allowed = set()
    if i == j:
        n = nseg[i]
        if l == k + 1:
            allowed.add(s.end)
        if k == 0 and l == n - 1 and g.edges[i].tail == g.edges[i].head:
            allowed.add(s.start)
        return allowed
    s_ends = set()
    if k == 0:
        s_ends.add(s.start)
    if k == nseg[i] - 1:
        s_ends.add(s.end)
    t_ends = set()
    if l == 0:
        t_ends.add(t.start)
    if l == nseg[j] - 1:
        t_ends.add(t.end)
    for p in s_ends & t_ends:
        if p in vertex_at:
            allowed.add(p)
    return allowed


def _sample(s: Segment, n: int) -> np.ndarray:
    u = np.linspace(0.0, 1.0, n + 1)
    xs = np.polyval([float(c) for c in reversed(s.x_poly.coeffs)] or [0.0], u)
    ys = np.polyval([float(c) for c in reversed(s.y_poly.coeffs)] or [0.0], u)
    return np.stack([xs, ys], axis=1)


def _second_derivative_bound(s: Segment) -> float:
    bound = 0.0
    for p in (s.x_poly, s.y_poly):
        d2 = p.derivative().derivative()
        bound += sum(abs(float(c)) for c in d2.coeffs)
    return bound


def _check_poly_pair(s: Segment, t: Segment, allowed: set, i: int, j: int, n: int = 400) -> None:
    """Numerical disjointness with a chord-sag safety margin, excluding small windows at shared vertices."""
    ps, pt = _sample(s, n), _sample(t, n)
    sag = (_second_derivative_bound(s) + _second_derivative_bound(t)) / (8 * n * n)
    mask_s = np.ones(len(ps), bool)
    mask_t = np.ones(len(pt), bool)
    win = max(n // 20, 2)
    for p in allowed:
        pf = np.array([float(p[0]), float(p[1])])
        for pts, mask in ((ps, mask_s), (pt, mask_t)):
            if np.allclose(pts[0], pf):
                mask[:win] = False
            if np.allclose(pts[-1], pf):
                mask[-win:] = False
    a, b = ps[mask], pt[mask_t]
    if len(a) == 0 or len(b) == 0:
        return
    d = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(-1)).min()
    step = max(np.linalg.norm(np.diff(ps, axis=0), axis=1).max(), np.linalg.norm(np.diff(pt, axis=0), axis=1).max())
    if d <= step + sag:
        raise EmbeddingError(f"edges {i} and {j} come within {d:.3g} (margin {step + sag:.3g}); not certifiably disjoint")
    # near a shared vertex the two branches must leave in different directions
    for p in allowed:
        pf = np.array([float(p[0]), float(p[1])])
        dirs = []
        for pts in (ps, pt):
            if np.allclose(pts[0], pf):
                dirs.append(pts[win] - pf)
            elif np.allclose(pts[-1], pf):
                dirs.append(pts[-1 - win] - pf)
        if len(dirs) == 2:
            u, v = dirs
            cos = float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))
            if cos > 1 - 1e-6:
                raise EmbeddingError(f"edges {i} and {j} are tangent at shared vertex {p}")


# -- serialization ----------------------------------------------------------

def graph_to_json(g: CurveGraph) -> dict:
    return {
        "vertices": [{"id": k, "x": q_str(p[0]), "y": q_str(p[1])} for k, p in g.vertices.items()],
        "edges": [{"from": e.tail, "to": e.head, "path": e.path.to_json()} for e in g.edges],
        "basepoint": g.basepoint,
    }


def build_graph(data: Mapping) -> CurveGraph:
    """Validate a curve description (the curve-file JSON layout) into a CurveGraph."""
    try:
        verts = {int(v["id"]): (q(v["x"]), q(v["y"])) for v in data["vertices"]}
        edges = []
        for e in data["edges"]:
            path = PlanarPath.from_json(e["path"]) if "path" in e else PlanarPath.polyline([verts[int(e["from"])], verts[int(e["to"])]])
            edges.append(Edge(int(e["from"]), int(e["to"]), path))
        base = int(data.get("basepoint", next((k for k, p in verts.items() if p == (0, 0)), -1)))
    except (KeyError, TypeError, ValueError) as exc:
        raise CurveError(f"malformed curve description: {exc}") from exc
    return CurveGraph(verts, edges, base)


def load_graph(path: str) -> CurveGraph:
    with open(path) as fh:
        return build_graph(json.load(fh))


def graph_hash(g: CurveGraph) -> str:
    blob = json.dumps(graph_to_json(g), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


# -- fundamental group -------------------------------------------------------

Walk = tuple[tuple[int, int], ...]


def spanning_tree(g: CurveGraph) -> dict[int, tuple[int, int, int]]:
    """BFS tree from the basepoint: vertex -> (parent, edge index, direction parent->vertex)."""
    parent: dict[int, tuple[int, int, int]] = {}
    seen = {g.basepoint}
    queue = deque([g.basepoint])
    while queue:
        v = queue.popleft()
        nbrs = sorted(g.incident(v), key=lambda ed: (g.other_end(*ed), ed[0], -ed[1]))
        for i, d in nbrs:
            w = g.other_end(i, d)
            if w not in seen:
                seen.add(w)
                parent[w] = (v, i, d)
                queue.append(w)
    return parent


def _tree_walk_to(parent, v: int) -> list[tuple[int, int]]:
    out = []
    while v in parent:
        p, i, d = parent[v]
        out.append((i, d))
        v = p
    return list(reversed(out))


def _walk_inverse(walk: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    return [(i, -d) for i, d in reversed(walk)]


def generator_walks(g: CurveGraph) -> list[Walk]:
    """One closed edge walk per non-tree edge: tree path out, the edge, tree path back."""
    parent = spanning_tree(g)
    tree_edges = {i for _, i, _ in parent.values()}
    out = []
    for i, e in enumerate(g.edges):
        if i in tree_edges:
            continue
        walk = _tree_walk_to(parent, e.tail) + [(i, 1)] + _walk_inverse(_tree_walk_to(parent, e.head))
        out.append(_reduce_walk(walk))
    return out


def _reduce_walk(walk: Sequence[tuple[int, int]]) -> Walk:
    stack: list[tuple[int, int]] = []
    for i, d in walk:
        if stack and stack[-1] == (i, -d):
            stack.pop()
        else:
            stack.append((i, d))
    return tuple(stack)


def walk_path(g: CurveGraph, walk: Sequence[tuple[int, int]]) -> PlanarPath:
    if not walk:
        return PlanarPath.constant(g.point(g.basepoint))
    return chain([g.edge_path(i, d) for i, d in walk])


def generators(g: CurveGraph) -> list[PlanarPath]:
    """Closed loops at the origin representing free generators g1..gm of the fundamental group."""
    return [walk_path(g, w) for w in generator_walks(g)]


def word_walk(g: CurveGraph, w: Sequence[int], gens: Sequence[Walk] | None = None) -> list[tuple[int, int]]:
    """Edge walk realizing ``w``; for w = g_a g_b the loop g_b is walked first."""
    gens = generator_walks(g) if gens is None else gens
    out: list[tuple[int, int]] = []
    for x in reversed(tuple(w)):
        if not 1 <= abs(x) <= len(gens):
            raise ValueError(f"generator index {x} outside 1..{len(gens)}")
        loop = list(gens[abs(x) - 1])
        out.extend(loop if x > 0 else _walk_inverse(loop))
    return out


def realize_word(g: CurveGraph, w: Sequence[int], gens: Sequence[Walk] | None = None) -> PlanarPath:
    return walk_path(g, word_walk(g, w, gens))


def walk_word(g: CurveGraph, walk: Sequence[tuple[int, int]]) -> Word:
    """Read off the generator word of a closed walk (the homotopy class, reduced)."""
    parent = spanning_tree(g)
    tree_edges = {i for _, i, _ in parent.values()}
    non_tree = [i for i in range(len(g.edges)) if i not in tree_edges]
    index = {i: k + 1 for k, i in enumerate(non_tree)}
    letters = [index[i] * d for i, d in walk if i in index]
    # walked order is right-to-left in word notation
    return free_reduce(tuple(reversed(letters)))


# -- example curves ------------------------------------------------------------

def square_curve(side=1) -> CurveGraph:
    s = q(side)
    return CurveGraph.polygon([(0, 0), (s, 0), (s, s), (0, s)])


def figure_eight() -> CurveGraph:
    """Two unit squares meeting at the origin, both traversed counterclockwise by the generators."""
    pts = {0: (0, 0), 1: (1, 0), 2: (1, 1), 3: (0, 1), 4: (-1, 0), 5: (-1, -1), 6: (0, -1)}
    pairs = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5), (5, 6), (6, 0)]
    return CurveGraph.from_segments(pts, pairs)


def diamond_curve() -> CurveGraph:
    return CurveGraph.polygon([(0, 0), (1, 1), (0, 2), (-1, 1)])


def lattice_curve(a1: tuple[Poly1, Poly1], a2: tuple[Poly1, Poly1], edge_selection: Iterable[tuple[str, int, int]]) -> CurveGraph:
    """Curve made of lattice edges X (translates of A1) and Y (translates of A2).

    ``edge_selection`` lists ``("X", m, n)`` for the edge from m A1(1) + n A2(1)
    to that point plus A1(1), and ``("Y", m, n)`` likewise along A2.
    """
    p1, q1 = a1
    p2, q2 = a2
    for p in (p1, q1, p2, q2):
        if p.coeff(0) != 0:
            raise ValueError("lattice polynomials must have no constant term")
    e1 = (p1(Fraction(1)), q1(Fraction(1)))
    e2 = (p2(Fraction(1)), q2(Fraction(1)))
    if e1[0] * e2[1] - e1[1] * e2[0] == 0:
        raise ValueError("A1(1) and A2(1) must be linearly independent")
    ids: dict[tuple[int, int], int] = {}
    pts: dict[int, Point] = {}

    def vid(m: int, n: int) -> int:
        if (m, n) not in ids:
            ids[(m, n)] = len(ids)
            pts[ids[(m, n)]] = (m * e1[0] + n * e2[0], m * e1[1] + n * e2[1])
        return ids[(m, n)]

    vid(0, 0)
    edges = []
    for kind, m, n in edge_selection:
        src = vid(m, n)
        if kind.upper() == "X":
            dst, base = vid(m + 1, n), PlanarPath([Segment(p1, q1)])
        elif kind.upper() == "Y":
            dst, base = vid(m, n + 1), PlanarPath([Segment(p2, q2)])
        else:
            raise ValueError(f"edge kind must be X or Y, got {kind!r}")
        edges.append(Edge(src, dst, translate(base, pts[src])))
    return CurveGraph(pts, edges, ids[(0, 0)])
