"""Planar paths with piecewise-polynomial coordinates: the primitives of coefficient pairs."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import Poly1, q

Point = tuple[Fraction, Fraction]


class PathError(ValueError):
    pass


@dataclass(frozen=True)
class Segment:
    """Coordinate polynomials of one piece, parametrized over [0, 1]."""

    x_poly: Poly1
    y_poly: Poly1

    @classmethod
    def line(cls, start, end) -> "Segment":
        (x0, y0), (x1, y1) = start, end
        x0, y0, x1, y1 = q(x0), q(y0), q(x1), q(y1)
        return cls(Poly1([x0, x1 - x0]), Poly1([y0, y1 - y0]))

    @property
    def start(self) -> Point:
        return (self.x_poly(Fraction(0)), self.y_poly(Fraction(0)))

    @property
    def end(self) -> Point:
        return (self.x_poly(Fraction(1)), self.y_poly(Fraction(1)))

    def is_pause(self) -> bool:
        return self.x_poly.degree <= 0 and self.y_poly.degree <= 0

    def is_affine(self) -> bool:
        return self.x_poly.degree <= 1 and self.y_poly.degree <= 1

    def reversed(self) -> "Segment":
        flip = Poly1([1, -1])
        return Segment(self.x_poly.compose(flip), self.y_poly.compose(flip))

    def at(self, s):
        return (self.x_poly(s), self.y_poly(s))

    def to_json(self) -> dict:
        return {"x": self.x_poly.to_json(), "y": self.y_poly.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "Segment":
        return cls(Poly1.from_json(data["x"]), Poly1.from_json(data["y"]))


class PlanarPath:
    """A continuous chain of segments, each allotted equal time on [0, 1].

    The empty chain is not allowed; the constant path is a single pause segment.
    """

    __slots__ = ("segments",)

    def __init__(self, segments: Sequence[Segment]):
        segs = tuple(segments)
        if not segs:
            raise PathError("a path needs at least one segment")
        if len(segs) > 1 and any(s.is_pause() for s in segs):
            raise PathError("zero-length segments are only allowed as the constant path")
        for k, (a, b) in enumerate(zip(segs, segs[1:])):
            if a.end != b.start:
                raise PathError(f"segments {k} and {k + 1} do not join: {a.end} != {b.start}")
        self.segments = segs

    @classmethod
    def constant(cls, point=(0, 0)) -> "PlanarPath":
        x, y = point
        return cls([Segment(Poly1([q(x)]), Poly1([q(y)]))])

    @classmethod
    def polyline(cls, points: Sequence) -> "PlanarPath":
        pts = [(q(x), q(y)) for x, y in points]
        if len(pts) == 1:
            return cls.constant(pts[0])
        return cls([Segment.line(a, b) for a, b in zip(pts, pts[1:])])

    @property
    def start(self) -> Point:
        return self.segments[0].start

    @property
    def end(self) -> Point:
        return self.segments[-1].end

    def is_constant(self) -> bool:
        return len(self.segments) == 1 and self.segments[0].is_pause()

    def is_closed(self) -> bool:
        return self.start == self.end

    def is_affine(self) -> bool:
        return all(s.is_affine() for s in self.segments)

    def displacement(self) -> Point:
        (x0, y0), (x1, y1) = self.start, self.end
        return (x1 - x0, y1 - y0)

    def vertices(self) -> list[Point]:
        return [self.start] + [s.end for s in self.segments]

    def __eq__(self, other) -> bool:
        return isinstance(other, PlanarPath) and self.segments == other.segments

    def __hash__(self) -> int:
        return hash(self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    def __repr__(self) -> str:
        return f"PlanarPath({len(self.segments)} segments, {self.start} -> {self.end})"

    def to_json(self) -> dict:
        return {"segments": [s.to_json() for s in self.segments]}

    @classmethod
    def from_json(cls, data: dict) -> "PlanarPath":
        """An empty segment list is the constant path at the origin."""
        segs = data["segments"]
        if not segs:
            return cls.constant((0, 0))
        return cls([Segment.from_json(s) for s in segs])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def concat(a: PlanarPath, b: PlanarPath) -> PlanarPath:
    """The product a*b: traverse ``b`` first, then ``a``."""
    if b.end != a.start:
        raise PathError(f"cannot form a*b: b ends at {b.end} but a starts at {a.start}")
    segs = [s for s in b.segments + a.segments if not s.is_pause()]
    if not segs:
        return PlanarPath.constant(a.start)
    return PlanarPath(segs)


def chain(paths: Sequence[PlanarPath]) -> PlanarPath:
    """Traverse ``paths`` in the listed order (left to right)."""
    if not paths:
        raise PathError("chain of no paths")
    out = paths[0]
    for p in paths[1:]:
        out = concat(p, out)
    return out


def invert(a: PlanarPath) -> PlanarPath:
    """Time reversal."""
    return PlanarPath([s.reversed() for s in reversed(a.segments)])


def translate(a: PlanarPath, offset) -> PlanarPath:
    dx, dy = q(offset[0]), q(offset[1])
    return PlanarPath([Segment(s.x_poly + dx, s.y_poly + dy) for s in a.segments])


@dataclass(frozen=True)
class CoefficientPair:
    """Abel coefficients (a1, a2) on [0, 1] as piecewise polynomials.

    Piece ``j`` lives on [j/k, (j+1)/k] and is expressed in the local time
    ``tau = t - j/k``.
    """

    pieces: tuple[tuple[Poly1, Poly1], ...]

    @property
    def breakpoints(self) -> list[Fraction]:
        k = len(self.pieces)
        return [Fraction(j, k) for j in range(k + 1)]

    def __call__(self, t):
        k = len(self.pieces)
        j = min(int(t * k), k - 1)
        tau = t - Fraction(j, k) if isinstance(t, (int, Fraction)) else t - j / k
        a1, a2 = self.pieces[j]
        return a1(tau), a2(tau)


def derivative(a: PlanarPath) -> CoefficientPair:
    """Exact derivative of ``a`` with each segment running for time 1/k."""
    k = len(a.segments)
    if a.is_constant():
        return CoefficientPair(((Poly1(), Poly1()),))
    rescale = Poly1([0, k])
    pieces = []
    for s in a.segments:
        pieces.append((s.x_poly.derivative().compose(rescale) * k, s.y_poly.derivative().compose(rescale) * k))
    return CoefficientPair(tuple(pieces))


def load_path(path: str) -> PlanarPath:
    with open(path) as fh:
        return PlanarPath.from_json(json.load(fh))
