"""Iterated integrals of planar paths and the return-map coefficients built from them.

A depth-K signature is stored densely: level ``k`` is an array of shape
``(2,) * k`` whose entry at ``(i1-1, ..., ik-1)`` is

    I_{i1..ik} = integral over s1 <= ... <= sk of a_{ik}(sk) ... a_{i1}(s1),

so ``i1`` is the letter integrated first along the path.  Exact signatures use
object arrays of Fractions; float signatures (smoothed curves) use float64.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .exact import Poly1, q, q_str
from .paths import PlanarPath, Segment

MAX_DEPTH = 12

Word = tuple[int, ...]


class DepthError(ValueError):
    pass


def words(k: int) -> Iterable[Word]:
    return itertools.product((1, 2), repeat=k)


def all_words(depth: int) -> list[Word]:
    return [w for k in range(1, depth + 1) for w in words(k)]


def parse_word(text: str) -> Word:
    w = tuple(int(c) for c in text)
    if not w or any(c not in (1, 2) for c in w):
        raise ValueError(f"not an index word over {{1,2}}: {text!r}")
    return w


class Signature:
    """All iterated integrals of depth <= ``depth``; the empty word is implicitly 1."""

    __slots__ = ("levels",)

    def __init__(self, levels: Sequence[np.ndarray]):
        self.levels = tuple(levels)
        for k, arr in enumerate(self.levels, start=1):
            if arr.shape != (2,) * k:
                raise ValueError(f"level {k} has shape {arr.shape}")

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def exact(self) -> bool:
        return all(arr.dtype == object for arr in self.levels)

    @classmethod
    def zero(cls, depth: int, exact: bool = True) -> "Signature":
        if exact:
            return cls([np.full((2,) * k, Fraction(0), dtype=object) for k in range(1, depth + 1)])
        return cls([np.zeros((2,) * k) for k in range(1, depth + 1)])

    def level(self, k: int):
        if k == 0:
            return Fraction(1) if self.exact else 1.0
        return self.levels[k - 1]

    def __getitem__(self, word) -> Fraction | float:
        w = tuple(word)
        if not w:
            return self.level(0)
        if len(w) > self.depth:
            raise DepthError(f"word of depth {len(w)} exceeds signature depth {self.depth}")
        return self.levels[len(w) - 1][tuple(i - 1 for i in w)]

    def items(self):
        for k, arr in enumerate(self.levels, start=1):
            for w in words(k):
                yield w, arr[tuple(i - 1 for i in w)]

    def truncate(self, depth: int) -> "Signature":
        if depth > self.depth:
            raise DepthError(f"cannot truncate depth {self.depth} to {depth}")
        return Signature(self.levels[:depth])

    def to_float(self) -> "Signature":
        return Signature([np.asarray(arr, dtype=float) for arr in self.levels])

    def is_zero(self, tol: float | None = None) -> bool:
        if tol is None:
            return all(v == 0 for _, v in self.items())
        return all(abs(v) <= tol for _, v in self.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Signature) or other.depth != self.depth:
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.levels, other.levels))

    def max_abs_diff(self, other: "Signature") -> float:
        return max(float(abs(a - b)) for (_, a), (_, b) in zip(self.items(), other.items()))

    def __repr__(self) -> str:
        return f"Signature(depth={self.depth}, exact={self.exact})"

    def to_json(self) -> dict:
        exact = self.exact
        entries = {
            "".join(map(str, w)): (q_str(v) if exact else float(v)) for w, v in self.items()
        }
        return {"depth": self.depth, "exact": exact, "entries": dict(sorted(entries.items()))}

    @classmethod
    def from_json(cls, data: dict) -> "Signature":
        depth = int(data["depth"])
        exact = data.get("exact", True)
        sig = cls.zero(depth, exact)
        for key, val in data["entries"].items():
            w = parse_word(key)
            sig.levels[len(w) - 1][tuple(i - 1 for i in w)] = q(val) if exact else float(val)
        return sig


def _segment_signature_affine(seg: Segment, depth: int) -> Signature:
    dx = seg.x_poly.coeff(1)
    dy = seg.y_poly.coeff(1)
    u = np.array([dx, dy], dtype=object)
    levels = []
    cur = u
    for k in range(1, depth + 1):
        if k > 1:
            cur = np.multiply.outer(cur, u)
        levels.append(cur / math.factorial(k))
    return Signature(levels)


def _segment_signature_poly(seg: Segment, depth: int) -> Signature:
    # S_w(s) = int_0^s a_last(r) S_{w minus last}(r) dr, kept as exact polynomials in s
    da = (seg.x_poly.derivative(), seg.y_poly.derivative())
    prev: dict[Word, Poly1] = {(): Poly1([1])}
    levels = []
    for k in range(1, depth + 1):
        cur: dict[Word, Poly1] = {}
        arr = np.empty((2,) * k, dtype=object)
        for w in words(k):
            p = (da[w[-1] - 1] * prev[w[:-1]]).antiderivative()
            cur[w] = p
            arr[tuple(i - 1 for i in w)] = p(Fraction(1))
        prev = cur
        levels.append(arr)
    return Signature(levels)


def segment_signature(seg: Segment, depth: int) -> Signature:
    if seg.is_affine():
        return _segment_signature_affine(seg, depth)
    return _segment_signature_poly(seg, depth)


def _check_depth(depth: int) -> None:
    if depth < 1:
        raise DepthError("depth must be >= 1")
    if depth > MAX_DEPTH:
        raise DepthError(f"depth {depth} exceeds the cap {MAX_DEPTH}")


def path_signature(a: PlanarPath, depth: int) -> Signature:
    """Exact signature of ``a`` up to ``depth``."""
    _check_depth(depth)
    if a.is_constant():
        return Signature.zero(depth)
    acc = segment_signature(a.segments[0], depth)
    for seg in a.segments[1:]:
        acc = chen_concat(segment_signature(seg, depth), acc, depth)
    return acc


def chen_concat(sa: Signature, sb: Signature, depth: int | None = None) -> Signature:
    """Signature of a*b, where ``b`` is traversed first.

    I_w(a*b) = sum over splits w = u v of I_u(b) I_v(a), with I_() = 1.
    """
    if depth is None:
        depth = min(sa.depth, sb.depth)
    if sa.depth < depth or sb.depth < depth:
        raise DepthError(f"inputs of depth {sa.depth}, {sb.depth} cannot give depth {depth}")
    if sa.exact != sb.exact:
        sa, sb = sa.to_float(), sb.to_float()
    levels = []
    for k in range(1, depth + 1):
        acc = sa.level(k) + sb.level(k)
        for j in range(1, k):
            acc = acc + np.multiply.outer(sb.level(j), sa.level(k - j))
        levels.append(acc)
    return Signature(levels)


def chen_chain(sigs: Sequence[Signature], depth: int | None = None) -> Signature:
    """Signature of the pieces traversed in the listed order."""
    acc = sigs[0]
    for s in sigs[1:]:
        acc = chen_concat(s, acc, depth)
    return acc


def sig_invert(s: Signature) -> Signature:
    """Signature of the time-reversed path: I_w(a^-1) = (-1)^k I_{reverse(w)}(a)."""
    return Signature([(-1) ** k * arr.transpose() for k, arr in enumerate(s.levels, start=1)])


def sig_scale(s: Signature, c) -> Signature:
    """Signature of the dilated path c * a."""
    return Signature([arr * (c**k) for k, arr in enumerate(s.levels, start=1)])


def linear_transform(s: Signature, m) -> Signature:
    """Signature of M * a for a 2x2 matrix M (applied to every tensor slot)."""
    mat = np.asarray(m, dtype=object if s.exact and _all_exact(m) else float)
    levels = []
    for k, arr in enumerate(s.levels, start=1):
        out = arr if mat.dtype == object else np.asarray(arr, dtype=float)
        for axis in range(k):
            out = np.moveaxis(np.tensordot(mat, out, axes=([1], [axis])), 0, axis)
        levels.append(out)
    return Signature(levels)


def _all_exact(m) -> bool:
    return all(isinstance(v, (int, Fraction)) for row in m for v in row)


def weight(w: Sequence[int], i: int) -> int:
    """The combinatorial factor (i - i1 + 1)(i - i1 - i2 + 1) ... 1 attached to word ``w`` in c_i."""
    if sum(w) != i:
        raise ValueError(f"word {tuple(w)} has weight {sum(w)}, not {i}")
    out, partial = 1, 0
    for letter in w:
        partial += letter
        out *= i - partial + 1
    return out


@lru_cache(maxsize=None)
def words_of_weight(i: int) -> tuple[Word, ...]:
    out = []

    def rec(prefix: tuple, rest: int) -> None:
        if rest == 0:
            out.append(prefix)
            return
        for letter in (1, 2):
            if letter <= rest:
                rec(prefix + (letter,), rest - letter)

    rec((), i)
    return tuple(out)


def return_map_coefficient(s: Signature, i: int):
    return sum((weight(w, i) * s[w] for w in words_of_weight(i)), Fraction(0) if s.exact else 0.0)


def return_map_jet(s: Signature, order: int):
    """Jet r + sum c_i r^(i+1), i = 1..order, of the first return map."""
    from .jets import Jet

    if s.depth < order:
        raise DepthError(f"a jet of order {order} needs signature depth >= {order}, got {s.depth}")
    coeffs = [return_map_coefficient(s, i) for i in range(1, order + 1)]
    return Jet(coeffs, exact=s.exact)
