"""Exact rational scalars, univariate polynomials, interpolation and real-root isolation."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction


class DuplicateNodeError(ValueError):
    pass


class ZeroPolynomialError(ValueError):
    pass


def q(value) -> Fraction:
    """Coerce ints, Fractions, decimal strings and "p/q" strings to a Fraction.

    Floats are converted exactly (binary expansion), never rounded.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def q_str(value: Fraction) -> str:
    value = q(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class Poly1:
    """Polynomial in one variable; ``coeffs[i]`` multiplies ``x**i``.

    Coefficients are normally Fractions.  Float coefficients are tolerated for
    evaluation-only use (smoothed families) but root isolation converts them
    to Fractions first.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [c if isinstance(c, (Fraction, float)) else q(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple = tuple(cs)

    @classmethod
    def x(cls) -> "Poly1":
        return cls([0, 1])

    @classmethod
    def const(cls, c) -> "Poly1":
        return cls([c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __call__(self, x):
        if not self.coeffs:
            return Fraction(0) if isinstance(x, (int, Fraction)) else 0 * x
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly1):
            other = Poly1([other])
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Poly1(0)"
        return "Poly1([" + ", ".join(q_str(c) if isinstance(c, Fraction) else repr(c) for c in self.coeffs) + "])"

    def __neg__(self) -> "Poly1":
        return Poly1([-c for c in self.coeffs])

    def __add__(self, other) -> "Poly1":
        if not isinstance(other, Poly1):
            other = Poly1([other])
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly1([self.coeff(i) + other.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __sub__(self, other) -> "Poly1":
        if not isinstance(other, Poly1):
            other = Poly1([other])
        return self + (-other)

    def __rsub__(self, other) -> "Poly1":
        return (-self) + other

    def __mul__(self, other) -> "Poly1":
        if not isinstance(other, Poly1):
            return Poly1([c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return Poly1()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly1(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly1":
        out = Poly1([1])
        for _ in range(n):
            out = out * self
        return out

    def derivative(self) -> "Poly1":
        return Poly1([i * c for i, c in enumerate(self.coeffs)][1:])

    def antiderivative(self) -> "Poly1":
        """Primitive vanishing at 0."""
        return Poly1([Fraction(0)] + [c / (i + 1) for i, c in enumerate(self.coeffs)])

    def compose(self, inner: "Poly1") -> "Poly1":
        """``self(inner(x))``."""
        out = Poly1()
        for c in reversed(self.coeffs):
            out = out * inner + c
        return out

    def divmod(self, other: "Poly1") -> tuple["Poly1", "Poly1"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quot = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        lead = other.leading
        dd = other.degree
        while len(rem) - 1 >= dd and rem:
            shift = len(rem) - 1 - dd
            f = rem[-1] / lead
            quot[shift] = f
            for i, c in enumerate(other.coeffs):
                rem[shift + i] -= f * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return Poly1(quot), Poly1(rem)

    def monic(self) -> "Poly1":
        return self * (1 / self.leading) if self.coeffs else self

    def to_json(self) -> list[str]:
        return [q_str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence) -> "Poly1":
        return cls([q(c) for c in data])

    def exact(self) -> "Poly1":
        """Same polynomial with float coefficients replaced by their exact binary values."""
        return Poly1([q(c) for c in self.coeffs])


def poly_gcd(a: Poly1, b: Poly1) -> Poly1:
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic()


def interpolate(nodes: Sequence[tuple]) -> Poly1:
    """Unique polynomial of degree < len(nodes) through the given (x, y) pairs (Newton form)."""
    xs = [q(x) for x, _ in nodes]
    if len(set(xs)) != len(xs):
        raise DuplicateNodeError("interpolation nodes must have distinct abscissae")
    ys = [y if isinstance(y, float) else q(y) for _, y in nodes]
    n = len(xs)
    dd = list(ys)
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level])
    out = Poly1()
    for i in range(n - 1, -1, -1):
        out = out * Poly1([-xs[i], 1]) + dd[i]
    return out


def sturm_sequence(p: Poly1) -> list[Poly1]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        r = seq[-2].divmod(seq[-1])[1]
        if r.is_zero():
            break
        seq.append(-r)
    return [s for s in seq if not s.is_zero()]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _variations(seq: list[Poly1], x: Fraction) -> int:
    signs = [s for s in (_sign(p(x)) for p in seq) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def squarefree(p: Poly1) -> Poly1:
    g = poly_gcd(p, p.derivative())
    if g.degree <= 0:
        return p
    return p.divmod(g)[0]


def count_roots(p: Poly1, lo, hi) -> int:
    """Number of distinct real roots in the half-open interval (lo, hi]."""
    p = squarefree(p.exact())
    seq = sturm_sequence(p)
    return _variations(seq, q(lo)) - _variations(seq, q(hi))


def isolate_roots(p: Poly1, interval: tuple, width=None) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational intervals, one per distinct real root of ``p`` in the closed interval.

    An interval ``(r, r)`` means ``r`` is an exact rational root.  Otherwise the
    root lies strictly inside ``(a, b)`` and ``p`` changes sign across it.  If
    ``width`` is given every non-degenerate interval is refined below it.
    """
    p = p.exact()
    if p.is_zero():
        raise ZeroPolynomialError("cannot isolate the roots of the zero polynomial")
    lo, hi = q(interval[0]), q(interval[1])
    if lo > hi:
        raise ValueError("empty interval")
    sq = squarefree(p)
    out: list[tuple[Fraction, Fraction]] = []
    if sq.degree <= 0:
        return out
    if sq.degree == 1:
        r = -sq.coeff(0) / sq.coeff(1)
        return [(r, r)] if lo <= r <= hi else []
    seq = sturm_sequence(sq)
    if sq(lo) == 0:
        out.append((lo, lo))
    stack = [(lo, hi, _variations(seq, lo) - _variations(seq, hi))]
    found = []
    while stack:
        a, b, n = stack.pop()
        if n == 0:
            continue
        if n == 1 and sq(b) == 0:
            found.append((b, b))
            continue
        m = (a + b) / 2
        if n == 1 and sq(a) != 0:
            found.append((m, m) if sq(m) == 0 else (a, b))
            continue
        va, vm, vb = _variations(seq, a), _variations(seq, m), _variations(seq, b)
        stack.append((m, b, vm - vb))
        stack.append((a, m, va - vm))
    out.extend(sorted(found))
    if width is not None:
        out = [refine_root(sq, iv, width) for iv in out]
    return out


def refine_root(p: Poly1, iv: tuple, width) -> tuple[Fraction, Fraction]:
    """Bisect an isolating interval (sign change across it) until narrower than ``width``."""
    a, b = q(iv[0]), q(iv[1])
    if a == b:
        return (a, b)
    p = squarefree(p.exact())
    width = q(width)
    sa = _sign(p(a))
    if sa == 0:
        return (a, a)
    if _sign(p(b)) == 0:
        return (b, b)
    while b - a > width:
        m = (a + b) / 2
        sm = _sign(p(m))
        if sm == 0:
            return (m, m)
        if sm == sa:
            a = m
        else:
            b = m
    return (a, b)
