"""Truncated series r + sum c_i r^(i+1) under composition."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .exact import q, q_str

FLOAT_THRESHOLD = 1e-9


class OrderMismatchError(ValueError):
    pass


class Jet:
    """Series ``r + sum_{i=1}^{N} c_i r^(i+1)`` truncated after ``r^(N+1)``.

    ``exact`` jets hold Fractions.  Any operation touching a float jet gives a
    float jet.
    """

    __slots__ = ("coeffs", "exact")

    def __init__(self, coeffs: Sequence, exact: bool | None = None):
        if exact is None:
            exact = all(isinstance(c, (int, Fraction)) for c in coeffs)
        self.exact = bool(exact)
        self.coeffs = tuple(q(c) for c in coeffs) if self.exact else tuple(float(c) for c in coeffs)

    @classmethod
    def identity(cls, order: int, exact: bool = True) -> "Jet":
        return cls([0] * order, exact=exact)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def c(self, i: int):
        return self.coeffs[i - 1]

    def series(self) -> list:
        """Coefficients of r^0 .. r^(N+1)."""
        zero, one = (Fraction(0), Fraction(1)) if self.exact else (0.0, 1.0)
        return [zero, one, *self.coeffs]

    def __call__(self, r):
        acc = 0 * r
        for c in reversed(self.series()):
            acc = acc * r + c
        return acc

    def __eq__(self, other) -> bool:
        return isinstance(other, Jet) and self.exact == other.exact and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.coeffs, self.exact))

    def __repr__(self) -> str:
        terms = ["r"] + [f"({q_str(c) if self.exact else c})r^{i + 1}" for i, c in enumerate(self.coeffs, 1) if c != 0]
        return "Jet(" + " + ".join(terms) + ")"

    def is_identity(self, threshold: float | None = None) -> bool:
        return first_departure(self, threshold) is None

    def to_json(self) -> dict:
        coeffs = [q_str(c) for c in self.coeffs] if self.exact else list(self.coeffs)
        return {"order": self.order, "exact": self.exact, "coeffs": coeffs}

    @classmethod
    def from_json(cls, data: dict) -> "Jet":
        exact = bool(data.get("exact", True))
        coeffs = [q(c) if exact else float(c) for c in data["coeffs"]]
        if len(coeffs) != int(data["order"]):
            raise ValueError("jet order does not match coefficient count")
        return cls(coeffs, exact=exact)


def _check(f: Jet, g: Jet) -> None:
    if f.order != g.order:
        raise OrderMismatchError(f"jets of order {f.order} and {g.order}")


def _trunc_mul(a: list, b: list, n: int) -> list:
    out = [a[0] * 0] * (n + 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j in range(min(len(b), n + 1 - i)):
            out[i + j] += x * b[j]
    return out


def compose(f: Jet, g: Jet) -> Jet:
    """Truncation of f(g(r)); ``g`` acts first."""
    _check(f, g)
    exact = f.exact and g.exact
    n = f.order + 1
    fs, gs = f.series(), g.series()
    if not exact:
        fs, gs = [float(c) for c in fs], [float(c) for c in gs]
    acc = [fs[-1]] + [fs[-1] * 0] * n
    for c in reversed(fs[:-1]):
        acc = _trunc_mul(acc, gs, n)
        acc[0] += c
    return Jet(acc[2:], exact=exact)


def invert(f: Jet) -> Jet:
    """Compositional inverse, solved coefficient by coefficient."""
    n = f.order
    h = Jet.identity(n, exact=f.exact)
    coeffs = list(h.coeffs)
    for i in range(1, n + 1):
        # the r^(i+1) coefficient of f(h) is linear in h_i with slope 1
        err = compose(f, Jet(coeffs, exact=f.exact)).coeffs[i - 1]
        coeffs[i - 1] = coeffs[i - 1] - err
    return Jet(coeffs, exact=f.exact)


def first_departure(f: Jet, threshold: float | None = None) -> int | None:
    """Smallest i with c_i nonzero (exact) or above the scaled threshold (float); None if none."""
    for i, c in enumerate(f.coeffs, start=1):
        if f.exact:
            if c != 0:
                return i
        elif abs(c) > float_threshold(i, threshold):
            return i
    return None


def float_threshold(i: int, base: float | None = None) -> float:
    """Identity threshold for the float coefficient c_i; grows mildly with the index."""
    base = FLOAT_THRESHOLD if base is None else base
    return base * (1 + i)
