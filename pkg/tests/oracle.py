"""Independent reference computations in sympy, used only by the tests.

Signatures come from the ordered-simplex recursion F_{w i}(t) = ∫ F_w a_i dt and
jets from a term-by-term power-series solution of dv/dt = a1 v^2 + a2 v^3,
segment by segment; neither shares code with the package.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

import sympy as sp

tau = sp.Symbol("tau")


def _segments(pieces):
    """pieces: list of (x_expr, y_expr) in tau over [0, 1], or a list of points (polyline)."""
    if pieces and not isinstance(pieces[0][0], sp.Basic):
        pts = [(sp.Rational(str(x)), sp.Rational(str(y))) for x, y in pieces]
        return [(x0 + (x1 - x0) * tau, y0 + (y1 - y0) * tau) for (x0, y0), (x1, y1) in zip(pts, pts[1:])]
    return pieces


def signature(pieces, depth: int) -> dict[tuple, Fraction]:
    segs = _segments(pieces)
    vals = {(): sp.Integer(1)}
    for k in range(1, depth + 1):
        for w in product((1, 2), repeat=k):
            vals[w] = sp.Integer(0)
    for x, y in segs:
        d = {1: sp.diff(x, tau), 2: sp.diff(y, tau)}
        start = dict(vals)
        run = {(): sp.Integer(1)}
        for k in range(1, depth + 1):
            for w in product((1, 2), repeat=k):
                run[w] = start[w] + sp.integrate(sp.expand(run[w[:-1]] * d[w[-1]]), (tau, 0, tau))
        vals = {w: sp.expand(f.subs(tau, 1)) for w, f in run.items()}
    return {w: Fraction(str(v)) for w, v in vals.items() if w}


def _flow(a, b, order: int):
    """Coefficients v_k(1), k = 1..order+1, of the time-one flow with v(0) = r."""
    v = [sp.Integer(0), sp.Integer(1)]
    for k in range(2, order + 2):
        sq = sum(v[i] * v[k - i] for i in range(1, k))
        cu = sum(v[i] * v[j] * v[k - i - j] for i in range(1, k) for j in range(1, k - i))
        v.append(sp.integrate(sp.expand(a * sq + b * cu), (tau, 0, tau)))
    return [sp.expand(c.subs(tau, 1)) for c in v]


def _compose(outer, inner, order: int):
    """Series coefficients (index = power of r) of outer(inner(r)), truncated."""
    r = sp.Symbol("r")
    s_in = sum(c * r**i for i, c in enumerate(inner))
    tot = sp.expand(sum(c * s_in**i for i, c in enumerate(outer)))
    return [tot.coeff(r, i) for i in range(order + 2)]


def jet(pieces, order: int) -> list[Fraction]:
    """c_1..c_order of the return map r + Σ c_i r^{i+1}, segments traversed in order."""
    segs = _segments(pieces)
    total = [sp.Integer(0), sp.Integer(1)] + [sp.Integer(0)] * order
    for x, y in segs:
        step = _flow(sp.diff(x, tau), sp.diff(y, tau), order)
        total = _compose(step, total, order)
    return [Fraction(str(c)) for c in total[2:order + 2]]
