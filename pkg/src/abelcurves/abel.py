"""Numerical first-return maps of dv/dt = a1 v^2 + a2 v^3 on [0, 1].

The ODE is integrated with an adaptive high-order Taylor method in mpmath
arithmetic, restarting at every coefficient breakpoint.  Constant-coefficient
maps also have a closed form through the logarithmic first integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .exact import Poly1
from .paths import CoefficientPair, PlanarPath, derivative
from .signature import path_signature, return_map_jet

R_MAX = 0.2
GUARD = 1e6
DPS = 40


class FiniteEscapeError(ArithmeticError):
    pass


class ClosedFormError(ArithmeticError):
    pass


def _mp_poly(p: Poly1) -> list:
    return [mpmath.mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else mpmath.mpf(c) for c in p.coeffs]


def _shift(coeffs: list, t0) -> list:
    """Taylor coefficients of p(t0 + h) in h."""
    n = len(coeffs)
    out = list(coeffs)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            out[j] += t0 * out[j + 1]
    return out


def _taylor_step(a1: list, a2: list, v0, order: int) -> list:
    """Taylor coefficients v_0..v_order of the local solution."""
    v = [v0]
    v2 = [v0 * v0]
    v3 = [v2[0] * v0]
    for n in range(order):
        s = mpmath.mpf(0)
        for i in range(min(n, len(a1) - 1) + 1):
            s += a1[i] * v2[n - i]
        for i in range(min(n, len(a2) - 1) + 1):
            s += a2[i] * v3[n - i]
        v.append(s / (n + 1))
        m = n + 1
        v2.append(mpmath.fsum(v[i] * v[m - i] for i in range(m + 1)))
        v3.append(mpmath.fsum(v2[i] * v[m - i] for i in range(m + 1)))
    return v


def _integrate_piece(a1: list, a2: list, v, length, tol, order: int):
    t = mpmath.mpf(0)
    length = mpmath.mpf(length)
    while t < length:
        c1, c2 = _shift(a1, t), _shift(a2, t)
        coeffs = _taylor_step(c1, c2, v, order)
        tail = max(abs(coeffs[-1]), abs(coeffs[-2]), mpmath.mpf(10) ** (-mpmath.mp.dps))
        h = 0.9 * (tol / tail) ** (mpmath.mpf(1) / order)
        h = min(h, length - t)
        v = mpmath.polyval(list(reversed(coeffs)), h)
        t += h
        if abs(v) > GUARD or not mpmath.isfinite(v):
            raise FiniteEscapeError(f"solution left |v| <= {GUARD:g} at t ~ {float(t):.6g}")
    return v


def solve_abel(a: CoefficientPair, v0, tol: float = 1e-30, order: int = 30, dps: int = DPS, r_max: float = R_MAX):
    """v(1) for the Abel equation with piecewise-polynomial coefficients ``a`` (mpmath value)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if abs(float(v0)) > r_max:
        raise ValueError(f"|v0| = {abs(float(v0))} exceeds r_max = {r_max}")
    with mpmath.workdps(dps):
        v = mpmath.mpf(v0) if not isinstance(v0, Fraction) else mpmath.mpf(v0.numerator) / v0.denominator
        k = len(a.pieces)
        for a1, a2 in a.pieces:
            if a1.is_zero() and a2.is_zero():
                continue
            v = _integrate_piece(_mp_poly(a1), _mp_poly(a2), v, mpmath.mpf(1) / k, mpmath.mpf(tol), order)
        return +v


def _psi(a, b, x):
    return -a * x + b * mpmath.log(abs(a * x + b))


def _psi_inverse(a, b, y, x_start):
    """Solve psi(x) = y on the monotone branch containing ``x_start`` (large |x|)."""
    # singular points of psi' = -a^2 x / (a x + b): x = 0 and x = -b/a
    sing = sorted({mpmath.mpf(0), -b / a})
    lo = max([s for s in sing if s < x_start], default=-mpmath.inf)
    hi = min([s for s in sing if s > x_start], default=mpmath.inf)

    def f(x):
        return _psi(a, b, x) - y

    def fp(x):
        return -a * a * x / (a * x + b)

    # asymptotic guess from psi(x) ~ -a x + b ln|a x|
    x = (-(y) + b * mpmath.log(abs(a * x_start))) / a
    if not lo < x < hi:
        x = x_start - a
    # grow a bracket geometrically around the guess, staying inside the branch
    step = mpmath.mpf(1)
    left, right = x, x
    for _ in range(200):
        left = max(x - step, lo + (x - lo) / 2 if lo != -mpmath.inf else x - step)
        right = min(x + step, hi - (hi - x) / 2 if hi != mpmath.inf else x + step)
        if f(left) * f(right) <= 0:
            break
        step *= 2
    else:
        raise ClosedFormError(f"no bracket for psi^-1 on branch ({lo}, {hi}) for a={a}, b={b}")
    for _ in range(200):
        d = fp(x)
        xn = x - f(x) / d if d != 0 else (left + right) / 2
        if not left < xn < right:
            xn = (left + right) / 2
        fx = f(xn)
        if fx == 0:
            return xn
        if f(left) * fx < 0:
            right = xn
        else:
            left = xn
        if abs(xn - x) <= mpmath.eps * 16 * (1 + abs(xn)):
            return xn
        x = xn
    raise ClosedFormError(f"Newton did not converge for a={a}, b={b}, y={y}")


def closed_form_P(a, b, r, dps: int = 30) -> float:
    """Return map of dv/dt = a v^2 + b v^3 on [0, 1] from its logarithmic first integral."""
    if a == 0 and b == 0:
        raise ValueError("|a| + |b| must be nonzero")
    if r == 0:
        return 0.0
    with mpmath.workdps(dps):
        a, b, r = mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(r)
        if a == 0:
            disc = 1 - 2 * b * r * r
            if disc <= 0:
                raise ClosedFormError("finite escape: 1 - 2 b r^2 <= 0")
            return float(r / mpmath.sqrt(disc))
        x0 = 1 / r
        if a * x0 + b == 0:
            raise ClosedFormError("initial value on the singular line a x + b = 0")
        y = a * a + _psi(a, b, x0)
        x1 = _psi_inverse(a, b, y, x0)
        # the solution must stay on the branch: a x + b keeps its sign along [x0, x1]
        if (a * x1 + b) * (a * x0 + b) <= 0 or x1 * x0 <= 0:
            raise ClosedFormError("solution leaves the principal branch of psi")
        return float(1 / x1)


def compose_closed_forms(pairs: Sequence[tuple], r) -> float:
    """P_{pairs[0]} o ... o P_{pairs[-1]} at r; the rightmost pair acts first."""
    v = r
    for a, b in reversed(list(pairs)):
        v = closed_form_P(a, b, v)
    return v


@dataclass
class ConvergenceRow:
    r: float
    p_ode: object
    p_jet: object
    residual: float
    relative: float
    error: str | None = None


@dataclass
class ConvergenceReport:
    order: int
    rows: list[ConvergenceRow] = field(default_factory=list)
    slope: float | None = None

    def to_csv(self) -> str:
        lines = ["r,p_ode,p_jet,residual"]
        for row in self.rows:
            if row.error:
                lines.append(f"{row.r!r},,,{row.error}")
            else:
                lines.append(f"{row.r!r},{mpmath.nstr(row.p_ode, 25)},{mpmath.nstr(row.p_jet, 25)},{row.residual!r}")
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {
            "order": self.order,
            "slope": self.slope,
            "rows": [
                {"r": row.r, "residual": row.residual, "relative": row.relative, "error": row.error}
                for row in self.rows
            ],
        }


def convergence_report(a: PlanarPath, order: int, r_grid: Sequence[float], tol: float = 1e-32, dps: int = DPS) -> ConvergenceReport:
    """Compare the ODE return map with the order-``order`` jet on ``r_grid`` and fit the log-log slope."""
    jet = return_map_jet(path_signature(a, order), order)
    coeffs = derivative(a)
    report = ConvergenceReport(order)
    with mpmath.workdps(dps):
        mp_coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in jet.coeffs]
        for r in r_grid:
            try:
                p_ode = solve_abel(coeffs, r, tol=tol, dps=dps)
            except (FiniteEscapeError, ValueError) as exc:
                report.rows.append(ConvergenceRow(r, None, None, math.nan, math.nan, str(exc)))
                continue
            rr = mpmath.mpf(r)
            p_jet = rr + sum(c * rr ** (i + 1) for i, c in enumerate(mp_coeffs, start=1))
            res = abs(p_ode - p_jet)
            report.rows.append(ConvergenceRow(r, p_ode, p_jet, float(res), float(res / abs(p_ode)) if p_ode else 0.0))
    good = [(row.r, row.residual) for row in report.rows if row.error is None and row.residual > 0]
    if len(good) >= 2:
        x = np.log([abs(r) for r, _ in good])
        y = np.log([res for _, res in good])
        report.slope = float(np.polyfit(x, y, 1)[0])
    return report
