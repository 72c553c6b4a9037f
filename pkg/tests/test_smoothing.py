import math
from fractions import Fraction
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from abelcurves.deform import bad_set, fit_family
from abelcurves.signature import return_map_jet
from abelcurves.smoothing import (
    SmoothingFamily,
    choose_radii,
    corner_h,
    corner_isotopy,
    corner_rho,
    gamma1_signature,
    gamma2_signature,
    h_prime,
    h_vec,
    half_core_signature,
    smoothable_corners,
)
from abelcurves.topology import enumerate_words, figure_eight, square_curve

F = Fraction
SQUARE = square_curve()
SQ_FAM = SmoothingFamily(SQUARE)


def test_rho():
    assert corner_rho(0) == 0 and corner_rho(-1) == 0
    assert corner_rho(1) == pytest.approx(math.exp(-1))


def test_h_values():
    assert corner_h(0) == 0.5 and corner_h(0.3) == 0.5
    assert corner_h(2) == 2 and corner_h(-1.5) == 1.5
    assert corner_h(0.75) == pytest.approx(0.625, abs=1e-15)


@given(st.floats(-3, 3))
def test_h_vector_and_bounds(x):
    assert h_vec([x])[0] == pytest.approx(corner_h(x), abs=1e-14)
    assert 0.5 <= corner_h(x) <= max(abs(x), 0.5) + 1e-15


@given(st.floats(0.51, 0.99))
def test_h_prime_matches_difference(x):
    d = (corner_h(x + 1e-6) - corner_h(x - 1e-6)) / 2e-6
    assert h_prime(x) == pytest.approx(d, abs=1e-5)


def test_corner_isotopy_examples():
    assert corner_isotopy(0, 1) == (0, 0.5)
    assert corner_isotopy(1.5, 0.5) == (1.5, 1.5)
    assert corner_isotopy(-0.3, 0.2) == (-0.3, pytest.approx(0.3))
    # t -> 0 recovers the corner y = |x|
    for x in (-0.2, 0.0, 0.4):
        assert corner_isotopy(x, 1e-6)[1] == pytest.approx(abs(x), abs=1e-6)
    with pytest.raises(ValueError):
        corner_isotopy(0.1, 0)


def test_half_core_against_quadrature():
    sig = half_core_signature(3)
    assert sig[(1,)] == pytest.approx(1) and sig[(2,)] == pytest.approx(0.5)
    i12 = quad(lambda s: s * h_prime(s), 0.5, 1, epsabs=1e-14)[0]
    i21 = quad(lambda s: corner_h(s) - 0.5, 0, 1, epsabs=1e-14)[0]
    assert sig[(1, 2)] == pytest.approx(i12, abs=1e-12)
    assert sig[(2, 1)] == pytest.approx(i21, abs=1e-12)
    assert sig[(1, 1, 1)] == pytest.approx(1 / 6, abs=1e-13)
    assert sig[(2, 2, 2)] == pytest.approx(1 / 48, abs=1e-13)


@given(st.fractions(0, 1, max_denominator=50))
def test_gamma2_block_law(t):
    sig = gamma2_signature(t, 6)
    assert sig.exact
    for w, v in sig.items():
        assert v == (1 - t) ** len(w) / factorial(len(w))


@given(st.fractions(F(1, 50), 1, max_denominator=50))
def test_gamma1_block_law(t):
    base, sig = half_core_signature(5), gamma1_signature(t, 5)
    for w, v in sig.items():
        assert v == pytest.approx(float(t) ** len(w) * base[w], rel=1e-12, abs=1e-15)


def test_corners_and_radii():
    assert smoothable_corners(SQUARE) == [1, 2, 3]
    radii = choose_radii(SQUARE)
    assert all(0 < r <= F(1, 4) for r in radii.values())


def test_smoothed_loop_area():
    curve = SQ_FAM.curve(F(1, 2))
    c3 = return_map_jet(curve.word_signature((1,), 3), 3).c(3)
    (pts,) = [np.concatenate(curve.polylines(4000))]
    x, y = pts[:, 0], pts[:, 1]
    shoelace = 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    assert abs(c3) < 1 and c3 == pytest.approx(abs(shoelace), abs=1e-5)


def test_smoothed_closed_identities():
    sig = SQ_FAM.curve(F(1, 3)).word_signature((1,), 3)
    jet = return_map_jet(sig, 2)
    assert abs(jet.c(1)) < 1e-12 and abs(jet.c(2)) < 1e-12


def test_smoothing_degree_bound():
    for w in enumerate_words(1, 2):
        fit = fit_family(SQ_FAM, w, 8)
        assert not fit.exact and max(fit.residuals) <= 1e-9
        assert all(p.degree <= j for j, p in enumerate(fit.polys, 1))


def test_smoothing_t_zero_is_base():
    base = SQ_FAM.base_signature((1,), 4)
    smooth = SQ_FAM.signature(F(0), (1,), 4)
    assert smooth.max_abs_diff(base) < 1e-14


@settings(max_examples=5)
@given(st.fractions(F(1, 20), 1, max_denominator=20))
def test_h1_length_decreases_with_smoothing(t):
    assert SQ_FAM.curve(t).h1_length() < 4


def test_figure_eight_bad_set_empty():
    fam = SmoothingFamily(figure_eight())
    assert bad_set(fam, enumerate_words(2, 2), 8).is_empty()
