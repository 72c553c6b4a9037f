from fractions import Fraction
from math import factorial

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import oracle
from abelcurves.exact import Poly1
from abelcurves.jets import compose
from abelcurves.paths import PlanarPath, Segment, concat, invert, translate
from abelcurves.signature import (
    DepthError,
    Signature,
    chen_concat,
    linear_transform,
    path_signature,
    return_map_jet,
    sig_invert,
    sig_scale,
    weight,
)
from conftest import closed_polylines, cubic_segments, polylines, small

F = Fraction
SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)]


def joined(a, b):
    """Paths pa, pb with pb ending where pa starts, so concat(pa, pb) is defined."""
    pa = PlanarPath.polyline(a)
    pb = translate(PlanarPath.polyline(b), (pa.start[0] - F(b[-1][0]), pa.start[1] - F(b[-1][1])))
    return pa, pb


def test_constant_path_zero():
    sig = path_signature(PlanarPath.constant((2, 3)), 4)
    assert all(v == 0 for _, v in sig.items())


def test_single_segment_closed_form():
    sig = path_signature(PlanarPath.polyline([(0, 0), (1, 2)]), 4)
    assert sig[(1, 2)] == 1
    # I_w = prod(components) / k!
    for w, v in sig.items():
        prod = 1
        for i in w:
            prod *= (1, 2)[i - 1]
        assert v == F(prod, factorial(len(w)))


def test_square_green():
    sig = path_signature(PlanarPath.polyline(SQUARE), 4)
    assert sig[(1, 2)] == 1 and sig[(2, 1)] == -1


def test_frozen_oracle_values():
    # reference: sympy ordered-simplex recursion for (0,0)->(1,2)->(3,1), depth 3
    expected = {(1,): F(3), (2,): F(1), (1, 1): F(9, 2), (1, 2): F(-1), (2, 1): F(4), (2, 2): F(1, 2),
                (1, 1, 1): F(9, 2), (1, 1, 2): F(-11, 6), (1, 2, 1): F(2, 3), (1, 2, 2): F(1, 2),
                (2, 1, 1): F(17, 3), (2, 1, 2): F(-2), (2, 2, 1): F(3), (2, 2, 2): F(1, 6)}
    sig = path_signature(PlanarPath.polyline([(0, 0), (1, 2), (3, 1)]), 3)
    assert dict(sig.items()) == expected


@settings(max_examples=15)
@given(polylines(max_pts=4))
def test_against_oracle(pts):
    sig = path_signature(PlanarPath.polyline(pts), 3)
    assert dict(sig.items()) == oracle.signature(pts, 3)


@settings(max_examples=10)
@given(cubic_segments())
def test_polynomial_segment_against_oracle(seg):
    cx, cy = seg
    path = PlanarPath([Segment(Poly1(cx), Poly1(cy))])
    sx = sum(oracle.sp.Rational(str(c)) * oracle.tau**i for i, c in enumerate(cx))
    sy = sum(oracle.sp.Rational(str(c)) * oracle.tau**i for i, c in enumerate(cy))
    assert dict(path_signature(path, 3).items()) == oracle.signature([(sx, sy)], 3)


def test_reparametrization_invariance():
    one = PlanarPath.polyline([(0, 0), (2, 2)])
    two = PlanarPath.polyline([(0, 0), (1, 1), (2, 2)])
    curved = PlanarPath([Segment(Poly1([0, 0, 2]), Poly1([0, 0, 2]))])
    assert path_signature(one, 5) == path_signature(two, 5) == path_signature(curved, 5)


def test_chen_identity_element():
    sa = path_signature(PlanarPath.polyline(SQUARE), 4)
    assert chen_concat(sa, Signature.zero(4)) == sa
    assert chen_concat(Signature.zero(4), sa) == sa


def test_sig_invert_examples():
    assert sig_invert(Signature.zero(3)) == Signature.zero(3)
    assert sig_invert(path_signature(PlanarPath.polyline([(0, 0), (1, 0)]), 2))[(1,)] == -1


@pytest.mark.parametrize("w,i,expected", [((1,), 1, 1), ((1, 2), 3, 3), ((2, 1), 3, 2), ((1, 1, 1), 3, 6)])
def test_weight(w, i, expected):
    assert weight(w, i) == expected


def test_weight_mismatch():
    with pytest.raises(ValueError):
        weight((1, 2), 2)


def test_zero_signature_identity_jet():
    assert return_map_jet(Signature.zero(6), 6).coeffs == (0,) * 6


def test_square_jet_frozen():
    # reference: sympy series solution of the Abel equation, segment by segment
    jet = return_map_jet(path_signature(PlanarPath.polyline(SQUARE), 8), 8)
    assert list(jet.coeffs) == [0, 0, 1, 1, F(3, 2), 4, F(15, 2), F(29, 2)]


def test_rectangle_jet_frozen():
    jet = return_map_jet(path_signature(PlanarPath.polyline([(0, 0), (2, 0), (2, 1), (0, 1), (0, 0)]), 5), 5)
    assert list(jet.coeffs) == [0, 0, 2, 4, 9]


def test_depth_errors():
    sig = path_signature(PlanarPath.polyline(SQUARE), 2)
    with pytest.raises(DepthError):
        sig[(1, 1, 1)]
    with pytest.raises(DepthError):
        return_map_jet(sig, 3)
    with pytest.raises(DepthError):
        path_signature(PlanarPath.polyline(SQUARE), 13)


@settings(max_examples=8)
@given(polylines(max_pts=4))
def test_jet_against_oracle(pts):
    jet = return_map_jet(path_signature(PlanarPath.polyline(pts), 4), 4)
    assert list(jet.coeffs) == oracle.jet(pts, 4)


@given(polylines(), polylines())
def test_chen_law(a, b):
    pa, pb = joined(a, b)
    assert path_signature(concat(pa, pb), 5) == chen_concat(path_signature(pa, 5), path_signature(pb, 5), 5)


@given(cubic_segments(), polylines())
def test_chen_law_polynomial(seg, b):
    cx, cy = seg
    pa = PlanarPath([Segment(Poly1(cx), Poly1(cy))])
    pb = translate(PlanarPath.polyline(b), (-F(b[-1][0]), -F(b[-1][1])))
    assert path_signature(concat(pa, pb), 6) == chen_concat(path_signature(pa, 6), path_signature(pb, 6), 6)


@given(polylines())
def test_inverse_law(a):
    p = PlanarPath.polyline(a)
    assert path_signature(invert(p), 5) == sig_invert(path_signature(p, 5))


@given(closed_polylines())
def test_closed_identities(a):
    sig = path_signature(PlanarPath.polyline(a), 3)
    jet = return_map_jet(sig, 2)
    assert jet.coeffs == (0, 0)
    assert sig[(1,)] == 0 and sig[(2,)] + 2 * sig[(1, 1)] == 0
    assert sig[(1, 2)] + sig[(2, 1)] == 0


@given(polylines(max_pts=4), polylines(max_pts=4))
def test_morphism_law(a, b):
    pa, pb = joined(a, b)
    sa, sb = path_signature(pa, 6), path_signature(pb, 6)
    assert return_map_jet(chen_concat(sa, sb), 6) == compose(return_map_jet(sa, 6), return_map_jet(sb, 6))


@given(polylines(), st.fractions(min_value=F(1, 10), max_value=4, max_denominator=10))
def test_dilation_homogeneity(a, s):
    p = PlanarPath.polyline(a)
    scaled = PlanarPath.polyline([(s * F(x), s * F(y)) for x, y in a])
    big = path_signature(scaled, 4)
    assert big == sig_scale(path_signature(p, 4), s)
    for w, v in path_signature(p, 4).items():
        assert big[w] == s ** len(w) * v


@given(polylines(), small, small, small, small)
def test_linear_transform(a, m00, m01, m10, m11):
    image = [(m00 * F(x) + m01 * F(y), m10 * F(x) + m11 * F(y)) for x, y in a]
    assume(all(p != q for p, q in zip(image, image[1:])))
    m = [[m00, m01], [m10, m11]]
    assert path_signature(PlanarPath.polyline(image), 4) == linear_transform(path_signature(PlanarPath.polyline(a), 4), m)
