from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from abelcurves.deform import (
    DeformError,
    GraphFamily,
    PerturbationFamily,
    TriangleFamily,
    Triangle,
    bad_set,
    corner_triangles,
    degree_reduce,
    family_coefficient_polys,
    fit_family,
    has_horizontal_edge,
    model_isotopy,
    needs_reduction,
    perturb,
    pick_parameters,
    rectangularize,
    rotate_generic,
    rotation_member,
    triangle_isotopy,
)
from abelcurves.exact import Poly1
from abelcurves.metrics import h1_length
from abelcurves.topology import CurveGraph, diamond_curve, enumerate_words, figure_eight, graph_to_json, square_curve

F = Fraction
SQUARE = square_curve()
SQUARE_CORNERS = TriangleFamily(SQUARE, corner_triangles(SQUARE, [2]))


class Shrinking(GraphFamily):
    """Rectangles [0,1] x [0, 1-2t]: c3 of g1 is the area 1 - 2t."""

    def _build(self, t, validate):
        return self.base.with_points({2: (1, 1 - 2 * t), 3: (0, 1 - 2 * t)}, validate=validate)


def x_shape():
    pts = {0: (0, 0), 1: (2, 1), 2: (-2, 3), 3: (2, 3), 4: (-2, 1), 5: (-2, -3), 6: (2, -4)}
    pairs = [(0, 1), (0, 2), (0, 3), (0, 4), (1, 3), (2, 4), (4, 5), (5, 6), (6, 1)]
    return CurveGraph.from_segments(pts, pairs)


def test_rotation_family():
    assert rotation_member(2) == (F(3, 5), F(4, 5))
    c, s = rotation_member(3)
    assert c * c + s * s == 1


def test_rotate_identity_without_horizontal():
    g = diamond_curve()
    rot, tag = rotate_generic(g)
    assert rot is g or graph_to_json(rot) == graph_to_json(g)


def test_rotate_single_horizontal():
    g = CurveGraph.polygon([(0, 0), (1, 0), (0, 1)])
    rot, tag = rotate_generic(g)
    assert not has_horizontal_edge(rot)
    assert rot.point(1) == (F(3, 5), F(4, 5))


def test_degree_reduce_unchanged():
    g = diamond_curve()
    assert graph_to_json(degree_reduce(g, F(1, 10))) == graph_to_json(g)


def test_degree_reduce_x_vertex():
    g = x_shape()
    assert needs_reduction(g, 0)
    out = degree_reduce(g, F(1, 20))
    assert out.rank == g.rank == 3
    assert max(out.degree(v) for v in out.vertices) <= 3
    assert not any(needs_reduction(out, v) for v in out.vertices)


def test_degree_reduce_horizontal_error():
    with pytest.raises(DeformError):
        degree_reduce(SQUARE, F(1, 10))


def test_rectangular_identity():
    rect, tris = rectangularize(SQUARE)
    assert graph_to_json(rect) == graph_to_json(SQUARE) and tris == []


def test_diagonal_staircase():
    g = CurveGraph.from_segments({0: (0, 0), 1: (1, 1)}, [(0, 1)])
    rect, tris = rectangularize(g)
    assert rect.is_rectangular() and rect.rank == 0
    assert h1_length(rect) == pytest.approx(2, abs=1e-12)
    assert len(tris) >= 1


def test_diamond_rectangularized():
    rect, tris = rectangularize(diamond_curve())
    assert rect.is_rectangular() and rect.rank == 1


def test_x_shape_pipeline_prep():
    rot, _ = rotate_generic(x_shape())
    rect, tris = rectangularize(degree_reduce(rot, F(1, 20)))
    assert rect.is_rectangular() and rect.rank == 3


def test_model_isotopy_example():
    p = model_isotopy(2, 1, (1, 0), F(1, 2))
    assert p == (F(5, 4), F(1, 8))
    t, a, b = F(1, 2), 2, 1
    assert p[1] == t * b * (a - p[0]) / (a * (2 - t))


def test_model_isotopy_endpoints():
    assert model_isotopy(2, 1, (F(1, 2), 0), 0) == (F(1, 2), 0)
    x, y = model_isotopy(2, 1, (F(1, 2), 0), 1)
    assert y == F(1) * (2 - x) / 2
    with pytest.raises(DeformError):
        model_isotopy(2, 1, (1, 1), F(1, 2))


@given(st.fractions(0, 1, max_denominator=20), st.fractions(0, 1, max_denominator=20), st.booleans())
def test_triangle_isotopy_on_cathetii(s, t, leg):
    tri = corner_triangles(SQUARE, [2])[0]
    (cx, cy), (ex, ey) = tri.corner, (tri.end1 if leg else tri.end2)
    p = (cx + s * (ex - cx), cy + s * (ey - cy))
    image = triangle_isotopy(tri, p, t)
    if t == 0:
        assert image == p
    if s == 1:
        assert image == p


def test_square_triangle_family():
    fit = fit_family(SQUARE_CORNERS, (1,), 3)
    assert fit.exact and max(fit.residuals) == 0
    assert fit.poly(3) == Poly1([1, -F(1, 2)])
    bad = bad_set(SQUARE_CORNERS, [(1,)], 3)
    assert bad.is_empty()


def test_endpoints_exact():
    assert graph_to_json(SQUARE_CORNERS.curve(0)) == graph_to_json(SQUARE)
    assert SQUARE_CORNERS.curve(1, validate=False).point(2) == (F(1, 2), F(1, 2))


def test_synthetic_bad_point():
    fam = Shrinking(SQUARE)
    assert fit_family(fam, (1,), 3).poly(3) == Poly1([1, -2])
    bad = bad_set(fam, [(1,)], 3)
    assert [(iv.lo, iv.hi) for iv in bad.intervals] == [(F(1, 2), F(1, 2))]
    assert bad.contains(F(1, 2)) and not bad.contains(F(1, 3))
    assert pick_parameters(bad, [F(1, 2)], toward=1)[0] > F(1, 2)


def test_constant_family():
    class Still(GraphFamily):
        def _build(self, t, validate):
            return self.base

    polys = family_coefficient_polys(Still(SQUARE), (1,), 4)
    assert all(p.degree <= 0 for p in polys)
    assert [p(F(0)) for p in polys] == [0, 0, 1, 1]


def test_degree_bounds_rectangular_to_diagonal():
    rect, tris = rectangularize(diamond_curve())
    fam = TriangleFamily(rect, tris)
    for w in enumerate_words(1, 2):
        fit = fit_family(fam, w, 8)
        assert fit.exact and max(fit.residuals) == 0
        assert all(p.degree <= j for j, p in enumerate(fit.polys, 1))


def test_perturbation_identity():
    fam = PerturbationFamily(SQUARE, [[1, 0], [0, 1]])
    assert fam.domain == (F(-1, 2), F(1, 2))
    assert graph_to_json(perturb(SQUARE, [[1, 0], [0, 1]], 0)) == graph_to_json(SQUARE)
    fit = fit_family(fam, (1,), 3)
    assert fit.poly(3) == Poly1([1, 2, 1])
    assert bad_set(fam, [(1,)], 3).is_empty()
    with pytest.raises(DeformError):
        perturb(SQUARE, [[1, 0], [0, 1]], 1)


def test_perturbation_not_embedding():
    with pytest.raises(DeformError):
        PerturbationFamily(SQUARE, [[1, 0], [0, 0]])


def test_figure_eight_triangles():
    g = figure_eight()
    fam = TriangleFamily(g, corner_triangles(g, [2, 5]))
    bad = bad_set(fam, enumerate_words(2, 2), 8)
    picked = pick_parameters(bad, [F(1, 2), F(3, 4)], toward=1)
    assert all(not bad.contains(t) for t in picked)
