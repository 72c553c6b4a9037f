from fractions import Fraction

import pytest

from abelcurves.deform import DeformError
from abelcurves.exact import Poly1
from abelcurves.paths import PlanarPath, Segment
from abelcurves.pipeline import Schedule, approximate_universal
from abelcurves.topology import CurveGraph, Edge, square_curve

F = Fraction


def test_tree_vacuous():
    tree = CurveGraph.from_segments({0: (0, 0), 1: (1, 2), 2: (3, 3)}, [(0, 1), (1, 2)])
    res = approximate_universal(tree, Schedule(count=3, max_len=2, order=4))
    assert len(res.emitted) == 3
    assert all(e.rank == 0 and e.report.certified for e in res.emitted)
    d = [e.d_h for e in res.emitted]
    assert d[0] > d[1] > d[2]


def test_rectangular_input_skips_to_smoothing():
    res = approximate_universal(square_curve(), Schedule(count=2, max_len=2, order=6))
    names = [s["stage"] for s in res.stages]
    assert {"stage": "rectangular", "rank": 1, "vertices": 4, "edges": 4, "skipped": True} in res.stages
    assert "rectangularize" not in names and "smoothing" in names
    assert [e.s for e in res.emitted] == [F(1, 2), F(1, 4)]
    assert all(e.report.certified and e.checks["smoothing"]["outside_bad_set"] for e in res.emitted)
    m = res.manifest()
    assert m["rank"] == 1 and len(m["curves"]) == 2 and m["schedule"]["L"] == 2


def test_no_smoothing_schedule():
    res = approximate_universal(square_curve(), Schedule(count=2, max_len=1, order=4, smoothing=False))
    assert all(e.s is None and e.d_h == 0 for e in res.emitted)


def test_curved_input_rejected():
    g = CurveGraph({0: (0, 0), 1: (1, 1)}, [Edge(0, 1, PlanarPath([Segment(Poly1([0, 1]), Poly1([0, 0, 1]))]))], 0)
    with pytest.raises(DeformError):
        approximate_universal(g)
