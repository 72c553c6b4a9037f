import sys
from fractions import Fraction
from pathlib import Path

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small = st.fractions(min_value=-3, max_value=3, max_denominator=6)
points = st.tuples(small, small)


@st.composite
def polylines(draw, min_pts=2, max_pts=5, start=None):
    """Vertex lists of piecewise-affine paths without zero-length pieces."""
    pts = [start if start is not None else draw(points)]
    for _ in range(draw(st.integers(min_pts - 1, max_pts - 1))):
        p = draw(points.filter(lambda p, last=pts[-1]: p != last))
        pts.append(p)
    return pts


@st.composite
def closed_polylines(draw, max_pts=5):
    pts = draw(polylines(min_pts=3, max_pts=max_pts))
    if pts[-1] == pts[0]:
        return pts
    return pts + [pts[0]]


@st.composite
def cubic_segments(draw):
    """Coefficient lists (constant first) of a polynomial segment starting at the origin."""
    cx = [Fraction(0)] + draw(st.lists(small, min_size=1, max_size=3))
    cy = [Fraction(0)] + draw(st.lists(small, min_size=1, max_size=3))
    if all(c == 0 for c in cx[1:] + cy[1:]):
        cx[1] = Fraction(1)
    return cx, cy


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
