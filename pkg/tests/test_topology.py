import json
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from abelcurves.exact import Poly1
from abelcurves.paths import PlanarPath
from abelcurves.signature import chen_concat, path_signature
from abelcurves.topology import (
    CurveError,
    CurveGraph,
    DisconnectedError,
    EmbeddingError,
    OriginError,
    build_graph,
    canonical_word,
    cyclic_reduce,
    diamond_curve,
    enumerate_words,
    figure_eight,
    free_reduce,
    generator_walks,
    generators,
    graph_hash,
    graph_to_json,
    lattice_curve,
    parse_word_text,
    realize_word,
    segment_intersection,
    square_curve,
    walk_word,
    word_walk,
    word_inverse,
    word_text,
)

F = Fraction
t = Poly1.x()
EIGHT = figure_eight()

words2 = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=6).map(tuple)


def test_square_rank():
    g = square_curve()
    assert (len(g.vertices), len(g.edges), g.rank) == (4, 4, 1)


def test_figure_eight_rank():
    assert (len(EIGHT.vertices), len(EIGHT.edges), EIGHT.rank) == (7, 8, 2)


def test_crossing_diagonals():
    pts = {0: (0, 0), 1: (1, 1), 2: (1, 0), 3: (0, 1)}
    with pytest.raises(EmbeddingError):
        CurveGraph.from_segments(pts, [(0, 1), (2, 3)])


def test_disconnected():
    pts = {0: (0, 0), 1: (1, 0), 2: (0, 1), 3: (1, 1)}
    with pytest.raises(DisconnectedError):
        CurveGraph.from_segments(pts, [(0, 1), (2, 3)])


def test_origin_required():
    with pytest.raises(OriginError):
        CurveGraph.polygon([(1, 1), (2, 1), (2, 2)])


def test_overlapping_edges():
    pts = {0: (0, 0), 1: (2, 0), 2: (1, 0), 3: (3, 0)}
    with pytest.raises(EmbeddingError):
        CurveGraph.from_segments(pts, [(0, 1), (2, 3)])


def test_malformed_description():
    with pytest.raises(CurveError):
        build_graph({"vertices": [{"id": 0, "x": "0"}], "edges": []})


def test_json_roundtrip_and_hash():
    data = json.loads(json.dumps(graph_to_json(EIGHT)))
    g = build_graph(data)
    assert graph_to_json(g) == graph_to_json(EIGHT)
    assert graph_hash(g) == graph_hash(EIGHT)
    assert graph_hash(square_curve()) != graph_hash(square_curve(2))


def test_segment_intersection():
    assert segment_intersection((0, 0), (2, 2), (0, 2), (2, 0)) == (1, 1)
    assert segment_intersection((0, 0), (1, 0), (0, 1), (1, 1)) is None
    assert segment_intersection((0, 0), (2, 0), (1, 0), (3, 0)) == "overlap"


def test_tree_has_no_generators():
    tree = CurveGraph.from_segments({0: (0, 0), 1: (1, 0), 2: (1, 1)}, [(0, 1), (1, 2)])
    assert tree.rank == 0 and generators(tree) == []


def test_square_generator():
    (loop,) = generators(square_curve())
    assert loop.vertices() == [(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)]


def test_figure_eight_generators():
    loops = generators(EIGHT)
    assert len(loops) == 2
    assert loops[0].vertices() == [(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)]
    assert loops[1].vertices() == [(0, 0), (-1, 0), (-1, -1), (0, -1), (0, 0)]
    assert all(p.is_closed() for p in loops)


def test_realize_examples():
    g = square_curve()
    assert realize_word(g, ()).is_constant() and realize_word(g, ()).start == (0, 0)
    assert realize_word(g, (1,)) == generators(g)[0]
    back = path_signature(realize_word(g, (1, -1)), 8)
    assert all(v == 0 for _, v in back.items())


def test_word_order_matches_product():
    a, b = realize_word(EIGHT, (1,)), realize_word(EIGHT, (2,))
    ab = realize_word(EIGHT, (1, 2))
    assert ab.vertices()[:5] == b.vertices()
    assert ab.vertices()[4:] == a.vertices()


def test_free_reduce_examples():
    assert free_reduce((1, -1)) == ()
    assert free_reduce((1, 2, -2, 1)) == (1, 1)
    assert free_reduce((1, 2, -1, -2)) == (1, 2, -1, -2)
    with pytest.raises(ValueError):
        free_reduce((0,))


def test_word_text_roundtrip():
    w = parse_word_text("g1 g2 g1- g2^-1")
    assert w == (1, 2, -1, -2) and word_text(w) == "g1 g2 g1- g2-"


def brute_orbits(m, max_len):
    """Conjugacy-and-inversion classes of nontrivial words, by exhaustive closure."""
    letters = [i for i in range(1, m + 1)] + [-i for i in range(1, m + 1)]
    classes = set()
    for n in range(1, max_len + 1):
        for w in product(letters, repeat=n):
            c = cyclic_reduce(w)
            if len(c) != n:
                continue
            orbit = frozenset(x[k:] + x[:k] for x in (c, word_inverse(c)) for k in range(n))
            classes.add(orbit)
    return classes


@pytest.mark.parametrize("m,L", [(1, 3), (2, 3), (2, 4), (3, 3)])
def test_enumerate_words_classes(m, L):
    words = enumerate_words(m, L)
    assert len(words) == len(set(words)) == len(brute_orbits(m, L))
    assert all(canonical_word(w) == w for w in words)


def test_enumerate_words_counts():
    assert enumerate_words(1, 3) == [(1,), (1, 1), (1, 1, 1)]
    assert len(enumerate_words(2, 4)) == 25


def test_lattice_grid_block():
    g = lattice_curve((t, Poly1()), (Poly1(), t), [("X", 0, 0), ("Y", 1, 0), ("X", 0, 1), ("Y", 0, 0)])
    assert g.is_rectangular() and g.rank == 1


def test_lattice_cubic_cell():
    bump = (t**3 - t) * F(1, 10)
    g = lattice_curve((t, bump), (bump, t), [("X", 0, 0), ("Y", 1, 0), ("X", 0, 1), ("Y", 0, 0)])
    assert g.rank == 1 and not g.is_affine()


def test_lattice_overlap():
    bump = (t - t**3) * 3
    with pytest.raises(EmbeddingError):
        lattice_curve((t, bump), (bump, t), [("X", 0, 0), ("Y", 0, 0)])


def test_walk_word_inverts_realize():
    for w in [(1,), (2, -1), (1, 2, -1, -2), (2, 2, 1)]:
        assert walk_word(EIGHT, word_walk(EIGHT, w)) == w


@given(words2)
def test_psi_section_soundness(w):
    assert path_signature(realize_word(EIGHT, w), 6) == path_signature(realize_word(EIGHT, free_reduce(w)), 6)


@given(words2, words2)
def test_realize_is_homomorphism(w, v):
    whole = path_signature(realize_word(EIGHT, w + v), 5)
    parts = chen_concat(path_signature(realize_word(EIGHT, w), 5), path_signature(realize_word(EIGHT, v), 5))
    assert whole == parts


@st.composite
def grid_edges(draw, size=3):
    """Connected edge selections in a size x size block of the unit grid, grown from the origin."""
    def ends(e):
        kind, m, n = e
        return {(m, n), (m + 1, n) if kind == "X" else (m, n + 1)}

    every = [(k, m, n) for k in "XY" for m in range(size + 1) for n in range(size + 1)
             if (k == "X" and m < size) or (k == "Y" and n < size)]
    reached, chosen = {(0, 0)}, []
    for _ in range(draw(st.integers(1, 12))):
        cands = [e for e in every if e not in chosen and ends(e) & reached]
        e = draw(st.sampled_from(cands))
        chosen.append(e)
        reached |= ends(e)
    return chosen


@given(grid_edges())
def test_rank_invariance(sel):
    g = lattice_curve((t, Poly1()), (Poly1(), t), sel)
    assert len(generators(g)) == len(g.edges) - len(g.vertices) + 1 == g.rank
    assert all(p.is_closed() and p.start == (0, 0) for p in generators(g))


def test_generator_walks_deterministic():
    assert generator_walks(EIGHT) == generator_walks(build_graph(graph_to_json(EIGHT)))
    assert diamond_curve().rank == 1
