"""Iterated integrals, Abel return-map jets and certified universality of planar curves."""
from .exact import Poly1, interpolate, isolate_roots, q
from .paths import PlanarPath, Segment, chain, concat, derivative, invert
from .signature import Signature, chen_concat, linear_transform, path_signature, return_map_jet, sig_invert, sig_scale
from .jets import Jet, compose, first_departure
from .abel import closed_form_P, compose_closed_forms, convergence_report, solve_abel
from .topology import CurveGraph, build_graph, enumerate_words, free_reduce, graph_to_json, load_graph
from .certify import area_obstruction, certify_curve, certify_word
from .deform import (
    PerturbationFamily,
    TriangleFamily,
    bad_set,
    degree_reduce,
    fit_family,
    pick_parameters,
    rectangularize,
)
from .smoothing import SmoothedCurve, SmoothingFamily
from .metrics import h1_length, hausdorff_distance
from .pipeline import Schedule, approximate_universal

__version__ = "0.1.0"
