"""Exact parameter synthesis for parametric timed automata with zone extrapolation."""

from .engine import Caps, ParamConstraint, SymbolicState, cycle_synth, eef, export_graph
from .extrapolation import ClockBounds, extrapolate, select_mode
from .geometry import ConvexPolyhedron, PolySet, parse_polyhedron, render
from .model import Pta, classify, parse_model
from .oracle import Property, check_concrete, validate
from .samples import fixture_names, load_fixture

__all__ = [
    "Caps",
    "ClockBounds",
    "ConvexPolyhedron",
    "ParamConstraint",
    "PolySet",
    "Property",
    "Pta",
    "SymbolicState",
    "check_concrete",
    "classify",
    "cycle_synth",
    "eef",
    "export_graph",
    "fixture_names",
    "extrapolate",
    "load_fixture",
    "parse_model",
    "parse_polyhedron",
    "render",
    "select_mode",
    "validate",
]
