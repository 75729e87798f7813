from __future__ import annotations

import sys
from pathlib import Path

from fractions import Fraction

from localflow.graph_core import ColoredGraph, Edge, Node

sys.path.insert(0, str(Path(__file__).parent))


def build_graph(colors: str, edge_list, d: int = 4, m: int = 5, quantum=Fraction(1)) -> ColoredGraph:
    """Compact builder: colors is a string like 'SRT', edges are
    (a, b, cap_ab, cap_ba) tuples; edge ids follow list order."""
    nodes = tuple(Node(i, c) for i, c in enumerate(colors))
    edges = tuple(Edge(i, a, b, cab, cba) for i, (a, b, cab, cba) in enumerate(edge_list))
    return ColoredGraph(nodes, edges, d, m, quantum)


def line_graph(colors: str, cap: int = 4, d: int = 4, m: int = 5) -> ColoredGraph:
    """Path graph over the color string with uniform two-way capacities."""
    return build_graph(colors, [(i, i + 1, cap, cap) for i in range(len(colors) - 1)], d=d, m=m)
