"""Colored bounded-degree networks, antisymmetric flows, and neighborhood balls.

A network's vertices are partitioned into regular (R), source (S) and target
(T) nodes.  Every undirected edge carries one integer capacity per direction,
measured in ticks; the real capacity of a direction is ``ticks * quantum``.
All arithmetic on capacities and flows is exact (int / Fraction), never float:
the locality checks downstream compare flow values bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Union

COLORS = ("R", "S", "T")

AB = "AB"
BA = "BA"

# Flow entries are exact: integer ticks for algorithm outputs, Fraction ticks
# for seed-averaged flows.
Ticks = Union[int, Fraction]


class DirectedEdgeRef(NamedTuple):
    """An undirected edge read in one of its two directions."""

    edge_id: int
    orientation: str  # AB or BA

    def __neg__(self) -> "DirectedEdgeRef":
        return DirectedEdgeRef(self.edge_id, BA if self.orientation == AB else AB)


@dataclass(frozen=True)
class Node:
    id: int
    color: str


@dataclass(frozen=True)
class Edge:
    id: int
    a: int
    b: int
    cap_ab: int
    cap_ba: int

    def cap(self, orientation: str) -> int:
        return self.cap_ab if orientation == AB else self.cap_ba


@dataclass(frozen=True, eq=False)
class ColoredGraph:
    """Immutable network: R/S/T-colored nodes, two-way integer capacities.

    Node and edge ids are stable; subgraph extraction preserves them, which is
    what lets a local run and a global run agree on path labels.  Identity
    (not structure) is used for equality and hashing so graphs can key caches.
    """

    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    degree_bound: int
    capacity_bound_ticks: int
    quantum: Fraction = Fraction(1)

    # Derived lookups, built once at construction.
    _node_by_id: dict = field(init=False, repr=False)
    _edge_by_id: dict = field(init=False, repr=False)
    _incident: dict = field(init=False, repr=False)

    def __post_init__(self) -> None:
        node_by_id = {nd.id: nd for nd in self.nodes}
        edge_by_id = {e.id: e for e in self.edges}
        incident: dict[int, list[int]] = {nd.id: [] for nd in self.nodes}
        for e in self.edges:
            if e.a in incident:
                incident[e.a].append(e.id)
            if e.b in incident and e.b != e.a:
                incident[e.b].append(e.id)
        for eids in incident.values():
            eids.sort()
        object.__setattr__(self, "_node_by_id", node_by_id)
        object.__setattr__(self, "_edge_by_id", edge_by_id)
        object.__setattr__(self, "_incident", incident)

    @property
    def n(self) -> int:
        return len(self.nodes)

    def node(self, node_id: int) -> Node:
        try:
            return self._node_by_id[node_id]
        except KeyError:
            raise ValueError(f"unknown node id {node_id}") from None

    def edge(self, edge_id: int) -> Edge:
        try:
            return self._edge_by_id[edge_id]
        except KeyError:
            raise ValueError(f"unknown edge id {edge_id}") from None

    def incident_edge_ids(self, node_id: int) -> list[int]:
        if node_id not in self._incident:
            raise ValueError(f"unknown node id {node_id}")
        return list(self._incident[node_id])

    def nodes_of_color(self, color: str) -> list[int]:
        return sorted(nd.id for nd in self.nodes if nd.color == color)

    def neighbors(self, node_id: int) -> list[int]:
        out = []
        for eid in self._incident[node_id]:
            e = self._edge_by_id[eid]
            out.append(e.b if e.a == node_id else e.a)
        return out


@dataclass(frozen=True, eq=False)
class Flow:
    """Antisymmetric edge function in ticks: one stored value per edge.

    ``values[edge_id]`` is the flow read in the AB orientation; the BA reading
    is its negation by construction, so antisymmetry cannot be violated by any
    stored state.  Missing edges read as 0.
    """

    values: Mapping[int, Ticks]

    @staticmethod
    def zero() -> "Flow":
        return Flow({})

    def on(self, ref: DirectedEdgeRef) -> Ticks:
        v = self.values.get(ref.edge_id, 0)
        return v if ref.orientation == AB else -v

    def on_edge(self, edge_id: int) -> Ticks:
        return self.values.get(edge_id, 0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Flow):
            return NotImplemented
        keys = set(self.values) | set(other.values)
        return all(self.values.get(k, 0) == other.values.get(k, 0) for k in keys)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class NeighborhoodView:
    """Induced ball of radius r around a node or an edge, ids preserved."""

    center: Union[int, DirectedEdgeRef]
    radius: int
    subgraph: ColoredGraph


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def raise_if_invalid(self, what: str) -> None:
        if self.violations:
            raise ValueError(f"invalid {what}: " + "; ".join(self.violations[:5]))


def validate_graph(g: ColoredGraph) -> ValidationReport:
    """Check every network invariant; violations are data, not exceptions."""
    bad: list[str] = []
    if g.degree_bound < 1:
        bad.append(f"degree bound {g.degree_bound} is not positive")
    if g.capacity_bound_ticks < 1:
        bad.append(f"capacity bound {g.capacity_bound_ticks} is not positive")
    if g.quantum <= 0:
        bad.append(f"tick quantum {g.quantum} is not positive")

    seen_nodes: set[int] = set()
    for nd in g.nodes:
        if nd.id < 0:
            bad.append(f"negative node id {nd.id}")
        if nd.id in seen_nodes:
            bad.append(f"duplicate node id {nd.id}")
        seen_nodes.add(nd.id)
        if nd.color not in COLORS:
            bad.append(f"node {nd.id} has unknown color {nd.color!r}")

    seen_edges: set[int] = set()
    for e in g.edges:
        if e.id in seen_edges:
            bad.append(f"duplicate edge id {e.id}")
        seen_edges.add(e.id)
        if e.a not in seen_nodes:
            bad.append(f"edge {e.id} endpoint a={e.a} is not a node")
        if e.b not in seen_nodes:
            bad.append(f"edge {e.id} endpoint b={e.b} is not a node")
        if e.a == e.b:
            bad.append(f"edge {e.id} is a self-loop at node {e.a}")
        for cap, side in ((e.cap_ab, "ab"), (e.cap_ba, "ba")):
            if cap < 0:
                bad.append(f"edge {e.id} cap_{side} is negative")
            elif cap > g.capacity_bound_ticks:
                bad.append(f"edge {e.id} cap_{side} above M ({cap} > {g.capacity_bound_ticks})")

    for nd in g.nodes:
        deg = len(g._incident.get(nd.id, ()))
        if deg > g.degree_bound:
            bad.append(f"degree bound exceeded at node {nd.id} ({deg} > {g.degree_bound})")

    return ValidationReport(tuple(bad))


def out_edges(g: ColoredGraph, v: int) -> list[DirectedEdgeRef]:
    """Incident edges of v, each oriented away from v, in edge-id order."""
    refs = []
    for eid in g.incident_edge_ids(v):
        e = g.edge(eid)
        refs.append(DirectedEdgeRef(eid, AB if e.a == v else BA))
    return refs


def _ball_nodes(g: ColoredGraph, starts: Iterable[int], r: int) -> set[int]:
    dist = {v: 0 for v in starts}
    frontier = list(dist)
    for layer in range(1, r + 1):
        nxt = []
        for u in frontier:
            for w in g.neighbors(u):
                if w not in dist:
                    dist[w] = layer
                    nxt.append(w)
        if not nxt:
            break
        frontier = nxt
    return set(dist)


def induced_subgraph(g: ColoredGraph, node_ids: set[int]) -> ColoredGraph:
    """Subgraph on node_ids keeping original node/edge ids, colors and caps."""
    nodes = tuple(nd for nd in g.nodes if nd.id in node_ids)
    edges = tuple(e for e in g.edges if e.a in node_ids and e.b in node_ids)
    return ColoredGraph(nodes, edges, g.degree_bound, g.capacity_bound_ticks, g.quantum)


def ball_nodes(g: ColoredGraph, center: Union[int, DirectedEdgeRef], r: int) -> frozenset[int]:
    """Node ids at hop distance <= r from a node or from either endpoint of an edge."""
    if r < 0:
        raise ValueError(f"radius must be non-negative, got {r}")
    if isinstance(center, DirectedEdgeRef):
        e = g.edge(center.edge_id)
        starts: list[int] = [e.a, e.b]
    else:
        g.node(center)
        starts = [center]
    return frozenset(_ball_nodes(g, starts, r))


def neighborhood(g: ColoredGraph, center: Union[int, DirectedEdgeRef], r: int) -> NeighborhoodView:
    """Induced ball of hop radius r around a node or around an edge's endpoints."""
    return NeighborhoodView(center, r, induced_subgraph(g, set(ball_nodes(g, center, r))))


def _net_out(g: ColoredGraph, f: Flow, v: int) -> Ticks:
    total: Ticks = 0
    for ref in out_edges(g, v):
        total += f.on(ref)
    return total


def validate_flow(g: ColoredGraph, f: Flow) -> ValidationReport:
    """Exact check of capacity, conservation and the S/T inequalities."""
    bad: list[str] = []
    for eid in f.values:
        if eid not in g._edge_by_id:
            raise ValueError(f"flow keyed on unknown edge id {eid}")
    for e in g.edges:
        v = f.on_edge(e.id)
        if v > e.cap_ab:
            bad.append(f"capacity violated on edge {e.id} (f_ab {v} > cap_ab {e.cap_ab})")
        if -v > e.cap_ba:
            bad.append(f"capacity violated on edge {e.id} (f_ba {-v} > cap_ba {e.cap_ba})")
    for nd in g.nodes:
        net = _net_out(g, f, nd.id)
        if nd.color == "R" and net != 0:
            bad.append(f"conservation violated at node {nd.id} (net out {net})")
        elif nd.color == "S" and net < 0:
            bad.append(f"source inequality violated at node {nd.id} (net out {net})")
        elif nd.color == "T" and net > 0:
            bad.append(f"target inequality violated at node {nd.id} (net out {net})")
    return ValidationReport(tuple(bad))


def flow_value(g: ColoredGraph, f: Flow) -> Ticks:
    """Total net outflow of the sources, in ticks."""
    validate_flow(g, f).raise_if_invalid("flow")
    total: Ticks = 0
    for s in g.nodes_of_color("S"):
        total += _net_out(g, f, s)
    return total


def add_flows(f: Flow, f2: Flow) -> Flow:
    out: dict[int, Ticks] = dict(f.values)
    for eid, v in f2.values.items():
        out[eid] = out.get(eid, 0) + v
    return Flow(out)


# ---------------------------------------------------------------------------
# JSON wire formats
# ---------------------------------------------------------------------------


def _quantum_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def graph_to_json(g: ColoredGraph, meta: Mapping | None = None) -> dict:
    obj = {
        "quantum": _quantum_str(g.quantum),
        "degree_bound": g.degree_bound,
        "capacity_bound_ticks": g.capacity_bound_ticks,
        "nodes": [{"id": nd.id, "color": nd.color} for nd in g.nodes],
        "edges": [
            {"id": e.id, "a": e.a, "b": e.b, "cap_ab": e.cap_ab, "cap_ba": e.cap_ba}
            for e in g.edges
        ],
    }
    if meta:
        obj["meta"] = dict(meta)
    return obj


def _require(obj: Mapping, key: str, where: str):
    if key not in obj:
        raise ValueError(f"missing field {key!r} in {where}")
    return obj[key]


def graph_from_json(obj: Mapping) -> ColoredGraph:
    try:
        quantum = Fraction(str(_require(obj, "quantum", "graph")))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad field 'quantum': {exc}") from None
    nodes = tuple(
        Node(int(_require(nd, "id", "node")), str(_require(nd, "color", "node")))
        for nd in _require(obj, "nodes", "graph")
    )
    edges = tuple(
        Edge(
            int(_require(e, "id", "edge")),
            int(_require(e, "a", "edge")),
            int(_require(e, "b", "edge")),
            int(_require(e, "cap_ab", "edge")),
            int(_require(e, "cap_ba", "edge")),
        )
        for e in _require(obj, "edges", "graph")
    )
    return ColoredGraph(
        nodes,
        edges,
        int(_require(obj, "degree_bound", "graph")),
        int(_require(obj, "capacity_bound_ticks", "graph")),
        quantum,
    )


def flow_to_json(f: Flow) -> dict:
    vals = []
    for eid in sorted(f.values):
        v = f.values[eid]
        if v == 0:
            continue
        vals.append({"id": eid, "f_ab": int(v) if isinstance(v, int) else str(Fraction(v))})
    return {"edge_values": vals}


def flow_from_json(obj: Mapping) -> Flow:
    values: dict[int, Ticks] = {}
    for item in _require(obj, "edge_values", "flow"):
        raw = _require(item, "f_ab", "flow edge value")
        v: Ticks = int(raw) if isinstance(raw, int) else Fraction(str(raw))
        values[int(_require(item, "id", "flow edge value"))] = v
    return Flow(values)


def dumps_json(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"
