"""Decorated graph model shared by flow-spines and curve graphs.

A graph is a multigraph given by vertices with typed ports and edges pairing
two ``(vertex, port)`` endpoints.  Loops and parallel edges are allowed.  A
graph with no vertices is a single free circle (optionally weighted).
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterator, Optional

FLOW = "flow"
CURVE = "curve"

UNIVALENT = "univalent"
TRIVALENT = "trivalent"
FOLD = "fold"
CROSS = "cross"
END = "end"

BIVALENT_KINDS = (FOLD, CROSS, END)
PORT_LABELS = ("T", "B", "A")

PORTS = {
    UNIVALENT: ("0",),
    TRIVALENT: PORT_LABELS,
    FOLD: ("a", "b"),
    CROSS: ("a", "b"),
    END: ("a", "b"),
}


@dataclass(frozen=True)
class Vertex:
    kind: str
    height: Optional[int] = None
    sign: Optional[str] = None

    @property
    def ports(self) -> tuple[str, ...]:
        return PORTS[self.kind]

    @property
    def bivalent(self) -> bool:
        return self.kind in BIVALENT_KINDS

    def label(self) -> str:
        if self.kind in (FOLD, CROSS):
            return f"{self.kind} h={self.height}"
        if self.kind == END:
            return f"end s={self.sign}"
        return self.kind


End = tuple[str, str]


@dataclass(frozen=True)
class Edge:
    a: End
    b: End
    weight: Optional[int] = None

    def other(self, end: End) -> End:
        return self.b if end == self.a else self.a


@dataclass(frozen=True)
class DecoratedGraph:
    """Immutable decorated graph.

    ``free_circles`` has at most one entry and is only non-empty when the graph
    has no vertices; its entry is the circle weight (``None`` on flow graphs).
    """

    vertices: dict[str, Vertex] = field(default_factory=dict)
    edges: dict[str, Edge] = field(default_factory=dict)
    layer: str = FLOW
    free_circles: tuple = ()
    name: str = "g"

    # -- structure ---------------------------------------------------------
    @property
    def is_circle(self) -> bool:
        return not self.vertices and bool(self.free_circles)

    def incidence(self) -> dict[End, str]:
        """Map each occupied endpoint to its edge id (last one wins on clashes)."""
        inc = {}
        for eid, e in self.edges.items():
            inc[e.a] = eid
            inc[e.b] = eid
        return inc

    def edge_at(self, vid: str, port: str) -> str:
        return self._incidence[(vid, port)]

    @property
    def _incidence(self) -> dict[End, str]:
        cache = self.__dict__.get("_inc_cache")
        if cache is None:
            cache = self.incidence()
            object.__setattr__(self, "_inc_cache", cache)
        return cache

    def neighbours(self, vid: str) -> Iterator[tuple[str, str, End]]:
        """Yield ``(port, edge id, far end)`` for every port of ``vid``."""
        for p in self.vertices[vid].ports:
            eid = self._incidence.get((vid, p))
            if eid is not None:
                yield p, eid, self.edges[eid].other((vid, p))

    def count(self, kind: str) -> int:
        return sum(1 for v in self.vertices.values() if v.kind == kind)

    def max_weight(self) -> int:
        ws = [e.weight or 0 for e in self.edges.values()]
        ws.extend(w or 0 for w in self.free_circles)
        return max(ws, default=0)

    def with_name(self, name: str) -> "DecoratedGraph":
        return DecoratedGraph(dict(self.vertices), dict(self.edges), self.layer,
                              self.free_circles, name)

    def relabeled(self, vmap: dict[str, str], emap: Optional[dict[str, str]] = None) -> "DecoratedGraph":
        emap = emap or {e: e for e in self.edges}
        vs = {vmap[v]: x for v, x in self.vertices.items()}
        es = {emap[k]: Edge((vmap[e.a[0]], e.a[1]), (vmap[e.b[0]], e.b[1]), e.weight)
              for k, e in self.edges.items()}
        return DecoratedGraph(vs, es, self.layer, self.free_circles, self.name)

    def __repr__(self) -> str:
        if self.is_circle:
            return f"DecoratedGraph(circle w={self.free_circles[0]}, layer={self.layer})"
        return (f"DecoratedGraph({len(self.vertices)} vertices, {len(self.edges)} edges, "
                f"layer={self.layer})")


def circle(weight: Optional[int] = None, name: str = "circle") -> DecoratedGraph:
    layer = FLOW if weight is None else CURVE
    return DecoratedGraph({}, {}, layer, (weight,), name)


def fresh_ids(existing, prefix: str, count: int) -> list[str]:
    """Deterministic unused ids ``prefix0, prefix1, ...``."""
    out, k = [], 0
    taken = set(existing)
    while len(out) < count:
        cand = f"{prefix}{k}"
        if cand not in taken:
            out.append(cand)
            taken.add(cand)
        k += 1
    return out


# -- validation ---------------------------------------------------------------

@dataclass
class Violation:
    law: str
    where: tuple[str, ...]
    detail: str = ""

    def __str__(self) -> str:
        at = ",".join(self.where)
        return f"{self.law} at {at}" + (f": {self.detail}" if self.detail else "")


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def laws(self) -> set[str]:
        return {v.law for v in self.violations}


def _structure(g: DecoratedGraph, allowed_kinds) -> list[Violation]:
    out = []
    used = Counter()
    for eid, e in g.edges.items():
        for vid, port in (e.a, e.b):
            if vid not in g.vertices:
                out.append(Violation("dangling-end", (eid,), f"unknown vertex {vid}"))
                continue
            if port not in g.vertices[vid].ports:
                out.append(Violation("bad-port", (vid, eid), f"port {port}"))
                continue
            used[(vid, port)] += 1
    for vid, v in g.vertices.items():
        if v.kind not in allowed_kinds:
            out.append(Violation("vertex-kind", (vid,), v.kind))
            continue
        for p in v.ports:
            n = used[(vid, p)]
            if n == 0:
                out.append(Violation("dangling-port", (vid,), f"port {p} unused"))
            elif n > 1:
                out.append(Violation("duplicate-port", (vid,), f"port {p} used {n} times"))
    if g.free_circles:
        if len(g.free_circles) > 1 or g.vertices or g.edges:
            out.append(Violation("circle-component", ("circle",),
                                 "a free circle must be the whole graph"))
    elif not g.vertices:
        out.append(Violation("empty", (), "graph has no vertices and no circle"))
    if not out and not _connected(g):
        out.append(Violation("connected", tuple(sorted(g.vertices)), "graph is disconnected"))
    return out


def _connected(g: DecoratedGraph) -> bool:
    if not g.vertices:
        return True
    adj = defaultdict(set)
    for e in g.edges.values():
        adj[e.a[0]].add(e.b[0])
        adj[e.b[0]].add(e.a[0])
    start = next(iter(g.vertices))
    seen, stack = {start}, [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(g.vertices)


def validate_flow_spine(g: DecoratedGraph) -> ValidationReport:
    out = []
    if g.layer != FLOW:
        out.append(Violation("layer", (), "expected flow layer"))
    out.extend(_structure(g, (UNIVALENT, TRIVALENT)))
    for eid, e in g.edges.items():
        if e.weight is not None:
            out.append(Violation("weight-on-flow", (eid,)))
    if any(w is not None for w in g.free_circles):
        out.append(Violation("weight-on-flow", ("circle",)))
    return ValidationReport(out)


def validate_curve_graph(g: DecoratedGraph) -> ValidationReport:
    out = []
    if g.layer != CURVE:
        out.append(Violation("layer", (), "expected curve layer"))
    out.extend(_structure(g, (UNIVALENT, TRIVALENT) + BIVALENT_KINDS))
    if out:
        return ValidationReport(out)
    for eid, e in g.edges.items():
        if e.weight is None or e.weight < 0:
            out.append(Violation("weight", (eid,), "edge weight must be a natural number"))
    for w in g.free_circles:
        if w is None or w < 0:
            out.append(Violation("weight", ("circle",), "circle weight must be a natural number"))
    if out:
        return ValidationReport(out)
    for vid in g.vertices:
        out.extend(vertex_violations(g, vid))
    return ValidationReport(out)


def vertex_violations(g: DecoratedGraph, vid: str) -> list[Violation]:
    """Weight and label laws at one vertex of a structurally sound curve graph."""
    v = g.vertices[vid]
    ws = {p: g.edges[g.edge_at(vid, p)].weight for p in v.ports}
    if v.kind == UNIVALENT:
        if ws["0"] != 0:
            return [Violation("univalent-law", (vid, g.edge_at(vid, "0")))]
    elif v.kind == TRIVALENT:
        if ws["A"] != ws["T"] + ws["B"]:
            return [Violation("trivalent-law", (vid,), f"A={ws['A']} T={ws['T']} B={ws['B']}")]
    else:
        lo, hi = sorted((ws["a"], ws["b"]))
        edges = (vid, g.edge_at(vid, "a"), g.edge_at(vid, "b"))
        if v.kind == FOLD:
            if hi != lo + 2 or v.height is None or not 1 <= v.height <= lo + 1:
                return [Violation("fold-law", edges, f"weights {lo},{hi} h={v.height}")]
        elif v.kind == CROSS:
            if hi != lo or lo < 2 or v.height is None or not 1 <= v.height <= lo - 1:
                return [Violation("cross-law", edges, f"weights {lo},{hi} h={v.height}")]
        elif v.kind == END:
            if hi != lo + 1 or v.sign not in ("+", "-"):
                return [Violation("end-law", edges, f"weights {lo},{hi} s={v.sign}")]
    return []


def validate(g: DecoratedGraph) -> ValidationReport:
    return validate_flow_spine(g) if g.layer == FLOW else validate_curve_graph(g)


def underlying_spine(g: DecoratedGraph) -> DecoratedGraph:
    """Delete bivalent vertices (merging their edges) and erase weights."""
    if g.layer == FLOW:
        return g
    if g.is_circle:
        return DecoratedGraph({}, {}, FLOW, (None,), g.name)
    keep = {v: x for v, x in g.vertices.items() if not x.bivalent}
    inc = g._incidence
    edges: dict[str, Edge] = {}
    visited = set()

    def walk(end: End) -> End:
        # follow the chain of bivalent vertices starting from a kept endpoint
        eid = inc[end]
        visited.add(eid)
        far = g.edges[eid].other(end)
        while far[0] not in keep:
            vid, port = far
            nxt = (vid, "b" if port == "a" else "a")
            eid = inc[nxt]
            visited.add(eid)
            far = g.edges[eid].other(nxt)
        return far

    ids = iter(fresh_ids((), "e", len(g.edges) + 1))
    for vid in sorted(keep):
        for p in keep[vid].ports:
            end = (vid, p)
            if inc[end] in visited:
                continue
            far = walk(end)
            edges[next(ids)] = Edge(end, far)
    if not keep:
        return DecoratedGraph({}, {}, FLOW, (None,), g.name)
    return DecoratedGraph(keep, edges, FLOW, (), g.name)
