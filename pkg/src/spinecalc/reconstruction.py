"""Rebuild the surface and the immersed curve encoded by a decorated graph.

The surface is assembled from three local pieces glued along interface arcs
(segments of orbits).  Every piece is a polygon listed counterclockwise in its
own reference orientation; a side is either an interface arc or a piece of the
boundary of the surface, marked ``+`` where the flow enters and ``-`` where it
leaves.  The flow runs upward in every local picture.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .graph import (CROSS, END, FLOW, FOLD, TRIVALENT, UNIVALENT, DecoratedGraph,
                    underlying_spine)

# Strata 1..w(B) of the A edge continue into B, the rest into T.  The value
# "top" routes strata 1..w(T) into T instead.
TRIVALENT_SPLIT = "bottom"

UP, DOWN = "up", "down"


@dataclass(frozen=True)
class Side:
    kind: str            # "iface" or "boundary"
    start: str
    end: str
    port: Optional[str] = None    # interface arcs: the port (or dash end) they face
    flow: Optional[str] = None    # boundary arcs: "+" entering, "-" leaving

    @property
    def direction(self) -> Optional[str]:
        if self.kind != "iface":
            return None
        return UP if self.start.endswith("bot") else DOWN

    def corner(self, level: str) -> str:
        """Endpoint of an interface arc at ``level`` ("bot" or "top")."""
        return self.start if self.start.endswith(level) else self.end


@dataclass(frozen=True)
class PieceModel:
    kind: str
    sides: tuple[Side, ...]
    convex: tuple[str, ...] = ()
    concave: tuple[str, ...] = ()

    def interface(self, port: str) -> Side:
        for s in self.sides:
            if s.kind == "iface" and s.port == port:
                return s
        raise KeyError(port)

    @property
    def corners(self) -> list[str]:
        return [s.start for s in self.sides]


TRIVALENT_PIECE = PieceModel(
    "trivalent-neighborhood",
    (
        Side("boundary", "A_bot", "B_bot", flow="+"),
        Side("iface", "B_bot", "B_top", port="B"),
        Side("boundary", "B_top", "tan", flow="-"),
        Side("boundary", "tan", "T_bot", flow="+"),
        Side("iface", "T_bot", "T_top", port="T"),
        Side("boundary", "T_top", "A_top", flow="-"),
        Side("iface", "A_top", "A_bot", port="A"),
    ),
    concave=("tan",),
)

UNIVALENT_PIECE = PieceModel(
    "univalent-neighborhood",
    (
        Side("boundary", "0_bot", "tan", flow="+"),
        Side("boundary", "tan", "0_top", flow="-"),
        Side("iface", "0_top", "0_bot", port="0"),
    ),
    convex=("tan",),
)

DASH_PIECE = PieceModel(
    "edge-dash",
    (
        Side("boundary", "L_bot", "R_bot", flow="+"),
        Side("iface", "R_bot", "R_top", port="R"),
        Side("boundary", "R_top", "L_top", flow="-"),
        Side("iface", "L_top", "L_bot", port="L"),
    ),
)

PIECES = {TRIVALENT: TRIVALENT_PIECE, UNIVALENT: UNIVALENT_PIECE}


@dataclass(frozen=True)
class Gluing:
    piece1: str
    port1: str
    piece2: str
    port2: str

    def flips(self, pieces: dict[str, PieceModel]) -> bool:
        # orientations agree when the two arcs run opposite ways
        d1 = pieces[self.piece1].interface(self.port1).direction
        d2 = pieces[self.piece2].interface(self.port2).direction
        return d1 == d2


@dataclass
class SurfacePresentation:
    pieces: dict[str, PieceModel]
    gluings: list[Gluing]
    boundary_circles: list[list[tuple[str, int]]] = field(default_factory=list)

    def boundary_word(self, circle: list[tuple[str, int]]) -> str:
        out = []
        for pid, i in circle:
            side = self.pieces[pid].sides[i]
            mark = ""
            model = self.pieces[pid]
            if side.end in model.convex:
                mark = "<"
            elif side.end in model.concave:
                mark = ">"
            out.append(f"{side.flow}{mark}")
        return "".join(out)


class _UF:
    def __init__(self):
        self.parent = {}
        self.parity = {}

    def find(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.parity[x] = 0
            return x, 0
        p, par = x, 0
        path = []
        while self.parent[p] != p:
            path.append(p)
            par ^= self.parity[p]
            p = self.parent[p]
        # path compression keeping parities relative to the root
        acc = par
        for q in path:
            nxt = acc ^ self.parity[q]
            self.parent[q], self.parity[q] = p, acc
            acc = nxt
        return p, par

    def union(self, a, b, parity=0) -> bool:
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        if ra == rb:
            return (pa ^ pb) == parity
        self.parent[ra] = rb
        self.parity[ra] = pa ^ pb ^ parity
        return True

    def classes(self, items) -> int:
        return len({self.find(x)[0] for x in items})


def _spine(g: DecoratedGraph) -> DecoratedGraph:
    return g if g.layer == FLOW else underlying_spine(g)


def assemble_surface(g: DecoratedGraph) -> SurfacePresentation:
    g = _spine(g)
    if g.is_circle:
        pieces = {"dash:circle": DASH_PIECE}
        gluings = [Gluing("dash:circle", "L", "dash:circle", "R")]
    else:
        pieces = {f"vertex:{vid}": PIECES[v.kind] for vid, v in g.vertices.items()}
        gluings = []
        for eid, e in g.edges.items():
            dash = f"dash:{eid}"
            pieces[dash] = DASH_PIECE
            gluings.append(Gluing(dash, "L", f"vertex:{e.a[0]}", e.a[1]))
            gluings.append(Gluing(dash, "R", f"vertex:{e.b[0]}", e.b[1]))
    p = SurfacePresentation(pieces, gluings)
    p.boundary_circles = _trace_boundary(p)
    return p


def _corner_classes(p: SurfacePresentation) -> _UF:
    uf = _UF()
    for pid, model in p.pieces.items():
        for c in model.corners:
            uf.find((pid, c))
    for gl in p.gluings:
        s1 = p.pieces[gl.piece1].interface(gl.port1)
        s2 = p.pieces[gl.piece2].interface(gl.port2)
        for level in ("bot", "top"):
            uf.union((gl.piece1, s1.corner(level)), (gl.piece2, s2.corner(level)))
    return uf


def _trace_boundary(p: SurfacePresentation) -> list[list[tuple[str, int]]]:
    uf = _corner_classes(p)
    at_corner = defaultdict(list)
    sides = []
    for pid, model in p.pieces.items():
        for i, s in enumerate(model.sides):
            if s.kind == "boundary":
                sides.append((pid, i))
                at_corner[uf.find((pid, s.start))[0]].append((pid, i))
                at_corner[uf.find((pid, s.end))[0]].append((pid, i))
    for c, lst in at_corner.items():
        if len(lst) != 2:
            raise AssertionError(f"boundary corner {c} has {len(lst)} incident segments")
    seen, circles = set(), []
    for start in sides:
        if start in seen:
            continue
        circle, cur = [], start
        pid, i = cur
        corner = uf.find((pid, p.pieces[pid].sides[i].start))[0]
        while cur not in seen:
            seen.add(cur)
            circle.append(cur)
            pid, i = cur
            s = p.pieces[pid].sides[i]
            a = uf.find((pid, s.start))[0]
            b = uf.find((pid, s.end))[0]
            corner = b if a == corner else a
            nxt = [x for x in at_corner[corner] if x != cur]
            cur = nxt[0] if nxt else cur
        circles.append(circle)
    return circles


def complex_counts(p: SurfacePresentation) -> tuple[int, int, int]:
    """(V, E, F) of the glued piece complex."""
    uf = _corner_classes(p)
    corners = [(pid, c) for pid, m in p.pieces.items() for c in m.corners]
    v = uf.classes(corners)
    e = len(p.gluings) + sum(1 for m in p.pieces.values() for s in m.sides if s.kind == "boundary")
    return v, e, len(p.pieces)


def euler_characteristic(g: DecoratedGraph) -> int:
    g = _spine(g)
    u, t = g.count(UNIVALENT), g.count(TRIVALENT)
    chi = (u - t) // 2
    v, e, f = complex_counts(assemble_surface(g))
    if v - e + f != chi or (u - t) % 2:
        raise AssertionError(f"vertex-count formula gives {(u - t) / 2}, complex gives {v - e + f}")
    return chi


def orientability(p: SurfacePresentation) -> bool:
    uf = _UF()
    ok = True
    for gl in p.gluings:
        ok &= uf.union(gl.piece1, gl.piece2, 1 if gl.flips(p.pieces) else 0)
    return ok


def boundary_components(p: SurfacePresentation) -> int:
    return len(p.boundary_circles)


@dataclass(frozen=True)
class SurfaceInvariants:
    chi: int
    orientable: bool
    boundary_count: int
    genus: int      # cross-cap number when non-orientable

    def record(self) -> str:
        return (f"chi={self.chi} orientable={int(self.orientable)} "
                f"boundary={self.boundary_count} genus={self.genus}")


def classify_surface(g: DecoratedGraph) -> SurfaceInvariants:
    g = _spine(g)
    p = assemble_surface(g)
    chi = euler_characteristic(g)
    orient = orientability(p)
    b = boundary_components(p)
    if orient:
        twice = 2 - chi - b
        if twice % 2:
            raise AssertionError("orientable surface with odd 2-chi-b")
        genus = twice // 2
    else:
        genus = 2 - chi - b
    return SurfaceInvariants(chi, orient, b, genus)


# -- curves -------------------------------------------------------------------

@dataclass(frozen=True)
class CurveComponent:
    kind: str           # "closed" or "arc"
    length: int         # edge strata traversed


@dataclass(frozen=True)
class CurveTrace:
    components: tuple[CurveComponent, ...]
    double_points: int
    endpoints: int
    strata: dict = field(default_factory=dict, compare=False, hash=False)

    def record(self) -> str:
        inv = curve_invariants(self)
        return (f"components={inv[0]} closed={inv[1]} arcs={inv[2]} "
                f"endpoints={inv[3]} doubles={inv[4]}")


class TraceError(RuntimeError):
    pass


def _vertex_links(g: DecoratedGraph, vid: str, split: str):
    """Yield ``(end1, i, end2, j)`` stratum connections through ``vid`` and the
    strata terminating there as ``(end, i, None, None)``."""
    v = g.vertices[vid]
    ports = v.ports
    w = {p: g.edges[g.edge_at(vid, p)].weight for p in ports}
    end = {p: (vid, p) for p in ports}
    if v.kind == UNIVALENT:
        return
    if v.kind == TRIVALENT:
        first, second = ("B", "T") if split == "bottom" else ("T", "B")
        for i in range(1, w["A"] + 1):
            if i <= w[first]:
                yield end["A"], i, end[first], i
            else:
                yield end["A"], i, end[second], i - w[first]
        return
    heavy, light = ("a", "b") if w["a"] >= w["b"] else ("b", "a")
    n = w[light]
    H, L = end[heavy], end[light]
    if v.kind == FOLD:
        h = v.height
        yield H, h, H, h + 1
        for i in range(1, n + 3):
            if i < h:
                yield H, i, L, i
            elif i > h + 1:
                yield H, i, L, i - 2
    elif v.kind == CROSS:
        h = v.height
        for i in range(1, n + 1):
            j = h + 1 if i == h else h if i == h + 1 else i
            yield H, i, L, j
    elif v.kind == END:
        if v.sign == "+":
            for i in range(1, n + 1):
                yield H, i, L, i
            yield H, n + 1, None, None
        else:
            yield H, 1, None, None
            for i in range(2, n + 2):
                yield H, i, L, i - 1


def trace_curve(g: DecoratedGraph, split: str = None) -> CurveTrace:
    split = split or TRIVALENT_SPLIT
    if g.is_circle:
        n = g.free_circles[0] or 0
        return CurveTrace(tuple(CurveComponent("closed", 1) for _ in range(n)), 0, 0)
    uf = _UF()
    slot_used = Counter()
    terminals = Counter()
    for eid, e in g.edges.items():
        for i in range(1, (e.weight or 0) + 1):
            uf.find((eid, i))
    for vid in g.vertices:
        for e1, i, e2, j in _vertex_links(g, vid, split):
            n1 = (g.edge_at(*e1), i)
            if n1[1] > (g.edges[n1[0]].weight or 0) or n1[1] < 1:
                raise TraceError(f"stratum {i} out of range on {n1[0]} at {vid}")
            slot_used[(e1, i)] += 1
            if e2 is None:
                terminals[n1] += 1
                continue
            n2 = (g.edge_at(*e2), j)
            if n2[1] > (g.edges[n2[0]].weight or 0) or n2[1] < 1:
                raise TraceError(f"stratum {j} out of range on {n2[0]} at {vid}")
            slot_used[(e2, j)] += 1
            uf.union(n1, n2)
    for eid, e in g.edges.items():
        for i in range(1, (e.weight or 0) + 1):
            for end in (e.a, e.b):
                if g.vertices[end[0]].kind == UNIVALENT:
                    raise TraceError(f"stratum {i} of {eid} runs into univalent {end[0]}")
                if slot_used[(end, i)] != 1:
                    raise TraceError(f"stratum {i} of {eid} has {slot_used[(end, i)]} continuations at {end[0]}")
    groups = defaultdict(list)
    for node in list(uf.parent):
        groups[uf.find(node)[0]].append(node)
    comps = []
    for root in sorted(groups, key=repr):
        nodes = groups[root]
        ends = sum(terminals[n] for n in nodes)
        if ends not in (0, 2):
            raise TraceError(f"component with {ends} endpoints")
        comps.append(CurveComponent("closed" if ends == 0 else "arc", len(nodes)))
    comps.sort(key=lambda c: (c.kind, c.length))
    strata = {n: uf.find(n)[0] for n in uf.parent}
    return CurveTrace(tuple(comps), g.count(CROSS), sum(terminals.values()), strata)


def curve_invariants(t: CurveTrace) -> tuple[int, int, int, int, int, str]:
    closed = sum(1 for c in t.components if c.kind == "closed")
    arcs = len(t.components) - closed
    parity = "odd" if t.double_points % 2 else "even"
    return len(t.components), closed, arcs, t.endpoints, t.double_points, parity


def annulus_degree(g: DecoratedGraph) -> int:
    """Degree on a boundary circle of a field generating the annulus flow,
    read off the normal form: ``1 - k`` for the k-th member of the family."""
    from .normalform import AnnulusFamily, reduce_nonneg_chi

    g = _spine(g)
    inv = classify_surface(g)
    if not (inv.chi == 0 and inv.orientable and inv.boundary_count == 2):
        raise ValueError(f"not an annulus spine ({inv.record()})")
    form, _ = reduce_nonneg_chi(g)
    if not isinstance(form, AnnulusFamily):
        raise AssertionError(f"annulus spine reduced to {form}")
    return 1 - form.k
