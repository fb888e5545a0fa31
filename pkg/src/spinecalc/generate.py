"""Random and exhaustive generation of flow-spines and curve graphs."""
from __future__ import annotations

import itertools
import random
from typing import Iterator, Optional

from .canon import canonical_code
from .graph import (CROSS, CURVE, END, FLOW, FOLD, TRIVALENT, UNIVALENT, DecoratedGraph,
                    Edge, Vertex, circle, validate)


class GraphBuilder:
    """Incremental construction with weight-transition chains."""

    def __init__(self, layer: str, rng: random.Random, prefix: str = "h"):
        self.layer = layer
        self.rng = rng
        self.prefix = prefix
        self.vertices: dict[str, Vertex] = {}
        self.edges: dict[str, Edge] = {}

    def vertex(self, v: Vertex) -> str:
        vid = f"{self.prefix}{len(self.vertices)}"
        self.vertices[vid] = v
        return vid

    def edge(self, a, b, w) -> None:
        self.edges[f"k{len(self.edges)}"] = Edge(a, b, w if self.layer == CURVE else None)

    def step(self, w: int, goal: int) -> tuple[Vertex, int]:
        """One bivalent vertex taking weight ``w`` towards ``goal``."""
        rng = self.rng
        options = ["cross"] if w >= 2 else []
        if w > goal:
            options += ["down2", "down1"] * 2 if w - goal >= 2 else ["down1"] * 2
        elif w < goal:
            options += ["up2", "up1"] * 2 if goal - w >= 2 else ["up1"] * 2
        else:
            options += ["up1", "up2"]
        choice = rng.choice(options)
        if choice == "cross":
            return Vertex(CROSS, rng.randint(1, w - 1)), w
        if choice == "down2" and w >= 2:
            return Vertex(FOLD, rng.randint(1, w - 1)), w - 2
        if choice == "up2":
            return Vertex(FOLD, rng.randint(1, w + 1)), w + 2
        if choice == "up1":
            return Vertex(END, sign=rng.choice("+-")), w + 1
        return Vertex(END, sign=rng.choice("+-")), w - 1

    def path(self, start, w: int, goal: int, extra: int):
        """Chain of bivalent vertices from endpoint ``start`` (weight ``w``)
        until the weight is ``goal`` and at least ``extra`` vertices were placed.
        Returns the free endpoint and its weight."""
        if self.layer == FLOW:
            return start, w
        steps, cur = 0, start
        while w != goal or steps < extra:
            v, nw = self.step(w, goal)
            if steps >= extra + 12 and w != goal:
                # stop wandering
                v = Vertex(END, sign=self.rng.choice("+-"))
                nw = w - 1 if w > goal else w + 1
            vid = self.vertex(v)
            self.edge(cur, (vid, "a"), w)
            cur, w = (vid, "b"), nw
            steps += 1
        return cur, w

    def cap(self, end, w: int, depth: int, p_tri: float = 0.3) -> None:
        """Close ``end`` (weight ``w``) with a chain to a univalent vertex or a
        small trivalent gadget."""
        rng = self.rng
        if depth < 2 and rng.random() < p_tri:
            t = self.vertex(Vertex(TRIVALENT))
            germ = rng.choice("TBA")
            end2, w2 = self.path(end, w, w, rng.randint(0, 1))
            self.edge(end2, (t, germ), w2)
            self.gadget(t, germ, w2, depth)
            return
        end2, _ = self.path(end, w, 0, rng.randint(0, 2))
        u = self.vertex(Vertex(UNIVALENT))
        self.edge(end2, (u, "0"), 0)

    def gadget(self, t: str, germ: str, w: int, depth: int) -> None:
        rng = self.rng
        if germ == "A":
            tw = rng.randint(0, w)
            self.cap((t, "T"), tw, depth + 1)
            self.cap((t, "B"), w - tw, depth + 1)
        else:
            other = "B" if germ == "T" else "T"
            ow = rng.randint(0, 2)
            self.cap((t, other), ow, depth + 1)
            self.cap((t, "A"), w + ow, depth + 1)

    def join(self, e1, w1: int, e2, w2: int) -> None:
        end, w = self.path(e1, w1, w2, self.rng.randint(0, 2))
        self.edge(end, e2, w)

    def graph(self, name: str = "g") -> DecoratedGraph:
        return DecoratedGraph(dict(self.vertices), dict(self.edges), self.layer, (), name)


# -- flow-spines -----------------------------------------------------------------

def _connected(vertices, edges) -> bool:
    adj = {v: set() for v in vertices}
    for e in edges.values():
        adj[e.a[0]].add(e.b[0])
        adj[e.b[0]].add(e.a[0])
    start = next(iter(adj))
    seen, stack = {start}, [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(adj)


def random_spine(rng: random.Random, max_vertices: int = 20, name: str = "random") -> DecoratedGraph:
    """Uniform random pairing of germs for random vertex counts, retried until
    connected.  Returns the circle when both counts come out zero."""
    while True:
        n = rng.randint(0, max_vertices)
        t = rng.randint(0, n)
        u = n - t
        if (u + 3 * t) % 2:
            continue
        if n == 0:
            return circle(name=name)
        vertices = {}
        ends = []
        for i in range(t):
            vertices[f"t{i}"] = Vertex(TRIVALENT)
            ends += [(f"t{i}", p) for p in "TBA"]
        for i in range(u):
            vertices[f"u{i}"] = Vertex(UNIVALENT)
            ends.append((f"u{i}", "0"))
        rng.shuffle(ends)
        edges = {f"e{i}": Edge(ends[2 * i], ends[2 * i + 1]) for i in range(len(ends) // 2)}
        if _connected(vertices, edges):
            return DecoratedGraph(vertices, edges, FLOW, (), name)


def decorate(spine: DecoratedGraph, rng: random.Random, max_weight: int = 4,
             extra: int = 2) -> DecoratedGraph:
    """Random curve graph over ``spine``: random germ weights obeying the
    trivalent and univalent laws, joined along each edge by a random chain."""
    if spine.is_circle:
        w = rng.randint(0, max_weight)
        if rng.random() < 0.3:
            return circle(w, name=spine.name)
        b = GraphBuilder(CURVE, rng, "c")
        first = b.vertex(Vertex(CROSS, 1) if w >= 2 else Vertex(END, sign="+"))
        w_after = w if w >= 2 else w + 1
        end, w2 = b.path((first, "b"), w_after, w, rng.randint(0, extra))
        b.edge(end, (first, "a"), w)
        return b.graph(spine.name)
    germ = {}
    for vid, v in spine.vertices.items():
        if v.kind == UNIVALENT:
            germ[(vid, "0")] = 0
        else:
            tw, bw = rng.randint(0, max_weight // 2), rng.randint(0, max_weight // 2)
            germ[(vid, "T")], germ[(vid, "B")], germ[(vid, "A")] = tw, bw, tw + bw
    b = GraphBuilder(CURVE, rng, "c")
    b.vertices.update(spine.vertices)
    for eid in sorted(spine.edges):
        e = spine.edges[eid]
        end, w = b.path(e.a, germ[e.a], germ[e.b], rng.randint(0, extra))
        b.edge(end, e.b, w)
    return b.graph(spine.name)


def random_curve_graph(rng: random.Random, max_spine_vertices: int = 8,
                       max_weight: int = 4) -> DecoratedGraph:
    return decorate(random_spine(rng, max_spine_vertices), rng, max_weight)


def random_graph(rng: random.Random, layer: Optional[str] = None) -> DecoratedGraph:
    layer = layer or rng.choice((FLOW, CURVE))
    return random_spine(rng, 12) if layer == FLOW else random_curve_graph(rng)


def permuted(g: DecoratedGraph, rng: random.Random) -> DecoratedGraph:
    """Same graph with shuffled ids and bivalent ports swapped at random."""
    vids = list(g.vertices)
    new = [f"q{i}" for i in range(len(vids))]
    rng.shuffle(new)
    vmap = dict(zip(vids, new))
    flip = {v for v in vids if g.vertices[v].bivalent and rng.random() < 0.5}

    def end(x):
        vid, p = x
        if vid in flip:
            p = "b" if p == "a" else "a"
        return vmap[vid], p

    eids = list(g.edges)
    enew = [f"f{i}" for i in range(len(eids))]
    rng.shuffle(enew)
    edges = {}
    for old, nid in zip(eids, enew):
        e = g.edges[old]
        a, b = end(e.a), end(e.b)
        if rng.random() < 0.5:
            a, b = b, a
        edges[nid] = Edge(a, b, e.weight)
    vertices = {vmap[v]: g.vertices[v] for v in vids}
    return DecoratedGraph(vertices, edges, g.layer, g.free_circles, g.name)


# -- exhaustive families -------------------------------------------------------------

def _bivalent_labels(max_height: int):
    for h in range(1, max_height + 1):
        yield Vertex(FOLD, h)
    for h in range(1, max_height + 1):
        yield Vertex(CROSS, h)
    yield Vertex(END, sign="+")
    yield Vertex(END, sign="-")


def circle_decorations(max_bivalent: int = 3, max_weight: int = 4,
                       max_height: int = 5, valid_only: bool = True) -> Iterator[DecoratedGraph]:
    """Every decoration of the circle with at most ``max_bivalent`` bivalent
    vertices and weights up to ``max_weight``.  Vertex ids are positional, so
    rotations of the same cycle are listed separately."""
    for w in range(max_weight + 1):
        yield circle(w, name=f"circle{w}")
    labels = list(_bivalent_labels(max_height))
    for k in range(1, max_bivalent + 1):
        for vs in itertools.product(labels, repeat=k):
            for ws in itertools.product(range(max_weight + 1), repeat=k):
                vertices = {f"x{i}": v for i, v in enumerate(vs)}
                edges = {f"e{i}": Edge((f"x{i}", "b"), (f"x{(i + 1) % k}", "a"), ws[i])
                         for i in range(k)}
                g = DecoratedGraph(vertices, edges, CURVE, (), "cycle")
                if not valid_only or validate(g).ok:
                    yield g


def spines_up_to(max_trivalent: int = 2) -> list[DecoratedGraph]:
    """All connected flow-spines with at most ``max_trivalent`` trivalent
    vertices, one per isomorphism class (the circle included)."""
    out, seen = [circle()], set()
    for t in range(max_trivalent + 1):
        for u in range(t % 2, t + 3, 2):
            if t == 0 and u == 0:
                continue
            ends = [(f"t{i}", p) for i in range(t) for p in "TBA"] + [(f"u{i}", "0") for i in range(u)]
            vertices = {f"t{i}": Vertex(TRIVALENT) for i in range(t)}
            vertices.update({f"u{i}": Vertex(UNIVALENT) for i in range(u)})
            for pairing in _pairings(ends):
                edges = {f"e{i}": Edge(a, b) for i, (a, b) in enumerate(pairing)}
                if not _connected(vertices, edges):
                    continue
                g = DecoratedGraph(vertices, edges, FLOW, (), f"t{t}u{u}")
                code = canonical_code(g)
                if code not in seen:
                    seen.add(code)
                    out.append(g)
    return out


def _pairings(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for i, other in enumerate(rest):
        for tail in _pairings(rest[:i] + rest[i + 1:]):
            yield [(first, other)] + tail


def spine_decorations(spine: DecoratedGraph, max_weight: int = 3,
                      bivalent: bool = True, max_height: int = 4) -> Iterator[DecoratedGraph]:
    """All weightings of ``spine`` with weights up to ``max_weight``, and all
    ways of adding one labelled bivalent vertex on one edge.  Invalid
    decorations are included."""
    if spine.is_circle:
        yield from circle_decorations(1, max_weight, max_height, valid_only=False)
        return
    eids = sorted(spine.edges)
    for ws in itertools.product(range(max_weight + 1), repeat=len(eids)):
        edges = {eid: Edge(spine.edges[eid].a, spine.edges[eid].b, w) for eid, w in zip(eids, ws)}
        yield DecoratedGraph(dict(spine.vertices), edges, CURVE, (), spine.name)
    if not bivalent:
        return
    labels = list(_bivalent_labels(max_height))
    for split in eids:
        others = [e for e in eids if e != split]
        for ws in itertools.product(range(max_weight + 1), repeat=len(others) + 2):
            for lab in labels:
                edges = {eid: Edge(spine.edges[eid].a, spine.edges[eid].b, w)
                         for eid, w in zip(others, ws)}
                e = spine.edges[split]
                edges[split + "a"] = Edge(e.a, ("x", "a"), ws[-2])
                edges[split + "b"] = Edge(("x", "b"), e.b, ws[-1])
                vertices = dict(spine.vertices)
                vertices["x"] = lab
                yield DecoratedGraph(vertices, edges, CURVE, (), spine.name)
