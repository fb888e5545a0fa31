"""Canonical codes and isomorphism testing for decorated graphs.

Bivalent vertices have no distinguished side, so their two ports are treated
as interchangeable (``*``).  Trivalent ports keep their T/B/A labels.
"""
from __future__ import annotations

import hashlib
from collections import Counter, defaultdict

from .graph import DecoratedGraph


def _plabel(g: DecoratedGraph, vid: str, port: str) -> str:
    return "*" if g.vertices[vid].bivalent else port


def _vlabel(g: DecoratedGraph, vid: str):
    v = g.vertices[vid]
    return (v.kind, v.height if v.height is not None else -1, v.sign or "")


def _adjacency(g: DecoratedGraph):
    adj = defaultdict(list)
    for e in g.edges.values():
        (va, pa), (vb, pb) = e.a, e.b
        w = -1 if e.weight is None else e.weight
        la, lb = _plabel(g, va, pa), _plabel(g, vb, pb)
        adj[va].append((la, lb, w, vb))
        adj[vb].append((lb, la, w, va))
    return adj


def _rank(sigs: dict) -> dict:
    order = {s: i for i, s in enumerate(sorted(set(sigs.values())))}
    return {v: order[s] for v, s in sigs.items()}


def _refine(colors: dict, adj) -> dict:
    n_classes = len(set(colors.values()))
    while True:
        sigs = {v: (c, tuple(sorted((a, b, w, colors[u]) for a, b, w, u in adj[v])))
                for v, c in colors.items()}
        new = _rank(sigs)
        k = len(set(new.values()))
        if k == n_classes:
            return new
        colors, n_classes = new, k


def _certificate(g: DecoratedGraph, colors: dict):
    labels = tuple(_vlabel(g, v) for v in sorted(colors, key=colors.get))
    edges = []
    for e in g.edges.values():
        (va, pa), (vb, pb) = e.a, e.b
        x = (colors[va], _plabel(g, va, pa))
        y = (colors[vb], _plabel(g, vb, pb))
        edges.append((min(x, y), max(x, y), -1 if e.weight is None else e.weight))
    return labels, tuple(sorted(edges))


def canonical_order(g: DecoratedGraph) -> tuple[tuple, list[str]]:
    """Return ``(certificate, vertices in canonical order)``."""
    if g.is_circle:
        return ("circle", g.layer, g.free_circles), []
    adj = _adjacency(g)
    base = _refine(_rank({v: _vlabel(g, v) for v in g.vertices}), adj)
    best = [None, None]

    def search(colors):
        counts = Counter(colors.values())
        cells = [c for c, n in counts.items() if n > 1]
        if not cells:
            cert = _certificate(g, colors)
            if best[0] is None or cert < best[0]:
                best[0], best[1] = cert, sorted(colors, key=colors.get)
            return
        target = min(cells, key=lambda c: (counts[c], c))
        for v in sorted(u for u, c in colors.items() if c == target):
            split = {u: (2 * c + (0 if u == v else 1)) for u, c in colors.items()}
            search(_refine(_rank(split), adj))

    search(base)
    return (g.layer, best[0]), best[1]


def canonical_code(g: DecoratedGraph) -> bytes:
    cert, _ = canonical_order(g)
    return repr(cert).encode()


def short_code(code: bytes) -> str:
    return hashlib.sha256(code).hexdigest()[:16]


def is_isomorphic(g1: DecoratedGraph, g2: DecoratedGraph) -> bool:
    """Plain backtracking search for a decoration-preserving isomorphism."""
    if g1.layer != g2.layer:
        return False
    if g1.is_circle or g2.is_circle:
        return g1.is_circle and g2.is_circle and g1.free_circles == g2.free_circles
    if len(g1.vertices) != len(g2.vertices) or len(g1.edges) != len(g2.edges):
        return False

    def between(g):
        table = defaultdict(Counter)
        for e in g.edges.values():
            (va, pa), (vb, pb) = e.a, e.b
            la, lb = _plabel(g, va, pa), _plabel(g, vb, pb)
            table[(va, vb)][(la, lb, e.weight)] += 1
            if va != vb:
                table[(vb, va)][(lb, la, e.weight)] += 1
            else:
                table[(va, va)][(lb, la, e.weight)] += 1
        return table

    def local(g, v):
        out = []
        for p, eid, far in g.neighbours(v):
            out.append((_plabel(g, v, p), g.edges[eid].weight if g.edges[eid].weight is not None else -1))
        return (_vlabel(g, v), tuple(sorted(out)))

    t1, t2 = between(g1), between(g2)
    sig1 = {v: local(g1, v) for v in g1.vertices}
    sig2 = {v: local(g2, v) for v in g2.vertices}
    if Counter(sig1.values()) != Counter(sig2.values()):
        return False

    # BFS order keeps each new vertex adjacent to an already mapped one
    order, seen = [], set()
    for root in sorted(g1.vertices):
        if root in seen:
            continue
        seen.add(root)
        queue = [root]
        while queue:
            v = queue.pop(0)
            order.append(v)
            for _, _, (u, _) in g1.neighbours(v):
                if u not in seen:
                    seen.add(u)
                    queue.append(u)

    mapping, used = {}, set()

    def extend(i):
        if i == len(order):
            return True
        v = order[i]
        for w in g2.vertices:
            if w in used or sig1[v] != sig2[w]:
                continue
            if t1.get((v, v), Counter()) != t2.get((w, w), Counter()):
                continue
            if any(t1.get((v, u), Counter()) != t2.get((w, x), Counter())
                   for u, x in mapping.items()):
                continue
            mapping[v] = w
            used.add(w)
            if extend(i + 1):
                return True
            del mapping[v]
            used.discard(w)
        return False

    return extend(0)
