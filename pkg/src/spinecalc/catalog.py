"""Small named graphs used throughout: the segment, the Möbius spine and the
annulus family."""
from __future__ import annotations

from .graph import FLOW, TRIVALENT, UNIVALENT, DecoratedGraph, Edge, Vertex, circle

U = Vertex(UNIVALENT)
T3 = Vertex(TRIVALENT)


def segment() -> DecoratedGraph:
    return DecoratedGraph({"u0": U, "u1": U}, {"e0": Edge(("u0", "0"), ("u1", "0"))},
                          FLOW, (), "segment")


def mobius() -> DecoratedGraph:
    """One trivalent vertex with a T-B loop and the univalent vertex on A."""
    return DecoratedGraph(
        {"v": T3, "u": U},
        {"loop": Edge(("v", "T"), ("v", "B")), "leg": Edge(("u", "0"), ("v", "A"))},
        FLOW, (), "mobius")


def annulus_relabel() -> DecoratedGraph:
    """Same shape as :func:`mobius` with the univalent vertex moved to B."""
    return DecoratedGraph(
        {"v": T3, "u": U},
        {"loop": Edge(("v", "T"), ("v", "A")), "leg": Edge(("u", "0"), ("v", "B"))},
        FLOW, (), "annulus")


def annulus_family(k: int) -> DecoratedGraph:
    """Cycle of 2k trivalent vertices joined alternately T-T and B-B, each with
    a univalent vertex on A.  k=0 is the vertex-free circle."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return circle(name="annulus0")
    vs, es = {}, {}
    n = 2 * k
    for i in range(n):
        vs[f"t{i}"] = T3
        vs[f"u{i}"] = U
        es[f"l{i}"] = Edge((f"u{i}", "0"), (f"t{i}", "A"))
        port = "T" if i % 2 == 0 else "B"
        es[f"c{i}"] = Edge((f"t{i}", port), (f"t{(i + 1) % n}", port))
    return DecoratedGraph(vs, es, FLOW, (), f"annulus{k}")
