"""Graphviz DOT rendering (presentation only, never parsed back)."""
from __future__ import annotations

from .graph import CROSS, END, FOLD, TRIVALENT, UNIVALENT, DecoratedGraph

_SHAPES = {UNIVALENT: "point", TRIVALENT: "triangle", FOLD: "box", CROSS: "diamond", END: "circle"}


def _label(v) -> str:
    if v.kind == FOLD:
        return f"F{v.height}"
    if v.kind == CROSS:
        return f"X{v.height}"
    if v.kind == END:
        return f"E{v.sign}"
    return ""


def to_dot(g: DecoratedGraph) -> str:
    lines = [f'graph "{g.name}" {{', "  node [fontsize=10];"]
    for i, w in enumerate(g.free_circles):
        lab = "" if w is None else f"w={w}"
        lines.append(f'  circle{i} [shape=doublecircle label="{lab}"];')
    for vid in sorted(g.vertices):
        v = g.vertices[vid]
        lines.append(f'  "{vid}" [shape={_SHAPES[v.kind]} label="{_label(v)}" xlabel="{vid}"];')
    for eid in sorted(g.edges):
        e = g.edges[eid]
        attrs = [f'taillabel="{e.a[1]}"', f'headlabel="{e.b[1]}"']
        if e.weight is not None:
            attrs.append(f'label="{e.weight}"')
        lines.append(f'  "{e.a[0]}" -- "{e.b[0]}" [{" ".join(attrs)}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
