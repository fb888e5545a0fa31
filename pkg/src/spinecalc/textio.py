"""Line-based text format for decorated graphs.

    graph <name> layer=<flow|curve>
    vertex <id> <univalent|trivalent|fold h=<int>|cross h=<int>|end s=<+|->>
    edge <id> <vid>.<port> <vid>.<port> [w=<int>]
    circle [w=<int>]
"""
from __future__ import annotations

from collections import defaultdict

from .canon import canonical_order
from .graph import (CROSS, CURVE, END, FLOW, FOLD, PORTS, DecoratedGraph, Edge,
                    Vertex)


class ParseError(ValueError):
    def __init__(self, problems: list[tuple[int, str]]):
        self.problems = problems
        super().__init__("; ".join(f"line {n}: {msg}" for n, msg in problems))


def _kv(token: str, key: str):
    if not token.startswith(key + "="):
        return None
    return token[len(key) + 1:]


def _int(text, lineno, what, problems):
    try:
        return int(text)
    except (TypeError, ValueError):
        problems.append((lineno, f"{what} must be an integer, got {text!r}"))
        return None


def parse(text: str) -> DecoratedGraph:
    problems: list[tuple[int, str]] = []
    name, layer = "g", None
    vertices: dict[str, Vertex] = {}
    raw_edges: list[tuple[int, str, tuple, tuple, object]] = []
    circles: list[tuple[int, object]] = []
    seen_header = False

    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        head = tok[0]
        if head == "graph":
            if seen_header:
                problems.append((lineno, "second graph header"))
                continue
            seen_header = True
            if len(tok) != 3 or _kv(tok[2], "layer") not in (FLOW, CURVE):
                problems.append((lineno, "expected 'graph <name> layer=<flow|curve>'"))
                continue
            name, layer = tok[1], _kv(tok[2], "layer")
        elif head == "vertex":
            if len(tok) < 3:
                problems.append((lineno, "expected 'vertex <id> <kind> ...'"))
                continue
            vid, kind = tok[1], tok[2]
            if vid in vertices:
                problems.append((lineno, f"duplicate vertex id {vid}"))
                continue
            if kind not in PORTS:
                problems.append((lineno, f"unknown vertex kind {kind!r}"))
                continue
            extra = tok[3:]
            if kind in (FOLD, CROSS):
                if len(extra) != 1 or _kv(extra[0], "h") is None:
                    problems.append((lineno, f"{kind} vertex needs h=<int>"))
                    continue
                h = _int(_kv(extra[0], "h"), lineno, "height", problems)
                if h is None:
                    continue
                vertices[vid] = Vertex(kind, height=h)
            elif kind == END:
                s = _kv(extra[0], "s") if len(extra) == 1 else None
                if s not in ("+", "-"):
                    problems.append((lineno, "end vertex needs s=+ or s=-"))
                    continue
                vertices[vid] = Vertex(kind, sign=s)
            else:
                if extra:
                    problems.append((lineno, f"unexpected tokens after {kind}"))
                    continue
                vertices[vid] = Vertex(kind)
        elif head == "edge":
            if len(tok) not in (4, 5):
                problems.append((lineno, "expected 'edge <id> <v>.<p> <v>.<p> [w=<int>]'"))
                continue
            ends = []
            for t in tok[2:4]:
                if "." not in t:
                    problems.append((lineno, f"endpoint {t!r} is not <vid>.<port>"))
                    break
                vid, port = t.rsplit(".", 1)
                ends.append((vid, port))
            if len(ends) != 2:
                continue
            w = None
            if len(tok) == 5:
                raw = _kv(tok[4], "w")
                if raw is None:
                    problems.append((lineno, f"unexpected token {tok[4]!r}"))
                    continue
                w = _int(raw, lineno, "weight", problems)
                if w is None:
                    continue
            raw_edges.append((lineno, tok[1], ends[0], ends[1], w))
        elif head == "circle":
            w = None
            if len(tok) == 2:
                raw = _kv(tok[1], "w")
                w = _int(raw, lineno, "weight", problems) if raw is not None else None
                if raw is None:
                    problems.append((lineno, f"unexpected token {tok[1]!r}"))
                    continue
            elif len(tok) > 2:
                problems.append((lineno, "expected 'circle [w=<int>]'"))
                continue
            circles.append((lineno, w))
        else:
            problems.append((lineno, f"unknown directive {head!r}"))

    if not seen_header:
        problems.append((0, "missing graph header"))
        layer = layer or FLOW

    edges: dict[str, Edge] = {}
    port_lines = defaultdict(list)
    for lineno, eid, a, b, w in raw_edges:
        if eid in edges:
            problems.append((lineno, f"duplicate edge id {eid}"))
            continue
        bad = False
        for vid, port in (a, b):
            if vid not in vertices:
                problems.append((lineno, f"unknown vertex {vid}"))
                bad = True
            elif port not in vertices[vid].ports:
                problems.append((lineno, f"vertex {vid} has no port {port!r}"))
                bad = True
        if bad:
            continue
        if a == b:
            problems.append((lineno, f"port {a[0]}.{a[1]} used twice"))
            continue
        if layer == CURVE and w is None:
            problems.append((lineno, f"edge {eid} needs w= on a curve graph"))
        if layer == FLOW and w is not None:
            problems.append((lineno, f"edge {eid} has a weight on a flow graph"))
        for end in (a, b):
            port_lines[end].append(lineno)
        edges[eid] = Edge(a, b, w)
    for (vid, port), lines in sorted(port_lines.items()):
        if len(lines) > 1:
            problems.append((lines[1], f"port {vid}.{port} used twice (lines {', '.join(map(str, lines))})"))
    for vid, v in vertices.items():
        for p in v.ports:
            if (vid, p) not in port_lines:
                problems.append((0, f"port {vid}.{p} is unpaired"))

    free = ()
    if circles:
        lineno, w = circles[0]
        if len(circles) > 1 or vertices or raw_edges:
            problems.append((lineno, "circle must be the only content line"))
        if layer == CURVE and w is None:
            problems.append((lineno, "circle needs w= on a curve graph"))
        if layer == FLOW and w is not None:
            problems.append((lineno, "circle has a weight on a flow graph"))
        free = (w,)
    elif not vertices:
        problems.append((0, "graph is empty"))

    if problems:
        raise ParseError(sorted(problems))
    return DecoratedGraph(vertices, edges, layer, free, name)


def normalize(g: DecoratedGraph) -> DecoratedGraph:
    """Relabel ``g`` into canonical ids with bivalent ports ordered by first use."""
    if g.is_circle:
        return g
    _, order = canonical_order(g)
    rank = {v: i for i, v in enumerate(order)}
    vmap = {v: f"v{i}" for v, i in rank.items()}

    def key(e: Edge):
        ends = sorted([(rank[e.a[0]], _sym(g, e.a)), (rank[e.b[0]], _sym(g, e.b))])
        return ends, -1 if e.weight is None else e.weight

    def _orient(e: Edge):
        x, y = e.a, e.b
        if (rank[y[0]], _sym(g, y)) < (rank[x[0]], _sym(g, x)):
            x, y = y, x
        return x, y

    ordered = sorted(g.edges.values(), key=key)
    assigned: dict[str, list] = defaultdict(list)
    edges = {}
    for i, e in enumerate(ordered):
        ends = []
        for vid, port in _orient(e):
            if g.vertices[vid].bivalent:
                port = "ab"[len(assigned[vid])]
                assigned[vid].append(port)
            ends.append((vmap[vid], port))
        edges[f"e{i}"] = Edge(ends[0], ends[1], e.weight)
    vertices = {vmap[v]: g.vertices[v] for v in order}
    return DecoratedGraph(vertices, edges, g.layer, (), g.name)


def _sym(g, end):
    vid, port = end
    return "*" if g.vertices[vid].bivalent else port


def _vertex_line(vid: str, v: Vertex) -> str:
    if v.kind in (FOLD, CROSS):
        return f"vertex {vid} {v.kind} h={v.height}"
    if v.kind == END:
        return f"vertex {vid} end s={v.sign}"
    return f"vertex {vid} {v.kind}"


def serialize(g: DecoratedGraph) -> str:
    lines = [f"graph {g.name} layer={g.layer}"]
    if g.is_circle:
        w = g.free_circles[0]
        lines.append("circle" if w is None else f"circle w={w}")
        return "\n".join(lines) + "\n"
    n = normalize(g)
    lines.extend(_vertex_line(vid, v) for vid, v in n.vertices.items())
    for eid, e in n.edges.items():
        s = f"edge {eid} {e.a[0]}.{e.a[1]} {e.b[0]}.{e.b[1]}"
        if e.weight is not None:
            s += f" w={e.weight}"
        lines.append(s)
    return "\n".join(lines) + "\n"


def load(path: str) -> DecoratedGraph:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
