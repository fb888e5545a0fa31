"""Pattern matching and splicing of local moves.

A site is an embedding of one side of a rule into a host graph together with
concrete values for the rule's symbols.  Applying it cuts the matched part
out, keeps the stubs of the boundary edges and splices the other side in.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .canon import canonical_code
from .graph import (BIVALENT_KINDS, CURVE, DecoratedGraph, Edge, Vertex,
                    fresh_ids, vertex_violations)
from .rules import Pattern, RewriteRule, RuleSet

LR, RL = "lr", "rl"
DIRECTIONS = (LR, RL)


class StaleSite(ValueError):
    pass


class LogMismatch(ValueError):
    pass


@dataclass(frozen=True)
class LogEntry:
    rule: str
    variant: int
    direction: str
    key: str
    before: bytes = b""
    after: bytes = b""

    def line(self) -> str:
        return f"{self.rule} {self.variant} {self.direction} {self.key}"

    @staticmethod
    def from_line(line: str) -> "LogEntry":
        tok = line.split()
        if len(tok) != 4 or tok[2] not in DIRECTIONS:
            raise ValueError(f"bad log line {line!r}")
        return LogEntry(tok[0], int(tok[1]), tok[2], tok[3])


@dataclass
class ReductionLog:
    entries: list[LogEntry] = field(default_factory=list)
    initial: bytes = b""
    final: bytes = b""
    graph: Optional[DecoratedGraph] = None     # end point, not serialized

    def __len__(self):
        return len(self.entries)

    def text(self) -> str:
        return "".join(e.line() + "\n" for e in self.entries)

    @staticmethod
    def parse(text: str) -> "ReductionLog":
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        return ReductionLog([LogEntry.from_line(ln) for ln in lines if ln])


@dataclass
class MoveSite:
    rule: str
    direction: str
    key: str
    variant: int
    bindings: dict
    image: tuple          # host (kind, id, value) triples checked for staleness
    host_code: bytes
    result: DecoratedGraph
    result_code: bytes

    def entry(self) -> LogEntry:
        return LogEntry(self.rule, self.variant, self.direction, self.key,
                        self.host_code, self.result_code)


# -- matching -----------------------------------------------------------------

def _other_port(p: str) -> str:
    return "b" if p == "a" else "a"


def _vertex_order(pat: Pattern) -> list[tuple[str, Optional[tuple]]]:
    """BFS over internal edges; each later vertex records how it is reached."""
    adj = {v: [] for v in pat.vertices}
    for e in pat.edges:
        if e.kind == "internal":
            adj[e.a[1]].append((e.a[2], e.b[1], e.b[2]))
            adj[e.b[1]].append((e.b[2], e.a[1], e.a[2]))
    start = next(iter(pat.vertices))
    order = [(start, None)]
    seen = {start}
    i = 0
    while i < len(order):
        v = order[i][0]
        for p, w, q in adj[v]:
            if w not in seen:
                seen.add(w)
                order.append((w, (v, p, q)))
        i += 1
    return order


def _embeddings(pat: Pattern, g: DecoratedGraph):
    """Yield ``(vmap, ports)`` where ``ports[pv]`` maps pattern ports to host ports."""
    order = _vertex_order(pat)
    vmap: dict[str, str] = {}
    pmap: dict[str, dict] = {}
    used: set[str] = set()

    def assign(pv, hv, port_map):
        vmap[pv], pmap[pv] = hv, port_map
        used.add(hv)

    def unassign(pv):
        used.discard(vmap.pop(pv))
        pmap.pop(pv)

    def port_maps(pv, fixed=None):
        ports = pat.vertices[pv].kind
        if ports in BIVALENT_KINDS:
            if fixed is None:
                return [{"a": "a", "b": "b"}, {"a": "b", "b": "a"}]
            p, q = fixed
            return [{p: q, _other_port(p): _other_port(q)}]
        if fixed is not None and fixed[0] != fixed[1]:
            return []
        return [None]

    def rec(i):
        if i == len(order):
            yield dict(vmap), {k: dict(v) if v else None for k, v in pmap.items()}
            return
        pv, via = order[i]
        kind = pat.vertices[pv].kind
        if via is None:
            cands = [(hv, None) for hv in sorted(g.vertices) if g.vertices[hv].kind == kind]
        else:
            parent, pp, q = via
            hp = _hport(pmap, parent, pp)
            eid = g._incidence.get((vmap[parent], hp))
            if eid is None:
                return
            hw, hq = g.edges[eid].other((vmap[parent], hp))
            if g.vertices[hw].kind != kind:
                return
            cands = [(hw, (q, hq))]
        for hv, fixed in cands:
            if hv in used:
                continue
            for pm in port_maps(pv, fixed):
                assign(pv, hv, pm)
                yield from rec(i + 1)
                unassign(pv)

    yield from rec(0)


def _hport(pmap, pv, p):
    m = pmap[pv]
    return p if m is None else m[p]


@dataclass
class _Match:
    vmap: dict
    pmap: dict
    edge_of: dict          # pattern edge id -> host edge id
    attach: dict           # port -> ("end", host endpoint) | ("port", other port)
    equations: list        # (Lin, value)
    image_edges: set


def _matches(pat: Pattern, g: DecoratedGraph):
    if not pat.vertices:
        e = pat.edges[0]
        p1, p2 = e.a[1], e.b[1]
        if g.is_circle:
            eq = [(e.weight, g.free_circles[0])] if e.weight is not None else []
            yield _Match({}, {}, {e.eid: "circle"}, {p1: ("port", p2), p2: ("port", p1)},
                         eq, set())
            return
        for eid in sorted(g.edges):
            he = g.edges[eid]
            for x, y in ((he.a, he.b), (he.b, he.a)):
                eq = [(e.weight, he.weight)] if e.weight is not None else []
                yield _Match({}, {}, {e.eid: eid}, {p1: ("end", x), p2: ("end", y)},
                             eq, {eid})
        return
    if g.is_circle:
        return
    for vmap, pmap in _embeddings(pat, g):
        ok = True
        edge_of, attach, eqs = {}, {}, []
        host_end = {}
        for pe in pat.edges:
            for end in (pe.a, pe.b):
                if end[0] == "v":
                    host_end[end] = (vmap[end[1]], _hport(pmap, end[1], end[2]))
        inv_end = {h: p for p, h in host_end.items()}
        for pe in pat.edges:
            if pe.kind == "internal":
                x, y = host_end[pe.a], host_end[pe.b]
                eid = g._incidence[x]
                if g.edges[eid].other(x) != y:
                    ok = False
                    break
            else:
                inner, port = (pe.a, pe.b) if pe.a[0] == "v" else (pe.b, pe.a)
                x = host_end[inner]
                eid = g._incidence[x]
                far = g.edges[eid].other(x)
                if far in inv_end:
                    pend = inv_end[far]
                    partner = next((q for q in pat.edges if q.kind == "boundary"
                                    and pend in (q.a, q.b)), None)
                    if partner is None:
                        ok = False
                        break
                    other_port = partner.a if partner.a[0] == "p" else partner.b
                    attach[port[1]] = ("port", other_port[1])
                else:
                    attach[port[1]] = ("end", far)
            edge_of[pe.eid] = eid
            if pe.weight is not None:
                eqs.append((pe.weight, g.edges[eid].weight))
        if not ok:
            continue
        for pv, hv in vmap.items():
            v, h = pat.vertices[pv], g.vertices[hv]
            if v.sign is not None and v.sign != h.sign:
                ok = False
                break
            if v.height is not None:
                eqs.append((v.height, h.height))
        if ok:
            yield _Match(vmap, pmap, edge_of, attach, eqs, set(edge_of.values()))


def _solve(equations, env=None):
    """Solve ``Lin == value`` equations one unknown at a time.  Returns the
    bindings, or None on a contradiction.  Unsolved symbols stay unbound."""
    env = dict(env or {})
    pending = list(equations)
    progress = True
    while pending and progress:
        progress = False
        rest = []
        for lin, val in pending:
            if val is None:
                return None
            part = lin.partial(env)
            if not part.coefs:
                if part.const != val:
                    return None
                progress = True
            elif len(part.coefs) == 1:
                sym, c = part.coefs[0]
                num = val - part.const
                if num % c:
                    return None
                env[sym] = num // c
                progress = True
            else:
                rest.append((lin, val))
        pending = rest
    return env


def _bindings(rule: RewriteRule, source: Pattern, target: Pattern, match: _Match, cap: int):
    env = _solve(match.equations)
    if env is None:
        return
    free = sorted(rule.symbols - set(env))
    rng = range(0, cap + 4)
    for values in itertools.product(rng, repeat=len(free)):
        full = dict(env)
        full.update(zip(free, values))
        if any(v < 0 for v in full.values()):
            continue
        # pending multi-symbol equations from the source must hold as well
        if any(lin.eval(full) != val for lin, val in match.equations):
            continue
        if all(c.holds(full) for c in rule.guard):
            yield full


# -- splicing ---------------------------------------------------------------------

def _splice(g: DecoratedGraph, match: _Match, target: Pattern, env: dict) -> Optional[DecoratedGraph]:
    vertices = {k: v for k, v in g.vertices.items() if k not in match.vmap.values()}
    edges = {k: e for k, e in g.edges.items() if k not in match.image_edges}

    new_v = fresh_ids(g.vertices, "v", len(target.vertices))
    tv = dict(zip(target.vertices, new_v))
    for pv, vid in tv.items():
        spec = target.vertices[pv]
        h = spec.height.eval(env) if spec.height is not None else None
        vertices[vid] = Vertex(spec.kind, h, spec.sign)

    def weight(pe):
        if pe.weight is None:
            return None
        w = pe.weight.eval(env)
        if w < 0:
            raise ValueError("negative weight")
        return w

    # stubs: port -> target side connection
    tside = {}
    new_edges = []
    for pe in target.edges:
        kind = pe.kind
        if kind == "internal":
            new_edges.append(((tv[pe.a[1]], pe.a[2]), (tv[pe.b[1]], pe.b[2]), weight(pe)))
        elif kind == "boundary":
            inner, port = (pe.a, pe.b) if pe.a[0] == "v" else (pe.b, pe.a)
            tside[port[1]] = ("end", (tv[inner[1]], inner[2]), weight(pe))
        else:
            w = weight(pe)
            tside[pe.a[1]] = ("port", pe.b[1], w)
            tside[pe.b[1]] = ("port", pe.a[1], w)

    # walk port chains alternating host and target links
    done = set()
    circle_weight = None
    for start in sorted(tside):
        if start in done:
            continue
        ends, w, closed = _walk(start, tside, match.attach, done)
        if closed:
            if vertices or edges or new_edges:
                return None
            circle_weight = w
            continue
        new_edges.append((ends[0], ends[1], w))
    ids = fresh_ids(g.edges, "e", len(new_edges))
    for eid, (a, b, w) in zip(ids, new_edges):
        edges[eid] = Edge(a, b, w)
    if circle_weight is not None or (not vertices and not edges):
        return DecoratedGraph({}, {}, g.layer, (circle_weight,), g.name)
    return DecoratedGraph(vertices, edges, g.layer, (), g.name)


def _walk(start, tside, hside, done):
    """Follow the chain through port ``start`` in both directions.

    Each port has one target link and one host link.  Returns the two real
    endpoints, the weight, and whether the chain closed into a circle."""
    weight = tside[start][2]

    def follow(port, side):
        # leave `port` through its `side` link until a real endpoint is reached
        while True:
            done.add(port)
            link = (tside if side == "t" else hside)[port]
            if link[0] == "end":
                return link[1]
            port = link[1]
            if port == start:
                return None
            side = "h" if side == "t" else "t"

    a = follow(start, "t")
    if a is None:
        return None, weight, True
    b = follow(start, "h")
    return (a, b), weight, False


# -- sites --------------------------------------------------------------------

def _image(g: DecoratedGraph, match: _Match) -> tuple:
    out = []
    for hv in sorted(match.vmap.values()):
        out.append(("v", hv, g.vertices[hv]))
    for he in sorted(match.image_edges):
        out.append(("e", he, g.edges[he]))
    if g.is_circle:
        out.append(("c", "circle", g.free_circles))
    return tuple(out)


def _key(image: tuple) -> str:
    return ",".join(sorted(x[1] for x in image))


@dataclass
class Candidate:
    """A match with symbol values, before splicing."""
    rule: RewriteRule
    direction: str
    match: _Match
    env: dict
    image: tuple
    key: str

    def splice(self, g: DecoratedGraph) -> Optional[DecoratedGraph]:
        try:
            res = _splice(g, self.match, self.rule.side(self.direction)[1], self.env)
        except ValueError:
            return None
        if res is None or not _locally_valid(g, res):
            return None
        return res


def _locally_valid(g: DecoratedGraph, res: DecoratedGraph) -> bool:
    """Laws at the vertices the splice touched.  Everything else is untouched
    host, and port usage is kept intact by the interface check on rules."""
    if res.layer != CURVE or res.is_circle:
        return True
    touched = {vid for vid in res.vertices if vid not in g.vertices}
    for eid, e in res.edges.items():
        if g.edges.get(eid) != e:
            touched.update((e.a[0], e.b[0]))
    return not any(vertex_violations(res, vid) for vid in touched)


def candidates(g: DecoratedGraph, rule: RewriteRule, direction: str) -> list[Candidate]:
    source, target = rule.side(direction)
    cap = g.max_weight()
    out = []
    for m in _matches(source, g):
        image = None
        for env in _bindings(rule, source, target, m, cap):
            if image is None:
                image = _image(g, m)
            out.append(Candidate(rule, direction, m, env, image, _key(image)))
    return out


def _materialize(g: DecoratedGraph, cands: list[Candidate], host_code: bytes) -> list[MoveSite]:
    by_key: dict[str, dict[bytes, MoveSite]] = {}
    for c in cands:
        res = c.splice(g)
        if res is None:
            continue
        code = canonical_code(res)
        slot = by_key.setdefault(c.key, {})
        if code not in slot:
            slot[code] = MoveSite(c.rule.name, c.direction, c.key, 0, c.env, c.image,
                                  host_code, res, code)
    out = []
    for key in sorted(by_key):
        for i, code in enumerate(sorted(by_key[key])):
            s = by_key[key][code]
            s.variant = i
            out.append(s)
    return out


def rule_sites(g: DecoratedGraph, rule: RewriteRule, direction: str,
               host_code: bytes = None) -> list[MoveSite]:
    host_code = host_code if host_code is not None else canonical_code(g)
    return _materialize(g, candidates(g, rule, direction), host_code)


def sites_at(g: DecoratedGraph, rule: RewriteRule, direction: str, key: str,
             host_code: bytes = None) -> list[MoveSite]:
    """All variants of ``rule`` at the image ``key``."""
    host_code = host_code if host_code is not None else canonical_code(g)
    return _materialize(g, [c for c in candidates(g, rule, direction) if c.key == key], host_code)


def find_sites(g: DecoratedGraph, rs: RuleSet | Iterable[RewriteRule], direction: str = "both",
               only: Optional[Iterable[str]] = None) -> list[MoveSite]:
    dirs = DIRECTIONS if direction == "both" else (direction,)
    names = set(only) if only is not None else None
    host_code = canonical_code(g)
    out = []
    for rule in rs:
        if names is not None and rule.name not in names:
            continue
        for d in dirs:
            out.extend(rule_sites(g, rule, d, host_code))
    return out


def apply_move(g: DecoratedGraph, site: MoveSite) -> tuple[DecoratedGraph, LogEntry]:
    for kind, ident, value in site.image:
        if kind == "v" and g.vertices.get(ident) != value:
            raise StaleSite(f"vertex {ident} changed since the site was found")
        if kind == "e" and g.edges.get(ident) != value:
            raise StaleSite(f"edge {ident} changed since the site was found")
        if kind == "c" and g.free_circles != value:
            raise StaleSite("circle changed since the site was found")
    if canonical_code(g) != site.host_code:
        raise StaleSite("host graph changed since the site was found")
    return site.result, site.entry()


def replay_entry(g: DecoratedGraph, rs: RuleSet, entry: LogEntry) -> tuple[DecoratedGraph, LogEntry]:
    if entry.rule not in rs.rules:
        raise LogMismatch(f"rule {entry.rule} is not in ruleset {rs.name}")
    for s in sites_at(g, rs[entry.rule], entry.direction, entry.key):
        if s.variant == entry.variant:
            return apply_move(g, s)
    raise LogMismatch(f"no site for '{entry.line()}'")


def replay(g: DecoratedGraph, rs: RuleSet, log: ReductionLog) -> DecoratedGraph:
    for entry in log.entries:
        g, _ = replay_entry(g, rs, entry)
    return g


def invert_move(g2: DecoratedGraph, entry: LogEntry, rs: RuleSet) -> DecoratedGraph:
    """Undo ``entry`` on its result ``g2``; the returned graph is isomorphic to
    the graph the move was applied to."""
    if entry.after and canonical_code(g2) != entry.after:
        raise LogMismatch("graph does not match the log entry's result")
    if not entry.before:
        raise LogMismatch("log entry carries no pre-move code")
    back = RL if entry.direction == LR else LR
    for s in rule_sites(g2, rs[entry.rule], back):
        if s.result_code == entry.before:
            return s.result
    raise LogMismatch(f"move '{entry.line()}' cannot be inverted on this graph")
