"""Rule files: symbolic fragments, guards and the three registries.

A rule reads::

    rule <name> [mirror]
    left  { <fragment> }
    guard { <comparisons> }
    right { <fragment> }

Fragments use the graph text format with symbolic heights and weights.  An
endpoint written without a dot (``p1``, ``pA``) is a boundary port; every port
appears exactly once on each side.
"""
from __future__ import annotations

import ast
import operator
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .graph import CROSS, CURVE, END, FLOW, FOLD, PORTS

FLOWS, CURVES, PAIRS = "flows", "curves", "pairs"

FLOW_NAMES = ("s1", "s2", "s3", "s4")
CURVE_NAMES = (
    "iD1", "iD2", "iX", "i2", "i3", "i4p", "i4m",
    "i22_1", "i22_2", "i23_1", "i23_2",
    "i24p_1", "i24p_2", "i24m_1", "i24m_2",
    "i25_1", "i25_2", "i25_3", "i25_4",
    "i33", "i34p", "i34m", "i35_1", "i35_2",
    "i44pp_1", "i44pp_2", "i44mm_1", "i44mm_2", "i44pm_1", "i44pm_2",
    "i45p_1", "i45p_2", "i45m_1", "i45m_2", "i45_pm",
)
PAIR_EXTRA_NAMES = ("si1", "si2", "si3", "si4")

REGISTRY = {
    FLOWS: FLOW_NAMES,
    CURVES: CURVE_NAMES,
    PAIRS: CURVE_NAMES + PAIR_EXTRA_NAMES,
}
FILES = {FLOWS: ("flows.rules",), CURVES: ("curves.rules",),
         PAIRS: ("curves.rules", "pairs.rules")}


class RuleError(ValueError):
    pass


# -- linear expressions -----------------------------------------------------------

@dataclass(frozen=True)
class Lin:
    """Integer linear form ``const + sum(coef * symbol)``."""
    coefs: tuple[tuple[str, int], ...] = ()
    const: int = 0

    @staticmethod
    def make(coefs: dict, const: int) -> "Lin":
        return Lin(tuple(sorted((k, v) for k, v in coefs.items() if v)), const)

    @property
    def symbols(self) -> set[str]:
        return {k for k, _ in self.coefs}

    def __add__(self, other: "Lin") -> "Lin":
        d = dict(self.coefs)
        for k, v in other.coefs:
            d[k] = d.get(k, 0) + v
        return Lin.make(d, self.const + other.const)

    def scale(self, c: int) -> "Lin":
        return Lin.make({k: v * c for k, v in self.coefs}, self.const * c)

    def eval(self, env: dict) -> int:
        return self.const + sum(v * env[k] for k, v in self.coefs)

    def partial(self, env: dict) -> "Lin":
        d, c = {}, self.const
        for k, v in self.coefs:
            if k in env:
                c += v * env[k]
            else:
                d[k] = v
        return Lin.make(d, c)

    def __str__(self) -> str:
        parts = []
        for k, v in self.coefs:
            parts.append(k if v == 1 else f"-{k}" if v == -1 else f"{v}*{k}")
        if self.const or not parts:
            parts.append(str(self.const))
        return "+".join(parts).replace("+-", "-")


def _lin(node) -> Lin:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return Lin((), node.value)
    if isinstance(node, ast.Name):
        return Lin(((node.id, 1),), 0)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        x = _lin(node.operand)
        return x.scale(-1) if isinstance(node.op, ast.USub) else x
    if isinstance(node, ast.BinOp):
        a, b = _lin(node.left), _lin(node.right)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a + b.scale(-1)
        if isinstance(node.op, ast.Mult):
            if not a.coefs:
                return b.scale(a.const)
            if not b.coefs:
                return a.scale(b.const)
            raise RuleError("non-linear product")
    raise RuleError(f"unsupported expression: {ast.dump(node)}")


def parse_expr(text: str) -> Lin:
    try:
        return _lin(ast.parse(text, mode="eval").body)
    except SyntaxError as exc:
        raise RuleError(f"bad expression {text!r}") from exc


_OPS = {ast.Lt: operator.lt, ast.LtE: operator.le, ast.Gt: operator.gt,
        ast.GtE: operator.ge, ast.Eq: operator.eq, ast.NotEq: operator.ne}


@dataclass(frozen=True)
class Comparison:
    terms: tuple[Lin, ...]
    ops: tuple[str, ...]
    text: str

    @property
    def symbols(self) -> set[str]:
        return set().union(*(t.symbols for t in self.terms))

    def holds(self, env: dict) -> bool:
        vals = [t.eval(env) for t in self.terms]
        return all(_OPS[op](a, b) for op, a, b in zip(self.ops, vals, vals[1:]))


def parse_guard(text: str) -> list[Comparison]:
    out = []
    for chunk in re.split(r"[,;\n]", text):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            node = ast.parse(chunk, mode="eval").body
        except SyntaxError as exc:
            raise RuleError(f"bad guard {chunk!r}") from exc
        if not isinstance(node, ast.Compare):
            raise RuleError(f"guard {chunk!r} is not a comparison")
        terms = (_lin(node.left),) + tuple(_lin(c) for c in node.comparators)
        ops = tuple(type(o) for o in node.ops)
        if any(o not in _OPS for o in ops):
            raise RuleError(f"unsupported comparison in {chunk!r}")
        out.append(Comparison(terms, ops, chunk))
    return out


# -- patterns -----------------------------------------------------------------

@dataclass(frozen=True)
class PVertex:
    kind: str
    height: Optional[Lin] = None
    sign: Optional[str] = None


# an endpoint is ("v", vertex, port) or ("p", port name)
PEnd = tuple


@dataclass(frozen=True)
class PEdge:
    eid: str
    a: PEnd
    b: PEnd
    weight: Optional[Lin] = None

    @property
    def kind(self) -> str:
        n = (self.a[0] == "p") + (self.b[0] == "p")
        return ("internal", "boundary", "bare")[n]


@dataclass
class Pattern:
    vertices: dict[str, PVertex] = field(default_factory=dict)
    edges: list[PEdge] = field(default_factory=list)

    @property
    def ports(self) -> dict[str, tuple[PEdge, PEnd]]:
        out = {}
        for e in self.edges:
            for end, other in ((e.a, e.b), (e.b, e.a)):
                if end[0] == "p":
                    out[end[1]] = (e, other)
        return out

    def port_weight(self, port: str) -> Optional[Lin]:
        return self.ports[port][0].weight

    @property
    def symbols(self) -> set[str]:
        s = set()
        for v in self.vertices.values():
            if v.height is not None:
                s |= v.height.symbols
        for e in self.edges:
            if e.weight is not None:
                s |= e.weight.symbols
        return s

    def edge_at(self, vid: str, port: str) -> PEdge:
        for e in self.edges:
            if e.a == ("v", vid, port) or e.b == ("v", vid, port):
                return e
        raise KeyError((vid, port))


def _pend(tok: str, vertices: dict) -> PEnd:
    if "." in tok:
        vid, port = tok.rsplit(".", 1)
        if vid not in vertices:
            raise RuleError(f"unknown pattern vertex {vid}")
        if port not in PORTS[vertices[vid].kind]:
            raise RuleError(f"pattern vertex {vid} has no port {port}")
        return ("v", vid, port)
    return ("p", tok)


def parse_pattern(text: str) -> Pattern:
    pat = Pattern()
    auto = 0
    for raw in re.split(r"[;\n]", text):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "vertex":
            if len(tok) < 3 or tok[2] not in PORTS:
                raise RuleError(f"bad pattern vertex line {line!r}")
            vid, kind = tok[1], tok[2]
            h = s = None
            for t in tok[3:]:
                if t.startswith("h=") and kind in (FOLD, CROSS):
                    h = parse_expr(t[2:])
                elif t.startswith("s=") and kind == END and t[2:] in ("+", "-"):
                    s = t[2:]
                else:
                    raise RuleError(f"bad token {t!r} in {line!r}")
            if kind in (FOLD, CROSS) and h is None or kind == END and s is None:
                raise RuleError(f"missing label in {line!r}")
            if vid in pat.vertices:
                raise RuleError(f"duplicate pattern vertex {vid}")
            pat.vertices[vid] = PVertex(kind, h, s)
        elif tok[0] == "edge":
            w = None
            rest = []
            for t in tok[1:]:
                if t.startswith("w="):
                    w = parse_expr(t[2:])
                else:
                    rest.append(t)
            if len(rest) == 2:
                eid = f"_{auto}"
                auto += 1
            elif len(rest) == 3:
                eid = rest.pop(0)
            else:
                raise RuleError(f"bad pattern edge line {line!r}")
            pat.edges.append(PEdge(eid, _pend(rest[0], pat.vertices),
                                   _pend(rest[1], pat.vertices), w))
        else:
            raise RuleError(f"unknown pattern directive {line!r}")
    _check_pattern(pat)
    return pat


def _check_pattern(pat: Pattern) -> None:
    used = {}
    ports = {}
    for e in pat.edges:
        for end in (e.a, e.b):
            if end[0] == "v":
                if end in used:
                    raise RuleError(f"pattern endpoint {end[1]}.{end[2]} used twice")
                used[end] = e
            else:
                if end[1] in ports:
                    raise RuleError(f"boundary port {end[1]} used twice")
                ports[end[1]] = e
    for vid, v in pat.vertices.items():
        for p in PORTS[v.kind]:
            if ("v", vid, p) not in used:
                raise RuleError(f"pattern port {vid}.{p} is not covered")
    bare = [e for e in pat.edges if e.kind == "bare"]
    if bare and (len(pat.edges) > 1 or pat.vertices):
        raise RuleError("a bare edge must be the whole pattern")
    if pat.vertices:
        # internal edges must connect the vertices
        adj = {v: set() for v in pat.vertices}
        for e in pat.edges:
            if e.kind == "internal":
                adj[e.a[1]].add(e.b[1])
                adj[e.b[1]].add(e.a[1])
        start = next(iter(adj))
        seen, stack = {start}, [start]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(adj):
            raise RuleError("pattern vertices are not connected by internal edges")


@dataclass
class RewriteRule:
    name: str
    left: Pattern
    right: Pattern
    guard: list[Comparison]
    mirror: bool = False
    layer: str = FLOW

    def side(self, direction: str) -> tuple[Pattern, Pattern]:
        return (self.left, self.right) if direction == "lr" else (self.right, self.left)

    @property
    def symbols(self) -> set[str]:
        s = self.left.symbols | self.right.symbols
        for c in self.guard:
            s |= c.symbols
        return s


_RULE_RE = re.compile(
    r"rule\s+(?P<name>\S+)(?P<mirror>\s+mirror)?\s+"
    r"left\s*\{(?P<left>[^}]*)\}\s*guard\s*\{(?P<guard>[^}]*)\}\s*"
    r"right\s*\{(?P<right>[^}]*)\}", re.S)


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def parse_rules(text: str, source: str = "<rules>") -> list[RewriteRule]:
    text = _strip_comments(text)
    rules, pos = [], 0
    for m in _RULE_RE.finditer(text):
        gap = text[pos:m.start()].strip()
        if gap:
            line = text[:pos].count("\n") + 1
            raise RuleError(f"{source}:{line}: unparsable text {gap[:40]!r}")
        pos = m.end()
        name = m.group("name")
        try:
            left = parse_pattern(m.group("left"))
            right = parse_pattern(m.group("right"))
            guard = parse_guard(m.group("guard"))
        except RuleError as exc:
            raise RuleError(f"{source}: rule {name}: {exc}") from None
        weighted = [e.weight is not None for p in (left, right) for e in p.edges]
        if any(weighted) and not all(weighted):
            raise RuleError(f"{source}: rule {name}: weights must be all present or all absent")
        rule = RewriteRule(name, left, right, guard, bool(m.group("mirror")),
                           CURVE if any(weighted) else FLOW)
        check_interface(rule)
        rules.append(rule)
    tail = text[pos:].strip()
    if tail:
        raise RuleError(f"{source}: unparsable text after last rule: {tail[:40]!r}")
    return rules


def check_interface(rule: RewriteRule) -> None:
    lp, rp = rule.left.ports, rule.right.ports
    if set(lp) != set(rp):
        raise RuleError(f"rule {rule.name}: port sets differ {sorted(lp)} vs {sorted(rp)}")
    for p in lp:
        wl, wr = rule.left.port_weight(p), rule.right.port_weight(p)
        if wl != wr:
            raise RuleError(f"rule {rule.name}: port {p} weight {wl} vs {wr}")


@dataclass
class RuleSet:
    name: str
    rules: dict[str, RewriteRule]

    @property
    def layer(self) -> str:
        return FLOW if self.name == FLOWS else CURVE

    def __iter__(self):
        return iter(self.rules.values())

    def __len__(self):
        return len(self.rules)

    def __getitem__(self, name: str) -> RewriteRule:
        return self.rules[name]


_CACHE: dict[str, RuleSet] = {}


def load_rules(name: str, self_check: int = 0, seed: int = 0) -> RuleSet:
    """Load a registry.  ``self_check`` > 0 runs that many random hosts per
    rule and raises on the first failing rule."""
    name = name.lower()
    if name not in REGISTRY:
        raise RuleError(f"unknown ruleset {name!r}")
    if name not in _CACHE:
        rules: dict[str, RewriteRule] = {}
        for fname in FILES[name]:
            text = resources.files("spinecalc").joinpath("rules", fname).read_text("utf-8")
            for r in parse_rules(text, fname):
                if r.name in rules:
                    raise RuleError(f"{fname}: duplicate rule {r.name}")
                rules[r.name] = r
        expected = REGISTRY[name]
        missing = [n for n in expected if n not in rules]
        extra = [n for n in rules if n not in expected]
        if missing or extra:
            raise RuleError(f"ruleset {name}: missing {missing}, unexpected {extra}")
        layer = FLOW if name == FLOWS else CURVE
        wrong = [r.name for r in rules.values() if r.layer != layer]
        if wrong:
            raise RuleError(f"ruleset {name}: rules on the wrong layer: {wrong}")
        _CACHE[name] = RuleSet(name, {n: rules[n] for n in expected})
    rs = _CACHE[name]
    if self_check:
        from .selfcheck import self_check_rule
        for r in rs:
            rep = self_check_rule(r, rs, samples=self_check, seed=seed)
            if not rep.ok:
                raise RuleError(f"rule {r.name} failed self-check: {rep.failures[0]}")
    return rs
