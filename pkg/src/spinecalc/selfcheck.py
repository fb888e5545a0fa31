"""Randomized soundness checks for rewrite rules.

Hosts are built by planting one side of a rule with random symbol values and
closing its ports off with random caps: chains of bivalent vertices that walk
the weight down to 0 before a univalent vertex, small trivalent gadgets, or a
chain joining two ports directly.
"""
from __future__ import annotations

import random
import zlib
from dataclasses import dataclass, field
from typing import Optional

from .canon import canonical_code
from .generate import GraphBuilder
from .graph import (CURVE, TRIVALENT, UNIVALENT, DecoratedGraph, Vertex,
                    underlying_spine, validate)
from .reconstruction import classify_surface, curve_invariants, trace_curve
from .rewrite import LR, RL, rule_sites
from .rules import RewriteRule, RuleSet
from .textio import serialize

MAX_SYMBOL = 5


@dataclass
class Failure:
    check: str
    host: DecoratedGraph
    detail: str

    def __str__(self) -> str:
        return f"{self.check}: {self.detail}\n{serialize(self.host)}"


@dataclass
class SelfCheckReport:
    rule: str
    hosts: int = 0
    sites: int = 0
    failures: list[Failure] = field(default_factory=list)
    failed_checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def add(self, failure: Failure) -> None:
        self.failed_checks[failure.check] = self.failed_checks.get(failure.check, 0) + 1
        self.failures.append(failure)

    def minimal(self) -> Optional[Failure]:
        if not self.failures:
            return None
        return min(self.failures, key=lambda f: (len(f.host.vertices), len(f.host.edges)))


def _sample_env(rule: RewriteRule, rng: random.Random) -> Optional[dict]:
    syms = sorted(rule.symbols)
    for _ in range(400):
        env = {s: rng.randint(0, MAX_SYMBOL) for s in syms}
        if all(c.holds(env) for c in rule.guard):
            return env
    return None


def plant(rule: RewriteRule, direction: str, rng: random.Random) -> Optional[DecoratedGraph]:
    """Random host containing the source side of ``rule`` for ``direction``."""
    source, _ = rule.side(direction)
    env = _sample_env(rule, rng)
    if env is None:
        return None
    b = GraphBuilder(rule.layer, rng)
    ids = {pv: b.vertex(Vertex(v.kind, v.height.eval(env) if v.height else None, v.sign))
           for pv, v in source.vertices.items()}

    def w_of(pe):
        return pe.weight.eval(env) if pe.weight is not None else 0

    stubs = []
    for pe in source.edges:
        if pe.kind == "internal":
            b.edge((ids[pe.a[1]], pe.a[2]), (ids[pe.b[1]], pe.b[2]), w_of(pe))
        elif pe.kind == "boundary":
            inner = pe.a if pe.a[0] == "v" else pe.b
            stubs.append(((ids[inner[1]], inner[2]), w_of(pe)))
    bare = [pe for pe in source.edges if pe.kind == "bare"]
    if bare:
        w = w_of(bare[0])
        if rng.random() < 0.15:
            return DecoratedGraph({}, {}, rule.layer, (w if rule.layer == CURVE else None,), "host")
        # anchor the bare edge between two small caps
        x = b.vertex(Vertex(TRIVALENT)) if rng.random() < 0.5 else None
        if x is None:
            u1 = b.vertex(Vertex(UNIVALENT))
            start, _ = b.path((u1, "0"), 0, w, rng.randint(0, 2))
        else:
            germ = rng.choice("TBA")
            start = (x, germ)
            b.gadget(x, germ, w, 0)
        u2 = b.vertex(Vertex(UNIVALENT))
        end, _ = b.path((u2, "0"), 0, w, rng.randint(0, 2))
        b.edge(start, end, w)
    else:
        rng.shuffle(stubs)
        while stubs:
            e1, w1 = stubs.pop()
            if stubs and rng.random() < 0.35:
                e2, w2 = stubs.pop()
                b.join(e1, w1, e2, w2)
            else:
                b.cap(e1, w1, 0)
    return DecoratedGraph(b.vertices, b.edges, rule.layer, (), "host")


def _curve_bundle(g: DecoratedGraph):
    inv = curve_invariants(trace_curve(g))
    kinds = tuple(sorted(c.kind for c in trace_curve(g).components))
    return inv[0], kinds, inv[3], inv[5]


def self_check_rule(rule: RewriteRule, rs: RuleSet, samples: int = 200, seed: int = 0,
                    max_failures: int = 20) -> SelfCheckReport:
    """Apply ``rule`` on ``samples`` random hosts (alternating directions) and
    check validity and the invariant bundle of its ruleset."""
    rng = random.Random(seed * 1_000_003 + zlib.crc32(rule.name.encode()))
    rep = SelfCheckReport(rule.name)
    spine_fixed = rs.name == "curves" or (rule.name.startswith("i") and rule.layer == CURVE)
    attempts = 0
    while rep.hosts < samples and attempts < samples * 5:
        attempts += 1
        direction = LR if rep.hosts % 2 == 0 else RL
        host = plant(rule, direction, rng)
        if host is None:
            continue
        if not validate(host).ok:
            rep.add(Failure("host-invalid", host, "; ".join(map(str, validate(host).violations))))
            continue
        rep.hosts += 1
        sites = rule_sites(host, rule, direction)
        if not sites:
            rep.add(Failure("planted-site-missing", host, f"{rule.name} {direction}"))
            continue
        surf = classify_surface(host)
        spine = canonical_code(underlying_spine(host)) if rule.layer == CURVE else None
        bundle = _curve_bundle(host) if rule.layer == CURVE else None
        for s in sites:
            rep.sites += 1
            res = s.result
            where = f"site '{s.entry().line()}'"
            if not validate(res).ok:
                rep.add(Failure("validity", host, where))
                continue
            if classify_surface(res) != surf:
                rep.add(Failure("surface", host, f"{where}: {surf.record()} -> {classify_surface(res).record()}"))
            if spine_fixed and canonical_code(underlying_spine(res)) != spine:
                rep.add(Failure("spine", host, where))
            if bundle is not None:
                after = _curve_bundle(res)
                for name, x, y in zip(("components", "kinds", "endpoints", "parity"), bundle, after):
                    if x != y:
                        rep.add(Failure(name, host, f"{where}: {x} -> {y}"))
            back = LR if direction == RL else RL
            if not any(t.result_code == s.host_code for t in rule_sites(res, rule, back)):
                rep.add(Failure("inverse", host, where))
        if len(rep.failures) >= max_failures:
            break
    return rep
