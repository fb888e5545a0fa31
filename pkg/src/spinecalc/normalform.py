"""Normal forms of flow-spines with non-negative Euler characteristic, random
scrambling and bounded move-equivalence search."""
from __future__ import annotations

import random
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from . import catalog
from .canon import canonical_code, is_isomorphic
from .graph import FLOW, DecoratedGraph, underlying_spine
from .reconstruction import euler_characteristic
from .rewrite import (LR, RL, LogEntry, MoveSite, ReductionLog, apply_move, candidates,
                      find_sites, sites_at)
from .rules import FLOWS, CURVES, RuleSet, load_rules


@dataclass(frozen=True)
class Segment:
    def graph(self) -> DecoratedGraph:
        return catalog.segment()

    def __str__(self):
        return "segment"


@dataclass(frozen=True)
class AnnulusFamily:
    k: int

    def graph(self) -> DecoratedGraph:
        return catalog.annulus_family(self.k)

    def __str__(self):
        return f"annulus k={self.k}"


@dataclass(frozen=True)
class MoebiusSpine:
    def graph(self) -> DecoratedGraph:
        return catalog.mobius()

    def __str__(self):
        return "moebius"


NormalForm = Segment | AnnulusFamily | MoebiusSpine


def identify(g: DecoratedGraph) -> Optional[NormalForm]:
    """The normal form ``g`` is isomorphic to, if any."""
    if g.layer != FLOW:
        return None
    if g.is_circle:
        return AnnulusFamily(0)
    u, t = g.count("univalent"), g.count("trivalent")
    cands: list[NormalForm] = []
    if (u, t) == (2, 0):
        cands = [Segment()]
    elif (u, t) == (1, 1):
        cands = [MoebiusSpine()]
    elif u == t and t % 2 == 0 and t > 0:
        cands = [AnnulusFamily(t // 2)]
    code = canonical_code(g)
    for c in cands:
        if canonical_code(c.graph()) == code:
            return c
    return None


class PreconditionError(ValueError):
    pass


def _first_site(g: DecoratedGraph, rs: RuleSet, names, direction: str) -> Optional[MoveSite]:
    """The applicable site with the smallest (key, rule, variant)."""
    groups: dict[tuple, list] = {}
    for name in names:
        for c in candidates(g, rs[name], direction):
            groups.setdefault((c.key, name), []).append(c)
    for key, name in sorted(groups):
        sites = sites_at(g, rs[name], direction, key)
        if sites:
            return sites[0]
    return None


def _reducing(g: DecoratedGraph, rs: RuleSet) -> Optional[MoveSite]:
    return _first_site(g, rs, ("s3", "s4"), RL)


def greedy_simplify(g: DecoratedGraph, rs: Optional[RuleSet] = None,
                    use_s1: bool = True) -> ReductionLog:
    """Greedy reduction: s3/s4 right to left while possible; when stuck, an s1
    that enables a further s3/s4 (the composite of the non-stable picture).
    Each round removes one univalent and one trivalent vertex."""
    rs = rs or load_rules(FLOWS)
    log = ReductionLog(initial=canonical_code(g))
    while True:
        site = _reducing(g, rs)
        if site is not None:
            g, entry = apply_move(g, site)
            log.entries.append(entry)
            continue
        if not use_s1:
            break
        done = False
        for s1 in sorted(find_sites(g, rs, RL, only=("s1",)), key=lambda s: (s.key, s.variant)):
            nxt = _reducing(s1.result, rs)
            if nxt is None:
                continue
            g, entry = apply_move(g, s1)
            log.entries.append(entry)
            g, entry = apply_move(g, nxt)
            log.entries.append(entry)
            done = True
            break
        if not done:
            break
    log.final = canonical_code(g)
    log.graph = g
    return log


def reduce_nonneg_chi(g: DecoratedGraph, rs: Optional[RuleSet] = None) -> tuple[NormalForm, ReductionLog]:
    if g.layer != FLOW:
        raise PreconditionError("reduction works on flow-spines")
    chi = euler_characteristic(g)
    if chi < 0:
        raise PreconditionError(f"Euler characteristic {chi} < 0")
    log = greedy_simplify(g, rs, use_s1=(chi == 0))
    form = identify(log.graph)
    if form is None:
        raise AssertionError("reduction stopped outside the normal forms")
    return form, log


def random_move(g: DecoratedGraph, rs: RuleSet, rng: random.Random,
                max_weight: Optional[int] = None) -> Optional[MoveSite]:
    """A uniformly chosen applicable (match, values) pair, as a site."""
    cands = [c for r in rs for d in (LR, RL) for c in candidates(g, r, d)]
    rng.shuffle(cands)
    host_code = None
    for c in cands:
        res = c.splice(g)
        if res is None or (max_weight is not None and res.max_weight() > max_weight):
            continue
        host_code = host_code or canonical_code(g)
        code = canonical_code(res)
        for s in sites_at(g, c.rule, c.direction, c.key, host_code):
            if s.result_code == code:
                return s
    return None


def scramble(g: DecoratedGraph, rs: RuleSet, steps: int, seed: int = 0,
             max_weight: Optional[int] = None) -> tuple[DecoratedGraph, ReductionLog]:
    rng = random.Random(seed)
    log = ReductionLog(initial=canonical_code(g))
    for _ in range(steps):
        site = random_move(g, rs, rng, max_weight)
        if site is None:
            break
        g, entry = apply_move(g, site)
        log.entries.append(entry)
    log.final = canonical_code(g)
    log.graph = g
    return g, log


# -- bounded search ---------------------------------------------------------------

@dataclass
class SearchResult:
    equivalent: bool
    path: list[LogEntry] = field(default_factory=list)
    expansions: int = 0
    truncated: bool = False     # weight ceiling pruned some neighbours
    exhausted: bool = False     # a side ran out of nodes: the answer is definite

    def record(self) -> str:
        if self.equivalent:
            return f"equivalent=yes path_len={len(self.path)} expansions={self.expansions}"
        verdict = "no" if self.exhausted and not self.truncated else "no-within-bound"
        return f"equivalent={verdict} expansions={self.expansions}"


def _neighbours(g: DecoratedGraph, rs: RuleSet, cap: Optional[int]):
    out, pruned = [], False
    for s in find_sites(g, rs, "both"):
        if cap is not None and s.result.max_weight() > cap:
            pruned = True
            continue
        out.append((s.result_code, s.result))
    return out, pruned


def _expand_many(nodes, rs, cap, threads):
    if threads <= 1 or len(nodes) <= 1:
        return [_neighbours(g, rs, cap) for g in nodes]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda g: _neighbours(g, rs, cap), nodes))


def _default_cap(rs: RuleSet, *graphs) -> Optional[int]:
    if rs.layer == FLOW:
        return None
    return max(g.max_weight() for g in graphs) + 2


def _concrete_path(g: DecoratedGraph, codes: list[bytes], rs: RuleSet) -> list[LogEntry]:
    entries = []
    for nxt in codes[1:]:
        site = next(s for s in find_sites(g, rs, "both") if s.result_code == nxt)
        g, entry = apply_move(g, site)
        entries.append(entry)
    return entries


def equivalent_bounded(g1: DecoratedGraph, g2: DecoratedGraph, rs: RuleSet,
                       max_expansions: int = 10_000, max_weight: Optional[int] = None,
                       threads: int = 1, batch: int = 8) -> SearchResult:
    """Bidirectional breadth-first search over canonical codes."""
    if rs.name == CURVES and not is_isomorphic(underlying_spine(g1), underlying_spine(g2)):
        return SearchResult(False, exhausted=True)
    cap = max_weight if max_weight is not None else _default_cap(rs, g1, g2)
    c1, c2 = canonical_code(g1), canonical_code(g2)
    if c1 == c2:
        return SearchResult(True, [], 0, exhausted=True)
    parents = ({c1: None}, {c2: None})
    queues = (deque([(c1, g1)]), deque([(c2, g2)]))
    expansions, truncated = 0, False
    meet = None
    while expansions < max_expansions and meet is None:
        if not queues[0] or not queues[1]:
            break
        side = 0 if len(queues[0]) <= len(queues[1]) else 1
        q = queues[side]
        take = min(batch, len(q), max_expansions - expansions)
        nodes = [q.popleft() for _ in range(take)]
        results = _expand_many([g for _, g in nodes], rs, cap, threads)
        for (code, _), (nbrs, pruned) in zip(nodes, results):
            expansions += 1
            truncated |= pruned
            for ncode, ng in nbrs:
                if ncode in parents[side]:
                    continue
                parents[side][ncode] = code
                if ncode in parents[1 - side]:
                    meet = ncode
                    break
                q.append((ncode, ng))
            if meet is not None:
                break
    if meet is None:
        exhausted = not queues[0] or not queues[1]
        return SearchResult(False, [], expansions, truncated, exhausted)
    fwd = []
    c = meet
    while c is not None:
        fwd.append(c)
        c = parents[0][c]
    fwd.reverse()
    c = parents[1][meet]
    while c is not None:
        fwd.append(c)
        c = parents[1][c]
    path = _concrete_path(g1, fwd, rs)
    return SearchResult(True, path, expansions, truncated)


@dataclass
class Orbit:
    codes: set
    graphs: dict
    expansions: int
    truncated: bool          # budget or weight ceiling cut the search short


def enumerate_orbit(g: DecoratedGraph, rs: RuleSet, max_expansions: int = 1000,
                    max_weight: Optional[int] = None, threads: int = 1) -> Orbit:
    cap = max_weight if max_weight is not None else _default_cap(rs, g)
    c0 = canonical_code(g)
    graphs = {c0: g}
    queue = deque([(c0, g)])
    expansions, pruned_any = 0, False
    while queue and expansions < max_expansions:
        take = min(8, len(queue), max_expansions - expansions)
        nodes = [queue.popleft() for _ in range(take)]
        for (_, _), (nbrs, pruned) in zip(nodes, _expand_many([x for _, x in nodes], rs, cap, threads)):
            expansions += 1
            pruned_any |= pruned
            for code, ng in nbrs:
                if code not in graphs:
                    graphs[code] = ng
                    queue.append((code, ng))
    return Orbit(set(graphs), graphs, expansions, bool(queue) or pruned_any)
