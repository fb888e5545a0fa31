import random
from pathlib import Path

import pytest

from spinecalc import catalog
from spinecalc.canon import canonical_code, is_isomorphic
from spinecalc.generate import decorate, random_graph, random_spine
from spinecalc.graph import CROSS, TRIVALENT, UNIVALENT, circle
from spinecalc.normalform import random_move
from spinecalc.reconstruction import classify_surface, curve_invariants, trace_curve
from spinecalc.rewrite import (LR, RL, LogEntry, LogMismatch, ReductionLog, StaleSite, apply_move,
                               find_sites, invert_move, replay, replay_entry, rule_sites)
from spinecalc.rules import CURVES, FLOWS, PAIRS, load_rules
from spinecalc.textio import parse

DATA = Path(__file__).parent / "data"
FLOW_RS = load_rules(FLOWS)
CURVE_RS = load_rules(CURVES)

TONGUE_ON_T = parse("""graph t layer=flow
vertex t trivalent
vertex u univalent
edge a t.T u.0
edge b t.A t.B
""")

TWO_WAY = parse("""graph w layer=flow
vertex v0 trivalent
vertex v1 trivalent
vertex v2 trivalent
vertex v3 trivalent
edge e0 v0.A v1.A
edge e1 v0.B v0.T
edge e2 v1.B v2.T
edge e3 v1.T v2.B
edge e4 v2.A v3.B
edge e5 v3.A v3.T
""")


def _cycle(text_vertices, weights):
    lines = ["graph c layer=curve"]
    lines += [f"vertex x{i} {v}" for i, v in enumerate(text_vertices)]
    k = len(text_vertices)
    lines += [f"edge e{i} x{i}.b x{(i + 1) % k}.a w={w}" for i, w in enumerate(weights)]
    return parse("\n".join(lines))


def test_segment_has_no_reducing_sites():
    assert not find_sites(catalog.segment(), FLOW_RS, RL, only=("s3", "s4"))


def test_univalent_on_T_gives_s3_site():
    assert rule_sites(TONGUE_ON_T, FLOW_RS["s3"], RL)


def test_T_B_junction_gives_s1_site():
    g = parse((DATA / "nonstable_a.spine").read_text())
    assert rule_sites(g, FLOW_RS["s1"], RL)


def test_s3_drops_one_univalent_and_one_trivalent():
    g = catalog.annulus_family(2)
    g3, _ = apply_move(g, rule_sites(g, FLOW_RS["s3"], LR)[0])
    (site,) = [s for s in rule_sites(g3, FLOW_RS["s3"], RL) if is_isomorphic(s.result, g)][:1]
    g4, _ = apply_move(g3, site)
    assert g4.count(UNIVALENT) == g3.count(UNIVALENT) - 1
    assert g4.count(TRIVALENT) == g3.count(TRIVALENT) - 1


def test_s1_left_to_right_has_two_ways():
    sites = rule_sites(TWO_WAY, FLOW_RS["s1"], LR)
    keys = {s.key for s in sites}
    assert len(keys) == 1 and sorted(s.variant for s in sites) == [0, 1]
    assert sites[0].result_code != sites[1].result_code


def test_iD1_changes_cross_count_by_two():
    g = _cycle(["cross h=1", "cross h=1", "fold h=1", "fold h=1"], [2, 2, 0, 2])
    site = rule_sites(g, CURVE_RS["iD1"], LR)[0]
    assert g.count(CROSS) - site.result.count(CROSS) == 2


def test_nonstable_composite():
    g = parse((DATA / "nonstable_a.spine").read_text())
    assert not find_sites(g, FLOW_RS, RL, only=("s3", "s4"))
    for s1 in rule_sites(g, FLOW_RS["s1"], RL):
        nxt = find_sites(s1.result, FLOW_RS, RL, only=("s3", "s4"))
        if nxt:
            end = nxt[0].result
            assert end.count(UNIVALENT) == g.count(UNIVALENT) - 1
            assert end.count(TRIVALENT) == g.count(TRIVALENT) - 1
            return
    pytest.fail("no s1 enables a reduction")


def test_apply_then_invert_and_double_inversion():
    rng = random.Random(21)
    pairs = load_rules(PAIRS)
    checked = 0
    while checked < 150:
        g = random_graph(rng)
        rs = FLOW_RS if g.layer == "flow" else pairs
        site = random_move(g, rs, rng)
        if site is None:
            continue
        checked += 1
        g2, entry = apply_move(g, site)
        g1 = invert_move(g2, entry, rs)
        assert is_isomorphic(g1, g)
        back = LogEntry(entry.rule, 0, RL if entry.direction == LR else LR, "", entry.after, entry.before)
        assert is_isomorphic(invert_move(g1, back, rs), g2)


def test_invert_rejects_wrong_graph():
    g = catalog.annulus_family(1)
    site = find_sites(g, FLOW_RS)[0]
    _, entry = apply_move(g, site)
    with pytest.raises(LogMismatch):
        invert_move(catalog.segment(), entry, FLOW_RS)


def test_stale_site_detected():
    g = catalog.annulus_family(1)
    site = find_sites(g, FLOW_RS)[0]
    g2, _ = apply_move(g, site)
    with pytest.raises(StaleSite):
        apply_move(g2, site)


def test_log_replay_round_trip():
    g = catalog.annulus_family(1)
    rng = random.Random(5)
    log, cur = ReductionLog(), g
    for _ in range(6):
        site = random_move(cur, FLOW_RS, rng)
        cur, entry = apply_move(cur, site)
        log.entries.append(entry)
    again = ReductionLog.parse(log.text())
    assert [e.line() for e in again.entries] == [e.line() for e in log.entries]
    assert canonical_code(replay(g, FLOW_RS, again)) == canonical_code(cur)


def test_replay_mismatch():
    with pytest.raises(LogMismatch):
        replay_entry(catalog.segment(), FLOW_RS, LogEntry("s3", 0, RL, "e0"))
    with pytest.raises(ValueError):
        ReductionLog.parse("s3 zero rl e0\n")


def test_sites_are_deterministic():
    g = catalog.annulus_family(2)
    a = [(s.rule, s.direction, s.key, s.variant) for s in find_sites(g, FLOW_RS)]
    b = [(s.rule, s.direction, s.key, s.variant) for s in find_sites(g, FLOW_RS)]
    assert a == b


def test_s1_preserves_surface():
    rng = random.Random(8)
    n = 0
    while n < 60:
        g = random_spine(rng, 10)
        sites = find_sites(g, FLOW_RS, only=("s1",))
        if not sites:
            continue
        n += 1
        s = rng.choice(sites)
        assert classify_surface(s.result) == classify_surface(g)


def _property_run(rule, picker, samples=60, seed=0):
    rng = random.Random(seed)
    n = 0
    while n < samples:
        g = decorate(random_spine(rng, 6), rng, 4)
        sites = find_sites(g, CURVE_RS, only=(rule,))
        if not sites:
            continue
        n += 1
        s = rng.choice(sites)
        assert picker(trace_curve(s.result)) == picker(trace_curve(g))


def test_iX_preserves_components_and_endpoints():
    _property_run("iX", lambda t: (curve_invariants(t)[0], t.endpoints), seed=1)


def test_iD2_preserves_double_points():
    _property_run("iD2", lambda t: t.double_points, seed=2)


def test_circle_host_bare_edge_rules():
    sites = find_sites(circle(), FLOW_RS, LR, only=("s3", "s4"))
    assert sites
    for s in sites:
        assert s.result.count(UNIVALENT) == 1 and s.result.count(TRIVALENT) == 1
