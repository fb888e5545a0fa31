import random

from spinecalc.canon import canonical_code
from spinecalc.generate import (circle_decorations, decorate, random_curve_graph, random_spine,
                                spine_decorations, spines_up_to)
from spinecalc.graph import underlying_spine, validate


def test_random_spines_are_valid_and_bounded():
    rng = random.Random(1)
    for _ in range(300):
        g = random_spine(rng, 20)
        assert validate(g).ok
        assert len(g.vertices) <= 20


def test_random_curve_graphs_are_valid():
    rng = random.Random(2)
    for _ in range(300):
        assert validate(random_curve_graph(rng)).ok


def test_decorate_keeps_spine_shape():
    rng = random.Random(3)
    for _ in range(100):
        s = random_spine(rng, 8)
        assert canonical_code(underlying_spine(decorate(s, rng))) == canonical_code(s)


def test_spines_up_to_two_trivalent():
    spines = spines_up_to(2)
    codes = {canonical_code(s) for s in spines}
    assert len(codes) == len(spines)
    assert all(s.count("trivalent") <= 2 for s in spines)
    assert all(validate(s).ok for s in spines)


def test_circle_decorations_valid_subset():
    valid = list(circle_decorations(2, 3))
    everything = list(circle_decorations(2, 3, valid_only=False))
    assert 0 < len(valid) < len(everything)
    assert all(validate(g).ok for g in valid)


def test_spine_decorations_cover_weights():
    seg = next(s for s in spines_up_to(0) if not s.is_circle)
    plain = list(spine_decorations(seg, 3, bivalent=False))
    assert sorted(g.edges[next(iter(g.edges))].weight for g in plain) == [0, 1, 2, 3]
