import random

import pytest

from spinecalc import catalog
from spinecalc.generate import decorate, random_spine
from spinecalc.graph import CROSS, CURVE, END, DecoratedGraph, Edge, Vertex, circle
from spinecalc.normalform import scramble
from spinecalc.reconstruction import (annulus_degree, assemble_surface, boundary_components,
                                      classify_surface, curve_invariants, euler_characteristic,
                                      orientability, trace_curve)
from spinecalc.rules import FLOWS, load_rules


def _cycle(labels, weights):
    k = len(labels)
    return DecoratedGraph({f"x{i}": v for i, v in enumerate(labels)},
                          {f"e{i}": Edge((f"x{i}", "b"), (f"x{(i + 1) % k}", "a"), w)
                           for i, w in enumerate(weights)}, CURVE, (), "cyc")


def test_segment_presentation():
    p = assemble_surface(catalog.segment())
    kinds = sorted(m.kind for m in p.pieces.values())
    assert kinds == ["edge-dash", "univalent-neighborhood", "univalent-neighborhood"]
    assert boundary_components(p) == 1


def test_circle_is_product_annulus():
    p = assemble_surface(circle())
    assert len(p.pieces) == 1
    assert boundary_components(p) == 2
    assert orientability(p)


def test_moebius_one_boundary_circle():
    assert boundary_components(assemble_surface(catalog.mobius())) == 1


@pytest.mark.parametrize("g, chi", [(catalog.segment(), 1), (circle(), 0), (catalog.mobius(), 0)])
def test_euler_characteristic(g, chi):
    assert euler_characteristic(g) == chi


def test_orientability_examples():
    assert not orientability(assemble_surface(catalog.mobius()))
    assert orientability(assemble_surface(catalog.annulus_relabel()))
    assert orientability(assemble_surface(catalog.segment()))


def test_boundary_counts():
    assert boundary_components(assemble_surface(circle())) == 2
    assert boundary_components(assemble_surface(catalog.mobius())) == 1
    assert boundary_components(assemble_surface(catalog.annulus_family(1))) == 2


def test_classification_records():
    assert classify_surface(catalog.segment()).record() == "chi=1 orientable=1 boundary=1 genus=0"
    assert classify_surface(catalog.mobius()).record() == "chi=0 orientable=0 boundary=1 genus=1"
    assert classify_surface(catalog.annulus_family(2)).record() == "chi=0 orientable=1 boundary=2 genus=0"


def test_curve_graph_classifies_through_its_spine():
    rng = random.Random(2)
    for _ in range(50):
        s = random_spine(rng, 10)
        assert classify_surface(decorate(s, rng)) == classify_surface(s)


def test_boundary_word_alphabet():
    p = assemble_surface(catalog.mobius())
    for c in p.boundary_circles:
        assert set(p.boundary_word(c)) <= set("+-<>")


@pytest.mark.parametrize("n", range(7))
def test_parallel_circles(n):
    t = trace_curve(circle(n))
    assert len(t.components) == n and t.double_points == 0


def test_two_crosses_give_identity():
    t = trace_curve(_cycle([Vertex(CROSS, 1), Vertex(CROSS, 1)], [2, 2]))
    assert len(t.components) == 2 and t.double_points == 2


def test_figure_eight():
    t = trace_curve(_cycle([Vertex(CROSS, 1)], [2]))
    assert curve_invariants(t) == (1, 1, 0, 0, 1, "odd")


def test_weight_three_circle():
    assert curve_invariants(trace_curve(circle(3))) == (3, 3, 0, 0, 0, "even")


def test_end_pair_forms_one_arc():
    t = trace_curve(_cycle([Vertex(END, sign="+"), Vertex(END, sign="-")], [0, 1]))
    inv = curve_invariants(t)
    assert inv[2] == 1 and inv[3] == 2


def test_endpoints_twice_arcs_on_random_graphs():
    rng = random.Random(4)
    for _ in range(200):
        inv = curve_invariants(trace_curve(decorate(random_spine(rng, 8), rng)))
        assert inv[3] == 2 * inv[2]


def test_trace_record_format():
    assert trace_curve(circle(2)).record() == "components=2 closed=2 arcs=0 endpoints=0 doubles=0"


def test_annulus_degree_sequence():
    assert annulus_degree(circle()) == 1
    assert annulus_degree(catalog.annulus_family(1)) == 0


def test_annulus_degree_after_scramble():
    g, _ = scramble(catalog.annulus_family(2), load_rules(FLOWS), 20, seed=3)
    assert annulus_degree(g) == -1


def test_annulus_degree_rejects_other_surfaces():
    with pytest.raises(ValueError):
        annulus_degree(catalog.mobius())
