from spinecalc import catalog
from spinecalc.canon import is_isomorphic
from spinecalc.graph import (CROSS, CURVE, END, FLOW, FOLD, TRIVALENT, UNIVALENT, DecoratedGraph,
                             Edge, Vertex, circle, underlying_spine, validate,
                             validate_curve_graph, validate_flow_spine)
from spinecalc.textio import parse


def _curve(vertices, edges):
    return DecoratedGraph(vertices, edges, CURVE, (), "t")


def test_segment_is_legal():
    assert validate_flow_spine(catalog.segment()).ok


def test_vertex_free_circle_is_legal():
    assert validate(circle()).ok
    assert validate(circle(3)).ok


def test_two_T_ports_is_reported_at_the_vertex():
    g = DecoratedGraph(
        {"t": Vertex(TRIVALENT), "u": Vertex(UNIVALENT), "w": Vertex(UNIVALENT)},
        {"e0": Edge(("t", "T"), ("u", "0")), "e1": Edge(("t", "T"), ("w", "0")),
         "e2": Edge(("t", "A"), ("t", "B"))}, FLOW, (), "bad")
    rep = validate_flow_spine(g)
    assert not rep.ok
    assert any("t" in v.where for v in rep.violations)


def test_fold_law_upper_bound_inclusive():
    # weights 3 and 5 with l = 4: 1 <= 4 <= 3 + 1
    assert _chain_check(Vertex(FOLD, 4), 3, 5)


def _chain_check(v, w1, w2):
    g = _curve({"x": v, "y": Vertex(CROSS, 1) if w1 == w2 else Vertex(FOLD, 1)},
               {"e0": Edge(("x", "b"), ("y", "a"), w2), "e1": Edge(("y", "b"), ("x", "a"), w1)})
    return not any(vi.law == f"{v.kind}-law" for vi in validate_curve_graph(g).violations)


def test_fold_law_rejects_height_above_bound():
    assert not _chain_check(Vertex(FOLD, 5), 3, 5)


def test_cross_needs_two_strands():
    g = _curve({"x": Vertex(CROSS, 1)}, {"e": Edge(("x", "b"), ("x", "a"), 1)})
    assert "cross-law" in validate_curve_graph(g).laws()


def test_trivalent_sum_law():
    g = parse("""graph s layer=curve
vertex t trivalent
vertex f fold h=1
vertex u univalent
vertex e end s=+
edge a t.T f.a w=2
edge b f.b e.a w=0
edge c e.b t.B w=1
edge d t.A u.0 w=3
""")
    laws = validate_curve_graph(g).laws()
    assert "trivalent-law" not in laws
    assert "univalent-law" in laws          # the A edge has weight 3 at a univalent end


def test_disconnected_graph_rejected():
    g = DecoratedGraph({"a": Vertex(UNIVALENT), "b": Vertex(UNIVALENT),
                        "c": Vertex(UNIVALENT), "d": Vertex(UNIVALENT)},
                       {"e0": Edge(("a", "0"), ("b", "0")), "e1": Edge(("c", "0"), ("d", "0"))},
                       FLOW, (), "two")
    assert "connected" in validate(g).laws()


def test_end_law_requires_unit_step():
    g = _curve({"x": Vertex(END, sign="+"), "y": Vertex(END, sign="-")},
               {"e0": Edge(("x", "b"), ("y", "a"), 2), "e1": Edge(("y", "b"), ("x", "a"), 0)})
    assert "end-law" in validate_curve_graph(g).laws()


def test_underlying_spine_of_two_cross_circle():
    g = _curve({"x": Vertex(CROSS, 1), "y": Vertex(CROSS, 1)},
               {"e0": Edge(("x", "b"), ("y", "a"), 2), "e1": Edge(("y", "b"), ("x", "a"), 2)})
    s = underlying_spine(g)
    assert s.is_circle and s.layer == FLOW


def test_underlying_spine_of_decorated_moebius():
    g = parse("""graph m layer=curve
vertex t trivalent
vertex u univalent
vertex f fold h=1
edge a t.A f.b w=2
edge b f.a u.0 w=0
edge d t.B t.T w=1
""")
    assert validate(g).ok
    s = underlying_spine(g)
    assert s.count(TRIVALENT) == 1 and s.count(UNIVALENT) == 1
    assert is_isomorphic(s, catalog.mobius())


def test_underlying_spine_is_identity_on_flows():
    g = catalog.mobius()
    assert underlying_spine(g) is g
