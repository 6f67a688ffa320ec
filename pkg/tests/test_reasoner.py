import pytest
from hypothesis import given, settings, strategies as st

from oracles import DOM, RDF_TYPE, RNG, SC, SP, ex, naive_closure, random_schema_graph, seeded
from ontodm.kg import Graph, IRI, Literal, Triple
from ontodm.kg.terms import XSD
from ontodm.reasoner import (ALL_RULES, ClosureError, ConstraintShape, Rule, load_shapes,
                             parse_rules, parse_shapes, rdfs_closure, size_bound, validate)

SOSA = "http://www.w3.org/ns/sosa/"
DT = IRI(XSD + "dateTime")
OBS = IRI(SOSA + "Observation")
RT = IRI(SOSA + "resultTime")


def test_subclass_transitivity():
    a, b, c = ex("A"), ex("B"), ex("C")
    g = rdfs_closure(Graph([Triple(a, SC, b), Triple(b, SC, c)]))
    assert Triple(a, SC, c) in g


def test_subclass_instance():
    x, a, b = ex("x"), ex("A"), ex("B")
    assert Triple(x, RDF_TYPE, b) in rdfs_closure(Graph([Triple(x, RDF_TYPE, a), Triple(a, SC, b)]))


def test_domain_range_and_literals():
    p, c, d = ex("p"), ex("C"), ex("D")
    g = rdfs_closure(Graph([Triple(p, DOM, c), Triple(p, RNG, d),
                            Triple(ex("s"), p, ex("o")), Triple(ex("s"), p, Literal("v"))]))
    assert Triple(ex("s"), RDF_TYPE, c) in g
    assert Triple(ex("o"), RDF_TYPE, d) in g
    assert all(not isinstance(t.subject, Literal) for t in g)


def test_subproperty():
    p, q, r = ex("p"), ex("q"), ex("r")
    g = rdfs_closure(Graph([Triple(p, SP, q), Triple(q, SP, r), Triple(ex("s"), p, ex("o"))]))
    assert Triple(p, SP, r) in g
    assert Triple(ex("s"), r, ex("o")) in g


def test_rule_subset():
    x, a, b, c = ex("x"), ex("A"), ex("B"), ex("C")
    g = Graph([Triple(x, RDF_TYPE, a), Triple(a, SC, b), Triple(b, SC, c)])
    only9 = rdfs_closure(g, ["rdfs9"])
    assert Triple(x, RDF_TYPE, b) in only9 and Triple(a, SC, c) not in only9
    assert Triple(x, RDF_TYPE, c) in only9  # rdfs9 chains on its own output
    assert parse_rules(["rdfs11", "rdfs-domain"]) == {Rule.SUBCLASS_TRANSITIVITY, Rule.DOMAIN}
    with pytest.raises(ValueError):
        parse_rules(["rdfs99"])
    with pytest.raises(ValueError):
        rdfs_closure(g, [])


def test_round_cap():
    chain = [Triple(ex(f"C{i}"), SC, ex(f"C{i + 1}")) for i in range(12)]
    with pytest.raises(ClosureError):
        rdfs_closure(Graph(chain), max_rounds=2)


def test_empty_graph():
    assert len(rdfs_closure(Graph())) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_closure_properties(seed):
    rng = seeded(seed)
    triples = random_schema_graph(rng, 80)
    g = Graph(triples)
    closed = rdfs_closure(g)
    assert set(closed) == naive_closure(triples)
    assert set(g) <= set(closed)
    assert len(closed) <= size_bound(g)
    assert rdfs_closure(closed) == closed
    extra = random_schema_graph(rng, 10)
    assert set(closed) <= set(rdfs_closure(Graph(triples | extra)))


# -- shapes --

RT_SHAPE = ConstraintShape("rt", OBS, RT, 1, 1, DT)


def _obs(n_times):
    o = IRI("http://example.org/ModVA#obs_1")
    g = Graph([Triple(o, RDF_TYPE, OBS)])
    for i in range(n_times):
        g.add(Triple(o, RT, Literal(f"2024-01-01T00:00:0{i}.000Z", DT)))
    return g


def test_missing_result_time():
    report = validate(_obs(0), [RT_SHAPE])
    assert len(report) == 1
    assert report.violations[0].observed_count == 0


def test_two_result_times():
    report = validate(_obs(2), [RT_SHAPE])
    assert len(report) == 1 and report.violations[0].observed_count == 2


def test_bad_datatype():
    g = _obs(0).add(Triple(IRI("http://example.org/ModVA#obs_1"), RT, Literal("soon")))
    report = validate(g, [RT_SHAPE])
    assert len(report) == 1 and report.violations[0].bad_datatype is not None


def test_conforming_and_no_shapes():
    assert validate(_obs(1), [RT_SHAPE]).conforms
    assert validate(_obs(0), []).conforms
    assert validate(Graph(), load_shapes()).conforms


def test_report_csv():
    text = validate(_obs(0), [RT_SHAPE]).to_csv()
    assert text.splitlines()[0] == "shape_id,focus_node,property,observed_count,bad_datatype,message"
    assert len(text.splitlines()) == 2


def test_bundled_shapes():
    shapes = {s.id: s for s in load_shapes()}
    assert shapes["obs-result-time"].min_count == shapes["obs-result-time"].max_count == 1
    assert shapes["obs-feature"].max_count == float("inf")
    assert shapes["sensor-observes"].min_count == 1


def test_parse_shapes_errors():
    with pytest.raises(ValueError):
        parse_shapes("id,target,property,min,max,datatype\nx,sosa:Observation,sosa:resultTime,2,1,\n")
    shapes = parse_shapes("id,target,property,min,max,datatype\nx,sosa:Sensor,sosa:observes,1,*,\n")
    assert shapes[0].value_datatype is None


def test_closure_on_fixture_lwo(fixture_run):
    """Inference on the built graph only adds triples and reaches a fixpoint."""
    closed = rdfs_closure(fixture_run.kb.static, ALL_RULES)
    assert set(fixture_run.kb.static) < set(closed)
    tank = IRI("http://example.org/ModVA#mixer_partial0.tank_B201")
    assert Triple(tank, RDF_TYPE, IRI("http://example.org/vdi3682#TechnicalResource")) in closed
