import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from oracles import EX, XSD_INT, multiset, random_graph, random_query, seeded
from ontodm.kg import IRI, Graph, Literal, Triple
from ontodm.kg.terms import XSD
from ontodm.query import (QuerySyntaxError, ResultTable, UnknownPrefixError, ValuesClause,
                          compare, evaluate, order_key, parse_query)

EXPLORATION = """select ?time ?result ?sensor ?property ?foi
where {
 ?sensor    sosa:observes ?property;
            sosa:madeObservation ?obs.
 ?obs       sosa:resultTime ?time;
            sosa:hasSimpleResult ?result;
            sosa:hasFeatureOfInterest ?foi.
 ?property  ssn:isPropertyOf ?foi.
 VALUES (?foi) {(ModVA:mixer_partial0.tank_B201)}
 }"""

SOSA = "http://www.w3.org/ns/sosa/"
SSN = "http://www.w3.org/ns/ssn/"
M = "http://example.org/ModVA#"
DT = IRI(XSD + "dateTime")


def test_exploration_parses():
    q = parse_query(EXPLORATION)
    assert q.projection() == ["time", "result", "sensor", "property", "foi"]
    assert len(q.where) == 6
    assert q.values.variables == ("foi",)
    assert q.values.rows == ((IRI(M + "mixer_partial0.tank_B201"),),)


def _tiny_plant():
    g = Graph()
    for tag, foi in (("tank_B201.level", "tank_B201"), ("tank_B101.level", "tank_B101")):
        s, prop = IRI(M + tag), IRI(M + foi + ".fillLevel")
        g.add(Triple(s, IRI(SOSA + "observes"), prop))
        g.add(Triple(prop, IRI(SSN + "isPropertyOf"), IRI(M + "mixer_partial0." + foi)))
        for i in range(3):
            obs = IRI(M + f"obs_{tag}_{i}")
            g.add(Triple(s, IRI(SOSA + "madeObservation"), obs))
            g.add(Triple(obs, IRI(SOSA + "resultTime"), Literal(f"2024-01-01T00:00:0{i}.000Z", DT)))
            g.add(Triple(obs, IRI(SOSA + "hasSimpleResult"), Literal(f"{i}.000", IRI(XSD + "decimal"))))
            g.add(Triple(obs, IRI(SOSA + "hasFeatureOfInterest"), IRI(M + "mixer_partial0." + foi)))
    return g


def test_exploration_on_small_graph():
    table = evaluate(EXPLORATION, _tiny_plant())
    assert len(table) == 3
    assert {r[2].local_name() for r in table.rows} == {"tank_B201.level"}


def test_csv_header_and_unbound():
    table = evaluate(EXPLORATION, _tiny_plant())
    header = table.to_csv().splitlines()[0]
    assert header == "time,result,sensor,property,foi"
    assert ResultTable(["a", "b"], [(None, Literal("x"))]).to_csv() == "a,b\n,x\n"


@pytest.mark.parametrize("text,line", [
    ("SELECT ?x WHERE { ?x ?p }", 1),
    ("SELECT ?x\nWHERE {\n ?x <http://e.org/p> ?y .\n OPTIONAL { ?x ?p ?z } }", 4),
    ("SELECT WHERE { ?x ?p ?o }", 1),
    ("SELECT ?x WHERE { ?x ?p ?o } LIMIT 0", 1),
])
def test_syntax_errors(text, line):
    with pytest.raises(QuerySyntaxError) as e:
        parse_query(text)
    assert e.value.line == line
    assert e.value.column >= 1


def test_unknown_prefix():
    with pytest.raises(UnknownPrefixError):
        parse_query("SELECT ?x WHERE { ?x foo:bar ?y }")


def test_variable_scope():
    with pytest.raises(QuerySyntaxError):
        parse_query("SELECT ?nope WHERE { ?x ?p ?o }")


def test_order_limit():
    g = Graph(Triple(IRI(EX + f"s{i}"), IRI(EX + "v"), Literal(str(i), XSD_INT)) for i in range(10))
    t = evaluate(f"SELECT ?s ?n WHERE {{ ?s <{EX}v> ?n }} ORDER BY DESC(?n) LIMIT 3", g)
    assert [r[1].lexical for r in t.rows] == ["9", "8", "7"]


def test_numeric_not_lexical_order():
    g = Graph(Triple(IRI(EX + f"s{i}"), IRI(EX + "v"), Literal(str(i), XSD_INT)) for i in (2, 10, 9))
    t = evaluate(f"SELECT ?n WHERE {{ ?s <{EX}v> ?n }} ORDER BY ?n", g)
    assert [r[0].lexical for r in t.rows] == ["2", "9", "10"]


def test_datetime_filter_by_instant():
    g = _tiny_plant()
    q = ("SELECT ?obs WHERE { ?obs sosa:resultTime ?t . "
         'FILTER(?t >= "2024-01-01T01:00:01+01:00"^^xsd:dateTime) }')
    assert len(evaluate(q, g)) == 4


def test_compare_incompatible():
    assert not compare(Literal("1", XSD_INT), "=", IRI(EX + "a"))
    assert not compare(Literal("1", XSD_INT), "<", Literal("b"))
    assert compare(Literal("1", XSD_INT), "<", Literal("1.5", IRI(XSD + "decimal")))
    assert not compare(None, "=", None)


def test_order_key_total():
    terms = [None, IRI(EX + "a"), Literal("x"), Literal("2", XSD_INT), Literal("x", lang="en")]
    keys = [order_key(t) for t in terms]
    assert sorted(keys) == sorted(keys, key=lambda k: k)  # comparable without TypeError


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_values_is_a_filter(seed):
    rng = seeded(seed)
    triples = random_graph(rng, 40)
    text, _ = random_query(rng, triples)
    q = parse_query(text)
    names = [v for v in q.pattern_variables() if any(v in p.variables() for p in q.where)]
    if not triples or not names:
        return
    var = rng.choice(names)
    value = rng.choice(sorted({x for t in triples for x in t}, key=lambda x: x.n3()))
    q = dataclasses.replace(q, values=None, limit=None)
    with_values = dataclasses.replace(q, values=ValuesClause((var,), ((value,),)))
    full = evaluate(dataclasses.replace(q, select=None), Graph(triples))
    i = full.header.index(var)
    expected = [r for r in full.rows if r[i] == value]
    got = evaluate(dataclasses.replace(with_values, select=None), Graph(triples))
    j = [got.header.index(h) for h in full.header]
    assert multiset(tuple(r[k] for k in j) for r in got.rows) == multiset(expected)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 6))
def test_limit_bounds_rows(seed, n):
    rng = seeded(seed)
    triples = random_graph(rng, 40)
    text, _ = random_query(rng, triples)
    if " LIMIT " in text:
        text = text[: text.index(" LIMIT ")]
    assert len(evaluate(text + f" LIMIT {n}", Graph(triples))) <= n
