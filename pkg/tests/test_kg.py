import pytest
from hypothesis import given, settings, strategies as st

from ontodm.kg import (IRI, BNode, Graph, Literal, SyntaxErrorAt, Triple, TriplePattern,
                       UnionSource, UnknownPrefixError, Variable, bundled_prefixes, isomorphic,
                       load, match, parse, save, serialize)
from ontodm.kg.terms import (XSD, TermError, format_datetime_ms, literal_key, make_triple,
                             parse_datetime_ms)

EX = "http://example.org/t#"

iris = st.sampled_from(["a", "b", "c", "d", "e.f", "g-h"]).map(lambda n: IRI(EX + n))
bnodes = st.sampled_from(["b1", "b2", "b3"]).map(BNode)
texts = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=12)
literals = st.one_of(
    texts.map(Literal),
    st.tuples(texts, st.sampled_from(["en", "de-at"])).map(lambda x: Literal(x[0], lang=x[1])),
    st.integers(-999, 999).map(lambda i: Literal(str(i), IRI(XSD + "integer"))),
)
triples = st.tuples(st.one_of(iris, bnodes), iris, st.one_of(iris, bnodes, literals)).map(
    lambda t: Triple(*t))
graphs = st.lists(triples, max_size=25).map(Graph)


def test_terms_validate():
    with pytest.raises(TermError):
        IRI("not absolute")
    with pytest.raises(TermError):
        make_triple(Literal("x"), IRI(EX + "p"), IRI(EX + "o"))
    with pytest.raises(TermError):
        make_triple(IRI(EX + "s"), BNode("p"), IRI(EX + "o"))
    assert Literal("hi", lang="EN").lang == "en"
    assert IRI(EX + "tank_B201.level").local_name() == "tank_B201.level"


def test_prefixes_bundled():
    pm = bundled_prefixes()
    for p in ("rdf", "rdfs", "owl", "xsd", "sosa", "ssn", "ModVA", "vdi3682", "isa88", "din61360"):
        assert p in pm
    assert pm["sosa"] == "http://www.w3.org/ns/sosa/"
    assert pm.expand("ModVA:mixer_partial0.tank_B201").value.endswith("#mixer_partial0.tank_B201")
    assert pm.compact(IRI("http://www.w3.org/ns/sosa/Sensor")) == "sosa:Sensor"


def test_indexes_agree_with_scan():
    g = Graph([Triple(IRI(EX + s), IRI(EX + p), IRI(EX + o))
               for s in "abc" for p in "pq" for o in "xy" if (s, p, o) != ("a", "q", "y")])
    all_t = list(g)
    for s in (None, IRI(EX + "a"), IRI(EX + "zz")):
        for p in (None, IRI(EX + "q")):
            for o in (None, IRI(EX + "y")):
                scan = {t for t in all_t if (s is None or t[0] == s) and (p is None or t[1] == p)
                        and (o is None or t[2] == o)}
                assert set(g.triples(s, p, o)) == scan


def test_match_repeated_variable():
    a, p = IRI(EX + "a"), IRI(EX + "p")
    g = Graph([Triple(a, p, a), Triple(a, p, IRI(EX + "b"))])
    x = Variable("x")
    assert match(g, TriplePattern(x, p, x)) == [{"x": a}]
    assert len(match(g, TriplePattern(x, p, Variable("y")))) == 2


def test_union_dedupes():
    t = Triple(IRI(EX + "a"), IRI(EX + "p"), Literal("1"))
    u = Triple(IRI(EX + "b"), IRI(EX + "p"), Literal("1"))
    assert sorted(UnionSource(Graph([t]), Graph([t, u])).triples()) == sorted([t, u])


def test_turtle_subset():
    text = """
    @prefix ex: <http://example.org/t#> .
    ex:a a ex:C ; ex:p "x"@en, "2"^^<http://www.w3.org/2001/XMLSchema#integer> ;
         ex:q [ ex:r ex:b ] .
    """
    g = parse(text)
    assert len(g) == 5
    assert Triple(IRI(EX + "a"), IRI("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"),
                  IRI(EX + "C")) in g


def test_syntax_error_position():
    with pytest.raises(SyntaxErrorAt) as e:
        parse('<http://x.org/a> <http://x.org/p> "unterminated .\n', "ntriples")
    assert e.value.line == 1
    with pytest.raises(SyntaxErrorAt) as e:
        parse("<http://x.org/a> <http://x.org/p> <http://x.org/o> .\n<http://x.org/a> oops .\n",
              "ntriples")
    assert e.value.line == 2


def test_unknown_prefix():
    with pytest.raises(UnknownPrefixError):
        parse("nope:a nope:b nope:c .")


def test_datetime_ms():
    ms = parse_datetime_ms("2024-01-01T00:00:00.100Z")
    assert format_datetime_ms(ms) == "2024-01-01T00:00:00.100Z"
    assert parse_datetime_ms("2024-01-01T01:00:00+01:00") == parse_datetime_ms("2024-01-01T00:00:00Z")
    with pytest.raises(ValueError):
        parse_datetime_ms("yesterday")


def test_literal_key_numeric_family():
    a = literal_key(Literal("2", IRI(XSD + "integer")))
    b = literal_key(Literal("2.0", IRI(XSD + "decimal")))
    assert a == b


def test_save_load(tmp_path):
    g = Graph([Triple(IRI(EX + "a"), IRI(EX + "p"), Literal('say "hi"\n'))])
    for name in ("g.nt", "g.ttl"):
        assert load(save(g, tmp_path / "sub" / name)) == g


@settings(max_examples=150, deadline=None)
@given(graphs, st.sampled_from(["ntriples", "turtle"]))
def test_round_trip(g, fmt):
    back = parse(serialize(g, fmt), fmt)
    assert isomorphic(back, g)


def test_isomorphic_renaming():
    p = IRI(EX + "p")
    g1 = Graph([Triple(BNode("x"), p, BNode("y")), Triple(BNode("y"), p, IRI(EX + "a"))])
    g2 = Graph([Triple(BNode("m"), p, BNode("n")), Triple(BNode("n"), p, IRI(EX + "a"))])
    g3 = Graph([Triple(BNode("m"), p, BNode("n")), Triple(BNode("m"), p, IRI(EX + "a"))])
    assert isomorphic(g1, g2)
    assert not isomorphic(g1, g3)
