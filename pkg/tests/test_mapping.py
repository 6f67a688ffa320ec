import csv

import pytest

from oracles import read_csv
from ontodm.kg import IRI, Literal, Triple, TriplePattern, UnionSource, Variable, serialize
from ontodm.kg.terms import RDF_TYPE, XSD
from ontodm.mapping import (DatatypeMismatchError, MalformedTemplateError, MappingError,
                            MappingSyntaxError, Table, TemplateResolutionError,
                            UnknownColumnError, UnknownSourceError, VirtualView, auto_literal,
                            bind_sources, map_row, materialize, parse_rules, parse_rules_text)
from ontodm.pipeline import load_project
from ontodm.query import evaluate
from ontodm.sim import emit_engineering, emit_log, load_config, simulate

M = "http://example.org/ModVA#"
SOSA = "http://www.w3.org/ns/sosa/"
BOOL = IRI(XSD + "boolean")

OBS_RULE = """
source sensor_log csv "sensor_log.csv" columns(timestamp:timestamp, tag:text, value:text, kind:text) streamable
rule observations from sensor_log virtual
  subject "ModVA:obs_{row_id}"
  type sosa:Observation
  po sosa:resultTime column(timestamp) as literal xsd:dateTime
  po sosa:hasSimpleResult column(value) as literal auto
  po ^sosa:madeObservation template "ModVA:{tag}"
  po sosa:hasFeatureOfInterest constant ModVA:mixer_partial0.tank_B201
"""

ROW = {"timestamp": "2024-01-01T00:00:00.000Z", "tag": "V101.open", "value": "true", "kind": "discrete"}


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("data")
    res = simulate(load_config(), seed=1, cycles=2)
    emit_log(res.records, d / "sensor_log.csv")
    emit_engineering(res.engineering, d)
    return d


@pytest.fixture(scope="module")
def fixture_rules():
    return parse_rules(load_project().mapping)


def test_parse_observation_rule():
    rs = parse_rules_text(OBS_RULE)
    assert len(rs) == 1
    rule = rs.rules[0]
    assert len(rule.po_maps) == 4
    assert rule.type_assertion == IRI(SOSA + "Observation")
    assert rule.triples_per_row() == 5
    assert rs.sources["sensor_log"].streamable


def test_parse_errors():
    with pytest.raises(UnknownColumnError):
        parse_rules_text(OBS_RULE.replace("column(value)", "column(foo)"))
    with pytest.raises(MalformedTemplateError):
        parse_rules_text(OBS_RULE.replace("obs_{row_id}", "obs_{row_id"))
    with pytest.raises(UnknownSourceError):
        parse_rules_text(OBS_RULE.replace("from sensor_log", "from nowhere"))
    with pytest.raises(MappingSyntaxError):
        parse_rules_text(OBS_RULE.replace(" streamable", ""))
    assert len(parse_rules_text("")) == 0
    assert len(parse_rules_text("# nothing here\n")) == 0


def test_map_row_boolean():
    rule = parse_rules_text(OBS_RULE).rules[0]
    out = map_row(rule, dict(ROW, row_id="7"))
    obs = IRI(M + "obs_7")
    assert Triple(obs, IRI(SOSA + "hasSimpleResult"), Literal("true", BOOL)) in out
    assert Triple(IRI(M + "V101.open"), IRI(SOSA + "madeObservation"), obs) in out
    assert len(out) == 5


def test_map_row_type_only():
    rs = parse_rules_text('source t csv "t.csv" columns(id:text)\n'
                          'rule r from t static\n  subject "ModVA:{id}"\n  type sosa:Sensor\n')
    assert map_row(rs.rules[0], {"id": "x"}) == {Triple(IRI(M + "x"), RDF_TYPE, IRI(SOSA + "Sensor"))}


def test_boolean_as_decimal_rejected():
    rs = parse_rules_text('source t csv "t.csv" columns(flag:boolean)\n'
                          'rule r from t static\n  subject "ModVA:r{row_id}"\n'
                          '  po ModVA:v column(flag) as literal xsd:decimal\n')
    with pytest.raises(DatatypeMismatchError):
        map_row(rs.rules[0], {"flag": "true"})


def test_template_resolution_error_has_row():
    rule = parse_rules_text(OBS_RULE).rules[0]
    with pytest.raises(TemplateResolutionError) as e:
        map_row(rule, dict(ROW, tag=None, row_id="3"))
    assert e.value.row == 3


def test_auto_literal():
    assert auto_literal("false").datatype == BOOL
    assert auto_literal("4.250").datatype == IRI(XSD + "decimal")
    assert auto_literal("2024-01-01T00:00:00.000Z").datatype == IRI(XSD + "dateTime")
    assert auto_literal("open").datatype == IRI(XSD + "string")


def test_empty_sources(fixture_rules):
    tables = {sid: Table(src, []) for sid, src in fixture_rules.sources.items()}
    assert len(materialize(fixture_rules, tables)) == 0


def test_missing_file(fixture_rules, tmp_path):
    with pytest.raises(MappingError, match="does not exist"):
        bind_sources(fixture_rules, tmp_path)


def _expected_count(data_dir, mode):
    """Triples per rule computed straight from the CSV files (optional cells counted only if set)."""
    comps = read_csv(data_dir / "components.csv")
    tags = read_csv(data_dir / "tags.csv")
    procs = read_csv(data_dir / "processes.csv")
    log = read_csv(data_dir / "sensor_log.csv")
    if mode == "virtual":
        return sum(5 if r["timestamp"] else 4 for r in log)
    return (sum(1 + bool(r["parent"]) for r in comps) + 3 * len(tags) + 2 * len(tags)
            + sum(2 + bool(r["parent"]) for r in procs))


@pytest.mark.parametrize("mode", ["static", "virtual"])
def test_counting_oracle(fixture_rules, data_dir, mode):
    tables = bind_sources(fixture_rules, data_dir)
    assert len(materialize(fixture_rules, tables, modes=(mode,))) == _expected_count(data_dir, mode)


def test_cq2_from_static_tables(fixture_rules, data_dir):
    g = materialize(fixture_rules, bind_sources(fixture_rules, data_dir), modes=("static",))
    spec_query = (load_project().requirements.parent / "cq2.rq").read_text()
    assert {r[0].local_name() for r in evaluate(spec_query, g).rows} == {"FillEmptyTankB201"}


def test_deterministic_serialization(fixture_rules, data_dir):
    a = serialize(materialize(fixture_rules, bind_sources(fixture_rules, data_dir)), "ntriples")
    b = serialize(materialize(fixture_rules, bind_sources(fixture_rules, data_dir)), "ntriples")
    assert a == b
    assert a.splitlines() == sorted(a.splitlines())


def test_view_absent_predicate_scans_nothing(fixture_rules, data_dir):
    view = VirtualView(fixture_rules, bind_sources(fixture_rules, data_dir))
    assert list(view.triples(None, IRI(SOSA + "usedProcedure"), None)) == []
    assert view.stats.rows_visited == 0


def test_view_single_row_lookup(fixture_rules, data_dir):
    view = VirtualView(fixture_rules, bind_sources(fixture_rules, data_dir))
    b = view.match(TriplePattern(IRI(M + "obs_42"), IRI(SOSA + "resultTime"), Variable("t")))
    assert len(b) == 1
    with (data_dir / "sensor_log.csv").open() as fh:
        row = list(csv.DictReader(fh))[42]
    assert b[0]["t"].lexical == row["timestamp"]
    assert view.stats.rows_visited == 1


def test_view_out_of_range_row(fixture_rules, data_dir):
    view = VirtualView(fixture_rules, bind_sources(fixture_rules, data_dir))
    for name in ("obs_999999", "obs_01", "obs_x"):
        assert view.match(TriplePattern(IRI(M + name), Variable("p"), Variable("o"))) == []


def test_view_compact_for_constant_foi(fixture_rules, data_dir):
    """Rows touched grow with the answer, not with the log."""
    tables = bind_sources(fixture_rules, data_dir)
    view = VirtualView(fixture_rules, tables)
    foi = IRI(M + "mixer_partial0.tank_B201")
    hits = view.match(TriplePattern(Variable("o"), IRI(SOSA + "hasFeatureOfInterest"), foi))
    assert 0 < len(hits) < len(tables["sensor_log"])
    assert view.stats.rows_visited == len(hits)

    static = materialize(fixture_rules, tables, modes=("static",))
    view.stats.reset()
    table = evaluate(load_project().exploration_query.read_text(), UnionSource(static, view))
    assert len(table) == len(hits)
    assert view.stats.rows_visited <= 4 * len(table)


def test_bad_cell_reported_with_coordinates(fixture_rules, data_dir, tmp_path):
    bad = tmp_path / "sensor_log.csv"
    lines = (data_dir / "sensor_log.csv").read_text().splitlines()
    lines[3] = "not-a-time," + lines[3].split(",", 1)[1]
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(MappingError) as e:
        bind_sources(fixture_rules, data_dir, overrides={"sensor_log": bad})
    assert e.value.row == 2 and e.value.source == "sensor_log"
