"""Executing mapping rules: per-row triples, full materialization and a lazy virtual view."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from ..kg.graph import Graph, match
from ..kg.terms import (IRI, NUMERIC_TYPES, RDF_TYPE, XSD_BOOLEAN, XSD_DATETIME, XSD_DECIMAL,
                        XSD_INTEGER, XSD_STRING, Literal, PrefixMap, TermError, Triple,
                        parse_datetime_ms, parse_decimal)
from .dsl import (ROW_ID, ColumnObject, ConstantObject, DatatypeMismatchError, LookupObject,
                  MappingError, MappingRule, MappingRuleSet, TableSource, Template, TemplateObject,
                  TemplateResolutionError, UnknownColumnError, UnknownSourceError)


class _Skip(Exception):
    """An optional map met an empty cell."""


# -- tables --

def _check_cell(value: str, kind: str) -> str:
    if kind == "decimal":
        parse_decimal(value)
    elif kind == "boolean":
        if value not in ("true", "false"):
            raise ValueError(f"not a boolean: {value!r}")
    elif kind == "timestamp":
        parse_datetime_ms(value)
    return value


class Table:
    """Rows of one bound CSV source, with lazily built per-column indexes."""

    def __init__(self, source: TableSource, rows: list[dict]):
        self.source = source
        self.rows = rows
        self._indexes: dict[str, dict] = {}

    @classmethod
    def read(cls, source: TableSource, path: Path) -> "Table":
        if not path.exists():
            raise MappingError(f"file {path} does not exist", source=source.id)
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                header = []
            missing = [c for c in source.column_names() if c not in header]
            if missing:
                raise UnknownColumnError(f"columns {missing} missing from {path.name}", source=source.id)
            pos = {c: header.index(c) for c in source.column_names()}
            rows = []
            for i, rec in enumerate(reader):
                if len(rec) != len(header):
                    raise MappingError(f"expected {len(header)} cells, got {len(rec)}", source=source.id, row=i)
                row = {ROW_ID: str(i)}
                for spec in source.columns:
                    value = rec[pos[spec.name]]
                    if value == "":
                        row[spec.name] = None
                        continue
                    try:
                        row[spec.name] = _check_cell(value, spec.kind)
                    except ValueError as e:
                        raise MappingError(f"column {spec.name}: {e}", source=source.id, row=i) from None
                rows.append(row)
        return cls(source, rows)

    @classmethod
    def from_rows(cls, source: TableSource, records) -> "Table":
        rows = []
        for i, rec in enumerate(records):
            row = {ROW_ID: str(i)}
            for spec in source.columns:
                value = rec.get(spec.name)
                row[spec.name] = None if value in (None, "") else _check_cell(str(value), spec.kind)
            rows.append(row)
        return cls(source, rows)

    def __len__(self):
        return len(self.rows)

    def index(self, column: str) -> dict:
        idx = self._indexes.get(column)
        if idx is None:
            idx = {}
            for i, row in enumerate(self.rows):
                idx.setdefault(row.get(column), []).append(i)
            self._indexes[column] = idx
        return idx

    def rows_where(self, column: str, value) -> list[int]:
        if column == ROW_ID:
            try:
                i = int(value)
            except (TypeError, ValueError):
                return []
            return [i] if 0 <= i < len(self.rows) and str(i) == value else []
        return self.index(column).get(value, [])


def bind_sources(ruleset: MappingRuleSet, base_dir=None, overrides: dict | None = None) -> dict[str, Table]:
    """Load every declared source. Paths resolve against ``base_dir`` (default: rule file dir)."""
    base = Path(base_dir) if base_dir is not None else (ruleset.base_dir or Path("."))
    overrides = overrides or {}
    tables = {}
    for sid, src in ruleset.sources.items():
        path = Path(overrides.get(sid, base / src.path))
        tables[sid] = Table.read(src, path)
    return tables


# -- term construction --

def _typed_literal(value: str, datatype: IRI | None) -> Literal:
    if datatype is None:
        return auto_literal(value)
    try:
        if datatype == XSD_INTEGER:
            if not re.fullmatch(r"[+-]?\d+", value):
                raise ValueError
        elif datatype in NUMERIC_TYPES:
            parse_decimal(value)
        elif datatype == XSD_BOOLEAN:
            if value not in ("true", "false", "1", "0"):
                raise ValueError
        elif datatype == XSD_DATETIME:
            parse_datetime_ms(value)
    except ValueError:
        raise DatatypeMismatchError(f"value {value!r} is not a valid {datatype.local_name()}") from None
    return Literal(value, datatype)


def auto_literal(value: str) -> Literal:
    """true/false -> boolean, decimal-looking -> decimal, ISO date-time -> dateTime, else string."""
    if value in ("true", "false"):
        return Literal(value, XSD_BOOLEAN)
    try:
        parse_decimal(value)
        if re.fullmatch(r"[+-]?(\d+\.?\d*|\.\d+)", value):
            return Literal(value, XSD_DECIMAL)
    except ValueError:
        pass
    try:
        parse_datetime_ms(value)
        return Literal(value, XSD_DATETIME)
    except ValueError:
        return Literal(value, XSD_STRING)


class RowMapper:
    """Evaluates object maps of one rule set against bound tables."""

    def __init__(self, ruleset: MappingRuleSet, tables: dict[str, Table]):
        self.ruleset = ruleset
        self.tables = tables
        self.prefixes: PrefixMap = ruleset.prefixes
        self._lookup_cache: dict = {}

    def lookup_row(self, obj: LookupObject, row: dict, optional: bool) -> dict:
        key = row.get(obj.row_column)
        if key is None:
            if optional:
                raise _Skip
            raise TemplateResolutionError(f"empty lookup key {obj.row_column!r}")
        table = self.tables.get(obj.source_id)
        if table is None:
            raise UnknownSourceError(f"lookup source {obj.source_id!r} is not bound")
        hits = table.rows_where(obj.key_column, key)
        if len(hits) != 1:
            if not hits and optional:
                raise _Skip
            what = "no" if not hits else "several"
            raise TemplateResolutionError(f"{what} rows in {obj.source_id} with {obj.key_column}={key!r}")
        return table.rows[hits[0]]

    def term(self, obj, row: dict, optional: bool = False):
        if isinstance(obj, ConstantObject):
            return obj.term
        if isinstance(obj, TemplateObject):
            if optional and any(row.get(c) in (None, "") for c in obj.template.columns):
                raise _Skip
            return obj.template.expand(row)
        if isinstance(obj, ColumnObject):
            value = row.get(obj.column)
            if value is None:
                if optional:
                    raise _Skip
                raise TemplateResolutionError(f"empty cell in column {obj.column!r}")
            if obj.as_iri:
                try:
                    return self.prefixes.resolve(value)
                except (KeyError, TermError) as e:
                    raise TemplateResolutionError(f"{value!r} is not an IRI: {e}") from None
            return _typed_literal(value, obj.datatype)
        if isinstance(obj, LookupObject):
            return self.term(obj.inner, self.lookup_row(obj, row, optional), optional)
        raise TypeError(obj)

    def slot_triple(self, rule: MappingRule, slot: int, row: dict) -> Triple | None:
        """Triple for one slot (0 = type assertion, i = po_maps[i-1]); None if skipped."""
        subj = rule.subject.expand(row)
        if slot == 0:
            return Triple(subj, RDF_TYPE, rule.type_assertion)
        pm = rule.po_maps[slot - 1]
        try:
            obj = self.term(pm.obj, row, pm.optional)
        except _Skip:
            return None
        if pm.inverse:
            if not isinstance(obj, IRI):
                raise TemplateResolutionError("inverse map produced a literal subject")
            return Triple(obj, pm.predicate, subj)
        return Triple(subj, pm.predicate, obj)

    def map_row(self, rule: MappingRule, row: dict) -> list[Triple]:
        try:
            out = []
            for slot in rule_slots(rule):
                t = self.slot_triple(rule, slot, row)
                if t is not None:
                    out.append(t)
            return out
        except MappingError as e:
            if e.row is None:
                raise type(e)(str(e), source=rule.source_id, row=int(row.get(ROW_ID, -1))) from None
            raise


def rule_slots(rule: MappingRule) -> list[int]:
    return ([0] if rule.type_assertion else []) + list(range(1, len(rule.po_maps) + 1))


def map_row(rule: MappingRule, row: dict, ruleset: MappingRuleSet | None = None,
            tables: dict | None = None) -> set[Triple]:
    """Triples generated by one rule for one row (row dict may carry ``row_id``)."""
    mapper = RowMapper(ruleset or MappingRuleSet(), tables or {})
    row = dict(row)
    row.setdefault(ROW_ID, "0")
    return set(mapper.map_row(rule, row))


def materialize(ruleset: MappingRuleSet, tables: dict[str, Table],
                modes=("static", "virtual")) -> Graph:
    graph = Graph(namespaces=ruleset.prefixes)
    mapper = RowMapper(ruleset, tables)
    for rule in ruleset.rules_in(modes):
        table = tables.get(rule.source_id)
        if table is None:
            raise UnknownSourceError(f"source {rule.source_id!r} is not bound")
        for row in table.rows:
            graph.update(mapper.map_row(rule, row))
    return graph


# -- virtual access --

@dataclass
class ScanStats:
    rows_visited: int = 0
    triples_emitted: int = 0
    calls: int = 0

    def reset(self):
        self.rows_visited = self.triples_emitted = self.calls = 0


@dataclass
class VirtualView:
    """Answers ``triples(s, p, o)`` from the sources without materializing them.

    Each rule slot is skipped unless its predicate fits; constant subjects
    and objects are turned into row candidates by inverting single-placeholder
    templates, using ``row_id`` directly, or probing column indexes.
    """

    ruleset: MappingRuleSet
    tables: dict
    modes: tuple = ("virtual",)
    stats: ScanStats = field(default_factory=ScanStats)

    def __post_init__(self):
        self.mapper = RowMapper(self.ruleset, self.tables)
        self.rules = self.ruleset.rules_in(self.modes)
        for rule in self.rules:
            if rule.source_id not in self.tables:
                raise UnknownSourceError(f"source {rule.source_id!r} is not bound")
        self._term_index: dict = {}

    def match(self, pattern):
        return match(self, pattern)

    def triples(self, s=None, p=None, o=None) -> Iterator[Triple]:
        self.stats.calls += 1
        seen: set = set()
        for rule in self.rules:
            for slot in rule_slots(rule):
                pred = RDF_TYPE if slot == 0 else rule.po_maps[slot - 1].predicate
                if p is not None and p != pred:
                    continue
                if slot == 0 and o is not None and o != rule.type_assertion:
                    continue
                for i in self._candidates(rule, slot, s, o):
                    self.stats.rows_visited += 1
                    try:
                        t = self.mapper.slot_triple(rule, slot, self.tables[rule.source_id].rows[i])
                    except MappingError as e:
                        raise type(e)(str(e), source=rule.source_id, row=i) from None
                    if t is None or t in seen:
                        continue
                    if (s is None or t.subject == s) and (o is None or t.object == o):
                        seen.add(t)
                        self.stats.triples_emitted += 1
                        yield t

    # candidate rows ------------------------------------------------------
    def _candidates(self, rule: MappingRule, slot: int, s, o) -> list[int] | range:
        table = self.tables[rule.source_id]
        if slot == 0:
            producers = [(rule.subject, s)]
        else:
            pm = rule.po_maps[slot - 1]
            if pm.inverse:
                producers = [(pm.obj, s), (rule.subject, o)]
            else:
                producers = [(rule.subject, s), (pm.obj, o)]
        cands: set | None = None
        for producer, term in producers:
            if term is None:
                continue
            rows = self._rows_for(rule, producer, term)
            if rows is None:
                continue
            cands = set(rows) if cands is None else cands & set(rows)
            if not cands:
                return []
        if cands is None:
            return range(len(table.rows))
        return sorted(cands)

    def _rows_for(self, rule: MappingRule, producer, term):
        """Rows that could yield ``term`` from ``producer``; None = no pruning possible."""
        table = self.tables[rule.source_id]
        if isinstance(producer, Template):
            producer = TemplateObject(producer)
        if isinstance(producer, ConstantObject):
            return None if producer.term == term else []
        if isinstance(producer, TemplateObject):
            if not isinstance(term, IRI):
                return []
            try:
                values = producer.template.invert(term)
            except LookupError:
                return []
            if not values:
                return None
            (col, value), = values.items()
            return table.rows_where(col, value)
        if isinstance(producer, LookupObject):
            lookup = self.tables.get(producer.source_id)
            if lookup is None:
                return None
            keys = set()
            for lrow in lookup.rows:
                try:
                    if self.mapper.term(producer.inner, lrow) == term:
                        keys.add(lrow.get(producer.key_column))
                except MappingError:
                    continue
            out: list[int] = []
            for k in keys:
                out.extend(table.rows_where(producer.row_column, k))
            return out
        if isinstance(producer, ColumnObject):
            key = (rule.source_id, producer)
            idx = self._term_index.get(key)
            if idx is None:
                idx = {}
                for i, row in enumerate(table.rows):
                    try:
                        t = self.mapper.term(producer, row, optional=True)
                    except (MappingError, _Skip):
                        continue
                    idx.setdefault(t, []).append(i)
                self._term_index[key] = idx
            return idx.get(term, [])
        return None


def virtual_view(ruleset: MappingRuleSet, tables: dict, modes=("virtual",)) -> VirtualView:
    return VirtualView(ruleset, tables, tuple(modes))
