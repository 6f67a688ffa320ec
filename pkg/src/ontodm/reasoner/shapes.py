"""Cardinality and datatype shapes checked against a graph."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..kg.graph import Graph
from ..kg.terms import IRI, RDF_TYPE, Literal, PrefixMap, bundled_prefixes, literal_key

UNBOUNDED = math.inf


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class ConstraintShape:
    id: str
    target_class: IRI
    property: IRI
    min_count: int = 0
    max_count: float = UNBOUNDED
    value_datatype: IRI | None = None

    def __post_init__(self):
        if self.min_count < 0 or self.min_count > self.max_count:
            raise ShapeError(f"shape {self.id}: need 0 <= min <= max")


@dataclass(frozen=True)
class Violation:
    shape_id: str
    focus_node: object
    property: IRI
    observed_count: int | None
    bad_datatype: object | None
    message: str


@dataclass
class ConsistencyReport:
    violations: list

    @property
    def conforms(self) -> bool:
        return not self.violations

    def __len__(self):
        return len(self.violations)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["shape_id", "focus_node", "property", "observed_count", "bad_datatype", "message"])
        for v in self.violations:
            w.writerow([v.shape_id, str(v.focus_node), str(v.property),
                        "" if v.observed_count is None else v.observed_count,
                        "" if v.bad_datatype is None else str(v.bad_datatype), v.message])
        return buf.getvalue()


def _well_typed(value, datatype: IRI) -> bool:
    return isinstance(value, Literal) and value.datatype == datatype and literal_key(value) is not None


def validate(graph, shapes) -> ConsistencyReport:
    """At most one violation per (focus node, shape); cardinality is checked before datatype.

    Focus nodes are the explicit instances of the target class, so run the
    closure first when subclass instances should be covered too.
    """
    out = []
    for shape in shapes:
        foci = sorted({t.subject for t in graph.triples(None, RDF_TYPE, shape.target_class)},
                      key=lambda n: str(n))
        for node in foci:
            values = [t.object for t in graph.triples(node, shape.property, None)]
            n = len(values)
            if n < shape.min_count or n > shape.max_count:
                hi = "*" if shape.max_count == UNBOUNDED else int(shape.max_count)
                out.append(Violation(shape.id, node, shape.property, n, None,
                                     f"{n} values for {shape.property}, expected {shape.min_count}..{hi}"))
                continue
            if shape.value_datatype is not None:
                bad = sorted((v for v in values if not _well_typed(v, shape.value_datatype)), key=str)
                if bad:
                    dt = bad[0].datatype if isinstance(bad[0], Literal) else bad[0]
                    out.append(Violation(shape.id, node, shape.property, None, dt,
                                         f"value {bad[0]} is not a valid {shape.value_datatype}"))
    return ConsistencyReport(out)


def parse_shapes(text: str, prefixes: PrefixMap | None = None) -> list[ConstraintShape]:
    """CSV with header ``id,target,property,min,max,datatype``; max ``*`` means unbounded."""
    pm = prefixes or bundled_prefixes()
    rows = list(csv.DictReader(io.StringIO(text)))
    need = {"id", "target", "property", "min", "max", "datatype"}
    if rows and not need <= set(rows[0]):
        raise ShapeError(f"shape file needs columns {sorted(need)}")
    out = []
    for i, r in enumerate(rows, 2):
        try:
            hi = r["max"].strip()
            out.append(ConstraintShape(
                r["id"].strip(), pm.resolve(r["target"].strip()), pm.resolve(r["property"].strip()),
                int(r["min"] or 0), UNBOUNDED if hi in ("", "*") else int(hi),
                pm.resolve(r["datatype"].strip()) if (r["datatype"] or "").strip() else None))
        except (KeyError, ValueError) as e:
            if isinstance(e, ShapeError):
                raise
            raise ShapeError(f"line {i}: {e}") from None
    ids = [s.id for s in out]
    if len(ids) != len(set(ids)):
        raise ShapeError("duplicate shape ids")
    return out


def load_shapes(path=None) -> list[ConstraintShape]:
    """Read a shape file; without a path the bundled observation/sensor shapes."""
    if path is None:
        text = resources.files("ontodm.data.project").joinpath("shapes.csv").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return parse_shapes(text)
