"""Evaluation of parsed queries against any triple source."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from ..kg.graph import TripleSource, match
from ..kg.terms import IRI, BNode, Literal, Variable, literal_key
from .parser import Comparison, Query, parse_query


@dataclass
class ResultTable:
    header: list[str]
    rows: list[tuple]

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.header):
                raise ValueError("row width does not match header")

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> list:
        i = self.header.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow(["" if cell is None else str(cell) for cell in row])
        return buf.getvalue()


def compare(lhs, op: str, rhs) -> bool:
    """Filter comparison. Incompatible operands never satisfy any operator."""
    if lhs is None or rhs is None:
        return False
    if isinstance(lhs, Literal) and isinstance(rhs, Literal):
        a, b = literal_key(lhs), literal_key(rhs)
        if a is None or b is None or a[0] != b[0]:
            return False
        if a[0] == "str" and lhs.lang != rhs.lang:
            return False
        x, y = a[1], b[1]
    elif isinstance(lhs, (IRI, BNode)) and type(lhs) is type(rhs):
        if op not in ("=", "!="):
            return False
        x, y = lhs, rhs
    else:
        return False
    if op == "=":
        return x == y
    if op == "!=":
        return x != y
    if op == "<":
        return x < y
    if op == "<=":
        return x <= y
    if op == ">":
        return x > y
    if op == ">=":
        return x >= y
    raise ValueError(f"unknown operator {op!r}")


def order_key(term):
    """Total order: unbound < blank nodes < IRIs < literals (by family, then value)."""
    if term is None:
        return (0, "", "")
    if isinstance(term, BNode):
        return (1, "", term.label)
    if isinstance(term, IRI):
        return (2, "", term.value)
    key = literal_key(term)
    if key is None:
        return (3, "~" + term.datatype.value, term.lexical)
    family, value = key
    if family == "str":
        return (3, family, (value, term.lang or ""))
    return (3, family, (value, term.lexical))


def _satisfied(f: Comparison, sol: dict) -> bool:
    lhs = sol.get(f.lhs.name) if isinstance(f.lhs, Variable) else f.lhs
    rhs = sol.get(f.rhs.name) if isinstance(f.rhs, Variable) else f.rhs
    return compare(lhs, f.op, rhs)


def _bound_count(pattern, bound: set) -> int:
    return sum(1 for t in pattern if not isinstance(t, Variable) or t.name in bound)


def evaluate(query: Query | str, source: TripleSource) -> ResultTable:
    """Join all patterns, restrict by VALUES and filters, then order, project and limit.

    Patterns are joined as nested index lookups; at each step the pattern
    with the most bound positions goes next (earliest pattern on ties), so
    constants from VALUES prune lookups against virtual sources.
    """
    if isinstance(query, str):
        query = parse_query(query)
    solutions: list[dict] = [{}]
    bound: set[str] = set()
    if query.values is not None:
        solutions = [dict(zip(query.values.variables, row)) for row in query.values.rows]
        bound.update(query.values.variables)
    pending_filters = list(query.filters)

    def apply_filters():
        nonlocal solutions
        ready = [f for f in pending_filters if all(v in bound for v in f.variables())]
        for f in ready:
            pending_filters.remove(f)
            solutions = [s for s in solutions if _satisfied(f, s)]

    apply_filters()
    remaining = list(query.where)
    while remaining and solutions:
        best = max(range(len(remaining)), key=lambda i: (_bound_count(remaining[i], bound), -i))
        pattern = remaining.pop(best)
        joined = []
        for sol in solutions:
            joined.extend(match(source, pattern, sol))
        solutions = joined
        bound.update(pattern.variables())
        apply_filters()
    if remaining:
        solutions = []
    for f in pending_filters:
        solutions = [s for s in solutions if _satisfied(f, s)]

    if query.order_by is not None:
        name, asc = query.order_by
        solutions.sort(key=lambda s: order_key(s.get(name)), reverse=not asc)
    header = query.projection()
    rows = [tuple(s.get(v) for v in header) for s in solutions]
    if query.limit is not None:
        rows = rows[: query.limit]
    return ResultTable(header, rows)
