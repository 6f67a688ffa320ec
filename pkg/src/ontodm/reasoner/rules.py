"""Forward chaining over six RDFS entailment rules."""

from __future__ import annotations

import enum

from ..kg.graph import Graph
from ..kg.terms import (IRI, RDF_TYPE, RDFS_DOMAIN, RDFS_RANGE, RDFS_SUBCLASSOF,
                        RDFS_SUBPROPERTYOF, Literal, Triple)


class Rule(enum.Enum):
    SUBCLASS_TRANSITIVITY = "rdfs-subclass-transitivity"  # rdfs11
    SUBCLASS_INSTANCE = "rdfs-subclass-instance"  # rdfs9
    SUBPROPERTY_TRANSITIVITY = "rdfs-subproperty-transitivity"  # rdfs5
    SUBPROPERTY_INHERITANCE = "rdfs-subproperty-inheritance"  # rdfs7
    DOMAIN = "rdfs-domain"  # rdfs2
    RANGE = "rdfs-range"  # rdfs3


ALL_RULES = frozenset(Rule)

_ALIASES = {"rdfs11": Rule.SUBCLASS_TRANSITIVITY, "rdfs9": Rule.SUBCLASS_INSTANCE,
            "rdfs5": Rule.SUBPROPERTY_TRANSITIVITY, "rdfs7": Rule.SUBPROPERTY_INHERITANCE,
            "rdfs2": Rule.DOMAIN, "rdfs3": Rule.RANGE}


class ClosureError(RuntimeError):
    pass


def parse_rules(names) -> frozenset:
    """Accept rule enum members, long names or rdfsN shorthands."""
    out = set()
    for n in names:
        if isinstance(n, Rule):
            out.add(n)
        elif n in _ALIASES:
            out.add(_ALIASES[n])
        else:
            try:
                out.add(Rule(n))
            except ValueError:
                raise ValueError(f"unknown inference rule {n!r}") from None
    return frozenset(out)


def _objects(g: Graph, s, p):
    return [t.object for t in g.triples(s, p, None)]


def _subjects(g: Graph, p, o):
    return [t.subject for t in g.triples(None, p, o)]


def consequences(t: Triple, g: Graph, rules) -> list[Triple]:
    """Everything derivable in one step from ``t`` joined with ``g``."""
    s, p, o = t
    out: list[Triple] = []
    resource = not isinstance(o, Literal)
    # t as the instance-level antecedent
    if Rule.DOMAIN in rules:
        out += [Triple(s, RDF_TYPE, c) for c in _objects(g, p, RDFS_DOMAIN)]
    if Rule.RANGE in rules and resource:
        out += [Triple(o, RDF_TYPE, c) for c in _objects(g, p, RDFS_RANGE)]
    if Rule.SUBPROPERTY_INHERITANCE in rules:
        out += [Triple(s, q, o) for q in _objects(g, p, RDFS_SUBPROPERTYOF) if isinstance(q, IRI)]
    # t as the schema-level antecedent
    if p == RDFS_DOMAIN and Rule.DOMAIN in rules and isinstance(s, IRI):
        out += [Triple(x.subject, RDF_TYPE, o) for x in g.triples(None, s, None)]
    if p == RDFS_RANGE and Rule.RANGE in rules and isinstance(s, IRI):
        out += [Triple(x.object, RDF_TYPE, o) for x in g.triples(None, s, None)
                if not isinstance(x.object, Literal)]
    if p == RDFS_SUBPROPERTYOF:
        if Rule.SUBPROPERTY_INHERITANCE in rules and isinstance(s, IRI) and isinstance(o, IRI):
            out += [Triple(x.subject, o, x.object) for x in g.triples(None, s, None)]
        if Rule.SUBPROPERTY_TRANSITIVITY in rules and resource:
            out += [Triple(s, RDFS_SUBPROPERTYOF, r) for r in _objects(g, o, RDFS_SUBPROPERTYOF)]
            out += [Triple(q, RDFS_SUBPROPERTYOF, o) for q in _subjects(g, RDFS_SUBPROPERTYOF, s)]
    if p == RDF_TYPE and Rule.SUBCLASS_INSTANCE in rules and resource:
        out += [Triple(s, RDF_TYPE, d) for d in _objects(g, o, RDFS_SUBCLASSOF)]
    if p == RDFS_SUBCLASSOF:
        if Rule.SUBCLASS_INSTANCE in rules:
            out += [Triple(x, RDF_TYPE, o) for x in _subjects(g, RDF_TYPE, s)]
        if Rule.SUBCLASS_TRANSITIVITY in rules and resource:
            out += [Triple(s, RDFS_SUBCLASSOF, e) for e in _objects(g, o, RDFS_SUBCLASSOF)]
            out += [Triple(c, RDFS_SUBCLASSOF, o) for c in _subjects(g, RDFS_SUBCLASSOF, s)]
    return out


def size_bound(graph: Graph) -> int:
    """Upper bound on the closure size: subjects x predicates x objects of the finite vocabulary."""
    terms = graph.terms() | {RDF_TYPE, RDFS_SUBCLASSOF, RDFS_SUBPROPERTYOF}
    preds = {t.predicate for t in graph} | {RDF_TYPE, RDFS_SUBCLASSOF, RDFS_SUBPROPERTYOF}
    preds |= {t.object for t in graph if t.predicate == RDFS_SUBPROPERTYOF and isinstance(t.object, IRI)}
    return len(terms) ** 2 * len(preds)


def rdfs_closure(graph: Graph, rules=ALL_RULES, max_rounds: int | None = None) -> Graph:
    """Least fixpoint of ``graph`` under ``rules`` (semi-naive evaluation).

    Each round only joins the triples added in the previous round against the
    whole graph. Raises ClosureError if the round cap or the size bound is hit.
    """
    rules = parse_rules(rules)
    if not rules:
        raise ValueError("closure needs at least one enabled rule")
    out = graph.copy()
    bound = size_bound(graph)
    delta = list(out)
    rounds = 0
    while delta:
        rounds += 1
        if max_rounds is not None and rounds > max_rounds:
            raise ClosureError(f"no fixpoint after {max_rounds} rounds")
        fresh = []
        for t in delta:
            for c in consequences(t, out, rules):
                if c not in out:
                    out.add(c)
                    fresh.append(c)
        if len(out) > bound:
            raise ClosureError(f"closure grew past its bound of {bound} triples")
        delta = fresh
    return out
