"""In-memory triple set with per-position indexes."""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Iterator, Protocol

from .terms import (IRI, BNode, Literal, PrefixMap, Term, Triple, TriplePattern,
                    Variable, bundled_prefixes, make_triple)

Binding = dict  # variable name -> Term


class TripleSource(Protocol):
    """Anything that can answer a (s, p, o) lookup with ``None`` wildcards."""

    def triples(self, s=None, p=None, o=None) -> Iterator[Triple]: ...


class Graph:
    def __init__(self, triples: Iterable[Triple] = (), namespaces: PrefixMap | None = None):
        self.namespaces = namespaces.copy() if namespaces is not None else bundled_prefixes()
        self._triples: set[Triple] = set()
        self._s = defaultdict(set)
        self._p = defaultdict(set)
        self._o = defaultdict(set)
        for t in triples:
            self.add(t)

    def add(self, triple: Triple) -> "Graph":
        t = make_triple(*triple)
        if t not in self._triples:
            self._triples.add(t)
            self._s[t.subject].add(t)
            self._p[t.predicate].add(t)
            self._o[t.object].add(t)
        return self

    def update(self, triples: Iterable[Triple]) -> "Graph":
        for t in triples:
            self.add(t)
        return self

    def discard(self, triple: Triple):
        if triple in self._triples:
            self._triples.remove(triple)
            self._s[triple.subject].discard(triple)
            self._p[triple.predicate].discard(triple)
            self._o[triple.object].discard(triple)

    def __len__(self):
        return len(self._triples)

    def __iter__(self):
        return iter(self._triples)

    def __contains__(self, triple):
        return triple in self._triples

    def __eq__(self, other):
        if isinstance(other, Graph):
            return self._triples == other._triples
        return NotImplemented

    def __or__(self, other: "Graph") -> "Graph":
        g = Graph(self._triples, self.namespaces)
        for prefix, ns in other.namespaces.items():
            g.namespaces.setdefault(prefix, ns)
        return g.update(other)

    def copy(self) -> "Graph":
        return Graph(self._triples, self.namespaces)

    def triples(self, s=None, p=None, o=None) -> Iterator[Triple]:
        candidates = None
        for index, key in ((self._s, s), (self._p, p), (self._o, o)):
            if key is None:
                continue
            bucket = index.get(key)
            if not bucket:
                return iter(())
            if candidates is None or len(bucket) < len(candidates):
                candidates = bucket
        if candidates is None:
            candidates = self._triples
        return (t for t in list(candidates)
                if (s is None or t.subject == s)
                and (p is None or t.predicate == p)
                and (o is None or t.object == o))

    def match(self, pattern: TriplePattern) -> list[Binding]:
        return match(self, pattern)

    def subjects(self):
        return set(self._s)

    def terms(self) -> set:
        out = set()
        for t in self._triples:
            out.update(t)
        return out

    def sorted_triples(self) -> list[Triple]:
        return sorted(self._triples, key=lambda t: t.n3())


class UnionSource:
    """Read-only union of several triple sources, e.g. a graph plus a virtual view."""

    def __init__(self, *sources: TripleSource):
        self.sources = sources

    def triples(self, s=None, p=None, o=None) -> Iterator[Triple]:
        seen = set()
        for src in self.sources:
            for t in src.triples(s, p, o):
                if t not in seen:
                    seen.add(t)
                    yield t


def ground(term, binding: Binding):
    if isinstance(term, Variable):
        return binding.get(term.name)
    return term


def match(source: TripleSource, pattern: TriplePattern, binding: Binding | None = None) -> list[Binding]:
    """Bindings for every triple of ``source`` that instantiates ``pattern``.

    ``binding`` pre-binds variables; repeated variables must bind equal terms.
    """
    binding = binding or {}
    s, p, o = (ground(t, binding) if isinstance(t, Variable) else t for t in pattern)
    # a literal can never sit in subject position, nor a non-IRI in predicate
    if isinstance(s, Literal) or (p is not None and not isinstance(p, IRI)):
        return []
    out = []
    for t in source.triples(s, p, o):
        b = dict(binding)
        ok = True
        for pos, value in zip(pattern, t):
            if isinstance(pos, Variable):
                bound = b.get(pos.name)
                if bound is None:
                    b[pos.name] = value
                elif bound != value:
                    ok = False
                    break
        if ok:
            out.append(b)
    return out


def is_blank(term: Term) -> bool:
    return isinstance(term, BNode)
