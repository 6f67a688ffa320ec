"""Bundled ontology design patterns and the four alignment mechanisms."""

from __future__ import annotations

import enum
import functools
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..kg.graph import Graph
from ..kg.io import parse
from ..kg.terms import (IRI, OWL_CLASS, OWL_EQUIVALENTCLASS, OWL_OBJECTPROPERTY, RDF_TYPE,
                        RDFS_DOMAIN, RDFS_RANGE, RDFS_SUBCLASSOF, PrefixMap, Triple,
                        bundled_prefixes)

PROJECT_NAMESPACE = "http://example.org/ModVA#"


class OdpError(ValueError):
    pass


class UnknownOdpError(OdpError, KeyError):
    def __str__(self):
        return f"unknown ODP id: {self.args[0]!r}"


class DanglingIriError(OdpError):
    pass


class DuplicateRelationError(OdpError):
    pass


@dataclass(frozen=True)
class _OdpInfo:
    standard_ref: str
    namespaces: tuple[str, ...]


_CATALOG = {
    "sosa": _OdpInfo("W3C SOSA/SSN (Semantic Sensor Network Ontology)",
                     ("http://www.w3.org/ns/sosa/", "http://www.w3.org/ns/ssn/")),
    "isa88": _OdpInfo("ISA-88 / IEC 61512 batch control", ("http://example.org/isa88#",)),
    "vdi3682": _OdpInfo("VDI 3682 formalized process description", ("http://example.org/vdi3682#",)),
    "din61360": _OdpInfo("DIN EN 61360 data element types", ("http://example.org/din61360#",)),
}

ODP_IDS = tuple(sorted(_CATALOG))


@dataclass(frozen=True)
class Odp:
    id: str
    standard_ref: str
    namespaces: tuple[str, ...]
    tbox: Graph = field(compare=False)

    def declared(self) -> set[IRI]:
        return {t.subject for t in self.tbox if isinstance(t.subject, IRI)}


def load_odp(odp_id: str) -> Odp:
    info = _CATALOG.get(odp_id)
    if info is None:
        raise UnknownOdpError(odp_id)
    text = resources.files("ontodm.data.odp").joinpath(f"{odp_id}.ttl").read_text("utf-8")
    tbox = parse(text)
    for iri in {t.subject for t in tbox}:
        if not any(iri.value.startswith(ns) for ns in info.namespaces):
            raise OdpError(f"{odp_id}: {iri} lies outside the pattern's namespaces")
    return Odp(odp_id, info.standard_ref, info.namespaces, tbox)


@functools.lru_cache(maxsize=None)
def _declared(odp_id: str) -> frozenset:
    return frozenset(load_odp(odp_id).declared())


class Mechanism(enum.Enum):
    EQUIVALENT_TO = "equivalent-to"
    SUB_CLASSING = "sub-classing"
    RELATION_TO = "relation-to"
    ATTRIBUTE_TO_CLASS = "attribute-to-class"


@dataclass(frozen=True)
class AlignmentAxiom:
    mechanism: Mechanism
    source: IRI
    target: IRI
    relation_name: IRI | None = None

    def __post_init__(self):
        if (self.relation_name is not None) != (self.mechanism is Mechanism.RELATION_TO):
            raise OdpError("relation_name is required for relation-to and forbidden otherwise")

    def sort_key(self):
        return (self.mechanism.value, self.source.value, self.target.value,
                self.relation_name.value if self.relation_name else "")


def _capitalize(local: str) -> str:
    return local[:1].upper() + local[1:]


def attribute_class_iris(attribute: IRI, namespace: str = PROJECT_NAMESPACE) -> tuple[IRI, IRI]:
    """(new class, linking property) minted for an attribute-to-class alignment."""
    name = _capitalize(attribute.local_name())
    return IRI(f"{namespace}{name}Class"), IRI(f"{namespace}has{name}Class")


def mechanism_triples(axiom: AlignmentAxiom, namespace: str = PROJECT_NAMESPACE) -> list[Triple]:
    m = axiom.mechanism
    if m is Mechanism.EQUIVALENT_TO:
        return [Triple(axiom.source, OWL_EQUIVALENTCLASS, axiom.target)]
    if m is Mechanism.SUB_CLASSING:
        return [Triple(axiom.source, RDFS_SUBCLASSOF, axiom.target)]
    if m is Mechanism.RELATION_TO:
        rel = axiom.relation_name
        return [Triple(rel, RDF_TYPE, OWL_OBJECTPROPERTY),
                Triple(rel, RDFS_DOMAIN, axiom.source),
                Triple(rel, RDFS_RANGE, axiom.target)]
    cls, link = attribute_class_iris(axiom.target, namespace)
    # the linking property is declared through its domain and range
    return [Triple(cls, RDF_TYPE, OWL_CLASS),
            Triple(link, RDFS_DOMAIN, axiom.source),
            Triple(link, RDFS_RANGE, cls)]


@dataclass(frozen=True)
class Lwo:
    odps: tuple[str, ...]
    alignments: tuple[AlignmentAxiom, ...]
    tbox: Graph = field(compare=False)
    namespace: str = PROJECT_NAMESPACE

    def member_terms(self) -> set[IRI]:
        out: set[IRI] = set()
        for odp_id in self.odps:
            out |= _declared(odp_id)
        return out


def align(lwo_draft: Lwo, axiom: AlignmentAxiom) -> Lwo:
    """Add one alignment axiom, emitting exactly the mechanism's triples."""
    members = lwo_draft.member_terms()
    for iri in (axiom.source, axiom.target):
        if iri not in members:
            raise DanglingIriError(f"{axiom.mechanism.value}: {iri} is not declared by any member ODP")
    new_triples = mechanism_triples(axiom, lwo_draft.namespace)
    if axiom.mechanism is Mechanism.RELATION_TO:
        rel = axiom.relation_name
        if rel in members or any(a.relation_name == rel for a in lwo_draft.alignments):
            raise DuplicateRelationError(f"relation {rel} is already defined")
    tbox = lwo_draft.tbox.copy().update(new_triples)
    return Lwo(lwo_draft.odps, lwo_draft.alignments + (axiom,), tbox, lwo_draft.namespace)


def compose_lwo(odp_ids, axioms=(), namespace: str = PROJECT_NAMESPACE) -> Lwo:
    ids = tuple(sorted(set(odp_ids)))
    tbox = Graph()
    for odp_id in ids:
        odp = load_odp(odp_id)
        tbox.update(odp.tbox)
        for prefix, ns in odp.tbox.namespaces.items():
            tbox.namespaces.setdefault(prefix, ns)
    lwo = Lwo(ids, (), tbox, namespace)
    for axiom in sorted(axioms, key=AlignmentAxiom.sort_key):
        lwo = align(lwo, axiom)
    return lwo


_COMMENT = re.compile(r"(?:^|\s)#.*$")
_ALIGN_LINE = re.compile(r"^(\S+)\s+(\S+)\s+(\S+)(?:\s+(\S+))?$")


def parse_alignments(text: str, prefixes: PrefixMap | None = None) -> list[AlignmentAxiom]:
    """One axiom per line: ``<mechanism> <source> <target> [<relation>]``; ``#`` comments."""
    pm = prefixes or bundled_prefixes()
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _COMMENT.sub("", raw).strip()
        if not line:
            continue
        m = _ALIGN_LINE.match(line)
        if not m:
            raise OdpError(f"line {lineno}: malformed alignment {raw.strip()!r}")
        mech_text, src, tgt, rel = m.groups()
        try:
            mech = Mechanism(mech_text)
        except ValueError:
            raise OdpError(f"line {lineno}: unknown mechanism {mech_text!r}") from None
        try:
            axiom = AlignmentAxiom(mech, pm.resolve(src), pm.resolve(tgt),
                                   pm.resolve(rel) if rel else None)
        except (KeyError, ValueError) as e:
            raise OdpError(f"line {lineno}: {e}") from None
        out.append(axiom)
    return out


def load_alignments(path) -> list[AlignmentAxiom]:
    return parse_alignments(Path(path).read_text("utf-8"))


def format_alignments(axioms) -> str:
    pm = bundled_prefixes()

    def show(iri):
        return pm.compact(iri) or iri.n3()

    lines = []
    for a in sorted(axioms, key=AlignmentAxiom.sort_key):
        parts = [a.mechanism.value, show(a.source), show(a.target)]
        if a.relation_name:
            parts.append(show(a.relation_name))
        lines.append(" ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")
