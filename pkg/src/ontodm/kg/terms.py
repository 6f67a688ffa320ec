"""RDF terms, triples and the bundled namespace table."""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from importlib import resources
from typing import NamedTuple, Union

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"
XSD = "http://www.w3.org/2001/XMLSchema#"


class TermError(ValueError):
    pass


_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*://\S+$")


@dataclass(frozen=True, order=True)
class IRI:
    value: str

    def __post_init__(self):
        if not self.value or not _SCHEME.match(self.value):
            raise TermError(f"not an absolute IRI: {self.value!r}")

    def local_name(self) -> str:
        for sep in ("#", "/"):
            if sep in self.value:
                tail = self.value.rsplit(sep, 1)[1]
                if tail:
                    return tail
        return self.value

    def n3(self) -> str:
        return f"<{self.value}>"

    def __str__(self):
        return self.value


XSD_STRING = IRI(XSD + "string")
RDF_LANGSTRING = IRI(RDF + "langString")


@dataclass(frozen=True, order=True)
class Literal:
    lexical: str
    datatype: IRI = XSD_STRING
    lang: str | None = None

    def __post_init__(self):
        if self.lang is not None:
            if not self.lang:
                raise TermError("empty language tag")
            if self.datatype == XSD_STRING:
                object.__setattr__(self, "datatype", RDF_LANGSTRING)
            elif self.datatype != RDF_LANGSTRING:
                raise TermError("language tag requires rdf:langString")
            object.__setattr__(self, "lang", self.lang.lower())
        elif self.datatype == RDF_LANGSTRING:
            raise TermError("rdf:langString literal without language tag")

    def n3(self) -> str:
        text = '"' + escape_string(self.lexical) + '"'
        if self.lang:
            return f"{text}@{self.lang}"
        if self.datatype == XSD_STRING:
            return text
        return f"{text}^^{self.datatype.n3()}"

    def __str__(self):
        return self.lexical


@dataclass(frozen=True, order=True)
class BNode:
    label: str

    def __post_init__(self):
        if not self.label:
            raise TermError("empty blank node label")

    def n3(self) -> str:
        return f"_:{self.label}"

    def __str__(self):
        return self.n3()


@dataclass(frozen=True, order=True)
class Variable:
    name: str

    def __post_init__(self):
        if not self.name:
            raise TermError("empty variable name")

    def n3(self) -> str:
        return f"?{self.name}"

    def __str__(self):
        return self.n3()


Term = Union[IRI, Literal, BNode]
PatternTerm = Union[IRI, Literal, BNode, Variable]


class Triple(NamedTuple):
    subject: IRI | BNode
    predicate: IRI
    object: Term

    def n3(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."


def make_triple(s, p, o) -> Triple:
    if not isinstance(s, (IRI, BNode)):
        raise TermError(f"subject must be IRI or blank node, got {s!r}")
    if not isinstance(p, IRI):
        raise TermError(f"predicate must be an IRI, got {p!r}")
    if not isinstance(o, (IRI, Literal, BNode)):
        raise TermError(f"object must be a term, got {o!r}")
    return Triple(s, p, o)


class TriplePattern(NamedTuple):
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm

    def variables(self) -> list[str]:
        return [t.name for t in self if isinstance(t, Variable)]


_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def escape_string(text: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in text)


# -- namespaces --------------------------------------------------------------

class PrefixError(KeyError):
    def __str__(self):
        return f"unknown prefix: {self.args[0]!r}"


class PrefixMap(dict):
    """prefix (without colon) -> namespace IRI text."""

    def bind(self, prefix: str, namespace: str):
        # rebinding replaces: one namespace per prefix
        IRI(namespace)
        self[prefix] = namespace

    def expand(self, curie: str) -> IRI:
        prefix, _, local = curie.partition(":")
        if prefix not in self:
            raise PrefixError(prefix)
        return IRI(self[prefix] + local)

    def resolve(self, text: str) -> IRI:
        """Accept ``<abs>``, an absolute IRI or a prefixed name."""
        if text.startswith("<") and text.endswith(">"):
            return IRI(text[1:-1])
        if _SCHEME.match(text):
            return IRI(text)
        return self.expand(text)

    def compact(self, iri: IRI) -> str | None:
        best = None
        for prefix, ns in self.items():
            if iri.value.startswith(ns):
                local = iri.value[len(ns):]
                if _SAFE_LOCAL.match(local) and (best is None or len(ns) > len(self[best[0]])):
                    best = (prefix, local)
        if best is None:
            return None
        return f"{best[0]}:{best[1]}"

    def copy(self) -> "PrefixMap":
        return PrefixMap(self)


_SAFE_LOCAL = re.compile(r"^(?:[A-Za-z0-9_](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?)?$")


def bundled_prefixes() -> PrefixMap:
    text = resources.files("ontodm.data").joinpath("prefixes.ttl").read_text("utf-8")
    pm = PrefixMap()
    for line in text.splitlines():
        m = re.match(r"@prefix\s+([\w\-.]*):\s*<([^>]*)>\s*\.", line.strip())
        if m:
            pm.bind(m.group(1), m.group(2))
    return pm


RDF_TYPE = IRI(RDF + "type")
RDFS_SUBCLASSOF = IRI(RDFS + "subClassOf")
RDFS_SUBPROPERTYOF = IRI(RDFS + "subPropertyOf")
RDFS_DOMAIN = IRI(RDFS + "domain")
RDFS_RANGE = IRI(RDFS + "range")
RDFS_CLASS = IRI(RDFS + "Class")
OWL_CLASS = IRI(OWL + "Class")
OWL_OBJECTPROPERTY = IRI(OWL + "ObjectProperty")
OWL_EQUIVALENTCLASS = IRI(OWL + "equivalentClass")
XSD_BOOLEAN = IRI(XSD + "boolean")
XSD_DECIMAL = IRI(XSD + "decimal")
XSD_INTEGER = IRI(XSD + "integer")
XSD_DOUBLE = IRI(XSD + "double")
XSD_DATETIME = IRI(XSD + "dateTime")

NUMERIC_TYPES = {XSD_DECIMAL, XSD_INTEGER, XSD_DOUBLE, IRI(XSD + "float"),
                 IRI(XSD + "int"), IRI(XSD + "long")}


# -- literal values ----------------------------------------------------------

_DATETIME = re.compile(
    r"^(\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})(?:\.(\d{1,6}))?(Z|[+-]\d{2}:\d{2})?$")


def parse_datetime_ms(text: str) -> int:
    """ISO-8601 date-time to integer milliseconds since the epoch (UTC).

    A missing offset is read as UTC. Raises ValueError on malformed input.
    """
    m = _DATETIME.match(text.strip())
    if not m:
        raise ValueError(f"not an ISO-8601 date-time: {text!r}")
    y, mo, d, h, mi, s, frac, tz = m.groups()
    dt = datetime(int(y), int(mo), int(d), int(h), int(mi), int(s), tzinfo=timezone.utc)
    ms = int(dt.timestamp()) * 1000
    if frac:
        ms += int((frac + "000")[:3])
    if tz and tz != "Z":
        sign = 1 if tz[0] == "+" else -1
        ms -= sign * (int(tz[1:3]) * 60 + int(tz[4:6])) * 60_000
    return ms


def format_datetime_ms(ms: int) -> str:
    dt = datetime.fromtimestamp(ms // 1000, tz=timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%S") + f".{ms % 1000:03d}Z"


def parse_decimal(text: str) -> Decimal:
    try:
        value = Decimal(text.strip())
    except InvalidOperation:
        raise ValueError(f"not a decimal: {text!r}") from None
    if not value.is_finite():
        raise ValueError(f"not a finite decimal: {text!r}")
    return value


def literal_key(lit: Literal):
    """Comparable value of a literal as ``(family, value)``.

    Families: ``num``, ``bool``, ``time``, ``str``. Returns None when the
    lexical form is invalid for its datatype.
    """
    dt = lit.datatype
    try:
        if dt in NUMERIC_TYPES:
            return ("num", parse_decimal(lit.lexical))
        if dt == XSD_BOOLEAN:
            if lit.lexical in ("true", "1"):
                return ("bool", True)
            if lit.lexical in ("false", "0"):
                return ("bool", False)
            return None
        if dt == XSD_DATETIME:
            return ("time", parse_datetime_ms(lit.lexical))
    except ValueError:
        return None
    if dt in (XSD_STRING, RDF_LANGSTRING):
        return ("str", lit.lexical)
    return (dt.value, lit.lexical)
