from .graph import Binding, Graph, TripleSource, UnionSource, match
from .io import UnknownPrefixError, isomorphic, load, parse, save, serialize
from .lexer import SyntaxErrorAt
from .terms import (IRI, BNode, Literal, PrefixMap, Triple, TriplePattern, Variable,
                    bundled_prefixes)

__all__ = [
    "IRI", "BNode", "Binding", "Graph", "Literal", "PrefixMap", "SyntaxErrorAt", "Triple",
    "TriplePattern", "TripleSource", "UnionSource", "UnknownPrefixError", "Variable",
    "bundled_prefixes", "isomorphic", "load", "match", "parse", "save", "serialize",
]
