"""N-Triples and Turtle-subset reading and writing.

The Turtle subset covers ``@prefix``/``PREFIX`` directives, the ``a``
keyword, typed and language-tagged literals, bare numbers and booleans,
predicate lists (``;``), object lists (``,``) and a single level of
anonymous blank nodes (``[ p o ]``). Collections and ``@base`` are rejected.
"""

from __future__ import annotations

from pathlib import Path

from .graph import Graph
from .lexer import Lexer, SyntaxErrorAt, Token, unquote
from .terms import (IRI, RDF_TYPE, XSD, XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE, BNode,
                    Literal, PrefixError, PrefixMap, TermError, Triple, XSD_INTEGER,
                    XSD_STRING, bundled_prefixes, escape_string)

FORMATS = ("ntriples", "turtle")


class UnknownPrefixError(SyntaxErrorAt):
    pass


class _Parser:
    def __init__(self, text: str, prefixes: PrefixMap, line_offset: int = 0):
        self.lexer = Lexer(text)
        try:
            self.toks = self.lexer.tokens()
        except SyntaxErrorAt as e:
            raise SyntaxErrorAt(e.message, e.line + line_offset, e.column) from None
        self.i = 0
        self.prefixes = prefixes
        self.line_offset = line_offset
        self.triples: list[Triple] = []
        self._anon = 0
        self._labels: set[str] = set()

    # -- helpers --
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, message, expected=(), tok: Token | None = None, cls=SyntaxErrorAt):
        tok = tok or self.tok
        line, col = self.lexer.position(tok.pos)
        return cls(message, line + self.line_offset, col, expected)

    def take(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect_punct(self, ch: str) -> Token:
        if self.tok.kind == "PUNCT" and self.tok.text == ch:
            return self.take()
        raise self.fail(f"unexpected {self.tok.text or 'end of input'!r}", [repr(ch)])

    def at_punct(self, ch: str) -> bool:
        return self.tok.kind == "PUNCT" and self.tok.text == ch

    def iri(self, tok: Token) -> IRI:
        try:
            if tok.kind == "IRI":
                return IRI(tok.text[1:-1])
            return self.prefixes.expand(tok.text)
        except PrefixError as e:
            raise self.fail(f"unknown prefix {e.args[0]!r}", tok=tok, cls=UnknownPrefixError) from None
        except TermError as e:
            raise self.fail(str(e), tok=tok) from None

    def bnode(self, label: str) -> BNode:
        self._labels.add(label)
        return BNode(label)

    def fresh_bnode(self) -> BNode:
        while True:
            label = f"anon{self._anon}"
            self._anon += 1
            if label not in self._labels:
                return self.bnode(label)

    # -- grammar --
    def parse_turtle(self):
        while self.tok.kind != "EOF":
            tok = self.tok
            if tok.kind == "LANG" and tok.text in ("@prefix", "@base"):
                self.take()
                if tok.text == "@base":
                    raise self.fail("@base is not supported", tok=tok)
                self.prefix_decl()
                self.expect_punct(".")
            elif tok.kind == "NAME" and tok.text.upper() == "PREFIX":
                self.take()
                self.prefix_decl()
            elif tok.kind == "NAME" and tok.text.upper() == "BASE":
                raise self.fail("BASE is not supported")
            else:
                self.statement()
        return self.triples

    def prefix_decl(self):
        name = self.take()
        if name.kind != "PNAME" or not name.text.endswith(":") or name.text.count(":") != 1:
            raise self.fail("expected prefix name", ["prefix:"], tok=name)
        ns = self.take()
        if ns.kind != "IRI":
            raise self.fail("expected namespace IRI", ["<iri>"], tok=ns)
        try:
            self.prefixes.bind(name.text[:-1], ns.text[1:-1])
        except TermError as e:
            raise self.fail(str(e), tok=ns) from None

    def statement(self):
        if self.at_punct("["):
            subj = self.blank_property_list(nested=False)
            if self.at_punct("."):
                self.take()
                return
        else:
            subj = self.subject()
        self.predicate_object_list(subj)
        self.expect_punct(".")

    def subject(self):
        tok = self.tok
        if tok.kind in ("IRI", "PNAME"):
            self.take()
            return self.iri(tok)
        if tok.kind == "BNODE":
            self.take()
            return self.bnode(tok.text[2:])
        if self.at_punct("("):
            raise self.fail("collections are not supported")
        raise self.fail(f"unexpected {tok.text or 'end of input'!r}", ["<iri>", "prefix:name", "_:label", "["])

    def predicate(self):
        tok = self.tok
        if tok.kind == "NAME" and tok.text == "a":
            self.take()
            return RDF_TYPE
        if tok.kind in ("IRI", "PNAME"):
            self.take()
            return self.iri(tok)
        raise self.fail(f"unexpected {tok.text or 'end of input'!r}", ["<iri>", "prefix:name", "a"])

    def predicate_object_list(self, subj, nested=False):
        while True:
            pred = self.predicate()
            while True:
                obj = self.object(nested)
                self.triples.append(Triple(subj, pred, obj))
                if self.at_punct(","):
                    self.take()
                    continue
                break
            if self.at_punct(";"):
                self.take()
                # trailing ';' before '.' or ']' is permitted
                if self.at_punct(".") or self.at_punct("]"):
                    return
                continue
            return

    def blank_property_list(self, nested):
        start = self.expect_punct("[")
        if nested:
            raise self.fail("nested anonymous blank nodes are not supported", tok=start)
        node = self.fresh_bnode()
        if self.at_punct("]"):
            self.take()
            return node
        self.predicate_object_list(node, nested=True)
        self.expect_punct("]")
        return node

    def object(self, nested=False):
        tok = self.tok
        if tok.kind in ("IRI", "PNAME"):
            self.take()
            return self.iri(tok)
        if tok.kind == "BNODE":
            self.take()
            return self.bnode(tok.text[2:])
        if self.at_punct("["):
            return self.blank_property_list(nested)
        if self.at_punct("("):
            raise self.fail("collections are not supported")
        return self.literal()

    def literal(self):
        tok = self.tok
        if tok.kind == "STRING":
            self.take()
            try:
                lexical = unquote(tok.text)
            except ValueError as e:
                raise self.fail(str(e), tok=tok) from None
            if self.tok.kind == "LANG":
                return Literal(lexical, lang=self.take().text[1:])
            if self.tok.kind == "DTYPE":
                self.take()
                dt_tok = self.tok
                if dt_tok.kind not in ("IRI", "PNAME"):
                    raise self.fail("expected datatype IRI", ["<iri>", "prefix:name"])
                self.take()
                return Literal(lexical, self.iri(dt_tok))
            return Literal(lexical)
        if tok.kind == "NUMBER":
            self.take()
            text = tok.text
            if "e" in text or "E" in text:
                return Literal(text, XSD_DOUBLE)
            if "." in text:
                return Literal(text, XSD_DECIMAL)
            return Literal(text, XSD_INTEGER)
        if tok.kind == "NAME" and tok.text in ("true", "false"):
            self.take()
            return Literal(tok.text, XSD_BOOLEAN)
        raise self.fail(f"unexpected {tok.text or 'end of input'!r}", ["<iri>", "prefix:name", "literal"])

    def ntriples_line(self):
        s = self.tok
        if s.kind == "IRI":
            subj = self.iri(self.take())
        elif s.kind == "BNODE":
            subj = self.bnode(self.take().text[2:])
        else:
            raise self.fail(f"unexpected {s.text!r}", ["<iri>", "_:label"])
        if self.tok.kind != "IRI":
            raise self.fail(f"unexpected {self.tok.text or 'end of line'!r}", ["<iri>"])
        pred = self.iri(self.take())
        o = self.tok
        if o.kind == "IRI":
            obj = self.iri(self.take())
        elif o.kind == "BNODE":
            obj = self.bnode(self.take().text[2:])
        elif o.kind == "STRING" and o.text.startswith('"') and not o.text.startswith('"""'):
            obj = self.literal()
        else:
            raise self.fail(f"unexpected {o.text or 'end of line'!r}", ["<iri>", "_:label", '"literal"'])
        if not self.at_punct("."):
            raise self.fail("missing terminal '.'", ["'.'"])
        self.take()
        if self.tok.kind != "EOF":
            raise self.fail(f"unexpected {self.tok.text!r} after '.'")
        self.triples.append(Triple(subj, pred, obj))


def parse(text: str, format: str = "turtle", prefixes: PrefixMap | None = None) -> Graph:
    """Parse ``text`` into a Graph. Bundled prefixes are in scope for Turtle."""
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}")
    pm = (prefixes if prefixes is not None else bundled_prefixes()).copy()
    if format == "turtle":
        p = _Parser(text, pm)
        triples = p.parse_turtle()
        return Graph(triples, p.prefixes)
    graph = Graph(namespaces=pm)
    # only LF ends a line; splitlines() would also break on U+2028 and friends
    for lineno, line in enumerate(text.split("\n")):
        line = line.rstrip("\r")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        p = _Parser(line, pm, line_offset=lineno)
        p.ntriples_line()
        graph.update(p.triples)
    return graph


def load(path, format: str | None = None, prefixes: PrefixMap | None = None) -> Graph:
    path = Path(path)
    if format is None:
        format = "ntriples" if path.suffix == ".nt" else "turtle"
    return parse(path.read_text("utf-8"), format, prefixes)


def _term_turtle(term, pm: PrefixMap, used: set) -> str:
    if isinstance(term, IRI):
        curie = pm.compact(term)
        if curie is not None:
            used.add(curie.split(":", 1)[0])
            return curie
        return term.n3()
    if isinstance(term, Literal):
        text = '"' + escape_string(term.lexical) + '"'
        if term.lang:
            return f"{text}@{term.lang}"
        if term.datatype == XSD_STRING:
            return text
        return f"{text}^^{_term_turtle(term.datatype, pm, used)}"
    return term.n3()


def serialize(graph: Graph, format: str = "turtle") -> str:
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}")
    if format == "ntriples":
        return "".join(t.n3() + "\n" for t in graph.sorted_triples())
    if not len(graph):
        return ""
    pm = graph.namespaces
    used: set = set()
    by_subject: dict = {}
    for t in graph.sorted_triples():
        by_subject.setdefault(t.subject, {}).setdefault(t.predicate, []).append(t.object)
    blocks = []
    for subj in sorted(by_subject, key=lambda s: s.n3()):
        preds = []
        for pred, objs in by_subject[subj].items():
            p = "a" if pred == RDF_TYPE else _term_turtle(pred, pm, used)
            preds.append(f"{p} " + ", ".join(_term_turtle(o, pm, used) for o in objs))
        blocks.append(_term_turtle(subj, pm, used) + " " + " ;\n    ".join(preds) + " .\n")
    header = "".join(f"@prefix {p}: <{pm[p]}> .\n" for p in sorted(used))
    return header + "\n" + "\n".join(blocks)


def save(graph: Graph, path, format: str | None = None) -> Path:
    path = Path(path)
    if format is None:
        format = "ntriples" if path.suffix == ".nt" else "turtle"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize(graph, format), "utf-8")
    return path


def isomorphic(a: Graph, b: Graph) -> bool:
    """Set equality up to a bijective renaming of blank nodes (small graphs)."""
    if len(a) != len(b):
        return False
    ga = {t for t in a if not any(isinstance(x, BNode) for x in t)}
    gb = {t for t in b if not any(isinstance(x, BNode) for x in t)}
    if ga != gb:
        return False
    ra = [t for t in a if t not in ga]
    rb = [t for t in b if t not in gb]
    ba = sorted({x for t in ra for x in t if isinstance(x, BNode)})
    bb = sorted({x for t in rb for x in t if isinstance(x, BNode)})
    if len(ba) != len(bb):
        return False
    target = set(rb)

    def rename(t, m):
        return Triple(*(m.get(x, x) for x in t))

    def search(i, mapping, used):
        if i == len(ba):
            return {rename(t, mapping) for t in ra} == target
        for cand in bb:
            if cand in used:
                continue
            mapping[ba[i]] = cand
            if search(i + 1, mapping, used | {cand}):
                return True
            del mapping[ba[i]]
        return False

    return search(0, {}, frozenset())
