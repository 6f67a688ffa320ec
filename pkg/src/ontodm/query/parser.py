"""Parser for the SELECT subset of SPARQL used for plant data exploration.

Supported: ``PREFIX`` declarations, ``SELECT ?v ... | *``, basic graph
patterns with ``;``/``,`` abbreviations and the ``a`` keyword, one
``VALUES`` block (single or multi variable), ``FILTER(x op y)`` with
``= != < <= > >=``, ``ORDER BY [ASC|DESC](?v)`` and ``LIMIT n``.
Anything else is a syntax error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..kg.lexer import Lexer, SyntaxErrorAt, Token, unquote
from ..kg.terms import (IRI, RDF_TYPE, XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER,
                        Literal, PrefixError, PrefixMap, TermError, TriplePattern, Variable,
                        bundled_prefixes)

COMPARISON_OPS = ("=", "!=", "<", "<=", ">", ">=")


class QuerySyntaxError(SyntaxErrorAt):
    pass


class UnknownPrefixError(QuerySyntaxError):
    pass


@dataclass(frozen=True)
class Comparison:
    lhs: object  # Variable or Term
    op: str
    rhs: object

    def variables(self) -> list[str]:
        return [x.name for x in (self.lhs, self.rhs) if isinstance(x, Variable)]


@dataclass(frozen=True)
class ValuesClause:
    variables: tuple[str, ...]
    rows: tuple[tuple, ...]


@dataclass
class Query:
    select: tuple[str, ...] | None  # None means SELECT *
    where: list[TriplePattern]
    values: ValuesClause | None = None
    filters: list[Comparison] = field(default_factory=list)
    order_by: tuple[str, bool] | None = None  # (variable, ascending)
    limit: int | None = None

    def pattern_variables(self) -> list[str]:
        seen: list[str] = []
        for pat in self.where:
            for name in pat.variables():
                if name not in seen:
                    seen.append(name)
        if self.values:
            for name in self.values.variables:
                if name not in seen:
                    seen.append(name)
        return seen

    def projection(self) -> list[str]:
        if self.select is None:
            return [v for v in self.pattern_variables() if not v.startswith("_:")]
        return list(self.select)


class _QueryParser:
    def __init__(self, text: str, prefixes: PrefixMap):
        self.lexer = Lexer(text)
        try:
            self.toks = self.lexer.tokens()
        except SyntaxErrorAt as e:
            raise QuerySyntaxError(e.message, e.line, e.column) from None
        self.i = 0
        self.prefixes = prefixes

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, message=None, expected=(), tok=None, cls=QuerySyntaxError):
        tok = tok or self.tok
        if message is None:
            message = f"unexpected {tok.text!r}" if tok.kind != "EOF" else "unexpected end of query"
        line, col = self.lexer.position(tok.pos)
        return cls(message, line, col, expected)

    def is_kw(self, word: str) -> bool:
        return self.tok.kind == "NAME" and self.tok.text.upper() == word

    def expect_kw(self, word: str):
        if not self.is_kw(word):
            raise self.fail(expected=[word])
        return self.take()

    def is_punct(self, ch: str) -> bool:
        return self.tok.kind == "PUNCT" and self.tok.text == ch

    def expect_punct(self, ch: str):
        if not self.is_punct(ch):
            raise self.fail(expected=[repr(ch)])
        return self.take()

    # -- terms --
    def iri(self, tok: Token) -> IRI:
        try:
            if tok.kind == "IRI":
                return IRI(tok.text[1:-1])
            return self.prefixes.expand(tok.text)
        except PrefixError as e:
            raise self.fail(f"unknown prefix {e.args[0]!r}", tok=tok, cls=UnknownPrefixError) from None
        except TermError as e:
            raise self.fail(str(e), tok=tok) from None

    def var_or_term(self, allow_literal=True, allow_a=False):
        tok = self.tok
        if tok.kind == "VAR":
            self.take()
            return Variable(tok.text[1:])
        if tok.kind in ("IRI", "PNAME"):
            self.take()
            return self.iri(tok)
        if tok.kind == "BNODE":
            self.take()
            return Variable("_:" + tok.text[2:])
        if allow_a and tok.kind == "NAME" and tok.text == "a":
            self.take()
            return RDF_TYPE
        if allow_literal:
            lit = self.literal()
            if lit is not None:
                return lit
        expected = ["?var", "<iri>", "prefix:name"] + (["literal"] if allow_literal else []) + (["a"] if allow_a else [])
        raise self.fail(expected=expected)

    def literal(self):
        tok = self.tok
        if tok.kind == "STRING":
            self.take()
            lexical = unquote(tok.text)
            if self.tok.kind == "LANG":
                return Literal(lexical, lang=self.take().text[1:])
            if self.tok.kind == "DTYPE":
                self.take()
                dt = self.tok
                if dt.kind not in ("IRI", "PNAME"):
                    raise self.fail(expected=["<iri>", "prefix:name"])
                self.take()
                return Literal(lexical, self.iri(dt))
            return Literal(lexical)
        if tok.kind == "NUMBER":
            self.take()
            if "e" in tok.text.lower():
                return Literal(tok.text, XSD_DOUBLE)
            return Literal(tok.text, XSD_DECIMAL if "." in tok.text else XSD_INTEGER)
        if tok.kind == "NAME" and tok.text in ("true", "false"):
            self.take()
            return Literal(tok.text, XSD_BOOLEAN)
        return None

    # -- grammar --
    def parse(self) -> Query:
        while self.is_kw("PREFIX"):
            self.take()
            name = self.take()
            if name.kind != "PNAME" or not name.text.endswith(":") or name.text.count(":") != 1:
                raise self.fail(expected=["prefix:"], tok=name)
            ns = self.take()
            if ns.kind != "IRI":
                raise self.fail(expected=["<iri>"], tok=ns)
            self.prefixes.bind(name.text[:-1], ns.text[1:-1])
        self.expect_kw("SELECT")
        select: list[str] | None
        if self.is_punct("*"):
            self.take()
            select = None
        else:
            select = []
            while self.tok.kind == "VAR":
                name = self.take().text[1:]
                if name in select:
                    raise self.fail(f"duplicate projection variable ?{name}", tok=self.toks[self.i - 1])
                select.append(name)
            if not select:
                raise self.fail(expected=["?var", "*"])
        if self.is_kw("WHERE"):
            self.take()
        self.expect_punct("{")
        query = Query(tuple(select) if select is not None else None, [])
        self.group(query)
        self.expect_punct("}")
        if self.is_kw("ORDER"):
            self.take()
            self.expect_kw("BY")
            query.order_by = self.order_key()
        if self.is_kw("LIMIT"):
            self.take()
            tok = self.tok
            if tok.kind != "NUMBER" or not tok.text.isdigit() or int(tok.text) < 1:
                raise self.fail("LIMIT needs a positive integer", expected=["integer"])
            self.take()
            query.limit = int(tok.text)
        if self.tok.kind != "EOF":
            raise self.fail(expected=["ORDER BY", "LIMIT", "end of query"])
        self.check_scope(query)
        return query

    def order_key(self):
        if self.is_kw("ASC") or self.is_kw("DESC"):
            asc = self.take().text.upper() == "ASC"
            self.expect_punct("(")
            if self.tok.kind != "VAR":
                raise self.fail(expected=["?var"])
            name = self.take().text[1:]
            self.expect_punct(")")
            return (name, asc)
        if self.tok.kind == "VAR":
            return (self.take().text[1:], True)
        raise self.fail(expected=["?var", "ASC", "DESC"])

    def group(self, query: Query):
        while not self.is_punct("}"):
            if self.tok.kind == "EOF":
                raise self.fail(expected=["'}'"])
            if self.is_kw("VALUES"):
                if query.values is not None:
                    raise self.fail("only one VALUES block is supported")
                self.take()
                query.values = self.values_block()
            elif self.is_kw("FILTER"):
                self.take()
                query.filters.append(self.filter_expr())
            elif self.is_kw("OPTIONAL") or self.is_kw("UNION") or self.is_kw("BIND") or self.is_kw("GRAPH") \
                    or self.is_kw("MINUS") or self.is_punct("{"):
                raise self.fail(f"unsupported construct {self.tok.text!r}")
            else:
                self.triples_block(query)
            if self.is_punct("."):
                self.take()

    def triples_block(self, query: Query):
        subj = self.var_or_term(allow_literal=False)
        while True:
            pred = self.var_or_term(allow_literal=False, allow_a=True)
            while True:
                obj = self.var_or_term()
                query.where.append(TriplePattern(subj, pred, obj))
                if self.is_punct(","):
                    self.take()
                    continue
                break
            if self.is_punct(";"):
                self.take()
                if self.is_punct(".") or self.is_punct("}"):
                    return
                continue
            return

    def values_block(self) -> ValuesClause:
        multi = self.is_punct("(")
        names: list[str] = []
        if multi:
            self.take()
            while self.tok.kind == "VAR":
                names.append(self.take().text[1:])
            self.expect_punct(")")
        elif self.tok.kind == "VAR":
            names.append(self.take().text[1:])
        if not names:
            raise self.fail(expected=["?var", "("])
        self.expect_punct("{")
        rows = []
        while not self.is_punct("}"):
            if multi:
                self.expect_punct("(")
                row = []
                while not self.is_punct(")"):
                    row.append(self.data_value())
                self.take()
                if len(row) != len(names):
                    raise self.fail(f"VALUES row has {len(row)} values for {len(names)} variables",
                                    tok=self.toks[self.i - 1])
                rows.append(tuple(row))
            else:
                rows.append((self.data_value(),))
        self.take()
        return ValuesClause(tuple(names), tuple(rows))

    def data_value(self):
        tok = self.tok
        if tok.kind in ("IRI", "PNAME"):
            self.take()
            return self.iri(tok)
        lit = self.literal()
        if lit is None:
            raise self.fail(expected=["<iri>", "prefix:name", "literal"])
        return lit

    def filter_expr(self) -> Comparison:
        self.expect_punct("(")
        lhs = self.var_or_term()
        if self.tok.kind != "OP" or self.tok.text not in COMPARISON_OPS:
            raise self.fail(expected=list(COMPARISON_OPS))
        op = self.take().text
        rhs = self.var_or_term()
        self.expect_punct(")")
        return Comparison(lhs, op, rhs)

    def check_scope(self, query: Query):
        known = set(query.pattern_variables())
        used = list(query.select or ())
        for f in query.filters:
            used.extend(f.variables())
        if query.order_by:
            used.append(query.order_by[0])
        for name in used:
            if name not in known:
                raise QuerySyntaxError(f"variable ?{name} does not occur in the query pattern", 1, 1)
        if not query.where and query.values is None:
            raise QuerySyntaxError("empty WHERE clause", 1, 1)


def parse_query(text: str, prefixes: PrefixMap | None = None) -> Query:
    """Parse query text; the bundled prefixes are always in scope."""
    pm = (prefixes if prefixes is not None else bundled_prefixes()).copy()
    return _QueryParser(text, pm).parse()
