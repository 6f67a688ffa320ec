"""Line-oriented mapping language: declarations of CSV sources and row->triple rules.

Grammar (one statement per line, ``#`` starts a comment outside quotes)::

    prefix <name>: <namespace-iri>
    source <id> csv "<path>" columns(<col>:<kind>, ...) [streamable]
    rule <id> from <source-id> static|virtual
      subject "<iri-template>"
      type <class>
      po [^]<predicate> <object> [optional]

    <kind>   := text | decimal | boolean | timestamp
    <object> := column(<col>) as iri
              | column(<col>) as literal <datatype>|auto
              | template "<iri-template>"
              | constant <iri>|"<literal>"[^^<datatype>]
              | lookup <source-id>[<key-col>=<col>] <object>

Templates use ``{col}`` placeholders; ``row_id`` is the 0-based row index.
``^`` flips subject and object of the generated triple. ``optional`` skips the
triple when the cell is empty instead of failing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from ..kg.terms import IRI, Literal, PrefixMap, TermError, bundled_prefixes

KINDS = ("text", "decimal", "boolean", "timestamp")
ROW_ID = "row_id"


class MappingError(ValueError):
    """Any mapping failure; carries ``source``/``row`` coordinates where known."""

    def __init__(self, message, source=None, row=None, line=None):
        self.source = source
        self.row = row
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if source is not None:
            where.append(f"source {source}")
        if row is not None:
            where.append(f"row {row}")
        super().__init__((", ".join(where) + ": " if where else "") + message)


class MappingSyntaxError(MappingError):
    pass


class UnknownColumnError(MappingError):
    pass


class UnknownSourceError(MappingError):
    pass


class MalformedTemplateError(MappingError):
    pass


class DatatypeMismatchError(MappingError):
    pass


class TemplateResolutionError(MappingError):
    pass


_PLACEHOLDER = re.compile(r"\{([^{}]*)\}")
_BAD_IRI_CHARS = re.compile(r'[\s<>"{}|^`\\]')


@dataclass(frozen=True)
class Template:
    """An IRI template with its prefix already expanded."""

    text: str
    columns: tuple[str, ...]

    @classmethod
    def compile(cls, raw: str, prefixes: PrefixMap, line=None) -> "Template":
        depth = 0
        for ch in raw:
            depth += {"{": 1, "}": -1}.get(ch, 0)
            if depth not in (0, 1):
                raise MalformedTemplateError(f"unbalanced braces in template {raw!r}", line=line)
        if depth:
            raise MalformedTemplateError(f"unbalanced braces in template {raw!r}", line=line)
        cols = tuple(_PLACEHOLDER.findall(raw))
        for c in cols:
            if not re.fullmatch(r"[A-Za-z_][\w\-.]*", c):
                raise MalformedTemplateError(f"bad placeholder {{{c}}} in {raw!r}", line=line)
        text = raw
        m = re.match(r"^([A-Za-z][\w\-.]*)?:(?!//)", raw)
        if m:
            prefix = m.group(1) or ""
            if prefix not in prefixes:
                raise MalformedTemplateError(f"unknown prefix {prefix!r} in template {raw!r}", line=line)
            text = prefixes[prefix] + raw[m.end():]
        try:
            IRI(_PLACEHOLDER.sub("x", text))
        except TermError:
            raise MalformedTemplateError(f"template {raw!r} does not form an absolute IRI", line=line) from None
        return cls(text, cols)

    def expand(self, row: dict) -> IRI:
        def repl(m):
            value = row.get(m.group(1))
            if value is None or value == "":
                raise TemplateResolutionError(f"empty value for {{{m.group(1)}}}")
            value = str(value)
            if _BAD_IRI_CHARS.search(value):
                raise TemplateResolutionError(f"value {value!r} cannot appear in an IRI")
            return value

        return IRI(_PLACEHOLDER.sub(repl, self.text))

    def invert(self, iri: IRI) -> dict | None:
        """Column values that expand to ``iri``; only for <= 1 placeholder.

        Returns None when inversion is not supported, ``{}`` for a constant
        template that matches, and raises LookupError when nothing can match.
        """
        if len(self.columns) > 1:
            return None
        if not self.columns:
            if iri.value == self.text:
                return {}
            raise LookupError
        head, tail = _PLACEHOLDER.split(self.text)[0], _PLACEHOLDER.split(self.text)[2]
        v = iri.value
        if len(v) <= len(head) + len(tail) or not v.startswith(head) or not v.endswith(tail):
            raise LookupError
        value = v[len(head):len(v) - len(tail)] if tail else v[len(head):]
        if _BAD_IRI_CHARS.search(value):
            raise LookupError
        return {self.columns[0]: value}


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str


@dataclass(frozen=True)
class TableSource:
    id: str
    path: str
    columns: tuple[ColumnSpec, ...]
    streamable: bool = False

    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def kind(self, column: str) -> str:
        for c in self.columns:
            if c.name == column:
                return c.kind
        if column == ROW_ID:
            return "decimal"
        raise KeyError(column)


# -- object maps --

@dataclass(frozen=True)
class ColumnObject:
    column: str
    as_iri: bool = False
    datatype: IRI | None = None  # None with as_iri=False means auto typing

    def columns(self):
        return (self.column,)


@dataclass(frozen=True)
class TemplateObject:
    template: Template

    def columns(self):
        return self.template.columns


@dataclass(frozen=True)
class ConstantObject:
    term: object

    def columns(self):
        return ()


@dataclass(frozen=True)
class LookupObject:
    source_id: str
    key_column: str  # column of the lookup table
    row_column: str  # column of the mapped row
    inner: object  # ColumnObject or TemplateObject over the lookup table

    def columns(self):
        return (self.row_column,)


@dataclass(frozen=True)
class PoMap:
    predicate: IRI
    obj: object
    inverse: bool = False
    optional: bool = False


@dataclass(frozen=True)
class MappingRule:
    id: str
    source_id: str
    subject: Template
    type_assertion: IRI | None = None
    po_maps: tuple[PoMap, ...] = ()
    mode: str = "static"

    def triples_per_row(self) -> int:
        return (1 if self.type_assertion else 0) + len(self.po_maps)


@dataclass
class MappingRuleSet:
    sources: dict = field(default_factory=dict)  # id -> TableSource
    rules: list = field(default_factory=list)
    prefixes: PrefixMap = field(default_factory=bundled_prefixes)
    base_dir: Path | None = None

    def __len__(self):
        return len(self.rules)

    def rules_in(self, modes) -> list[MappingRule]:
        return [r for r in self.rules if r.mode in modes]


# -- parsing --

_TOKEN = re.compile(r'"(?:[^"\\]|\\.)*"(?:\^\^\S+|@[\w\-]+)?|<[^<>\s]*>|\[|\]|=|[^\s\[\]=]+')
_SOURCE = re.compile(
    r'^source\s+(?P<id>[A-Za-z_][\w\-]*)\s+csv\s+"(?P<path>[^"]*)"\s+columns\((?P<cols>[^)]*)\)'
    r'(?:\s+(?P<stream>streamable))?\s*$')
_RULE = re.compile(r"^rule\s+(?P<id>[A-Za-z_][\w\-]*)\s+from\s+(?P<src>[A-Za-z_][\w\-]*)"
                   r"\s+(?P<mode>static|virtual)\s*$")


def _strip_comment(line: str) -> str:
    out, in_str, esc = [], False, False
    for ch in line:
        if in_str:
            out.append(ch)
            if esc:
                esc = False
            elif ch == "\\":
                esc = True
            elif ch == '"':
                in_str = False
        elif ch == '"':
            in_str = True
            out.append(ch)
        elif ch == "#":
            break
        else:
            out.append(ch)
    return "".join(out).rstrip()


class _RuleParser:
    def __init__(self, text: str, base_dir: Path | None = None):
        self.lines = text.splitlines()
        self.rs = MappingRuleSet(base_dir=base_dir)
        self.pm = self.rs.prefixes
        self.current: dict | None = None

    def parse(self) -> MappingRuleSet:
        for lineno, raw in enumerate(self.lines, 1):
            line = _strip_comment(raw)
            if not line.strip():
                continue
            indented = line[:1] in (" ", "\t")
            stripped = line.strip()
            word = stripped.split(None, 1)[0]
            if indented and self.current is not None and word in ("subject", "type", "po"):
                self.rule_line(word, stripped, lineno)
                continue
            self.finish_rule()
            if word == "prefix":
                m = re.match(r"^prefix\s+([A-Za-z][\w\-.]*)?:\s*<([^>]*)>\s*$", stripped)
                if not m:
                    raise MappingSyntaxError("malformed prefix declaration", line=lineno)
                try:
                    self.pm.bind(m.group(1) or "", m.group(2))
                except TermError as e:
                    raise MappingSyntaxError(str(e), line=lineno) from None
            elif word == "source":
                self.source_line(stripped, lineno)
            elif word == "rule":
                m = _RULE.match(stripped)
                if not m:
                    raise MappingSyntaxError("malformed rule header", line=lineno)
                if m.group("src") not in self.rs.sources:
                    raise UnknownSourceError(f"unknown source id {m.group('src')!r}", line=lineno)
                src = self.rs.sources[m.group("src")]
                if m.group("mode") == "virtual" and not src.streamable:
                    raise MappingSyntaxError(f"virtual rule over non-streamable source {src.id!r}", line=lineno)
                if any(r.id == m.group("id") for r in self.rs.rules):
                    raise MappingSyntaxError(f"duplicate rule id {m.group('id')!r}", line=lineno)
                self.current = {"id": m.group("id"), "source": src, "mode": m.group("mode"),
                                "subject": None, "type": None, "po": [], "line": lineno}
            else:
                raise MappingSyntaxError(f"unexpected statement {word!r}", line=lineno)
        self.finish_rule()
        return self.rs

    def source_line(self, stripped: str, lineno: int):
        m = _SOURCE.match(stripped)
        if not m:
            raise MappingSyntaxError("malformed source declaration", line=lineno)
        cols = []
        for part in m.group("cols").split(","):
            part = part.strip()
            cm = re.fullmatch(r"([A-Za-z_][\w\-.]*)\s*:\s*(\w+)", part)
            if not cm:
                raise MappingSyntaxError(f"malformed column declaration {part!r}", line=lineno)
            if cm.group(2) not in KINDS:
                raise MappingSyntaxError(f"unknown column kind {cm.group(2)!r}", line=lineno)
            if cm.group(1) == ROW_ID:
                raise MappingSyntaxError("row_id is reserved", line=lineno)
            cols.append(ColumnSpec(cm.group(1), cm.group(2)))
        names = [c.name for c in cols]
        if len(set(names)) != len(names):
            raise MappingSyntaxError("duplicate column names", line=lineno)
        sid = m.group("id")
        if sid in self.rs.sources:
            raise MappingSyntaxError(f"duplicate source id {sid!r}", line=lineno)
        self.rs.sources[sid] = TableSource(sid, m.group("path"), tuple(cols), bool(m.group("stream")))

    def iri(self, text: str, lineno: int) -> IRI:
        try:
            return self.pm.resolve(text)
        except KeyError as e:
            raise MappingSyntaxError(f"unknown prefix {e.args[0]!r}", line=lineno) from None
        except TermError as e:
            raise MappingSyntaxError(str(e), line=lineno) from None

    def check_columns(self, cols, source: TableSource, lineno):
        for c in cols:
            if c != ROW_ID and c not in source.column_names():
                raise UnknownColumnError(f"unknown column {c!r}", source=source.id, line=lineno)

    def rule_line(self, word: str, stripped: str, lineno: int):
        cur = self.current
        src = cur["source"]
        toks = _TOKEN.findall(stripped)[1:]
        if word == "subject":
            if len(toks) != 1 or not toks[0].startswith('"'):
                raise MappingSyntaxError("subject needs one quoted template", line=lineno)
            tpl = Template.compile(_unquote(toks[0]), self.pm, lineno)
            self.check_columns(tpl.columns, src, lineno)
            cur["subject"] = tpl
        elif word == "type":
            if len(toks) != 1:
                raise MappingSyntaxError("type needs one class IRI", line=lineno)
            cur["type"] = self.iri(toks[0], lineno)
        else:
            if len(toks) < 2:
                raise MappingSyntaxError("po needs a predicate and an object", line=lineno)
            optional = toks[-1] == "optional"
            if optional:
                toks = toks[:-1]
            pred_text = toks[0]
            inverse = pred_text.startswith("^")
            pred = self.iri(pred_text[1:] if inverse else pred_text, lineno)
            obj, rest = self.object_map(toks[1:], src, lineno)
            if rest:
                raise MappingSyntaxError(f"unexpected {' '.join(rest)!r}", line=lineno)
            if inverse and not isinstance(obj, (TemplateObject, LookupObject)) and not (
                    isinstance(obj, ColumnObject) and obj.as_iri) and not (
                    isinstance(obj, ConstantObject) and isinstance(obj.term, IRI)):
                raise MappingSyntaxError("inverse po needs an IRI-valued object", line=lineno)
            cur["po"].append(PoMap(pred, obj, inverse, optional))

    def object_map(self, toks, src: TableSource, lineno):
        if not toks:
            raise MappingSyntaxError("missing object map", line=lineno)
        head = toks[0]
        cm = re.fullmatch(r"column\(\s*([A-Za-z_][\w\-.]*)\s*\)", head)
        if cm:
            col = cm.group(1)
            self.check_columns([col], src, lineno)
            if len(toks) >= 3 and toks[1] == "as" and toks[2] == "iri":
                return ColumnObject(col, as_iri=True), toks[3:]
            if len(toks) >= 4 and toks[1] == "as" and toks[2] == "literal":
                dt = None if toks[3] == "auto" else self.iri(toks[3], lineno)
                return ColumnObject(col, datatype=dt), toks[4:]
            raise MappingSyntaxError("column object needs 'as iri' or 'as literal <datatype>|auto'", line=lineno)
        if head == "template":
            if len(toks) < 2 or not toks[1].startswith('"'):
                raise MappingSyntaxError("template needs a quoted IRI template", line=lineno)
            tpl = Template.compile(_unquote(toks[1]), self.pm, lineno)
            self.check_columns(tpl.columns, src, lineno)
            return TemplateObject(tpl), toks[2:]
        if head == "constant":
            if len(toks) < 2:
                raise MappingSyntaxError("constant needs a term", line=lineno)
            return ConstantObject(self.constant(toks[1], lineno)), toks[2:]
        if head == "lookup":
            # lookup <src> [ <key> = <col> ] <object>
            if len(toks) < 7 or toks[2] != "[" or toks[4] != "=" or toks[6] != "]":
                raise MappingSyntaxError("lookup syntax is: lookup <source>[<key>=<column>] <object>", line=lineno)
            lsrc_id = toks[1]
            lsrc = self.rs.sources.get(lsrc_id)
            if lsrc is None:
                raise UnknownSourceError(f"unknown source id {lsrc_id!r}", line=lineno)
            self.check_columns([toks[3]], lsrc, lineno)
            self.check_columns([toks[5]], src, lineno)
            inner, rest = self.object_map(toks[7:], lsrc, lineno)
            if not isinstance(inner, (ColumnObject, TemplateObject)):
                raise MappingSyntaxError("lookup object must be a column or template map", line=lineno)
            return LookupObject(lsrc_id, toks[3], toks[5], inner), rest
        raise MappingSyntaxError(f"unknown object map {head!r}", line=lineno)

    def constant(self, text: str, lineno: int):
        if text.startswith('"'):
            m = re.fullmatch(r'("(?:[^"\\]|\\.)*")(?:\^\^(\S+)|@([\w\-]+))?', text)
            if not m:
                raise MappingSyntaxError(f"malformed literal {text!r}", line=lineno)
            lexical = _unquote(m.group(1))
            if m.group(2):
                return Literal(lexical, self.iri(m.group(2), lineno))
            if m.group(3):
                return Literal(lexical, lang=m.group(3))
            return Literal(lexical)
        return self.iri(text, lineno)

    def finish_rule(self):
        cur = self.current
        if cur is None:
            return
        self.current = None
        if cur["subject"] is None:
            raise MappingSyntaxError(f"rule {cur['id']} has no subject", line=cur["line"])
        self.rs.rules.append(MappingRule(cur["id"], cur["source"].id, cur["subject"], cur["type"],
                                         tuple(cur["po"]), cur["mode"]))


def _unquote(token: str) -> str:
    body = token[1:-1]
    return re.sub(r"\\(.)", r"\1", body)


def parse_rules_text(text: str, base_dir=None) -> MappingRuleSet:
    return _RuleParser(text, Path(base_dir) if base_dir else None).parse()


def parse_rules(path) -> MappingRuleSet:
    path = Path(path)
    return parse_rules_text(path.read_text("utf-8"), base_dir=path.parent)
