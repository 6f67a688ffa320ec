"""Independent reference implementations the library is checked against.

Nothing here imports the query engine, the reasoner or the mapping engine;
only the term classes are shared.
"""

import csv
import itertools
import random
import re
from collections import Counter
from decimal import Decimal
from pathlib import Path

from ontodm.kg.terms import IRI, XSD, BNode, Literal, Triple, Variable

EX = "http://example.org/t#"
RDF_TYPE = IRI("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
SC = IRI("http://www.w3.org/2000/01/rdf-schema#subClassOf")
SP = IRI("http://www.w3.org/2000/01/rdf-schema#subPropertyOf")
DOM = IRI("http://www.w3.org/2000/01/rdf-schema#domain")
RNG = IRI("http://www.w3.org/2000/01/rdf-schema#range")
XSD_INT = IRI(XSD + "integer")
XSD_DEC = IRI(XSD + "decimal")
XSD_STR = IRI(XSD + "string")


def ex(name):
    return IRI(EX + name)


# -- random BGP queries --

SUBJECTS = [ex(f"s{i}") for i in range(5)]
PREDICATES = [ex(f"p{i}") for i in range(3)]
LITERALS = [Literal("1", XSD_INT), Literal("2", XSD_INT), Literal("2.0", XSD_DEC),
            Literal("3", XSD_INT), Literal("a"), Literal("b")]
VARS = ["x", "y", "z"]


def random_graph(rng, max_triples=60):
    n = rng.randint(0, max_triples)
    triples = set()
    for _ in range(n):
        o = rng.choice(SUBJECTS + LITERALS)
        triples.add(Triple(rng.choice(SUBJECTS), rng.choice(PREDICATES), o))
    return triples


def random_query(rng, triples=(), max_patterns=4):
    """A random query as (text, structure). The structure feeds the oracle.

    Patterns are mostly built from a connected walk over ``triples`` with a
    few terms replaced by variables, so that many queries have answers.
    """
    pool = sorted(triples, key=lambda t: t.n3())
    n = rng.randint(1, max_patterns)
    walk = []
    for _ in range(n):
        seen = {x for t in walk for x in (t[0], t[2])}
        linked = [t for t in pool if t[0] in seen or t[2] in seen]
        if pool and rng.random() < 0.85:
            walk.append(rng.choice(linked if linked and rng.random() < 0.8 else pool))
        else:
            walk.append((rng.choice(SUBJECTS), rng.choice(PREDICATES), rng.choice(SUBJECTS + LITERALS)))
    terms = sorted({x for t in walk for x in t}, key=lambda x: x.n3())
    chosen = rng.sample(terms, min(len(terms), rng.randint(1, 3)))
    names = dict(zip(chosen, rng.sample(VARS, len(chosen))))
    patterns = []
    for t in walk:
        patterns.append(tuple(Variable(names[x]) if x in names and rng.random() < 0.9 else x for x in t))
    in_patterns = sorted({t.name for pat in patterns for t in pat if isinstance(t, Variable)})
    values = None
    if in_patterns and rng.random() < 0.3:
        v = rng.choice(in_patterns)
        rows = [(rng.choice(terms + SUBJECTS + LITERALS),) for _ in range(rng.randint(1, 3))]
        values = ((v,), rows)
    filters = []
    if in_patterns and rng.random() < 0.3:
        v = rng.choice(in_patterns)
        op = rng.choice(["=", "!=", "<", "<=", ">", ">="])
        if rng.random() < 0.5:
            rhs = rng.choice(terms + LITERALS + SUBJECTS[:2])
        else:
            rhs = Variable(rng.choice(in_patterns))
        filters.append((Variable(v), op, rhs))
    select = None
    if in_patterns and rng.random() < 0.5:
        select = rng.sample(in_patterns, rng.randint(1, len(in_patterns)))
    order = None
    if in_patterns and rng.random() < 0.3:
        order = (rng.choice(in_patterns), rng.random() < 0.5)
    limit = rng.randint(1, 5) if rng.random() < 0.2 else None

    head = "SELECT " + (" ".join("?" + v for v in select) if select else "*")
    body = " ".join(f"{s.n3()} {p.n3()} {o.n3()} ." for s, p, o in patterns)
    if values:
        (v,), rows = values
        body += f" VALUES ?{v} {{ " + " ".join(r[0].n3() for r in rows) + " }"
    for lhs, op, rhs in filters:
        body += f" FILTER({lhs.n3()} {op} {rhs.n3()})"
    text = f"{head} WHERE {{ {body} }}"
    if order:
        text += f" ORDER BY {'ASC' if order[1] else 'DESC'}(?{order[0]})"
    if limit is not None:
        text += f" LIMIT {limit}"
    structure = dict(patterns=patterns, values=values, filters=filters, select=select,
                     order=order, limit=limit, variables=in_patterns)
    return text, structure


def _value(term):
    if isinstance(term, Literal):
        if term.datatype in (XSD_INT, XSD_DEC):
            return ("num", Decimal(term.lexical))
        if term.datatype == XSD_STR:
            return ("str", term.lexical)
        return None
    return ("res", term)


def oracle_compare(a, op, b):
    if a is None or b is None:
        return False
    va, vb = _value(a), _value(b)
    if va is None or vb is None or va[0] != vb[0]:
        return False
    if va[0] == "res":
        if type(a) is not type(b) or op not in ("=", "!="):
            return False
        return (a == b) == (op == "=")
    x, y = va[1], vb[1]
    return {"=": x == y, "!=": x != y, "<": x < y, "<=": x <= y, ">": x > y, ">=": x >= y}[op]


def brute_force_bgp(triples, structure):
    """Rows (as dicts) by trying every assignment of graph terms to the pattern variables."""
    triples = set(triples)
    domain = sorted({t for tr in triples for t in tr}, key=lambda t: (type(t).__name__, str(t)))
    names = structure["variables"]
    rows = []
    for combo in itertools.product(domain, repeat=len(names)):
        env = dict(zip(names, combo))
        ok = True
        for pat in structure["patterns"]:
            ground = tuple(env[t.name] if isinstance(t, Variable) else t for t in pat)
            if ground not in triples:
                ok = False
                break
        if ok:
            rows.append(env)
    if structure["values"]:
        (v,), vrows = structure["values"]
        rows = [env for env in rows for (k,) in vrows if env[v] == k]
    for lhs, op, rhs in structure["filters"]:
        rows = [env for env in rows
                if oracle_compare(env[lhs.name], op, env[rhs.name] if isinstance(rhs, Variable) else rhs)]
    cols = structure["select"] or names
    return [tuple(env.get(c) for c in cols) for env in rows], cols


def multiset(rows):
    return Counter(tuple(r) for r in rows)


# -- RDFS closure --

def naive_closure(triples):
    """Apply all six rules to the whole graph until nothing new appears."""
    g = set(triples)
    while True:
        new = set()
        by_p = {}
        for t in g:
            by_p.setdefault(t.predicate, []).append(t)
        sc = by_p.get(SC, [])
        sp = by_p.get(SP, [])
        for a in sc:
            for b in sc:
                if a.object == b.subject:
                    new.add(Triple(a.subject, SC, b.object))
        for a in sp:
            for b in sp:
                if a.object == b.subject:
                    new.add(Triple(a.subject, SP, b.object))
        for t in by_p.get(RDF_TYPE, []):
            for c in sc:
                if t.object == c.subject:
                    new.add(Triple(t.subject, RDF_TYPE, c.object))
        for rel in sp:
            if isinstance(rel.object, IRI):
                for t in by_p.get(rel.subject, []):
                    new.add(Triple(t.subject, rel.object, t.object))
        for d in by_p.get(DOM, []):
            for t in by_p.get(d.subject, []):
                new.add(Triple(t.subject, RDF_TYPE, d.object))
        for r in by_p.get(RNG, []):
            for t in by_p.get(r.subject, []):
                if not isinstance(t.object, Literal):
                    new.add(Triple(t.object, RDF_TYPE, r.object))
        if new <= g:
            return g
        g |= new


def random_schema_graph(rng, max_triples=200):
    classes = [ex(f"C{i}") for i in range(6)]
    props = [ex(f"q{i}") for i in range(4)]
    things = [ex(f"i{i}") for i in range(6)] + [BNode("b0"), BNode("b1")]
    lits = [Literal("v"), Literal("7", XSD_INT)]
    triples = set()
    for _ in range(rng.randint(0, max_triples)):
        kind = rng.random()
        if kind < 0.2:
            triples.add(Triple(rng.choice(classes), SC, rng.choice(classes)))
        elif kind < 0.35:
            triples.add(Triple(rng.choice(props), SP, rng.choice(props)))
        elif kind < 0.45:
            triples.add(Triple(rng.choice(props), rng.choice([DOM, RNG]), rng.choice(classes)))
        elif kind < 0.6:
            triples.add(Triple(rng.choice(things), RDF_TYPE, rng.choice(classes)))
        else:
            triples.add(Triple(rng.choice(things), rng.choice(props), rng.choice(things + lits)))
    return triples


# -- raw CSV reading for the sensor log --

_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")


def read_csv(path):
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def exploration_rows_from_csv(data_dir, foi="mixer_partial0.tank_B201", ns="http://example.org/ModVA#"):
    """What the exploration query should return, computed straight from the CSV files."""
    tags = {r["tag"]: r for r in read_csv(Path(data_dir) / "tags.csv") if r["foi"] == foi}
    rows = []
    for rec in read_csv(Path(data_dir) / "sensor_log.csv"):
        meta = tags.get(rec["tag"])
        if meta is None:
            continue
        value = rec["value"]
        if value in ("true", "false"):
            result = (value, "boolean")
        else:
            assert _NUMBER.match(value), value
            result = (value, "decimal")
        rows.append(((rec["timestamp"], "dateTime"), result, ns + rec["tag"],
                     ns + meta["property"], ns + meta["foi"]))
    return rows


def term_signature(term):
    if isinstance(term, Literal):
        return (term.lexical, term.datatype.value.rsplit("#", 1)[1])
    return str(term)


def seeded(seed):
    return random.Random(seed)
